#pragma once

#include <cmath>
#include <sstream>

#include "biofilm/errors.hpp"

namespace biofilm {

// Density-dependent biomass diffusivity M^b / (1-M)^a.
//
// The factor (1-M)^(-a) is singular at M = 1 only when a > 0, so the strict
// upper check applies only then; with a = 0 the factor is identically 1 and
// M = 1 (or beyond, transiently, in an iterative solver) is admitted.
inline double diffusivity(double M, double a, double b) {
    if (M < 0) {
        std::ostringstream os;
        os << "diffusivity needs M >= 0, got M = " << M;
        throw domain_error(os.str());
    }
    if (a > 0) {
        if (M >= 1) {
            std::ostringstream os;
            os << "diffusivity singular at M = " << M << " (requires M < 1 when a > 0)";
            throw singularity_error(os.str());
        }
        return std::pow(M, b) / std::pow(1.0 - M, a);
    }
    return std::pow(M, b);
}

// Monod-limited reaction rate S*M/(K4+S).
inline double monod(double S, double M, double K4) {
    const double den = K4 + S;
    if (den <= 0) {
        std::ostringstream os;
        os << "monod denominator K4+S = " << den << " must be positive";
        throw domain_error(os.str());
    }
    return S * M / den;
}

} // namespace biofilm
