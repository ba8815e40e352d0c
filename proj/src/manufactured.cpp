#include "biofilm/manufactured.hpp"

#include <cmath>

namespace biofilm {

namespace {
inline double hump(double x) { return x * (1.0 - x); }
}

ManufacturedCase example1() {
    ManufacturedCase c{
        .name = "example1",
        .params = ParamVector(1, 1, 1, 1, 1, 1, 1, 2),
        .final_time = 1.0,
        .data = {},
        .exact_S = {},
        .exact_M = {},
        .dS_dt = {},
        .dM_dt = {},
        .dS_dx = {},
        .dM_dx = {},
        .d2S_dx2 = {},
        .d2M_dx2 = {},
        .exact_flux = {},
        .exact_biomass = {},
        .m_attains_one = false,
    };

    c.data.mu1 = [](double) { return 1.0; };
    c.data.mu2 = [](double) { return 1.0; };
    c.data.mu3 = [](double) { return 0.0; };
    c.data.mu4 = [](double) { return 0.0; };
    c.data.S0 = [](double x) { return 1.0 + hump(x); };
    c.data.M0 = [](double x) { return hump(x); };

    c.data.F = [](double x, double t) {
        const double w = hump(x);
        return w + 2.0 * (t + 1.0) +
               (1.0 + w * (t + 1.0)) * w * std::exp(-t) / (2.0 + (t + 1.0) * w);
    };
    c.data.G = [](double x, double t) {
        const double w = hump(x);
        const double e = std::exp(-t);
        const double den = 1.0 - w * e;
        const double dw = 1.0 - 2.0 * x; // w'(x)
        return -dw * dw * w * w * std::exp(-4.0 * t) / (den * den) -
               2.0 * w * (1.0 - 5.0 * x + 5.0 * x * x) * std::exp(-3.0 * t) / den -
               (1.0 + w * (t + 1.0)) * w * e / (2.0 + w * (t + 1.0));
    };

    c.exact_S = [](double x, double t) { return 1.0 + hump(x) * (t + 1.0); };
    c.exact_M = [](double x, double t) { return hump(x) * std::exp(-t); };
    c.dS_dt = [](double x, double) { return hump(x); };
    c.dM_dt = [](double x, double t) { return -hump(x) * std::exp(-t); };
    c.dS_dx = [](double x, double t) { return (1.0 - 2.0 * x) * (t + 1.0); };
    c.dM_dx = [](double x, double t) { return (1.0 - 2.0 * x) * std::exp(-t); };
    c.d2S_dx2 = [](double, double t) { return -2.0 * (t + 1.0); };
    c.d2M_dx2 = [](double, double t) { return -2.0 * std::exp(-t); };

    c.exact_flux = [](double t) { return -(t + 1.0); };
    c.exact_biomass = [](double t) { return std::exp(-t) / 6.0; };
    return c;
}

ManufacturedCase example2() {
    ManufacturedCase c{
        .name = "example2",
        .params = ParamVector(1, 1, 1, 0, 1, 1, 0, 1),
        .final_time = 1.0,
        .data = {},
        .exact_S = {},
        .exact_M = {},
        .dS_dt = {},
        .dM_dt = {},
        .dS_dx = {},
        .dM_dx = {},
        .d2S_dx2 = {},
        .d2M_dx2 = {},
        .exact_flux = {},
        .exact_biomass = {},
        .m_attains_one = true,
    };

    auto M = [](double x, double t) { return 4.0 * hump(x) * t * std::exp(1.0 - t); };

    c.data.mu1 = [](double) { return 1.0; };
    c.data.mu2 = [](double) { return 1.0; };
    c.data.mu3 = [](double) { return 0.0; };
    c.data.mu4 = [](double) { return 0.0; };
    c.data.S0 = [](double) { return 1.0; };
    c.data.M0 = [](double) { return 0.0; };

    c.data.F = [M](double x, double t) {
        const double w = hump(x);
        const double e = std::exp(1.0 - t);
        return 2.0 * e *
               (-4.0 * t + 2.0 * w * (t - 1.0) +
                (1.0 - M(x, t)) * w * t / (1.0 - 2.0 * w * t * e));
    };
    c.data.G = [M](double x, double t) {
        const double w = hump(x);
        const double e = std::exp(1.0 - t);
        return 2.0 * e *
               (2.0 * w * (1.0 - t) + 8.0 * t * t * e * (6.0 * w - 1.0) -
                (1.0 - M(x, t)) * w * t / (1.0 - 2.0 * w * t * e));
    };

    c.exact_M = M;
    c.exact_S = [M](double x, double t) { return 1.0 - M(x, t); };
    c.dM_dt = [](double x, double t) {
        return 4.0 * hump(x) * std::exp(1.0 - t) * (1.0 - t);
    };
    c.dS_dt = [f = c.dM_dt](double x, double t) { return -f(x, t); };
    c.dM_dx = [](double x, double t) {
        return 4.0 * (1.0 - 2.0 * x) * t * std::exp(1.0 - t);
    };
    c.dS_dx = [f = c.dM_dx](double x, double t) { return -f(x, t); };
    c.d2M_dx2 = [](double, double t) { return -8.0 * t * std::exp(1.0 - t); };
    c.d2S_dx2 = [](double, double t) { return 8.0 * t * std::exp(1.0 - t); };

    c.exact_flux = [](double t) { return 4.0 * t * std::exp(1.0 - t); };
    // No closed-form biomass is carried for this case.
    return c;
}

MeasurementSet exact_measurements(const ManufacturedCase& mcase,
                                  const Grid& grid, bool with_biomass) {
    if (with_biomass && !mcase.exact_biomass)
        throw contract_error("case \"" + mcase.name +
                             "\" has no closed-form biomass");
    MeasurementSet set;
    set.provenance = Provenance::synthetic_exact;
    set.times.reserve(grid.N);
    set.flux.reserve(grid.N);
    for (int n = 0; n < grid.N; ++n) {
        const double t = grid.t(n);
        set.times.push_back(t);
        set.flux.push_back(mcase.exact_flux(t));
        if (with_biomass)
            set.biomass.push_back((*mcase.exact_biomass)(t));
    }
    set.validate();
    return set;
}

} // namespace biofilm
