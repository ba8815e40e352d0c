#pragma once

#include "biofilm/errors.hpp"

namespace biofilm {

// Uniform space-time grid on [0,1] x [0,T]: I nodes in x, N levels in t.
// Node coordinates are x(i) = i/(I-1) and t(n) = T*n/(N-1), 0-based,
// so both endpoints are met exactly.
struct Grid {
    int I;
    int N;
    double T;

    Grid(int I_, int N_, double T_) : I(I_), N(N_), T(T_) {
        if (I <= 2) throw domain_error("grid needs I > 2 spatial nodes");
        if (N <= 2) throw domain_error("grid needs N > 2 time levels");
        if (!(T > 0)) throw domain_error("grid needs final time T > 0");
    }

    double dx() const { return 1.0 / (I - 1); }
    double dt() const { return T / (N - 1); }
    double x(int i) const { return static_cast<double>(i) / (I - 1); }
    double t(int n) const { return T * static_cast<double>(n) / (N - 1); }
};

// Grid with dx = dt = h on [0,1] x [0,T]; h must divide both extents evenly.
inline Grid square_grid(double h, double T = 1.0) {
    if (!(h > 0)) throw domain_error("mesh width must be positive");
    int I = static_cast<int>(1.0 / h + 0.5) + 1;
    int N = static_cast<int>(T / h + 0.5) + 1;
    return Grid(I, N, T);
}

} // namespace biofilm
