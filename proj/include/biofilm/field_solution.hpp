#pragma once

#include <vector>

#include "biofilm/grid.hpp"

namespace biofilm {

// Discrete (S, M) fields on a Grid. Storage is level-major: values for one
// time level are contiguous. Boundary columns hold the imposed mu data.
struct FieldSolution {
    Grid grid;
    std::vector<double> S_data;
    std::vector<double> M_data;

    explicit FieldSolution(const Grid& g)
        : grid(g),
          S_data(static_cast<std::size_t>(g.I) * g.N, 0.0),
          M_data(static_cast<std::size_t>(g.I) * g.N, 0.0) {}

    double& S(int i, int n) { return S_data[idx(i, n)]; }
    double& M(int i, int n) { return M_data[idx(i, n)]; }
    double S(int i, int n) const { return S_data[idx(i, n)]; }
    double M(int i, int n) const { return M_data[idx(i, n)]; }

private:
    std::size_t idx(int i, int n) const {
        return static_cast<std::size_t>(n) * grid.I + i;
    }
};

} // namespace biofilm
