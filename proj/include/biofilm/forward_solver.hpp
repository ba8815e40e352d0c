#pragma once

#include <vector>

#include "biofilm/field_solution.hpp"
#include "biofilm/grid.hpp"
#include "biofilm/manufactured.hpp"
#include "biofilm/params.hpp"
#include "biofilm/problem_data.hpp"

namespace biofilm {

// Both fields at one time level (I values each, boundary nodes included).
struct LevelPair {
    std::vector<double> S, M;
};

// Explicit Euler start of the march: from the initial profiles, compute the
// second time level (index 1). The biomass diffusion is applied in flux form
// with the same face-averaged diffusivity the implicit steps use; boundary
// entries are set from the mu data at t(1).
LevelPair first_step(const ParamVector& params, const Grid& grid,
                     const ProblemData& data);

// One step of the linearly implicit three-level scheme: given levels n-1
// (`prev`) and n (`mid`), return level n+1. The diffusion terms average the
// three levels, the nonlinear face coefficients and reaction terms are frozen
// at level n, so the step costs two tridiagonal solves. Requires 1 <= n <=
// N-2. The substrate matrix is factored per call here; solve_forward factors
// it once for the whole march.
LevelPair step_three_level(const ParamVector& params, const Grid& grid,
                           const ProblemData& data, int n,
                           const LevelPair& prev, const LevelPair& mid);

// March the coupled system over the full grid and return every time level.
// Throws blowup_error if |S| or |M| exceeds 1e6 and singularity_error if the
// biomass diffusivity is evaluated at M >= 1 with a > 0.
FieldSolution solve_forward(const ParamVector& params, const Grid& grid,
                            const ProblemData& data);

struct ConvergenceRow {
    double h;        // grid spacing (space and time)
    double err_S;    // max |numeric - exact| over the whole space-time lattice
    double err_M;
    double order_S;  // step-to-step order vs the previous row (NaN on row 0)
    double order_M;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    double lsq_order_S; // least-squares slope of log(err) vs log(h)
    double lsq_order_M;
};

// Solve a manufactured case on square grids (dx = dt = h) and tabulate errors
// against the exact fields. `hs` must be positive and strictly decreasing.
ConvergenceStudy convergence_study(const ManufacturedCase& mcase,
                                   const std::vector<double>& hs);

} // namespace biofilm
