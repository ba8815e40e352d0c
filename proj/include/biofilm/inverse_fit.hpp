#pragma once

#include <array>
#include <string>
#include <vector>

#include "biofilm/grid.hpp"
#include "biofilm/observables.hpp"
#include "biofilm/params.hpp"
#include "biofilm/problem_data.hpp"

namespace biofilm {

// Which misfit blocks enter the objective.
enum class ObjectiveFlavor { flux_only, flux_and_biomass };

// A bounded least-squares problem: recover the unknown components of the
// parameter vector from measured observables, with everything else pinned.
//
// `reference` supplies the values of pinned components (unknown slots of it
// are ignored). Measurement times must coincide with grid time levels. With
// `k2_reduced`, every evaluation substitutes K2 = k2_reduction(K3, K4), so K2
// must not be marked unknown.
struct FitProblem {
    Grid grid;
    ProblemData data;
    MeasurementSet measurements;
    ObjectiveFlavor flavor = ObjectiveFlavor::flux_only;
    std::array<bool, 8> unknown{};
    std::array<double, 8> reference{};
    std::array<double, 8> lower = default_lower();
    std::array<double, 8> upper = default_upper();
    bool k2_reduced = false;

    // The documented simple bounds: 1e-10 below (0 for K2 and a, 1 for b),
    // 1e10 above, in canonical order (d1,d2,K1,K2,K3,K4,a,b).
    static std::array<double, 8> default_lower();
    static std::array<double, 8> default_upper();

    // Throws contract_error / domain_error when the problem is inconsistent
    // (no unknowns, bounds outside the admissible set, flavor asking for a
    // missing biomass column, measurement times off the grid, K2 both unknown
    // and reduced).
    void validate() const;
};

struct FitReport {
    ParamVector params;                  // full fitted vector (pinned slots passed
                                         // through, K2 reconstructed when reduced)
    std::vector<double> objective_trace; // accepted objective values; [0] is the start
    double objective;                    // final value
    double flux_residual_norm;           // sqrt of the weighted flux misfit
    double biomass_residual_norm;        // 0 when the flavor is flux_only
    int iterations;                      // linearizations performed
    std::string termination;             // step_tolerance | objective_tolerance |
                                         // max_iterations
    double jacobian_condition;           // 2-norm estimate at the solution
};

// Stacked weighted residual vector at the full candidate X (canonical order):
// flux block first, then the biomass block when the flavor includes it. Each
// entry is sqrt(w_n) * (model - measured) with composite-trapezoid weights
// w = (1/2, 1, ..., 1, 1/2) over the measurement sequence. Forward-solver
// failures are rethrown as evaluation_error carrying X.
std::vector<double> residuals(const FitProblem& prob,
                              const std::array<double, 8>& X);

// Squared norm of residuals(prob, X).
double objective(const FitProblem& prob, const std::array<double, 8>& X);

// Jacobian of the residual vector with respect to the unknown components, as
// one column per unknown in canonical order. Forward differences with step
// h_j = max(1e-6, 1e-6*|X_j|) (sign flipped at the upper bound); central
// differences when `central` is set (used for verification).
std::vector<std::vector<double>> residual_jacobian(const FitProblem& prob,
                                                   const std::array<double, 8>& X,
                                                   bool central = false);

struct GridScanResult {
    std::vector<double> a_values, b_values;
    std::vector<double> objective; // row-major: index = ia * b_values.size() + ib
    double a_min, b_min;           // lattice argmin (first hit wins ties)
    double min_objective;
};

// Evaluate the objective over a uniform (a, b) lattice. Requires exactly a
// and b unknown; all other components come from `reference`.
GridScanResult grid_scan(const FitProblem& prob, double a_lo, double a_hi,
                         int na, double b_lo, double b_hi, int nb);

// Bounded Levenberg-Marquardt least squares from the initial guess X0 (only
// its unknown slots are read; pinned slots come from prob.reference).
// Iterates at most 400 linearizations; stops early when the proposed step
// norm falls below 1e-10 or an accepted step decreases the objective by less
// than 1e-14. A non-finite or throwing evaluation at the start is an
// immediate evaluation_error; during the search such trials are treated as
// rejected steps.
FitReport fit(const FitProblem& prob, const std::array<double, 8>& X0);

// K2 expressed through (K3, K4) by the integrated biomass balance at t = 0 of
// the first benchmark case:
//   K2 = 0.454822555 + K3*(1 - 6*K4 + (24*K4*(K4+1)/s) * atanh(1/s)),
// with s = sqrt(5 + 4*K4). Throws domain_error when K4 <= 0.
double k2_reduction(double K3, double K4);

// Convenience wrapper: pin K2, switch the K2 reduction on, and fit the
// remaining unknowns of `prob` from X0.
FitReport reduced_fit(FitProblem prob, const std::array<double, 8>& X0);

} // namespace biofilm
