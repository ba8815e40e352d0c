// Acceptance gate for the solver / recovery / fitting pipeline. Each
// criterion prints exactly one [PASS]/[FAIL] line (plus indented notes where
// a failure deserves an explanation); the exit code is the number of failed
// criteria. An optional argument 1..8 runs a single criterion.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "biofilm/direct_recovery.hpp"
#include "biofilm/forward_solver.hpp"
#include "biofilm/inverse_fit.hpp"
#include "biofilm/manufactured.hpp"
#include "biofilm/observables.hpp"
#include "biofilm/probe.hpp"

using namespace biofilm;
using Clock = std::chrono::steady_clock;

namespace {

struct Result {
    bool pass = false;
    std::string detail;
    std::vector<std::string> notes;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v, const char* spec = "%.3g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

FitProblem example1_problem(double h, ObjectiveFlavor flavor, bool solver_data) {
    const ManufacturedCase c = example1();
    FitProblem prob{square_grid(h, c.final_time), c.data, MeasurementSet{}, flavor};
    if (solver_data) {
        const FieldSolution sol = solve_forward(c.params, prob.grid, c.data);
        prob.measurements = measure_solution(sol, c.params.d1(), true);
    } else {
        prob.measurements = exact_measurements(c, prob.grid, true);
    }
    prob.reference = c.params.values();
    return prob;
}

double max_param_error(const ParamVector& got, const std::array<double, 8>& want) {
    double worst = 0.0;
    for (int j = 0; j < 8; ++j)
        worst = std::max(worst, std::abs(got.values()[j] - want[j]));
    return worst;
}

// --------------------------------------------------------------- criterion 1
// Forward convergence table of the first worked case: six error cells within
// 20% of the reference values and fitted order 2.0 +- 0.3, in under 10 s.
Result criterion1() {
    const auto t0 = Clock::now();
    const ConvergenceStudy st = convergence_study(example1(), {0.1, 0.05, 0.01});
    const double refS[3] = {1.74e-4, 4.56e-5, 1.87e-6};
    const double refM[3] = {2.26e-3, 8.02e-4, 4.52e-5};

    double worst_rel = 0.0;
    for (int i = 0; i < 3; ++i) {
        worst_rel = std::max(worst_rel, std::abs(st.rows[i].err_S / refS[i] - 1.0));
        worst_rel = std::max(worst_rel, std::abs(st.rows[i].err_M / refM[i] - 1.0));
    }
    const double secs = seconds_since(t0);

    Result r;
    r.pass = worst_rel <= 0.20 && std::abs(st.lsq_order_S - 2.0) <= 0.3 &&
             std::abs(st.lsq_order_M - 2.0) <= 0.3 && secs < 10.0;
    r.detail = "six convergence cells within 20% of the reference table (worst " +
               num(100.0 * worst_rel, "%.1f") + "%), fitted orders S=" +
               num(st.lsq_order_S, "%.2f") + " M=" + num(st.lsq_order_M, "%.2f") +
               ", " + num(secs, "%.1f") + " s";
    return r;
}

// --------------------------------------------------------------- criterion 2
// Staged recovery at the documented reference points of the closed-form
// recovery example. The stated (K1, K4) point pair is exactly singular, so
// this criterion fails honestly; the notes show the degeneracy and that a
// one-point repair recovers everything to roundoff.
Result criterion2() {
    const auto t0 = Clock::now();
    const ManufacturedCase c = example2();
    const FieldProbe probe = FieldProbe::from_case(c);
    const EvaluationPoints stated{{0.5, 1.0},
                                  {0.5, 0.5},
                                  {0.5, 1.0},
                                  0.5,
                                  1.0,
                                  {0.5, 1.0 / 3.0},
                                  {0.5, 0.5},
                                  {0.5, 2.0 / 3.0}};

    Result r;
    try {
        const RecoveryResult rec = recover_all(probe, stated);
        const double err = max_param_error(rec.params, c.params.values());
        const double err_pointwise =
            std::max({std::abs(rec.stage1.d1 - 1.0), std::abs(rec.stage2.K1 - 1.0),
                      std::abs(rec.stage2.K4 - 1.0), std::abs(rec.stage4.a - 0.0),
                      std::abs(rec.stage4.b - 1.0), std::abs(rec.stage4.d2 - 1.0)});
        const double secs = seconds_since(t0);
        r.pass = err <= 1e-6 && err_pointwise <= 1e-10 && secs < 1.0;
        r.detail = "stated-point recovery error " + num(err) + " (point stages " +
                   num(err_pointwise) + "), " + num(secs, "%.2f") + " s";
        return r;
    } catch (const assumption_error& e) {
        r.pass = false;
        r.detail = std::string("stated points are unusable: ") + e.what();
        r.notes.push_back(
            "at x = 1/2, t = 1 the biofilm density reaches 1 and the substrate "
            "vanishes, so the second row of the (K1, K4) system is identically "
            "0 = 0 and its determinant is exactly zero");
    }

    // Repaired demonstration: move only the second stage-2 point off the
    // degeneracy. Everything else stays at the stated values.
    EvaluationPoints repaired = stated;
    repaired.p2 = {0.5, 0.75};
    const RecoveryResult rec = recover_all(probe, repaired);
    const double err = max_param_error(rec.params, c.params.values());
    r.notes.push_back("with p2 moved to (0.5, 0.75) the full vector comes back "
                      "with max error " + num(err) + " in " +
                      num(seconds_since(t0), "%.2f") + " s");
    return r;
}

// --------------------------------------------------------------- criterion 3
// Flux-only objective at the truth on closed-form data reproduces the three
// documented mesh floors within a factor of 3.
Result criterion3() {
    const double meshes[3] = {0.1, 0.05, 0.01};
    const double floors[3] = {1.4e-6, 1.6e-7, 1.2e-9};

    bool pass = true;
    std::string values, refs;
    for (int i = 0; i < 3; ++i) {
        FitProblem prob = example1_problem(meshes[i], ObjectiveFlavor::flux_only, false);
        prob.unknown[6] = prob.unknown[7] = true;
        const double J = objective(prob, prob.reference);
        pass = pass && J >= floors[i] / 3.0 && J <= floors[i] * 3.0;
        values += (i ? " / " : "") + num(J);
        refs += (i ? " / " : "") + num(floors[i]);
    }

    Result r;
    r.pass = pass;
    r.detail = "objective floors at the truth " + values + " vs documented " +
               refs + " (factor-3 band)";
    return r;
}

// --------------------------------------------------------------- criterion 4
// Grid scan of the objective over (a, b): exact lattice argmin (1, 2) on the
// fine mesh, and the coarse-mesh b = 2 section argmin within one cell of 1.75.
Result criterion4() {
    const auto t0 = Clock::now();

    FitProblem fine = example1_problem(0.01, ObjectiveFlavor::flux_only, false);
    fine.unknown[6] = fine.unknown[7] = true;
    const GridScanResult full = grid_scan(fine, 0.0, 4.0, 41, 1.0, 4.0, 31);
    const bool fine_ok =
        std::abs(full.a_min - 1.0) < 1e-12 && std::abs(full.b_min - 2.0) < 1e-12;

    FitProblem coarse = example1_problem(0.1, ObjectiveFlavor::flux_only, false);
    coarse.unknown[6] = coarse.unknown[7] = true;
    const GridScanResult section = grid_scan(coarse, 0.0, 4.0, 41, 2.0, 2.0, 1);
    const bool coarse_ok = std::abs(section.a_min - 1.75) <= 0.1 + 1e-12;

    Result r;
    r.pass = fine_ok && coarse_ok;
    r.detail = "fine-mesh 41x31 argmin (" + num(full.a_min, "%.2f") + ", " +
               num(full.b_min, "%.2f") + "); coarse b=2 section argmin a=" +
               num(section.a_min, "%.2f") + " (one 0.1 cell around 1.75), " +
               num(seconds_since(t0), "%.1f") + " s";
    return r;
}

// --------------------------------------------------------------- criterion 5
// Two-parameter (a, b) fit from each documented guess lands within 0.06 of
// (1, 2) with final objective <= 1e-10 on self-consistent flux data.
Result criterion5() {
    FitProblem prob = example1_problem(0.01, ObjectiveFlavor::flux_only, true);
    prob.unknown[6] = prob.unknown[7] = true;

    bool pass = true;
    double worst_dist = 0.0, worst_J = 0.0;
    std::string runs;
    for (auto [a0, b0] : {std::pair{0.0, 1.0}, {2.0, 1.0}, {3.0, 1.0}}) {
        std::array<double, 8> X0 = prob.reference;
        X0[6] = a0;
        X0[7] = b0;
        const FitReport rep = fit(prob, X0);
        const double dist =
            std::max(std::abs(rep.params.a() - 1.0), std::abs(rep.params.b() - 2.0));
        worst_dist = std::max(worst_dist, dist);
        worst_J = std::max(worst_J, rep.objective);
        pass = pass && dist < 0.06 && rep.objective <= 1e-10;
        runs += "(" + num(a0, "%.0f") + "," + num(b0, "%.0f") + ")->" +
                num(rep.params.a(), "%.3f") + "," + num(rep.params.b(), "%.3f") +
                " in " + std::to_string(rep.iterations) + " it; ";
    }

    Result r;
    r.pass = pass;
    r.detail = runs + "worst distance " + num(worst_dist) + ", worst objective " +
               num(worst_J);
    return r;
}

// --------------------------------------------------------------- criterion 6
// Eight-parameter fit (flux + biomass) from the documented guess with
// d1 = 1.3: every component within 5e-3 of the truth, in under 5 minutes.
Result criterion6() {
    const auto t0 = Clock::now();
    FitProblem prob = example1_problem(0.01, ObjectiveFlavor::flux_and_biomass, true);
    prob.unknown.fill(true);

    const std::array<double, 8> X0{1.3, 0.5, 0.5, 0.5, 0.5, 0.5, 2.0, 1.0};
    const FitReport rep = fit(prob, X0);
    const double err = max_param_error(rep.params, prob.reference);
    const double secs = seconds_since(t0);

    Result r;
    r.pass = err < 5e-3 && secs < 300.0;
    r.detail = "eight-parameter fit: worst component error " + num(err) + " after " +
               std::to_string(rep.iterations) + " iterations (" + rep.termination +
               "), " + num(secs, "%.0f") + " s";
    return r;
}

// --------------------------------------------------------------- criterion 7
// Reduced seven-parameter fit with K2 eliminated through the integrated
// biomass balance, from the documented starting point: every component
// (including the reconstructed K2) within 1e-3.
Result criterion7() {
    FitProblem prob = example1_problem(0.01, ObjectiveFlavor::flux_and_biomass, true);
    prob.unknown.fill(true);
    prob.unknown[3] = false;

    const std::array<double, 8> X0{1.0,    1.0005, 1.0032, 0.0,
                                   0.2268, 1.0,    1.0041, 2.0007};
    const FitReport rep = reduced_fit(prob, X0);
    const double err = max_param_error(rep.params, prob.reference);

    Result r;
    r.pass = err < 1e-3;
    r.detail = "reduced fit: worst component error " + num(err) +
               " (reconstructed K2 off by " + num(std::abs(rep.params.K2() - 1.0)) +
               ") after " + std::to_string(rep.iterations) + " iterations";
    return r;
}

// --------------------------------------------------------------- criterion 8
// Property bundle: self-consistency zero, Jacobian agreement, discrete
// symmetry, biomass linearity, the K2 reduction constant, and the smallness
// of the flux sensitivities to K2/K3 in the objective's time-integrated norm.
Result criterion8() {
    std::string detail;
    bool pass = true;

    { // self-consistent (inverse-crime) zero
        FitProblem prob = example1_problem(0.1, ObjectiveFlavor::flux_and_biomass, true);
        prob.unknown.fill(true);
        const double J = objective(prob, prob.reference);
        pass = pass && J <= 1e-20;
        detail += "self-consistent objective " + num(J);
    }

    { // forward vs central Jacobian
        FitProblem prob = example1_problem(0.1, ObjectiveFlavor::flux_and_biomass, false);
        prob.unknown.fill(true);
        const auto Jf = residual_jacobian(prob, prob.reference, false);
        const auto Jc = residual_jacobian(prob, prob.reference, true);
        double scale = 0.0;
        for (const auto& col : Jc) {
            double s = 0.0;
            for (double v : col) s += v * v;
            scale = std::max(scale, std::sqrt(s));
        }
        double worst = 0.0;
        for (std::size_t j = 0; j < Jf.size(); ++j) {
            double diff = 0.0, norm = 0.0;
            for (std::size_t k = 0; k < Jf[j].size(); ++k) {
                diff += (Jf[j][k] - Jc[j][k]) * (Jf[j][k] - Jc[j][k]);
                norm += Jc[j][k] * Jc[j][k];
            }
            worst = std::max(worst, std::sqrt(diff) /
                                        std::max(std::sqrt(norm), 1e-6 * scale));
        }
        pass = pass && worst < 1e-3;
        detail += "; Jacobian agreement " + num(worst);
    }

    { // discrete symmetry of the first worked case about x = 1/2
        const ManufacturedCase c = example1();
        const Grid grid{41, 41, c.final_time};
        const FieldSolution sol = solve_forward(c.params, grid, c.data);
        double worst = 0.0;
        for (int n = 0; n < grid.N; ++n)
            for (int i = 0; i < grid.I; ++i) {
                worst = std::max(worst, std::abs(sol.S(i, n) - sol.S(grid.I - 1 - i, n)));
                worst = std::max(worst, std::abs(sol.M(i, n) - sol.M(grid.I - 1 - i, n)));
            }
        pass = pass && worst <= 1e-12;
        detail += "; symmetry " + num(worst);
    }

    { // biomass linearity
        const Grid grid{21, 11, 1.0};
        FieldSolution u(grid), v(grid), combo(grid);
        const double alpha = 0.375, beta = 1.25;
        for (int n = 0; n < grid.N; ++n)
            for (int i = 0; i < grid.I; ++i) {
                const double x = grid.x(i);
                u.M(i, n) = x * (1.0 - x) * (1.0 + grid.t(n));
                v.M(i, n) = x * x * (1.0 - x) * std::exp(-grid.t(n));
                combo.M(i, n) = alpha * u.M(i, n) + beta * v.M(i, n);
            }
        const auto Eu = biomass(u), Ev = biomass(v), Ec = biomass(combo);
        double worst = 0.0;
        for (int n = 0; n < grid.N; ++n)
            worst = std::max(worst, std::abs(Ec[n] - alpha * Eu[n] - beta * Ev[n]));
        pass = pass && worst <= 1e-14;
        detail += "; linearity " + num(worst);
    }

    { // K2 reduction constant
        const double err = std::abs(k2_reduction(1.0, 1.0) - 1.0);
        pass = pass && err <= 1e-5;
        detail += "; k2_reduction(1,1) error " + num(err);
    }

    { // flux sensitivity to K2/K3: time-integrated squared magnitude
        FitProblem prob = example1_problem(0.05, ObjectiveFlavor::flux_only, false);
        prob.unknown[3] = prob.unknown[4] = true;
        const auto J = residual_jacobian(prob, prob.reference, false);
        const double dt = prob.grid.dt();
        std::string both;
        for (std::size_t j = 0; j < 2; ++j) {
            double l2sq = 0.0;
            for (double v : J[j]) l2sq += v * v;
            l2sq *= dt;
            pass = pass && l2sq <= 1e-3;
            both += (j ? "/" : "") + num(l2sq);
        }
        detail += "; K2/K3 flux sensitivity " + both;
    }

    Result r;
    r.pass = pass;
    r.detail = detail;
    return r;
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) {
        only = std::atoi(argv[1]);
        if (only < 1 || only > 8) {
            std::fprintf(stderr, "usage: %s [criterion 1-8]\n", argv[0]);
            return 64;
        }
    }

    Result (*criteria[8])() = {criterion1, criterion2, criterion3, criterion4,
                               criterion5, criterion6, criterion7, criterion8};

    int failures = 0;
    for (int n = 1; n <= 8; ++n) {
        if (only != 0 && n != only) continue;
        Result r;
        try {
            r = criteria[n - 1]();
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("unexpected error: ") + e.what();
        }
        std::printf("[%s] criterion %d: %s\n", r.pass ? "PASS" : "FAIL", n,
                    r.detail.c_str());
        for (const std::string& note : r.notes)
            std::printf("    note: %s\n", note.c_str());
        if (!r.pass) ++failures;
    }
    return failures;
}
