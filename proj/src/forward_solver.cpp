#include "biofilm/forward_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "biofilm/errors.hpp"
#include "biofilm/kinetics.hpp"
#include "biofilm/tridiagonal.hpp"

namespace biofilm {

namespace {

constexpr double kBlowupLimit = 1e6;

// Face diffusivity from the average of two nodal densities. Tiny negative
// averages produced by round-off are clamped to zero before evaluation;
// M >= 1 with a > 0 is left to diffusivity(), which throws.
double face_lambda(double m_left, double m_right, double a, double b) {
    const double m = std::max(0.5 * (m_left + m_right), 0.0);
    return diffusivity(m, a, b);
}

void check_bounded(const LevelPair& level, const Grid& grid, int n) {
    for (int i = 0; i < grid.I; ++i) {
        if (!std::isfinite(level.S[i]) || !std::isfinite(level.M[i]) ||
            std::abs(level.S[i]) > kBlowupLimit ||
            std::abs(level.M[i]) > kBlowupLimit) {
            std::ostringstream os;
            os << "forward march blew up at time level " << n << " (t = "
               << grid.t(n) << "): |S| or |M| exceeds " << kBlowupLimit;
            throw blowup_error(os.str());
        }
    }
}

void check_level_shape(const LevelPair& level, int I, const char* which) {
    if (static_cast<int>(level.S.size()) != I ||
        static_cast<int>(level.M.size()) != I) {
        std::ostringstream os;
        os << "level '" << which << "' must hold exactly I = " << I
           << " values per field";
        throw contract_error(os.str());
    }
}

LevelPair initial_level(const Grid& grid, const ProblemData& data) {
    LevelPair lvl{std::vector<double>(grid.I), std::vector<double>(grid.I)};
    for (int i = 0; i < grid.I; ++i) {
        lvl.S[i] = data.S0(grid.x(i));
        lvl.M[i] = data.M0(grid.x(i));
    }
    return lvl;
}

TridiagonalFactor substrate_factor(double alpha, int m) {
    return TridiagonalFactor(std::vector<double>(m - 1, -alpha),
                             std::vector<double>(m, 1.0 + 2.0 * alpha),
                             std::vector<double>(m - 1, -alpha));
}

// Shared implicit step; `s_factor` is the prefactored constant substrate
// matrix for alpha = 2*dt*d1/(3*dx^2).
LevelPair step_core(const ParamVector& params, const Grid& grid,
                    const ProblemData& data, int n, const LevelPair& prev,
                    const LevelPair& mid, const TridiagonalFactor& s_factor) {
    const int I = grid.I;
    const int m = I - 2;
    const double dx = grid.dx(), dt = grid.dt();
    const double alpha = 2.0 * dt * params.d1() / (3.0 * dx * dx);
    const double beta = 2.0 * dt * params.d2() / (3.0 * dx * dx);
    const double K1 = params.K1(), K2 = params.K2(), K3 = params.K3(),
                 K4 = params.K4();
    const double tn = grid.t(n), tnext = grid.t(n + 1);

    LevelPair next{std::vector<double>(I), std::vector<double>(I)};

    // Substrate update.
    std::vector<double> rhs(m);
    for (int i = 1; i < I - 1; ++i) {
        const double mon = monod(mid.S[i], mid.M[i], K4);
        rhs[i - 1] = alpha * (mid.S[i + 1] + prev.S[i + 1] - 2.0 * mid.S[i] -
                              2.0 * prev.S[i] + mid.S[i - 1] + prev.S[i - 1]) +
                     prev.S[i] + 2.0 * dt * (-K1 * mon + data.F(grid.x(i), tn));
    }
    rhs[0] += alpha * data.mu1(tnext);
    rhs[m - 1] += alpha * data.mu2(tnext);
    s_factor.solve(rhs);
    for (int i = 1; i < I - 1; ++i) next.S[i] = rhs[i - 1];
    next.S[0] = data.mu1(tnext);
    next.S[I - 1] = data.mu2(tnext);

    // Biomass update: faces frozen at the middle level keep the system linear.
    std::vector<double> lm(I); // lm[j]: scaled diffusivity on face (j-1, j)
    for (int j = 1; j < I; ++j)
        lm[j] = beta * face_lambda(mid.M[j - 1], mid.M[j],
                                   params.a(), params.b());
    std::vector<double> sub(m - 1), diag(m), super(m - 1), g(m);
    for (int j = 1; j < I - 1; ++j) {
        const int k = j - 1;
        diag[k] = 1.0 + lm[j] + lm[j + 1];
        if (k > 0) sub[k - 1] = -lm[j];
        if (k < m - 1) super[k] = -lm[j + 1];
        const double mon = monod(mid.S[j], mid.M[j], K4);
        g[k] = lm[j + 1] * (mid.M[j + 1] + prev.M[j + 1] - mid.M[j] - prev.M[j]) -
               lm[j] * (mid.M[j] + prev.M[j] - mid.M[j - 1] - prev.M[j - 1]) +
               prev.M[j] +
               2.0 * dt * (-K2 * mid.M[j] + K3 * mon + data.G(grid.x(j), tn));
    }
    g[0] += lm[1] * data.mu3(tnext);
    g[m - 1] += lm[I - 1] * data.mu4(tnext);

    TridiagonalSystem msys{std::move(sub), std::move(diag), std::move(super),
                           std::move(g)};
    const std::vector<double> mnew = solve_tridiagonal(msys);
    for (int j = 1; j < I - 1; ++j) next.M[j] = mnew[j - 1];
    next.M[0] = data.mu3(tnext);
    next.M[I - 1] = data.mu4(tnext);

    check_bounded(next, grid, n + 1);
    return next;
}

} // namespace

LevelPair first_step(const ParamVector& params, const Grid& grid,
                     const ProblemData& data) {
    const int I = grid.I;
    const double dx = grid.dx(), dt = grid.dt();
    const double rx = dt / (dx * dx);
    const double K1 = params.K1(), K2 = params.K2(), K3 = params.K3(),
                 K4 = params.K4();

    const LevelPair lvl0 = initial_level(grid, data);
    check_bounded(lvl0, grid, 0);

    LevelPair lvl1{std::vector<double>(I), std::vector<double>(I)};
    const double t0 = grid.t(0);
    for (int i = 1; i < I - 1; ++i) {
        const double xi = grid.x(i);
        const double S0i = lvl0.S[i], M0i = lvl0.M[i];
        const double mon = monod(S0i, M0i, K4);

        const double lap_S = lvl0.S[i + 1] - 2.0 * S0i + lvl0.S[i - 1];
        lvl1.S[i] = S0i + params.d1() * rx * lap_S +
                    dt * (-K1 * mon + data.F(xi, t0));

        const double lam_r = face_lambda(M0i, lvl0.M[i + 1], params.a(), params.b());
        const double lam_l = face_lambda(lvl0.M[i - 1], M0i, params.a(), params.b());
        const double flux_M =
            lam_r * (lvl0.M[i + 1] - M0i) - lam_l * (M0i - lvl0.M[i - 1]);
        lvl1.M[i] = M0i + params.d2() * rx * flux_M +
                    dt * (-K2 * M0i + K3 * mon + data.G(xi, t0));
    }
    lvl1.S[0] = data.mu1(grid.t(1));
    lvl1.S[I - 1] = data.mu2(grid.t(1));
    lvl1.M[0] = data.mu3(grid.t(1));
    lvl1.M[I - 1] = data.mu4(grid.t(1));
    check_bounded(lvl1, grid, 1);
    return lvl1;
}

LevelPair step_three_level(const ParamVector& params, const Grid& grid,
                           const ProblemData& data, int n,
                           const LevelPair& prev, const LevelPair& mid) {
    if (n < 1 || n > grid.N - 2)
        throw domain_error("three-level step needs a middle level 1 <= n <= N-2");
    check_level_shape(prev, grid.I, "prev");
    check_level_shape(mid, grid.I, "mid");
    const double alpha =
        2.0 * grid.dt() * params.d1() / (3.0 * grid.dx() * grid.dx());
    const TridiagonalFactor s_factor = substrate_factor(alpha, grid.I - 2);
    return step_core(params, grid, data, n, prev, mid, s_factor);
}

FieldSolution solve_forward(const ParamVector& params, const Grid& grid,
                            const ProblemData& data) {
    data.check_compatibility();

    FieldSolution sol(grid);
    auto store = [&](const LevelPair& lvl, int n) {
        for (int i = 0; i < grid.I; ++i) {
            sol.S(i, n) = lvl.S[i];
            sol.M(i, n) = lvl.M[i];
        }
    };

    LevelPair prev = initial_level(grid, data);
    check_bounded(prev, grid, 0);
    store(prev, 0);

    LevelPair mid = first_step(params, grid, data);
    store(mid, 1);

    const double alpha =
        2.0 * grid.dt() * params.d1() / (3.0 * grid.dx() * grid.dx());
    const TridiagonalFactor s_factor = substrate_factor(alpha, grid.I - 2);

    for (int n = 1; n < grid.N - 1; ++n) {
        LevelPair next = step_core(params, grid, data, n, prev, mid, s_factor);
        store(next, n + 1);
        prev = std::move(mid);
        mid = std::move(next);
    }
    return sol;
}

ConvergenceStudy convergence_study(const ManufacturedCase& mcase,
                                   const std::vector<double>& hs) {
    if (hs.size() < 2)
        throw domain_error("convergence study needs at least two mesh widths");
    for (std::size_t k = 0; k < hs.size(); ++k) {
        if (!(hs[k] > 0))
            throw domain_error("mesh widths must be positive");
        if (k > 0 && !(hs[k] < hs[k - 1]))
            throw domain_error("mesh widths must be strictly decreasing");
    }

    ConvergenceStudy study;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    for (std::size_t k = 0; k < hs.size(); ++k) {
        const Grid grid = square_grid(hs[k], mcase.final_time);
        const FieldSolution sol = solve_forward(mcase.params, grid, mcase.data);

        double eS = 0.0, eM = 0.0;
        for (int n = 0; n < grid.N; ++n)
            for (int i = 0; i < grid.I; ++i) {
                eS = std::max(eS, std::abs(sol.S(i, n) -
                                           mcase.exact_S(grid.x(i), grid.t(n))));
                eM = std::max(eM, std::abs(sol.M(i, n) -
                                           mcase.exact_M(grid.x(i), grid.t(n))));
            }

        ConvergenceRow row{hs[k], eS, eM, nan, nan};
        if (k > 0) {
            const ConvergenceRow& last = study.rows[k - 1];
            const double dh = std::log(last.h / row.h);
            row.order_S = std::log(last.err_S / row.err_S) / dh;
            row.order_M = std::log(last.err_M / row.err_M) / dh;
        }
        study.rows.push_back(row);
    }

    // Least-squares slope of log(err) against log(h).
    auto lsq_slope = [&](auto err_of) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(study.rows.size());
        for (const ConvergenceRow& r : study.rows) {
            const double lx = std::log(r.h), ly = std::log(err_of(r));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    study.lsq_order_S = lsq_slope([](const ConvergenceRow& r) { return r.err_S; });
    study.lsq_order_M = lsq_slope([](const ConvergenceRow& r) { return r.err_M; });
    return study;
}

} // namespace biofilm
