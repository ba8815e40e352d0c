#include "biofilm/inverse_fit.hpp"
#include <cstdio>
#include <cstdlib>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <utility>

#include "biofilm/errors.hpp"
#include "biofilm/forward_solver.hpp"

namespace biofilm {

namespace {

constexpr double kTimeSnapTol = 1e-9;
constexpr double kStepTol = 1e-10;      // minimum proposed step norm
constexpr double kObjectiveTol = 1e-14; // minimum accepted decrease
constexpr int kMaxIterations = 400;

std::string format_candidate(const std::array<double, 8>& X) {
    std::ostringstream out;
    out << "(";
    for (std::size_t j = 0; j < X.size(); ++j)
        out << (j ? ", " : "") << ParamVector::names()[j] << "=" << X[j];
    out << ")";
    return out.str();
}

// K2 substitution for the reduced problem; identity otherwise.
std::array<double, 8> effective_candidate(const FitProblem& prob,
                                          std::array<double, 8> X) {
    if (prob.k2_reduced)
        X[3] = k2_reduction(X[4], X[5]);
    return X;
}

// Map each measurement time onto its grid level.
std::vector<int> measurement_levels(const FitProblem& prob) {
    std::vector<int> levels(prob.measurements.times.size());
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const double t = prob.measurements.times[k];
        const int n = static_cast<int>(std::lround(t / prob.grid.dt()));
        if (n < 0 || n >= prob.grid.N ||
            std::abs(prob.grid.t(n) - t) > kTimeSnapTol) {
            std::ostringstream out;
            out << "measurement time " << t << " does not lie on the grid";
            throw contract_error(out.str());
        }
        levels[k] = n;
    }
    return levels;
}

// Composite-trapezoid weight over the measurement index.
double sample_weight(std::size_t k, std::size_t count) {
    if (count >= 2 && (k == 0 || k + 1 == count))
        return 0.5;
    return 1.0;
}

// ---- small dense symmetric helpers (order <= 8) ----------------------------

using Matrix = std::vector<std::vector<double>>;

// Minimizes ||A x - b|| by Householder QR for a dense column-major A (each
// A[c] is one column). Used on the damping-augmented Jacobian, which keeps
// the conditioning at cond(J) instead of cond(J)^2 of the normal equations.
// Returns false when a column collapses to zero.
bool least_squares_qr(std::vector<std::vector<double>> A, std::vector<double> b,
                      std::vector<double>& x) {
    const std::size_t k = A.size();
    const std::size_t rows = b.size();
    std::vector<double> rdiag(k);
    for (std::size_t c = 0; c < k; ++c) {
        double norm = 0.0;
        for (std::size_t i = c; i < rows; ++i)
            norm += A[c][i] * A[c][i];
        norm = std::sqrt(norm);
        if (norm == 0.0 || !std::isfinite(norm))
            return false;
        if (A[c][c] > 0.0)
            norm = -norm;
        A[c][c] -= norm; // column c now holds the Householder vector
        rdiag[c] = norm;
        double vtv = 0.0;
        for (std::size_t i = c; i < rows; ++i)
            vtv += A[c][i] * A[c][i];
        auto reflect = [&](std::vector<double>& y) {
            double dot = 0.0;
            for (std::size_t i = c; i < rows; ++i)
                dot += A[c][i] * y[i];
            const double w = 2.0 * dot / vtv;
            for (std::size_t i = c; i < rows; ++i)
                y[i] -= w * A[c][i];
        };
        for (std::size_t c2 = c + 1; c2 < k; ++c2)
            reflect(A[c2]);
        reflect(b);
    }
    x.assign(k, 0.0);
    for (std::size_t c = k; c-- > 0;) {
        double s = b[c];
        for (std::size_t c2 = c + 1; c2 < k; ++c2)
            s -= A[c2][c] * x[c2];
        if (rdiag[c] == 0.0 || !std::isfinite(rdiag[c]))
            return false;
        x[c] = s / rdiag[c];
    }
    return true;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
std::vector<double> symmetric_eigenvalues(Matrix A) {
    const std::size_t n = A.size();
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off += A[p][q] * A[p][q];
        if (off < 1e-30)
            break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (A[p][q] == 0.0)
                    continue;
                const double theta = (A[q][q] - A[p][p]) / (2.0 * A[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = A[k][p], akq = A[k][q];
                    A[k][p] = c * akp - s * akq;
                    A[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = A[p][k], aqk = A[q][k];
                    A[p][k] = c * apk - s * aqk;
                    A[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i)
        ev[i] = A[i][i];
    return ev;
}

std::vector<std::size_t> unknown_indices(const FitProblem& prob) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < prob.unknown.size(); ++j)
        if (prob.unknown[j])
            idx.push_back(j);
    return idx;
}

double clamp_component(double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
}

} // namespace

std::array<double, 8> FitProblem::default_lower() {
    return {1e-10, 1e-10, 1e-10, 0.0, 1e-10, 1e-10, 0.0, 1.0};
}

std::array<double, 8> FitProblem::default_upper() {
    return {1e10, 1e10, 1e10, 1e10, 1e10, 1e10, 1e10, 1e10};
}

void FitProblem::validate() const {
    measurements.validate();
    if (flavor == ObjectiveFlavor::flux_and_biomass && !measurements.has_biomass())
        throw contract_error("objective asks for biomass but the measurement set "
                             "has no biomass column");
    if (unknown_indices(*this).empty())
        throw contract_error("fit problem has no unknown components");
    if (k2_reduced && unknown[3])
        throw contract_error("K2 cannot be unknown while the K2 reduction is active");
    const auto floor = default_lower();
    for (std::size_t j = 0; j < 8; ++j) {
        if (!(lower[j] <= upper[j]))
            throw contract_error(std::string("empty bound interval for ") +
                                 ParamVector::names()[j]);
        if (lower[j] < floor[j])
            throw domain_error(std::string("lower bound for ") +
                               ParamVector::names()[j] +
                               " leaves the admissible set");
    }
    measurement_levels(*this);
}

std::vector<double> residuals(const FitProblem& prob,
                              const std::array<double, 8>& X) {
    const auto Xeff = effective_candidate(prob, X);
    ParamVector params = ParamVector::from_array(Xeff);

    const FieldSolution sol = [&] {
        try {
            return solve_forward(params, prob.grid, prob.data);
        } catch (const error& e) {
            throw evaluation_error("residual evaluation failed at X = " +
                                   format_candidate(Xeff) + ": " + e.what());
        }
    }();

    const auto levels = measurement_levels(prob);
    const auto& meas = prob.measurements;
    const std::size_t count = meas.times.size();
    const bool with_biomass = prob.flavor == ObjectiveFlavor::flux_and_biomass;

    const std::vector<double> flux_model = boundary_flux(sol, params.d1());
    std::vector<double> r;
    r.reserve(with_biomass ? 2 * count : count);
    for (std::size_t k = 0; k < count; ++k) {
        const double w = std::sqrt(sample_weight(k, count));
        r.push_back(w * (flux_model[levels[k]] - meas.flux[k]));
    }
    if (with_biomass) {
        const std::vector<double> biomass_model = biomass(sol);
        for (std::size_t k = 0; k < count; ++k) {
            const double w = std::sqrt(sample_weight(k, count));
            r.push_back(w * (biomass_model[levels[k]] - meas.biomass[k]));
        }
    }
    return r;
}

double objective(const FitProblem& prob, const std::array<double, 8>& X) {
    double sum = 0.0;
    for (double ri : residuals(prob, X))
        sum += ri * ri;
    return sum;
}

std::vector<std::vector<double>> residual_jacobian(const FitProblem& prob,
                                                   const std::array<double, 8>& X,
                                                   bool central) {
    const auto idx = unknown_indices(prob);
    std::vector<double> r0;
    if (!central)
        r0 = residuals(prob, X);

    std::vector<std::vector<double>> J(idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c) {
        const std::size_t j = idx[c];
        double h = std::max(1e-6, 1e-6 * std::abs(X[j]));
        if (X[j] + h > prob.upper[j])
            h = -h;

        auto column_at = [&](double step) {
            std::array<double, 8> Xp = X;
            Xp[j] += step;
            return residuals(prob, Xp);
        };

        if (central) {
            const auto rp = column_at(h);
            const auto rm = column_at(-h);
            J[c].resize(rp.size());
            for (std::size_t i = 0; i < rp.size(); ++i)
                J[c][i] = (rp[i] - rm[i]) / (2.0 * h);
            continue;
        }

        std::vector<double> rp;
        try {
            rp = column_at(h);
        } catch (const error&) {
            // One retry from the other side before giving up on the column.
            h = -h;
            rp = column_at(h);
        }
        J[c].resize(rp.size());
        for (std::size_t i = 0; i < rp.size(); ++i)
            J[c][i] = (rp[i] - r0[i]) / h;
    }
    return J;
}

GridScanResult grid_scan(const FitProblem& prob, double a_lo, double a_hi,
                         int na, double b_lo, double b_hi, int nb) {
    prob.validate();
    const auto idx = unknown_indices(prob);
    if (idx != std::vector<std::size_t>{6, 7})
        throw contract_error("grid scan needs exactly a and b unknown");
    if (na < 1 || nb < 1)
        throw contract_error("grid scan needs at least one node per axis");
    if (!(a_lo <= a_hi) || !(b_lo <= b_hi))
        throw contract_error("grid scan range is empty");

    GridScanResult res;
    res.a_values.resize(na);
    res.b_values.resize(nb);
    for (int ia = 0; ia < na; ++ia)
        res.a_values[ia] = na == 1 ? a_lo : a_lo + (a_hi - a_lo) * ia / (na - 1);
    for (int ib = 0; ib < nb; ++ib)
        res.b_values[ib] = nb == 1 ? b_lo : b_lo + (b_hi - b_lo) * ib / (nb - 1);

    res.objective.resize(static_cast<std::size_t>(na) * nb);
    res.min_objective = std::numeric_limits<double>::infinity();
    res.a_min = res.a_values[0];
    res.b_min = res.b_values[0];
    for (int ia = 0; ia < na; ++ia) {
        for (int ib = 0; ib < nb; ++ib) {
            std::array<double, 8> X = prob.reference;
            X[6] = res.a_values[ia];
            X[7] = res.b_values[ib];
            const double H = objective(prob, X);
            res.objective[static_cast<std::size_t>(ia) * nb + ib] = H;
            if (H < res.min_objective) {
                res.min_objective = H;
                res.a_min = res.a_values[ia];
                res.b_min = res.b_values[ib];
            }
        }
    }
    return res;
}

FitReport fit(const FitProblem& prob, const std::array<double, 8>& X0) {
    prob.validate();
    const auto idx = unknown_indices(prob);
    const std::size_t n_unknown = idx.size();

    std::array<double, 8> x = prob.reference;
    for (std::size_t j : idx) {
        if (!std::isfinite(X0[j]))
            throw evaluation_error(std::string("non-finite initial guess for ") +
                                   ParamVector::names()[j]);
        if (X0[j] < prob.lower[j] || X0[j] > prob.upper[j])
            throw domain_error(std::string("initial guess for ") +
                               ParamVector::names()[j] + " violates its bounds");
        x[j] = X0[j];
    }

    std::vector<double> r = residuals(prob, x);
    double F = 0.0;
    for (double ri : r)
        F += ri * ri;
    if (!std::isfinite(F))
        throw evaluation_error("non-finite objective at the initial guess");

    std::vector<double> trace{F};
    std::vector<double> scale(n_unknown, 0.0); // running max of diag(J^T J)
    double lambda = 1e-3;
    std::string termination;
    int iterations = 0;
    std::vector<std::vector<double>> J;

    auto normal_matrix = [&](const std::vector<std::vector<double>>& Jc) {
        Matrix A(n_unknown, std::vector<double>(n_unknown, 0.0));
        for (std::size_t p = 0; p < n_unknown; ++p)
            for (std::size_t q = p; q < n_unknown; ++q) {
                double s = 0.0;
                for (std::size_t i = 0; i < Jc[p].size(); ++i)
                    s += Jc[p][i] * Jc[q][i];
                A[p][q] = A[q][p] = s;
            }
        return A;
    };

    while (iterations < kMaxIterations && termination.empty()) {
        ++iterations;
        J = residual_jacobian(prob, x);
        for (std::size_t p = 0; p < n_unknown; ++p) {
            double col = 0.0;
            for (double v : J[p])
                col += v * v;
            scale[p] = std::max({scale[p], col, 1e-30});
        }

        // Trial loop: damp until a step is accepted or collapses. The damped
        // system [J; sqrt(lambda)*D] h = [-r; 0] is solved by QR.
        while (termination.empty()) {
            const std::size_t m = r.size();
            auto solve_damped = [&](const std::vector<double>& rhs_top,
                                    std::vector<double>& out) {
                std::vector<std::vector<double>> Aug(
                    n_unknown, std::vector<double>(m + n_unknown, 0.0));
                std::vector<double> rhs(m + n_unknown, 0.0);
                for (std::size_t p = 0; p < n_unknown; ++p) {
                    std::copy(J[p].begin(), J[p].end(), Aug[p].begin());
                    Aug[p][m + p] = std::sqrt(lambda * scale[p]);
                }
                std::copy(rhs_top.begin(), rhs_top.end(), rhs.begin());
                return least_squares_qr(std::move(Aug), std::move(rhs), out);
            };

            std::vector<double> neg_r(m);
            for (std::size_t i = 0; i < m; ++i)
                neg_r[i] = -r[i];
            std::vector<double> h;
            if (!solve_damped(neg_r, h)) {
                lambda *= 10.0;
                continue;
            }

            // Geodesic acceleration: measure the second directional
            // derivative of the residuals along h and solve for a correction
            // in the same damped metric. This lets the iteration take long
            // steps along curved, weakly determined valleys. When the
            // correction is larger than the step the local model is not
            // trustworthy, so it is dropped.
            std::vector<double> acc;
            {
                const double delta = 0.1;
                auto shifted = [&](double sign) {
                    std::array<double, 8> xs = x;
                    for (std::size_t p = 0; p < n_unknown; ++p)
                        xs[idx[p]] = clamp_component(x[idx[p]] + sign * delta * h[p],
                                                     prob.lower[idx[p]],
                                                     prob.upper[idx[p]]);
                    return residuals(prob, xs);
                };
                try {
                    const auto rp = shifted(1.0);
                    const auto rm = shifted(-1.0);
                    std::vector<double> rhs_acc(m);
                    for (std::size_t i = 0; i < m; ++i)
                        rhs_acc[i] =
                            -(rp[i] - 2.0 * r[i] + rm[i]) / (delta * delta);
                    std::vector<double> a;
                    if (solve_damped(rhs_acc, a)) {
                        double na = 0.0, nh = 0.0;
                        for (std::size_t p = 0; p < n_unknown; ++p) {
                            na += a[p] * a[p];
                            nh += h[p] * h[p];
                        }
                        if (na <= 0.5625 * nh) // |a| <= 0.75 |h|
                            acc = std::move(a);
                    }
                } catch (const error&) {
                    // curvature probe failed; fall back to the plain step
                }
            }
            if (!acc.empty())
                for (std::size_t p = 0; p < n_unknown; ++p)
                    h[p] += 0.5 * acc[p];

            double step_norm = 0.0;
            for (double hp : h)
                step_norm += hp * hp;
            step_norm = std::sqrt(step_norm);
            if (step_norm < kStepTol) {
                termination = "step_tolerance";
                break;
            }

            std::array<double, 8> x_trial = x;
            for (std::size_t p = 0; p < n_unknown; ++p)
                x_trial[idx[p]] = clamp_component(x[idx[p]] + h[p],
                                                  prob.lower[idx[p]],
                                                  prob.upper[idx[p]]);

            double F_trial = std::numeric_limits<double>::infinity();
            std::vector<double> r_trial;
            bool usable = true;
            try {
                r_trial = residuals(prob, x_trial);
                F_trial = 0.0;
                for (double ri : r_trial)
                    F_trial += ri * ri;
                usable = std::isfinite(F_trial);
            } catch (const error&) {
                usable = false;
            }

            if (usable && F_trial < F) {
                lambda = std::max(1e-15, lambda * 0.1);
                const double decrease = F - F_trial;
                x = x_trial;
                r = std::move(r_trial);
                F = F_trial;
                trace.push_back(F);
                if (std::getenv("BIOFILM_LM_DEBUG"))
                    std::fprintf(stderr,
                                 "it=%d F=%.6e dec=%.3e lam=%.3e |h|=%.3e\n",
                                 iterations, F, decrease, lambda, step_norm);
                if (decrease < kObjectiveTol)
                    termination = "objective_tolerance";
                break;
            }

            lambda *= 10.0;
        }
    }
    if (termination.empty())
        termination = "max_iterations";

    const std::size_t count = prob.measurements.times.size();
    double flux_sq = 0.0, biomass_sq = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        (i < count ? flux_sq : biomass_sq) += r[i] * r[i];

    if (J.empty())
        J = residual_jacobian(prob, x);
    const auto ev = symmetric_eigenvalues(normal_matrix(J));
    double ev_max = 0.0, ev_min = std::numeric_limits<double>::infinity();
    for (double e : ev) {
        ev_max = std::max(ev_max, e);
        ev_min = std::min(ev_min, e);
    }
    const double condition =
        ev_min > 0.0 ? std::sqrt(ev_max / ev_min)
                     : std::numeric_limits<double>::infinity();

    return FitReport{ParamVector::from_array(effective_candidate(prob, x)),
                     std::move(trace),
                     F,
                     std::sqrt(flux_sq),
                     std::sqrt(biomass_sq),
                     iterations,
                     termination,
                     condition};
}

double k2_reduction(double K3, double K4) {
    if (!(K4 > 0.0))
        throw domain_error("k2_reduction needs K4 > 0");
    const double s = std::sqrt(5.0 + 4.0 * K4);
    return 0.454822555 +
           K3 * (1.0 - 6.0 * K4 +
                 (24.0 * K4 * (K4 + 1.0) / s) * std::atanh(1.0 / s));
}

FitReport reduced_fit(FitProblem prob, const std::array<double, 8>& X0) {
    prob.k2_reduced = true;
    prob.unknown[3] = false;
    return fit(prob, X0);
}

} // namespace biofilm
