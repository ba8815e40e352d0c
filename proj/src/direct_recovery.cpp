#include "biofilm/direct_recovery.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "biofilm/errors.hpp"
#include "biofilm/kinetics.hpp"

namespace biofilm {

using namespace recovery_limits;

namespace {

// Relative size of a 2x2 determinant against its two products; 0 means the
// rows are exactly dependent, 1 means no cancellation at all.
double det_quality(double prod1, double prod2) {
    const double scale = std::abs(prod1) + std::abs(prod2);
    if (scale == 0.0) return 0.0;
    return std::abs(prod1 - prod2) / scale;
}

// Components whose true value may sit exactly on a closed admissibility bound
// (K2 >= 0, a >= 0, b >= 1) come back from the linear solves with roundoff of
// either sign; values within this slack below the bound are projected onto
// it. Larger violations are kept raw and flagged inadmissible.
constexpr double kBoundSnapTol = 1e-12;

double snap_closed_bound(double value, double bound) {
    if (value < bound && value >= bound - kBoundSnapTol)
        return bound;
    return value;
}

struct Mat3 {
    std::array<std::array<double, 3>, 3> a;

    double det() const {
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    }

    double norm_inf() const {
        double n = 0.0;
        for (const auto& row : a)
            n = std::max(n, std::abs(row[0]) + std::abs(row[1]) + std::abs(row[2]));
        return n;
    }
};

// Inverse by adjugate; caller has already rejected a vanishing determinant.
Mat3 inverse3(const Mat3& m, double det) {
    const auto& a = m.a;
    Mat3 inv;
    inv.a[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
    inv.a[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    inv.a[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    inv.a[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
    inv.a[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    inv.a[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    inv.a[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
    inv.a[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
    inv.a[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
    return inv;
}

std::string point_str(const Point& p) {
    std::ostringstream os;
    os << "(x=" << p.x << ", t=" << p.t << ")";
    return os.str();
}

// Stage-4 row data for one candidate point, or an assumption failure.
struct LogRow {
    double M;
    double N; // log(R / d2M/dx2)
};

LogRow log_row(const FieldProbe& probe, const Point& p, double K2, double K3,
               double K4) {
    const double grad = probe.dM_dx(p.x, p.t);
    if (std::abs(grad) > kGradientTol) {
        std::ostringstream os;
        os << "stage 4 point " << point_str(p)
           << " is not a spatial critical point of M (dM/dx = " << grad << ")";
        throw assumption_error(os.str());
    }
    const double M = probe.M(p.x, p.t);
    if (!(M > 0.0) || !(M < 1.0)) {
        std::ostringstream os;
        os << "stage 4 needs 0 < M < 1, but M = " << M << " at " << point_str(p);
        throw assumption_error(os.str());
    }
    const double lap = probe.d2M_dx2(p.x, p.t);
    if (std::abs(lap) < kLaplacianTol) {
        std::ostringstream os;
        os << "stage 4: biomass curvature vanishes at " << point_str(p)
           << " (d2M/dx2 = " << lap << ")";
        throw assumption_error(os.str());
    }
    const double S = probe.S(p.x, p.t);
    const double R = probe.dM_dt(p.x, p.t) - probe.G(p.x, p.t) + K2 * M -
                     K3 * monod(S, M, K4);
    const double ratio = R / lap;
    if (!(ratio > 0.0)) {
        std::ostringstream os;
        os << "stage 4: reaction-corrected rate and curvature disagree in sign at "
           << point_str(p) << " (ratio = " << ratio
           << "); the log right-hand side is undefined";
        throw assumption_error(os.str());
    }
    return {M, std::log(ratio)};
}

} // namespace

Stage1Result recover_d1(const FieldProbe& probe, const Point& p0) {
    const double S = probe.S(p0.x, p0.t);
    const double M = probe.M(p0.x, p0.t);
    if (std::abs(S) > kValueTol && std::abs(M) > kValueTol) {
        std::ostringstream os;
        os << "stage 1 needs S = 0 or M = 0 at p0 = " << point_str(p0)
           << ", but S = " << S << " and M = " << M;
        throw assumption_error(os.str());
    }
    const double num = probe.dS_dt(p0.x, p0.t) - probe.F(p0.x, p0.t);
    const double lap = probe.d2S_dx2(p0.x, p0.t);
    if (std::abs(lap) < kCurvatureTol) {
        std::ostringstream os;
        os << "stage 1: substrate curvature vanishes at p0 = " << point_str(p0)
           << " (d2S/dx2 = " << lap << "); d1 is not identifiable there";
        throw assumption_error(os.str());
    }
    const double d1 = num / lap;
    return {p0, d1, lap, d1 > 0.0};
}

Stage2Result recover_K1_K4(const FieldProbe& probe, const Point& p1,
                           const Point& p2, double d1) {
    auto read = [&](const Point& p, double& S, double& M, double& c) {
        S = probe.S(p.x, p.t);
        M = probe.M(p.x, p.t);
        c = probe.dS_dt(p.x, p.t) - d1 * probe.d2S_dx2(p.x, p.t) -
            probe.F(p.x, p.t);
    };
    double S1, M1, c1, S2, M2, c2;
    read(p1, S1, M1, c1);
    read(p2, S2, M2, c2);

    // Rows of the linear system  c_i*K4 + (S_i*M_i)*K1 = -c_i*S_i.
    const double det = c1 * S2 * M2 - c2 * S1 * M1;
    if (std::abs(det) < kDeterminantTol) {
        std::ostringstream os;
        os << "stage 2 system is singular at p1 = " << point_str(p1)
           << ", p2 = " << point_str(p2) << ": determinant = " << det
           << " (needs |det| >= " << kDeterminantTol
           << "); the two substrate rows are linearly dependent";
        throw assumption_error(os.str());
    }

    Stage2Result r;
    r.p1 = p1;
    r.p2 = p2;
    r.K1 = c1 * c2 * (S1 - S2) / det;
    r.K4 = S1 * S2 * (c2 * M1 - c1 * M2) / det;
    r.determinant = det;
    r.det_quality = det_quality(c1 * S2 * M2, c2 * S1 * M1);
    r.admissible = r.K1 > 0.0 && r.K4 > 0.0;
    return r;
}

Stage3Result recover_K2_K3(const FieldProbe& probe, double t3, double t4,
                           double K4) {
    if (std::abs(t3 - t4) < 1e-12)
        throw assumption_error("stage 3 needs two distinct times");
    for (double t : {t3, t4}) {
        const double m0 = probe.M(0.0, t), m1 = probe.M(1.0, t);
        if (std::abs(m0) > kBoundaryTol || std::abs(m1) > kBoundaryTol) {
            std::ostringstream os;
            os << "stage 3 assumes homogeneous biomass walls, but at t = " << t
               << " M(0) = " << m0 << ", M(1) = " << m1;
            throw assumption_error(os.str());
        }
    }

    // Rows of  E_i*K2 - Phi_i*K3 = Gamma_i - E'_i.
    const double E3 = probe.biomass(t3), E4 = probe.biomass(t4);
    const double P3 = probe.monod_integral(t3, K4);
    const double P4 = probe.monod_integral(t4, K4);
    const double r3 = probe.forcing_integral(t3) - probe.biomass_rate(t3);
    const double r4 = probe.forcing_integral(t4) - probe.biomass_rate(t4);

    const double det = E4 * P3 - E3 * P4;
    const double quality = det_quality(E4 * P3, E3 * P4);
    if (quality < kDeterminantTol) {
        std::ostringstream os;
        os << "stage 3 system is singular at t3 = " << t3 << ", t4 = " << t4
           << ": determinant = " << det << " (row-normalized quality " << quality
           << " below " << kDeterminantTol << ")";
        throw assumption_error(os.str());
    }

    Stage3Result r;
    r.t3 = t3;
    r.t4 = t4;
    r.K2 = snap_closed_bound((r4 * P3 - r3 * P4) / det, 0.0);
    r.K3 = (E3 * r4 - E4 * r3) / det;
    r.determinant = det;
    r.det_quality = quality;
    r.admissible = r.K2 >= 0.0 && r.K3 > 0.0;
    return r;
}

Stage4Result recover_a_b_d2(const FieldProbe& probe, const Point& p5,
                            const Point& p6, const Point& p7, double K2,
                            double K3, double K4) {
    const std::array<Point, 3> pts{p5, p6, p7};
    std::array<LogRow, 3> rows{log_row(probe, p5, K2, K3, K4),
                               log_row(probe, p6, K2, K3, K4),
                               log_row(probe, p7, K2, K3, K4)};

    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(rows[i].M - rows[j].M) < kDistinctMTol) {
                std::ostringstream os;
                os << "stage 4 needs pairwise distinct biomass values; points "
                   << point_str(pts[i]) << " and " << point_str(pts[j])
                   << " give M = " << rows[i].M << " and " << rows[j].M;
                throw assumption_error(os.str());
            }

    // Rows of  (-log(1-M_i))*a + log(M_i)*b + log(d2) = N_i.
    Mat3 A;
    for (int i = 0; i < 3; ++i)
        A.a[i] = {-std::log1p(-rows[i].M), std::log(rows[i].M), 1.0};

    const double det = A.det();
    if (det == 0.0)
        throw assumption_error("stage 4 log system is exactly singular");
    const Mat3 inv = inverse3(A, det);
    const double cond = A.norm_inf() * inv.norm_inf();
    if (!(cond <= kConditionLimit)) {
        std::ostringstream os;
        os << "stage 4 log system is ill-conditioned (condition estimate " << cond
           << " exceeds " << kConditionLimit << ")";
        throw assumption_error(os.str());
    }

    Stage4Result r;
    r.p5 = p5;
    r.p6 = p6;
    r.p7 = p7;
    const std::array<double, 3> N{rows[0].N, rows[1].N, rows[2].N};
    r.a = snap_closed_bound(
        inv.a[0][0] * N[0] + inv.a[0][1] * N[1] + inv.a[0][2] * N[2], 0.0);
    r.b = snap_closed_bound(
        inv.a[1][0] * N[0] + inv.a[1][1] * N[1] + inv.a[1][2] * N[2], 1.0);
    r.d2 = std::exp(inv.a[2][0] * N[0] + inv.a[2][1] * N[1] + inv.a[2][2] * N[2]);
    r.condition = cond;
    r.admissible = r.a >= 0.0 && r.b >= 1.0 && r.d2 > 0.0;
    return r;
}

RecoveryResult recover_all(const FieldProbe& probe, const EvaluationPoints& pts) {
    const Stage1Result s1 = recover_d1(probe, pts.p0);
    const Stage2Result s2 = recover_K1_K4(probe, pts.p1, pts.p2, s1.d1);
    const Stage3Result s3 = recover_K2_K3(probe, pts.t3, pts.t4, s2.K4);
    const Stage4Result s4 =
        recover_a_b_d2(probe, pts.p5, pts.p6, pts.p7, s3.K2, s3.K3, s2.K4);
    ParamVector params(s1.d1, s4.d2, s2.K1, s3.K2, s3.K3, s2.K4, s4.a, s4.b);
    return {s1, s2, s3, s4, params};
}

EvaluationPoints scan_points(const FieldProbe& probe, const ScanOptions& opt) {
    if (opt.nx < 3 || opt.nt < 3)
        throw domain_error("scan lattice needs at least 3 nodes per axis");
    if (!(opt.T > 0))
        throw domain_error("scan needs a positive time extent");

    std::vector<double> xs(opt.nx), ts(opt.nt);
    for (int i = 0; i < opt.nx; ++i)
        xs[i] = static_cast<double>(i) / (opt.nx - 1);
    for (int n = 0; n < opt.nt; ++n)
        ts[n] = opt.T * static_cast<double>(n) / (opt.nt - 1);

    EvaluationPoints pts{};

    // Stage 1: among points killing the reaction term, prefer the largest
    // curvature (the division is then best conditioned).
    std::optional<Stage1Result> s1;
    for (double x : xs)
        for (double t : ts) {
            try {
                Stage1Result r = recover_d1(probe, {x, t});
                if (!s1 || std::abs(r.curvature) > std::abs(s1->curvature)) s1 = r;
            } catch (const error&) {
            }
        }
    if (!s1)
        throw assumption_error(
            "scan: no lattice point isolates d1 (need S = 0 or M = 0 and nonzero "
            "substrate curvature)");
    pts.p0 = s1->p0;

    // Stage 2: precompute rows, then take the pair with the best relative
    // determinant. Large lattices are thinned to keep the pair loop cheap.
    struct Cand2 {
        Point p;
        double prod_self; // S*M at this point
        double c;
    };
    std::vector<Cand2> cand2;
    for (double x : xs)
        for (double t : ts) {
            try {
                const double M = probe.M(x, t);
                if (std::abs(M) < 1e-8) continue;
                const double S = probe.S(x, t);
                const double c = probe.dS_dt(x, t) - s1->d1 * probe.d2S_dx2(x, t) -
                                 probe.F(x, t);
                cand2.push_back({{x, t}, S * M, c});
            } catch (const error&) {
            }
        }
    if (cand2.size() > 200) {
        std::vector<Cand2> kept;
        for (int k = 0; k < 200; ++k)
            kept.push_back(cand2[static_cast<std::size_t>(k) * (cand2.size() - 1) / 199]);
        cand2 = std::move(kept);
    }
    double best_q2 = 0.0;
    std::optional<std::pair<Point, Point>> pair2;
    for (std::size_t i = 0; i < cand2.size(); ++i)
        for (std::size_t j = i + 1; j < cand2.size(); ++j) {
            const double q = det_quality(cand2[i].c * cand2[j].prod_self,
                                         cand2[j].c * cand2[i].prod_self);
            if (q > best_q2) {
                best_q2 = q;
                pair2 = {cand2[i].p, cand2[j].p};
            }
        }
    if (!pair2)
        throw assumption_error(
            "scan: no lattice pair gives independent rows for (K1, K4)");
    pts.p1 = pair2->first;
    pts.p2 = pair2->second;
    const Stage2Result s2 = recover_K1_K4(probe, pts.p1, pts.p2, s1->d1);

    // Stage 3: best time pair for the integrated balance.
    struct Cand3 {
        double t, E, P;
    };
    std::vector<Cand3> cand3;
    for (double t : ts) {
        try {
            for (double xw : {0.0, 1.0})
                if (std::abs(probe.M(xw, t)) > kBoundaryTol)
                    throw assumption_error("walls");
            probe.biomass_rate(t); // must be evaluable (interior level for samples)
            cand3.push_back({t, probe.biomass(t), probe.monod_integral(t, s2.K4)});
        } catch (const error&) {
        }
    }
    double best_q3 = 0.0;
    std::optional<std::pair<double, double>> pair3;
    for (std::size_t i = 0; i < cand3.size(); ++i)
        for (std::size_t j = i + 1; j < cand3.size(); ++j) {
            const double q =
                det_quality(cand3[j].E * cand3[i].P, cand3[i].E * cand3[j].P);
            if (q > best_q3) {
                best_q3 = q;
                pair3 = {cand3[i].t, cand3[j].t};
            }
        }
    if (!pair3 || best_q3 < kDeterminantTol)
        throw assumption_error(
            "scan: no time pair gives independent rows for (K2, K3)");
    pts.t3 = pair3->first;
    pts.t4 = pair3->second;
    const Stage3Result s3 = recover_K2_K3(probe, pts.t3, pts.t4, s2.K4);

    // Stage 4: collect critical points with usable logs, one per distinct M,
    // and pick the best-conditioned triple.
    struct Cand4 {
        Point p;
        double M;
    };
    std::vector<Cand4> cand4;
    for (double x : xs)
        for (double t : ts) {
            try {
                const LogRow row = log_row(probe, {x, t}, s3.K2, s3.K3, s2.K4);
                if (!(row.M > 1e-6) || !(row.M < 1.0 - 1e-6)) continue;
                bool duplicate = false;
                for (const Cand4& c : cand4)
                    if (std::abs(c.M - row.M) < kDistinctMTol) {
                        duplicate = true;
                        break;
                    }
                if (!duplicate) cand4.push_back({{x, t}, row.M});
            } catch (const error&) {
            }
        }
    if (cand4.size() > 24) {
        // Thin to 24 candidates evenly spread over the M range.
        std::sort(cand4.begin(), cand4.end(),
                  [](const Cand4& l, const Cand4& r) { return l.M < r.M; });
        std::vector<Cand4> kept;
        for (int k = 0; k < 24; ++k)
            kept.push_back(cand4[static_cast<std::size_t>(k) * (cand4.size() - 1) / 23]);
        cand4 = std::move(kept);
    }
    double best_cond = kConditionLimit;
    std::optional<std::array<Point, 3>> triple;
    for (std::size_t i = 0; i < cand4.size(); ++i)
        for (std::size_t j = i + 1; j < cand4.size(); ++j)
            for (std::size_t k = j + 1; k < cand4.size(); ++k) {
                Mat3 A;
                const std::array<double, 3> Ms{cand4[i].M, cand4[j].M, cand4[k].M};
                for (int r = 0; r < 3; ++r)
                    A.a[r] = {-std::log1p(-Ms[r]), std::log(Ms[r]), 1.0};
                const double det = A.det();
                if (det == 0.0) continue;
                const double cond = A.norm_inf() * inverse3(A, det).norm_inf();
                if (cond < best_cond) {
                    best_cond = cond;
                    triple = {cand4[i].p, cand4[j].p, cand4[k].p};
                }
            }
    if (!triple)
        throw assumption_error(
            "scan: no well-conditioned critical-point triple for (a, b, d2)");
    pts.p5 = (*triple)[0];
    pts.p6 = (*triple)[1];
    pts.p7 = (*triple)[2];
    recover_a_b_d2(probe, pts.p5, pts.p6, pts.p7, s3.K2, s3.K3, s2.K4);

    return pts;
}

} // namespace biofilm
