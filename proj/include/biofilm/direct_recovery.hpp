#pragma once

#include "biofilm/params.hpp"
#include "biofilm/probe.hpp"

namespace biofilm {

struct Point {
    double x;
    double t;
};

// Tolerances shared by the staged recovery and the point scanner.
namespace recovery_limits {
constexpr double kValueTol = 1e-10;       // "S or M vanishes" threshold at p0
constexpr double kCurvatureTol = 1e-10;   // |d2S/dx2| floor at p0
constexpr double kBoundaryTol = 1e-8;     // homogeneous biomass walls (stage 3)
constexpr double kGradientTol = 1e-8;     // |dM/dx| at a usable critical point
constexpr double kDeterminantTol = 1e-10; // stage-2 absolute / stage-3 relative floor
constexpr double kLaplacianTol = 1e-10;   // |d2M/dx2| floor at stage-4 points
constexpr double kDistinctMTol = 1e-6;    // pairwise M separation in stage 4
constexpr double kConditionLimit = 1e12;  // stage-4 condition ceiling
} // namespace recovery_limits

// Evaluation points for the four recovery stages:
//   p0         point with S = 0 or M = 0 (kills the reaction term; isolates d1),
//   p1, p2     points with independent substrate rows (K1, K4),
//   t3, t4     times for the integrated biomass balance (K2, K3),
//   p5, p6, p7 spatial critical points of M with distinct values (a, b, d2).
// Points normally lie inside the open space-time domain; analytic probes also
// accept points on its closure (sampled probes reject them when a derivative
// stencil would leave the grid).
struct EvaluationPoints {
    Point p0;
    Point p1, p2;
    double t3, t4;
    Point p5, p6, p7;
};

// Each stage reports the values it produced plus an `admissible` flag for the
// bounds that stage is responsible for. The only adjustment ever applied:
// values within 1e-12 below a closed bound (K2 >= 0, a >= 0, b >= 1) are
// projected onto it, since a true value sitting exactly on the bound comes
// back with roundoff of either sign. Larger violations are kept raw and
// flagged.
struct Stage1Result {
    Point p0;
    double d1;
    double curvature;  // d2S/dx2 at p0 (the denominator actually used)
    bool admissible;   // d1 > 0
};

struct Stage2Result {
    Point p1, p2;
    double K1, K4;
    double determinant;
    double det_quality; // |det| relative to the row magnitude, in [0,1]
    bool admissible;    // K1 > 0 and K4 > 0
};

struct Stage3Result {
    double t3, t4;
    double K2, K3;
    double determinant;
    double det_quality;
    bool admissible; // K2 >= 0 and K3 > 0
};

struct Stage4Result {
    Point p5, p6, p7;
    double a, b, d2;
    double condition; // infinity-norm condition estimate of the 3x3 system
    bool admissible;  // a >= 0, b >= 1, d2 > 0
};

struct RecoveryResult {
    Stage1Result stage1;
    Stage2Result stage2;
    Stage3Result stage3;
    Stage4Result stage4;
    ParamVector params; // assembled from the four stages; always admissible
};

// Stage 1: d1 = (dS/dt - F) / (d2S/dx2) at a point where S or M vanishes, so
// the unknown reaction term drops out. Throws assumption_error when neither
// factor vanishes (within 1e-10) or |d2S/dx2| < 1e-10.
Stage1Result recover_d1(const FieldProbe& probe, const Point& p0);

// Stage 2: with c_i = dS/dt - d1*d2S/dx2 - F at p_i, the substrate equation
// gives the linear rows  c_i*K4 + (S_i*M_i)*K1 = -c_i*S_i, whence
//   K1 = (S1-S2)*c1*c2/det,  K4 = S1*S2*(c2*M1 - c1*M2)/det,
//   det = c1*S2*M2 - c2*S1*M1.
// Throws assumption_error when |det| < 1e-10.
Stage2Result recover_K1_K4(const FieldProbe& probe, const Point& p1,
                           const Point& p2, double d1);

// Stage 3: the biomass balance integrated over [0,1],
//   E'(t) = -K2*E(t) + K3*Phi(t) + Gamma(t),
// with E the total biomass, Phi the integrated Monod term (needs K4) and
// Gamma the integrated source, evaluated at t3 and t4. Requires homogeneous
// biomass walls (so the diffusive flux integrates away) and a row-normalized
// determinant >= 1e-10.
Stage3Result recover_K2_K3(const FieldProbe& probe, double t3, double t4,
                           double K4);

// Stage 4: at a spatial critical point of M the diffusion term reduces to
// d2 * lambda(M) * d2M/dx2, so with R = dM/dt - G + K2*M - K3*monod,
//   -log(1-M)*a + log(M)*b + log(d2) = log(R / (d2M/dx2)).
// Three points with distinct M in (0,1) give a 3x3 linear system; the bracket
// R/(d2M/dx2) must be positive at each point.
Stage4Result recover_a_b_d2(const FieldProbe& probe, const Point& p5,
                            const Point& p6, const Point& p7, double K2,
                            double K3, double K4);

// All four stages in order, feeding each stage the constants recovered by the
// previous ones. Throws assumption_error if any stage hypothesis fails and
// domain_error if the assembled vector is inadmissible.
RecoveryResult recover_all(const FieldProbe& probe, const EvaluationPoints& pts);

struct ScanOptions {
    int nx = 21;    // lattice nodes in x over [0,1]
    int nt = 21;    // lattice nodes in t over [0,T]
    double T = 1.0;
};

// Search a uniform lattice for admissible, well-conditioned evaluation
// points, greedily stage by stage (later stages reuse the constants the
// earlier ones produced; each stage maximizes its own determinant quality or
// conditioning). Candidates whose probe evaluations throw are skipped, so the
// scan works with sampled probes that reject boundary nodes. Ties break
// toward smaller (x, t). Throws assumption_error naming the stage when no
// admissible candidates exist on the lattice.
EvaluationPoints scan_points(const FieldProbe& probe, const ScanOptions& opt = {});

} // namespace biofilm
