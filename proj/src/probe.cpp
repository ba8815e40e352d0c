#include "biofilm/probe.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <utility>

#include "biofilm/errors.hpp"
#include "biofilm/kinetics.hpp"

namespace biofilm {

namespace {

constexpr double kSnapTol = 1e-9;
constexpr int kQuadNodes = 401; // composite Simpson resolution for analytic integrands

double simpson01(const std::function<double(double)>& f) {
    const int n = kQuadNodes - 1;
    const double h = 1.0 / n;
    double sum = f(0.0) + f(1.0);
    for (int k = 1; k < n; ++k)
        sum += f(k * h) * ((k % 2) ? 4.0 : 2.0);
    return sum * h / 3.0;
}

int snap(double value, int count, double extent, const char* what) {
    const double step = extent / (count - 1);
    int idx = static_cast<int>(std::floor(value / step + 0.5));
    if (idx < 0) idx = 0;
    if (idx > count - 1) idx = count - 1;
    const double node = extent * static_cast<double>(idx) / (count - 1);
    if (std::fabs(value - node) > kSnapTol) {
        std::ostringstream os;
        os << "probe evaluated off-grid: " << what << " = " << value
           << " is not a node (nearest " << node << ")";
        throw domain_error(os.str());
    }
    return idx;
}

int snap_interior(double value, int count, double extent, const char* what) {
    const int idx = snap(value, count, extent, what);
    if (idx == 0 || idx == count - 1) {
        std::ostringstream os;
        os << "sampled derivative needs an interior " << what << ", got " << value;
        throw domain_error(os.str());
    }
    return idx;
}

} // namespace

FieldProbe FieldProbe::from_case(const ManufacturedCase& mcase) {
    FieldProbe p;
    p.S_ = mcase.exact_S;
    p.M_ = mcase.exact_M;
    p.dS_dt_ = mcase.dS_dt;
    p.dM_dt_ = mcase.dM_dt;
    p.dM_dx_ = mcase.dM_dx;
    p.d2S_dx2_ = mcase.d2S_dx2;
    p.d2M_dx2_ = mcase.d2M_dx2;
    p.F_ = mcase.data.F;
    p.G_ = mcase.data.G;

    const SpaceTimeFn M = mcase.exact_M;
    const SpaceTimeFn S = mcase.exact_S;
    const SpaceTimeFn Mt = mcase.dM_dt;
    const SpaceTimeFn G = mcase.data.G;

    p.biomass_ = [M](double t) {
        return simpson01([&](double x) { return M(x, t); });
    };
    p.biomass_rate_ = [Mt](double t) {
        return simpson01([&](double x) { return Mt(x, t); });
    };
    p.forcing_integral_ = [G](double t) {
        return simpson01([&](double x) { return G(x, t); });
    };
    p.monod_integral_ = [S, M](double t, double K4) {
        return simpson01([&](double x) { return monod(S(x, t), M(x, t), K4); });
    };
    return p;
}

FieldProbe FieldProbe::from_solution(FieldSolution solution, ProblemData data) {
    auto sol = std::make_shared<const FieldSolution>(std::move(solution));
    auto dat = std::make_shared<const ProblemData>(std::move(data));
    const int I = sol->grid.I, N = sol->grid.N;
    const double T = sol->grid.T, dx = sol->grid.dx(), dt = sol->grid.dt();

    FieldProbe p;
    p.S_ = [=](double x, double t) {
        return sol->S(snap(x, I, 1.0, "x"), snap(t, N, T, "t"));
    };
    p.M_ = [=](double x, double t) {
        return sol->M(snap(x, I, 1.0, "x"), snap(t, N, T, "t"));
    };
    p.dS_dt_ = [=](double x, double t) {
        const int i = snap(x, I, 1.0, "x"), n = snap_interior(t, N, T, "t");
        return (sol->S(i, n + 1) - sol->S(i, n - 1)) / (2.0 * dt);
    };
    p.dM_dt_ = [=](double x, double t) {
        const int i = snap(x, I, 1.0, "x"), n = snap_interior(t, N, T, "t");
        return (sol->M(i, n + 1) - sol->M(i, n - 1)) / (2.0 * dt);
    };
    p.dM_dx_ = [=](double x, double t) {
        const int i = snap_interior(x, I, 1.0, "x"), n = snap(t, N, T, "t");
        return (sol->M(i + 1, n) - sol->M(i - 1, n)) / (2.0 * dx);
    };
    p.d2S_dx2_ = [=](double x, double t) {
        const int i = snap_interior(x, I, 1.0, "x"), n = snap(t, N, T, "t");
        return (sol->S(i + 1, n) - 2.0 * sol->S(i, n) + sol->S(i - 1, n)) / (dx * dx);
    };
    p.d2M_dx2_ = [=](double x, double t) {
        const int i = snap_interior(x, I, 1.0, "x"), n = snap(t, N, T, "t");
        return (sol->M(i + 1, n) - 2.0 * sol->M(i, n) + sol->M(i - 1, n)) / (dx * dx);
    };
    p.F_ = [dat](double x, double t) { return dat->F(x, t); };
    p.G_ = [dat](double x, double t) { return dat->G(x, t); };

    // Trapezoid over the grid nodes; exact enough (O(dx^2)) to pair with the
    // centered differences above. Too-coarse grids give meaningless integrals.
    auto check_quadrature = [I] {
        if (I < 5)
            throw domain_error(
                "sampled-probe quadrature needs at least 5 spatial nodes");
    };
    auto biomass_at = [sol, I, dx, check_quadrature](int n) {
        check_quadrature();
        double sum = 0.5 * (sol->M(0, n) + sol->M(I - 1, n));
        for (int i = 1; i < I - 1; ++i) sum += sol->M(i, n);
        return dx * sum;
    };
    p.biomass_ = [=](double t) { return biomass_at(snap(t, N, T, "t")); };
    p.biomass_rate_ = [=](double t) {
        const int n = snap_interior(t, N, T, "t");
        return (biomass_at(n + 1) - biomass_at(n - 1)) / (2.0 * dt);
    };
    p.forcing_integral_ = [dat](double t) {
        return simpson01([&](double x) { return dat->G(x, t); });
    };
    p.monod_integral_ = [=](double t, double K4) {
        check_quadrature();
        const int n = snap(t, N, T, "t");
        double sum = 0.5 * (monod(sol->S(0, n), sol->M(0, n), K4) +
                            monod(sol->S(I - 1, n), sol->M(I - 1, n), K4));
        for (int i = 1; i < I - 1; ++i)
            sum += monod(sol->S(i, n), sol->M(i, n), K4);
        return dx * sum;
    };
    return p;
}

} // namespace biofilm
