#include "biofilm/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "biofilm/errors.hpp"

namespace biofilm {

namespace {

constexpr double kPivotTol = 1e-14;

void check_shapes(std::size_t n, std::size_t nsub, std::size_t nsuper,
                  std::size_t nrhs) {
    if (n < 1)
        throw contract_error("tridiagonal system must have at least one row");
    if (nsub != n - 1 || nsuper != n - 1)
        throw contract_error("tridiagonal off-diagonals must have n-1 entries");
    if (nrhs != 0 && nrhs != n)
        throw contract_error("tridiagonal rhs length does not match the matrix");
}

} // namespace

std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys) {
    const std::size_t n = sys.size();
    check_shapes(n, sys.sub.size(), sys.super.size(), sys.rhs.size());

    std::vector<double> pivot(sys.diag), u(sys.rhs);

    // Forward elimination.
    if (std::abs(pivot[0]) < kPivotTol)
        throw singular_system_error("tridiagonal pivot below tolerance", 0);
    for (std::size_t k = 1; k < n; ++k) {
        const double m = sys.sub[k - 1] / pivot[k - 1];
        pivot[k] -= m * sys.super[k - 1];
        u[k] -= m * u[k - 1];
        if (std::abs(pivot[k]) < kPivotTol)
            throw singular_system_error("tridiagonal pivot below tolerance",
                                        static_cast<int>(k));
    }

    // Back substitution.
    u[n - 1] /= pivot[n - 1];
    for (std::size_t k = n - 1; k-- > 0;)
        u[k] = (u[k] - sys.super[k] * u[k + 1]) / pivot[k];

    // Residual postcondition: the computed solution must actually satisfy the
    // system to round-off, scaled by the data magnitude.
    double rhs_max = 0.0, res_max = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double r = sys.diag[k] * u[k] - sys.rhs[k];
        if (k > 0) r += sys.sub[k - 1] * u[k - 1];
        if (k + 1 < n) r += sys.super[k] * u[k + 1];
        res_max = std::max(res_max, std::abs(r));
        rhs_max = std::max(rhs_max, std::abs(sys.rhs[k]));
    }
    if (res_max > 1e-10 * (1.0 + rhs_max))
        throw singular_system_error(
            "tridiagonal solve residual exceeds tolerance (ill-conditioned system)",
            -1);

    return u;
}

TridiagonalFactor::TridiagonalFactor(std::vector<double> sub,
                                     std::vector<double> diag,
                                     std::vector<double> super)
    : sub_(std::move(sub)), super_(std::move(super)), pivot_(std::move(diag)) {
    const std::size_t n = pivot_.size();
    check_shapes(n, sub_.size(), super_.size(), 0);

    if (std::abs(pivot_[0]) < kPivotTol)
        throw singular_system_error("tridiagonal pivot below tolerance", 0);
    for (std::size_t k = 1; k < n; ++k) {
        sub_[k - 1] /= pivot_[k - 1]; // store the multiplier
        pivot_[k] -= sub_[k - 1] * super_[k - 1];
        if (std::abs(pivot_[k]) < kPivotTol)
            throw singular_system_error("tridiagonal pivot below tolerance",
                                        static_cast<int>(k));
    }
}

void TridiagonalFactor::solve(std::vector<double>& rhs) const {
    const std::size_t n = pivot_.size();
    if (rhs.size() != n)
        throw contract_error("tridiagonal rhs length does not match the factor");

    for (std::size_t k = 1; k < n; ++k)
        rhs[k] -= sub_[k - 1] * rhs[k - 1];
    rhs[n - 1] /= pivot_[n - 1];
    for (std::size_t k = n - 1; k-- > 0;)
        rhs[k] = (rhs[k] - super_[k] * rhs[k + 1]) / pivot_[k];
}

} // namespace biofilm
