#pragma once

#include <vector>

namespace biofilm {

// Tridiagonal system: diag has n entries, sub and super have n-1.
// Row k reads  sub[k-1]*u[k-1] + diag[k]*u[k] + super[k]*u[k+1] = rhs[k].
struct TridiagonalSystem {
    std::vector<double> sub, diag, super, rhs;

    std::size_t size() const { return diag.size(); }
};

// Thomas algorithm without pivoting. Throws singular_system_error (with the
// offending row) when an eliminated pivot falls below 1e-14 in magnitude.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys);

// Prefactored constant-matrix variant: factor once, apply to many right-hand
// sides. Same pivot policy as solve_tridiagonal.
class TridiagonalFactor {
public:
    TridiagonalFactor(std::vector<double> sub, std::vector<double> diag,
                      std::vector<double> super);

    // Solve in place: rhs becomes the solution.
    void solve(std::vector<double>& rhs) const;

private:
    std::vector<double> sub_;    // elimination multipliers
    std::vector<double> super_;
    std::vector<double> pivot_;  // eliminated diagonal
};

} // namespace biofilm
