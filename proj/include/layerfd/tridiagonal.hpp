#pragma once

#include <span>
#include <vector>

namespace layerfd {

/// Tridiagonal linear system of size N+1.  lower[0] and upper[N] are
/// unused.  Row i reads lower[i]*v[i-1] + diag[i]*v[i] + upper[i]*v[i+1] = rhs[i].
struct TridiagonalSystem {
    std::vector<double> lower, diag, upper, rhs;

    explicit TridiagonalSystem(std::size_t size)
        : lower(size, 0.0), diag(size, 0.0), upper(size, 0.0), rhs(size, 0.0) {}

    std::size_t size() const { return diag.size(); }
    bool all_finite() const;
};

/// Normwise per-row backward error: max_i |r_i| / scale_i with
/// r = A v - rhs and scale_i the sum of the magnitudes of row i's
/// contributions.  Scale-invariant, so usable across eps regimes.
double relative_residual(const TridiagonalSystem& sys, std::span<const double> v);

}  // namespace layerfd
