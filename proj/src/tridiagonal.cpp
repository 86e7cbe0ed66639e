#include "layerfd/tridiagonal.hpp"

#include <cmath>
#include <stdexcept>

namespace layerfd {

bool TridiagonalSystem::all_finite() const {
    std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(diag[i]) || !std::isfinite(rhs[i])) return false;
        if (i > 0 && !std::isfinite(lower[i])) return false;
        if (i + 1 < n && !std::isfinite(upper[i])) return false;
    }
    return true;
}

double relative_residual(const TridiagonalSystem& sys, std::span<const double> v) {
    std::size_t n = sys.size();
    if (v.size() != n) throw std::invalid_argument("vector length does not match system size");
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = sys.diag[i] * v[i] - sys.rhs[i];
        double scale = std::fabs(sys.diag[i] * v[i]) + std::fabs(sys.rhs[i]);
        if (i > 0) {
            r += sys.lower[i] * v[i - 1];
            scale += std::fabs(sys.lower[i] * v[i - 1]);
        }
        if (i + 1 < n) {
            r += sys.upper[i] * v[i + 1];
            scale += std::fabs(sys.upper[i] * v[i + 1]);
        }
        if (scale == 0.0) scale = 1.0;
        worst = std::max(worst, std::fabs(r) / scale);
    }
    return worst;
}

}  // namespace layerfd
