#include "layerfd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "layerfd/tridiagonal.hpp"

namespace layerfd {

namespace {
constexpr double kPivotFloor = 1e-300;

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}
}  // namespace

SingularSystemError::SingularSystemError(std::size_t row, double pivot)
    : std::runtime_error("singular tridiagonal system: pivot " + std::to_string(pivot) +
                         " in row " + std::to_string(row)),
      row_(row) {}

std::vector<double> sweep(const TridiagonalSystem& sys) {
    const std::size_t n = sys.size();
    if (n == 0) return {};
    std::vector<double> c(n, 0.0);  // eliminated upper coefficients
    std::vector<double> v(n, 0.0);  // forward-substituted rhs, then solution

    double pivot = sys.diag[0];
    if (std::fabs(pivot) < kPivotFloor) throw SingularSystemError(0, pivot);
    c[0] = sys.upper[0] / pivot;
    v[0] = sys.rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = sys.diag[i] - sys.lower[i] * c[i - 1];
        if (std::fabs(pivot) < kPivotFloor) throw SingularSystemError(i, pivot);
        if (i + 1 < n) c[i] = sys.upper[i] / pivot;
        v[i] = (sys.rhs[i] - sys.lower[i] * v[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) v[i] -= c[i] * v[i + 1];
    return v;
}

std::pair<std::vector<double>, SolveStats> picard_solve(const AssembleFn& assemble,
                                                        std::vector<double> initial,
                                                        const SolveOptions& opts) {
    if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (opts.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
    if (!(opts.damping > 0.0) || opts.damping > 1.0)
        throw std::invalid_argument("damping must lie in (0, 1]");

    std::vector<double> v = std::move(initial);
    SolveStats stats;
    std::vector<double> best;
    double best_update = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        TridiagonalSystem sys = assemble(v);
        std::vector<double> next = sweep(sys);
        double update = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            double damped = (1.0 - opts.damping) * v[i] + opts.damping * next[i];
            update = std::max(update, std::fabs(damped - v[i]));
            v[i] = damped;
        }
        for (double x : v)
            if (!std::isfinite(x))
                throw std::runtime_error("picard iteration produced a non-finite iterate");
        stats.iterations = iter;
        stats.final_update_norm = update;
        if (update <= opts.tol * (1.0 + sup_norm(v))) {
            stats.converged = true;
            break;
        }
        // on non-convergence, hand back the iterate closest to a fixed
        // point rather than wherever a diverging sequence stopped
        if (update < best_update) {
            best_update = update;
            best = v;
        }
    }
    if (!stats.converged && !best.empty()) {
        v = std::move(best);
        stats.final_update_norm = best_update;
    }
    stats.final_residual_norm = relative_residual(assemble(v), v);
    return {std::move(v), stats};
}

}  // namespace layerfd
