#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "layerfd/tridiagonal.hpp"

namespace layerfd {

class SingularSystemError : public std::runtime_error {
public:
    SingularSystemError(std::size_t row, double pivot);
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

struct SolveOptions {
    double tol = 1e-10;   // relative sup-norm update threshold
    int max_iter = 100;
    double damping = 1.0;  // in (0, 1]; 1 = undamped
};

struct SolveStats {
    int iterations = 0;
    double final_update_norm = 0.0;
    double final_residual_norm = 0.0;  // residual of the system assembled at the final iterate
    bool converged = false;
};

/// Thomas sweep: forward elimination, back substitution.  Pivots are
/// checked against a floor of 1e-300; a smaller pivot raises
/// SingularSystemError naming the row.
std::vector<double> sweep(const TridiagonalSystem& sys);

using AssembleFn = std::function<TridiagonalSystem(std::span<const double>)>;

/// Frozen-coefficient (Picard) iteration: repeat
///   V <- (1 - damping) V + damping * sweep(assemble(V))
/// until the sup-norm update drops below tol * (1 + max|V|) or max_iter
/// is reached.  On non-convergence the iterate with the smallest update
/// norm is returned with converged = false.  A non-finite iterate
/// aborts.
std::pair<std::vector<double>, SolveStats> picard_solve(const AssembleFn& assemble,
                                                        std::vector<double> initial,
                                                        const SolveOptions& opts);

}  // namespace layerfd
