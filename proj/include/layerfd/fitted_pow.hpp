#pragma once

#include <span>
#include <utility>
#include <vector>

#include "layerfd/mesh.hpp"
#include "layerfd/problem.hpp"
#include "layerfd/solution.hpp"
#include "layerfd/solver.hpp"
#include "layerfd/tridiagonal.hpp"

namespace layerfd {

/// How the frozen reaction enters each linearized step.  Lagged is the
/// plain frozen-coefficient iteration (reaction values go to the right
/// hand side; interior rows keep zero row sums).  Chord additionally
/// folds a secant slope of the reaction at the iterate into the matrix;
/// for a reaction that is affine in u one sweep then lands on the
/// discrete solution exactly.
enum class ReactionTreatment { Lagged, Chord };

/// Per-interval frozen data of the power-layer scheme, index 1..N
/// (slot 0 unused): f_n = f(x_{n-1}, iterate_{n-1}) and
/// log_ratio_n = ln((eps+x_n)/(eps+x_{n-1})).
struct FittedPowCoefficients {
    std::vector<double> f, log_ratio;

    static FittedPowCoefficients from_iterate(const PowLayerProblem& p, const Mesh& mesh,
                                              std::span<const double> iterate);
};

/// Assemble the scheme in maximum-principle orientation:
///
/// Row 0:      V_0 = A.          Row N:  V_N = B.
/// Row n:      (1/h_n) V_{n-1} - (1/h_n + 1/h_{n+1}) V_n + (1/h_{n+1}) V_{n+1}
///               = f_n U_n + f_{n+1} W_{n+1},
/// with U_n = log_ratio_n/h_n - 1/(eps+x_n) >= 0 and
/// W_{n+1} = 1/(eps+x_n) - log_ratio_{n+1}/h_{n+1} >= 0, both computed
/// through log1p-companion series so nothing cancels when h << eps + x.
TridiagonalSystem assemble_pow_system(const PowLayerProblem& p, const Mesh& mesh,
                                      std::span<const double> iterate,
                                      ReactionTreatment treatment = ReactionTreatment::Lagged);

/// Assembly with prescribed per-interval constants f_n (frozen-problem
/// exactness checks).
TridiagonalSystem assemble_pow_from_constants(double epsilon, const Mesh& mesh,
                                              std::span<const double> f_values, double A,
                                              double B);

/// Piecewise reconstruction v(x) = -f_n ln(eps+x) + C1 x + C2 through
/// the nodal values.
DiscreteSolution reconstruct_pow(const PowLayerProblem& p, const Mesh& mesh,
                                 std::vector<double> values);
DiscreteSolution reconstruct_pow_from_constants(double epsilon, const Mesh& mesh,
                                                std::span<const double> f_values,
                                                std::vector<double> values);

/// Full nonlinear solve from the straight-line initial iterate A -> B.
/// Chord is the default: with the reaction fully lagged the fixed-point
/// map's amplification grows like ln(1 + 1/eps) and the iteration
/// diverges for small eps, while the chord-folded matrix keeps the
/// comparison structure (diagonal excess >= alpha) at every step.
std::pair<DiscreteSolution, SolveStats> solve_pow(const PowLayerProblem& p, const Mesh& mesh,
                                                  const SolveOptions& opts,
                                                  ReactionTreatment treatment = ReactionTreatment::Chord);

}  // namespace layerfd
