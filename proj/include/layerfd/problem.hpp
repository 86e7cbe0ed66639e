#pragma once

#include <string>
#include <vector>

#include "layerfd/expression.hpp"

namespace layerfd {

// Problem records are plain immutable values: construct, then share
// freely across threads.

/// Nonlinear convection problem with an exponential layer at x = L:
///
///   -eps u'' + a(x) u' + g(u) = 0 on (0, L),
///   u(0) = A,   eps u'(L) + f(u(L)) = 0,
///
/// under a(x) >= alpha > 0, dg/du >= -beta, df/du >= 0 and
/// alpha^2 - 4 eps beta >= gamma > 0.
struct ExpLayerProblem {
    double epsilon;
    Expression a;           // convection coefficient, in x
    Expression g;           // reaction, in u
    Expression f_boundary;  // Robin nonlinearity, in u
    double A;               // u(0)
    double L;               // domain length
    double alpha;
    double beta;
    double gamma;

    ExpLayerProblem(double epsilon, Expression a, Expression g, Expression f_boundary,
                    double A, double L, double alpha, double beta, double gamma);
};

/// Reaction-diffusion problem with a power-law layer at x = 0:
///
///   (eps + x)^2 u'' - f(x, u) = 0 on (0, 1),
///   u(0) = A,   u(1) = B,
///
/// under df/du >= alpha > 0.
struct PowLayerProblem {
    double epsilon;
    Expression f;  // in (x, u)
    double A;
    double B;
    double alpha;

    PowLayerProblem(double epsilon, Expression f, double A, double B, double alpha);
};

struct AssumptionViolation {
    std::string condition;  // e.g. "a(x) >= alpha"
    double sample;          // sample point where the condition failed
    double observed;
};

struct AssumptionReport {
    bool passed = true;
    std::vector<AssumptionViolation> violations;
};

struct Interval {
    double lo;
    double hi;
};

/// Default u-range for assumption sampling, sized to dominate the
/// solution bounds with margin: [-10(1+|A|+|B|), +10(1+|A|+|B|)].
Interval default_u_range(double A, double B_or_zero);

/// Sample a(x) >= alpha on a uniform x-grid over [0, L], dg/du >= -beta
/// and df/du >= 0 on a uniform u-grid, and re-check
/// alpha^2 - 4 eps beta >= gamma.  Sampling is advisory: it can refute
/// the assumptions but not prove them.
AssumptionReport validate_exp_assumptions(const ExpLayerProblem& p, int x_samples,
                                          Interval u_range, int u_samples);

/// Sample df/du >= alpha over the (x, u) grid.
AssumptionReport validate_pow_assumptions(const PowLayerProblem& p, int x_samples,
                                          Interval u_range, int u_samples);

}  // namespace layerfd
