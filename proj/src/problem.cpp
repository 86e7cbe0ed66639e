#include "layerfd/problem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace layerfd {

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

void record(AssumptionReport& report, std::string condition, double sample, double observed) {
    report.passed = false;
    report.violations.push_back({std::move(condition), sample, observed});
}

double grid_point(double lo, double hi, int i, int count) {
    return lo + (hi - lo) * i / (count - 1);
}

// Derivative conditions are checked through the finite-difference
// derivative, so a comparison right at the threshold needs slack for
// the differencing noise; 1e-7 relative is two orders above it and
// three below the checker's documented 1e-5 accuracy.
double derivative_slack(double threshold, double observed) {
    return 1e-7 * (1.0 + std::fabs(threshold) + std::fabs(observed));
}

}  // namespace

ExpLayerProblem::ExpLayerProblem(double epsilon_, Expression a_, Expression g_,
                                 Expression f_boundary_, double A_, double L_, double alpha_,
                                 double beta_, double gamma_)
    : epsilon(epsilon_),
      a(std::move(a_)),
      g(std::move(g_)),
      f_boundary(std::move(f_boundary_)),
      A(A_),
      L(L_),
      alpha(alpha_),
      beta(beta_),
      gamma(gamma_) {
    require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0, 1]");
    require(L > 0.0, "domain length L must be positive");
    require(alpha > 0.0, "alpha must be positive");
    require(beta > 0.0, "beta must be positive");
    require(gamma > 0.0, "gamma must be positive");
    require(alpha * alpha - 4.0 * epsilon * beta >= gamma,
            "assumption alpha^2 - 4*eps*beta >= gamma violated");
}

PowLayerProblem::PowLayerProblem(double epsilon_, Expression f_, double A_, double B_,
                                 double alpha_)
    : epsilon(epsilon_), f(std::move(f_)), A(A_), B(B_), alpha(alpha_) {
    require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0, 1]");
    require(alpha > 0.0, "alpha must be positive");
}

Interval default_u_range(double A, double B_or_zero) {
    double half_width = 10.0 * (1.0 + std::fabs(A) + std::fabs(B_or_zero));
    return {-half_width, half_width};
}

AssumptionReport validate_exp_assumptions(const ExpLayerProblem& p, int x_samples,
                                          Interval u_range, int u_samples) {
    require(x_samples >= 2 && u_samples >= 2, "sample counts must be at least 2");
    require(u_range.hi > u_range.lo, "u_range must be non-degenerate");

    AssumptionReport report;
    if (p.alpha * p.alpha - 4.0 * p.epsilon * p.beta < p.gamma)
        record(report, "alpha^2 - 4*eps*beta >= gamma", p.epsilon,
               p.alpha * p.alpha - 4.0 * p.epsilon * p.beta);

    for (int i = 0; i < x_samples; ++i) {
        double x = grid_point(0.0, p.L, i, x_samples);
        try {
            double ax = p.a.evaluate({{"x", x}, {"eps", p.epsilon}});
            if (!(ax >= p.alpha)) record(report, "a(x) >= alpha", x, ax);
        } catch (const EvalError& e) {
            record(report, std::string("a(x) evaluation: ") + e.what(), x,
                   std::numeric_limits<double>::quiet_NaN());
        }
    }
    for (int i = 0; i < u_samples; ++i) {
        double u = grid_point(u_range.lo, u_range.hi, i, u_samples);
        Bindings at{{"u", u}, {"eps", p.epsilon}};
        try {
            double gu = p.g.derivative_at("u", at);
            if (!(gu >= -p.beta - derivative_slack(p.beta, gu)))
                record(report, "dg/du >= -beta", u, gu);
        } catch (const EvalError& e) {
            record(report, std::string("dg/du evaluation: ") + e.what(), u,
                   std::numeric_limits<double>::quiet_NaN());
        }
        try {
            double fu = p.f_boundary.derivative_at("u", at);
            if (!(fu >= -derivative_slack(0.0, fu))) record(report, "df/du >= 0", u, fu);
        } catch (const EvalError& e) {
            record(report, std::string("df/du evaluation: ") + e.what(), u,
                   std::numeric_limits<double>::quiet_NaN());
        }
    }
    return report;
}

AssumptionReport validate_pow_assumptions(const PowLayerProblem& p, int x_samples,
                                          Interval u_range, int u_samples) {
    require(x_samples >= 2 && u_samples >= 2, "sample counts must be at least 2");
    require(u_range.hi > u_range.lo, "u_range must be non-degenerate");

    AssumptionReport report;
    for (int i = 0; i < x_samples; ++i) {
        double x = grid_point(0.0, 1.0, i, x_samples);
        for (int j = 0; j < u_samples; ++j) {
            double u = grid_point(u_range.lo, u_range.hi, j, u_samples);
            try {
                double fu = p.f.derivative_at("u", {{"x", x}, {"u", u}, {"eps", p.epsilon}});
                if (!(fu >= p.alpha - derivative_slack(p.alpha, fu)))
                    record(report, "df/du >= alpha", u, fu);
            } catch (const EvalError& e) {
                record(report, std::string("df/du evaluation: ") + e.what(), u,
                       std::numeric_limits<double>::quiet_NaN());
            }
        }
    }
    return report;
}

}  // namespace layerfd
