#include "layerfd/fitted_exp.hpp"

#include <cmath>
#include <stdexcept>

namespace layerfd {

namespace {

// (1 - s(theta)) without cancellation: (theta + expm1(-theta))/theta,
// series (theta/2)(1 - theta/3 (1 - theta/4 (1 - theta/5))) near zero.
double one_minus_s(double theta) {
    if (theta < 1e-3)
        return (theta / 2.0) * (1.0 - (theta / 3.0) * (1.0 - (theta / 4.0) * (1.0 - theta / 5.0)));
    return (theta + std::expm1(-theta)) / theta;
}

// (s - e^{-theta}) = (1 - (1+theta) e^{-theta})/theta, same treatment.
double s_minus_decay(double theta) {
    if (theta < 1e-3)
        return (theta / 2.0) * (1.0 - 2.0 * theta / 3.0 + theta * theta / 4.0 -
                                theta * theta * theta / 15.0);
    return (1.0 - (1.0 + theta) * std::exp(-theta)) / theta;
}

// Symmetric secant slope of the Robin nonlinearity at the iterate.
// Unit half-width makes it exact for affine f; for general monotone f
// any secant keeps the boundary row diagonally dominant, so the slope
// is clamped below by zero.
double boundary_slope(const ExpLayerProblem& p, double center) {
    double fp, fm;
    try {
        fp = p.f_boundary.evaluate({{"u", center + 1.0}, {"eps", p.epsilon}});
        fm = p.f_boundary.evaluate({{"u", center - 1.0}, {"eps", p.epsilon}});
        return std::max(0.0, (fp - fm) / 2.0);
    } catch (const EvalError&) {
        return std::max(0.0, p.f_boundary.derivative_at("u", {{"u", center}, {"eps", p.epsilon}}));
    }
}

}  // namespace

double fitting_factor(double epsilon, double a_n, double h_n) {
    if (!(epsilon > 0.0) || !(a_n > 0.0) || !(h_n > 0.0))
        throw std::invalid_argument("fitting_factor arguments must be positive");
    double theta = a_n * h_n / epsilon;
    return -std::expm1(-theta) / theta;
}

FittedExpCoefficients FittedExpCoefficients::from_iterate(const ExpLayerProblem& p,
                                                          const Mesh& mesh,
                                                          std::span<const double> iterate,
                                                          SignConvention signs) {
    const int N = mesh.intervals();
    if (iterate.size() != static_cast<std::size_t>(N) + 1)
        throw std::invalid_argument("iterate length does not match mesh");
    FittedExpCoefficients c;
    c.a.assign(static_cast<std::size_t>(N) + 1, 0.0);
    c.g.assign(static_cast<std::size_t>(N) + 1, 0.0);
    c.theta.assign(static_cast<std::size_t>(N) + 1, 0.0);
    c.s.assign(static_cast<std::size_t>(N) + 1, 0.0);
    c.decay.assign(static_cast<std::size_t>(N) + 1, 0.0);
    const double gsign = (signs == SignConvention::AsPrinted) ? -1.0 : 1.0;
    for (int n = 1; n <= N; ++n) {
        double x_left = mesh.node(n - 1);
        double a_n = p.a.evaluate({{"x", x_left}, {"eps", p.epsilon}});
        if (!(a_n > 0.0))
            throw EvalError("convection coefficient a(x) must stay positive on the mesh");
        double g_n = p.g.evaluate({{"u", iterate[static_cast<std::size_t>(n) - 1]},
                                   {"eps", p.epsilon}});
        c.a[static_cast<std::size_t>(n)] = a_n;
        c.g[static_cast<std::size_t>(n)] = gsign * g_n;
        c.theta[static_cast<std::size_t>(n)] = a_n * mesh.step(n) / p.epsilon;
        c.s[static_cast<std::size_t>(n)] = fitting_factor(p.epsilon, a_n, mesh.step(n));
        c.decay[static_cast<std::size_t>(n)] = std::exp(-c.theta[static_cast<std::size_t>(n)]);
    }
    return c;
}

FittedExpCoefficients FittedExpCoefficients::from_constants(double epsilon, const Mesh& mesh,
                                                            std::span<const double> a_values,
                                                            std::span<const double> g_values) {
    const int N = mesh.intervals();
    if (a_values.size() != static_cast<std::size_t>(N) ||
        g_values.size() != static_cast<std::size_t>(N))
        throw std::invalid_argument("need one a_n, g_n pair per interval");
    FittedExpCoefficients c;
    c.a.assign(static_cast<std::size_t>(N) + 1, 0.0);
    c.g.assign(static_cast<std::size_t>(N) + 1, 0.0);
    c.theta.assign(static_cast<std::size_t>(N) + 1, 0.0);
    c.s.assign(static_cast<std::size_t>(N) + 1, 0.0);
    c.decay.assign(static_cast<std::size_t>(N) + 1, 0.0);
    for (int n = 1; n <= N; ++n) {
        double a_n = a_values[static_cast<std::size_t>(n) - 1];
        if (!(a_n > 0.0)) throw std::invalid_argument("a_n must be positive");
        c.a[static_cast<std::size_t>(n)] = a_n;
        c.g[static_cast<std::size_t>(n)] = g_values[static_cast<std::size_t>(n) - 1];
        c.theta[static_cast<std::size_t>(n)] = a_n * mesh.step(n) / epsilon;
        c.s[static_cast<std::size_t>(n)] = fitting_factor(epsilon, a_n, mesh.step(n));
        c.decay[static_cast<std::size_t>(n)] = std::exp(-c.theta[static_cast<std::size_t>(n)]);
    }
    return c;
}

TridiagonalSystem assemble_exp_core(const FittedExpCoefficients& coeffs, const Mesh& mesh,
                                    double epsilon, double A, double f_value, double f_slope,
                                    double f_anchor) {
    const int N = mesh.intervals();
    TridiagonalSystem sys(static_cast<std::size_t>(N) + 1);

    sys.diag[0] = 1.0;
    sys.rhs[0] = A;

    auto rho = [&](int n) {
        return 1.0 / (coeffs.s[static_cast<std::size_t>(n)] * mesh.step(n));
    };
    // g-coefficients of the derivative-matching relation:
    //   P_n = (1 - s_n)/(s_n a_n),  Q_n = (s_n - d_n)/(s_n a_n)
    auto P = [&](int n) {
        std::size_t i = static_cast<std::size_t>(n);
        return one_minus_s(coeffs.theta[i]) / (coeffs.s[i] * coeffs.a[i]);
    };
    auto Q = [&](int n) {
        std::size_t i = static_cast<std::size_t>(n);
        return s_minus_decay(coeffs.theta[i]) / (coeffs.s[i] * coeffs.a[i]);
    };

    for (int n = 1; n < N; ++n) {
        std::size_t i = static_cast<std::size_t>(n);
        double flux_left = rho(n);
        double flux_right = rho(n + 1) * coeffs.decay[i + 1];
        sys.lower[i] = flux_left;
        sys.diag[i] = -(flux_left + flux_right);
        sys.upper[i] = flux_right;
        sys.rhs[i] = coeffs.g[i] * P(n) + coeffs.g[i + 1] * Q(n + 1);
    }

    {
        std::size_t i = static_cast<std::size_t>(N);
        double one_minus_decay = -std::expm1(-coeffs.theta[i]);
        double flux = coeffs.a[i] / one_minus_decay;
        sys.lower[i] = -flux;
        sys.diag[i] = flux + f_slope;
        sys.rhs[i] = -coeffs.g[i] * mesh.step(N) / one_minus_decay +
                     coeffs.g[i] * epsilon / coeffs.a[i] - f_value + f_slope * f_anchor;
    }

    if (!sys.all_finite()) throw EvalError("assembled system contains non-finite entries");
    return sys;
}

TridiagonalSystem assemble_exp_system(const ExpLayerProblem& p, const Mesh& mesh,
                                      std::span<const double> iterate, SignConvention signs) {
    FittedExpCoefficients coeffs = FittedExpCoefficients::from_iterate(p, mesh, iterate, signs);
    double vN = iterate[iterate.size() - 1];
    double f_value = p.f_boundary.evaluate({{"u", vN}, {"eps", p.epsilon}});
    double f_slope = boundary_slope(p, vN);
    return assemble_exp_core(coeffs, mesh, p.epsilon, p.A, f_value, f_slope, vN);
}

TridiagonalSystem assemble_exp_from_constants(double epsilon, const Mesh& mesh,
                                              std::span<const double> a_values,
                                              std::span<const double> g_values, double A,
                                              double f_const) {
    FittedExpCoefficients coeffs =
        FittedExpCoefficients::from_constants(epsilon, mesh, a_values, g_values);
    return assemble_exp_core(coeffs, mesh, epsilon, A, f_const, 0.0, 0.0);
}

namespace {

DiscreteSolution reconstruct_from_coeffs(const FittedExpCoefficients& coeffs, const Mesh& mesh,
                                         double epsilon, std::vector<double> values) {
    const int N = mesh.intervals();
    if (values.size() != static_cast<std::size_t>(N) + 1)
        throw std::invalid_argument("values length does not match mesh");
    std::vector<ExpSegment> segments;
    segments.reserve(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) {
        std::size_t i = static_cast<std::size_t>(n);
        double slope = -coeffs.g[i] / coeffs.a[i];
        double one_minus_decay = -std::expm1(-coeffs.theta[i]);
        double dv = values[i] - values[i - 1];
        double c2 = (dv - slope * mesh.step(n)) / one_minus_decay;
        double c1 = values[i] - c2 - slope * mesh.node(n);
        segments.push_back({c1, c2, slope, coeffs.a[i] / epsilon});
    }
    return DiscreteSolution(mesh, std::move(values), std::move(segments));
}

}  // namespace

DiscreteSolution reconstruct_exp(const ExpLayerProblem& p, const Mesh& mesh,
                                 std::vector<double> values, SignConvention signs) {
    FittedExpCoefficients coeffs = FittedExpCoefficients::from_iterate(p, mesh, values, signs);
    return reconstruct_from_coeffs(coeffs, mesh, p.epsilon, std::move(values));
}

DiscreteSolution reconstruct_exp_from_constants(double epsilon, const Mesh& mesh,
                                                std::span<const double> a_values,
                                                std::span<const double> g_values,
                                                std::vector<double> values) {
    FittedExpCoefficients coeffs =
        FittedExpCoefficients::from_constants(epsilon, mesh, a_values, g_values);
    return reconstruct_from_coeffs(coeffs, mesh, epsilon, std::move(values));
}

std::pair<DiscreteSolution, SolveStats> solve_exp(const ExpLayerProblem& p, const Mesh& mesh,
                                                  const SolveOptions& opts, SignConvention signs) {
    std::vector<double> initial(static_cast<std::size_t>(mesh.intervals()) + 1, p.A);
    auto assemble = [&](std::span<const double> iterate) {
        return assemble_exp_system(p, mesh, iterate, signs);
    };
    auto [values, stats] = picard_solve(assemble, std::move(initial), opts);
    return {reconstruct_exp(p, mesh, std::move(values), signs), stats};
}

}  // namespace layerfd
