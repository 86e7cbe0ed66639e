#include "layerfd/fitted_pow.hpp"

#include <cmath>
#include <stdexcept>

namespace layerfd {

namespace {

// ln(1+r) - r/(1+r), nonnegative; series r^2(1/2 - 2r/3 + 3r^2/4 - 4r^3/5).
double log1p_minus_ratio(double r) {
    if (r < 1e-3) return r * r * (0.5 - r * (2.0 / 3.0 - r * (0.75 - 0.8 * r)));
    return std::log1p(r) - r / (1.0 + r);
}

// r - ln(1+r), nonnegative; series r^2(1/2 - r/3 + r^2/4 - r^3/5).
double r_minus_log1p(double r) {
    if (r < 1e-3) return r * r * (0.5 - r * (1.0 / 3.0 - r * (0.25 - 0.2 * r)));
    return r - std::log1p(r);
}

double eval_f(const PowLayerProblem& p, double x, double u) {
    return p.f.evaluate({{"x", x}, {"u", u}, {"eps", p.epsilon}});
}

// Secant slope of f(x, .) at the iterate, clamped to >= 0.
double reaction_slope(const PowLayerProblem& p, double x, double center) {
    try {
        return std::max(0.0, (eval_f(p, x, center + 1.0) - eval_f(p, x, center - 1.0)) / 2.0);
    } catch (const EvalError&) {
        return std::max(0.0,
                        p.f.derivative_at("u", {{"x", x}, {"u", center}, {"eps", p.epsilon}}));
    }
}

struct RowWeights {
    std::vector<double> U, W;  // index 1..N; see header
};

RowWeights row_weights(double epsilon, const Mesh& mesh) {
    const int N = mesh.intervals();
    RowWeights w;
    w.U.assign(static_cast<std::size_t>(N) + 1, 0.0);
    w.W.assign(static_cast<std::size_t>(N) + 1, 0.0);
    for (int n = 1; n <= N; ++n) {
        double r = mesh.step(n) / (epsilon + mesh.node(n - 1));
        w.U[static_cast<std::size_t>(n)] = log1p_minus_ratio(r) / mesh.step(n);
        w.W[static_cast<std::size_t>(n)] = r_minus_log1p(r) / mesh.step(n);
    }
    return w;
}

}  // namespace

FittedPowCoefficients FittedPowCoefficients::from_iterate(const PowLayerProblem& p,
                                                          const Mesh& mesh,
                                                          std::span<const double> iterate) {
    const int N = mesh.intervals();
    if (iterate.size() != static_cast<std::size_t>(N) + 1)
        throw std::invalid_argument("iterate length does not match mesh");
    FittedPowCoefficients c;
    c.f.assign(static_cast<std::size_t>(N) + 1, 0.0);
    c.log_ratio.assign(static_cast<std::size_t>(N) + 1, 0.0);
    for (int n = 1; n <= N; ++n) {
        c.f[static_cast<std::size_t>(n)] =
            eval_f(p, mesh.node(n - 1), iterate[static_cast<std::size_t>(n) - 1]);
        c.log_ratio[static_cast<std::size_t>(n)] = layerfd::log_ratio(mesh, p.epsilon, n);
    }
    return c;
}

namespace {

TridiagonalSystem assemble_pow_core(double epsilon, const Mesh& mesh,
                                    std::span<const double> f_values, double A, double B,
                                    std::span<const double> slopes,
                                    std::span<const double> anchors) {
    const int N = mesh.intervals();
    if (f_values.size() != static_cast<std::size_t>(N))
        throw std::invalid_argument("need one f_n per interval");
    RowWeights w = row_weights(epsilon, mesh);
    TridiagonalSystem sys(static_cast<std::size_t>(N) + 1);

    sys.diag[0] = 1.0;
    sys.rhs[0] = A;
    sys.diag[static_cast<std::size_t>(N)] = 1.0;
    sys.rhs[static_cast<std::size_t>(N)] = B;

    const bool chord = !slopes.empty();
    for (int n = 1; n < N; ++n) {
        std::size_t i = static_cast<std::size_t>(n);
        sys.lower[i] = 1.0 / mesh.step(n);
        sys.upper[i] = 1.0 / mesh.step(n + 1);
        sys.diag[i] = -(sys.lower[i] + sys.upper[i]);
        double fn = f_values[i - 1];
        double fn1 = f_values[i];
        sys.rhs[i] = fn * w.U[i] + fn1 * w.W[i + 1];
        if (chord) {
            sys.lower[i] -= w.U[i] * slopes[i - 1];
            sys.diag[i] -= w.W[i + 1] * slopes[i];
            sys.rhs[i] -= w.U[i] * slopes[i - 1] * anchors[i - 1] +
                          w.W[i + 1] * slopes[i] * anchors[i];
        }
    }

    if (!sys.all_finite()) throw EvalError("assembled system contains non-finite entries");
    return sys;
}

}  // namespace

TridiagonalSystem assemble_pow_system(const PowLayerProblem& p, const Mesh& mesh,
                                      std::span<const double> iterate,
                                      ReactionTreatment treatment) {
    FittedPowCoefficients coeffs = FittedPowCoefficients::from_iterate(p, mesh, iterate);
    std::span<const double> f_values(coeffs.f.data() + 1, coeffs.f.size() - 1);
    if (treatment == ReactionTreatment::Lagged)
        return assemble_pow_core(p.epsilon, mesh, f_values, p.A, p.B, {}, {});

    const int N = mesh.intervals();
    std::vector<double> slopes(static_cast<std::size_t>(N));
    std::vector<double> anchors(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) {
        anchors[static_cast<std::size_t>(n) - 1] = iterate[static_cast<std::size_t>(n) - 1];
        slopes[static_cast<std::size_t>(n) - 1] =
            reaction_slope(p, mesh.node(n - 1), iterate[static_cast<std::size_t>(n) - 1]);
    }
    return assemble_pow_core(p.epsilon, mesh, f_values, p.A, p.B, slopes, anchors);
}

TridiagonalSystem assemble_pow_from_constants(double epsilon, const Mesh& mesh,
                                              std::span<const double> f_values, double A,
                                              double B) {
    return assemble_pow_core(epsilon, mesh, f_values, A, B, {}, {});
}

namespace {

DiscreteSolution reconstruct_pow_impl(double epsilon, const Mesh& mesh,
                                      std::span<const double> f_values,
                                      std::vector<double> values) {
    const int N = mesh.intervals();
    if (values.size() != static_cast<std::size_t>(N) + 1)
        throw std::invalid_argument("values length does not match mesh");
    if (f_values.size() != static_cast<std::size_t>(N))
        throw std::invalid_argument("need one f_n per interval");
    std::vector<PowSegment> segments;
    segments.reserve(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) {
        std::size_t i = static_cast<std::size_t>(n);
        double fn = f_values[i - 1];
        double lr = log_ratio(mesh, epsilon, n);
        double c1 = fn * lr / mesh.step(n) + (values[i] - values[i - 1]) / mesh.step(n);
        double c2 = values[i - 1] + fn * std::log(epsilon + mesh.node(n - 1)) -
                    c1 * mesh.node(n - 1);
        segments.push_back({fn, c1, c2});
    }
    return DiscreteSolution(mesh, std::move(values), std::move(segments), epsilon);
}

}  // namespace

DiscreteSolution reconstruct_pow(const PowLayerProblem& p, const Mesh& mesh,
                                 std::vector<double> values) {
    FittedPowCoefficients coeffs = FittedPowCoefficients::from_iterate(p, mesh, values);
    std::span<const double> f_values(coeffs.f.data() + 1, coeffs.f.size() - 1);
    return reconstruct_pow_impl(p.epsilon, mesh, f_values, std::move(values));
}

DiscreteSolution reconstruct_pow_from_constants(double epsilon, const Mesh& mesh,
                                                std::span<const double> f_values,
                                                std::vector<double> values) {
    return reconstruct_pow_impl(epsilon, mesh, f_values, std::move(values));
}

std::pair<DiscreteSolution, SolveStats> solve_pow(const PowLayerProblem& p, const Mesh& mesh,
                                                  const SolveOptions& opts,
                                                  ReactionTreatment treatment) {
    const int N = mesh.intervals();
    std::vector<double> initial(static_cast<std::size_t>(N) + 1);
    for (int n = 0; n <= N; ++n)
        initial[static_cast<std::size_t>(n)] = p.A + (p.B - p.A) * mesh.node(n);
    auto assemble = [&](std::span<const double> iterate) {
        return assemble_pow_system(p, mesh, iterate, treatment);
    };
    auto [values, stats] = picard_solve(assemble, std::move(initial), opts);
    return {reconstruct_pow(p, mesh, std::move(values)), stats};
}

}  // namespace layerfd
