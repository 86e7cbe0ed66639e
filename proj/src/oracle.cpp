#include "layerfd/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "layerfd/fitted_exp.hpp"

namespace layerfd {

namespace {

constexpr double kGolden = 1.6180339887498948482;  // (1 + sqrt 5)/2

double power(double t, double e) { return std::exp(e * std::log(t)); }

bool close(double a, double b, double tol_scale) {
    return std::fabs(a - b) <= 1e-12 * (tol_scale + std::fabs(a) + std::fabs(b));
}

}  // namespace

LinearExpSolution::LinearExpSolution(double epsilon, double a0, double b, double c, double A,
                                     double K, double L)
    : epsilon_(epsilon), a0_(a0), b_(b), c_(c), L_(L) {
    if (!(a0 > 0.0)) throw std::invalid_argument("a0 must be positive");
    if (b == 0.0) throw std::invalid_argument("b must be nonzero");
    double disc = a0 * a0 + 4.0 * epsilon * b;
    if (!(disc > 0.0)) throw std::invalid_argument("characteristic roots are not real");
    double root = std::sqrt(disc);
    lambda_plus_ = (a0 + root) / (2.0 * epsilon);
    // rationalized so the small root keeps precision as eps -> 0
    lambda_minus_ = -2.0 * b / (a0 + root);
    shift_ = -c / b;

    // u(x) = k1 e^{lp (x-L)} + k2 e^{lm x} + shift; boundary rows for
    // u(0) = A and eps u'(L) + u(L) - K = 0.
    double m11 = std::exp(-lambda_plus_ * L);
    double m12 = 1.0;
    double m21 = epsilon * lambda_plus_ + 1.0;
    double m22 = (epsilon * lambda_minus_ + 1.0) * std::exp(lambda_minus_ * L);
    double r1 = A - shift_;
    double r2 = K - shift_;
    double det = m11 * m22 - m12 * m21;
    if (std::fabs(det) < 1e-300) throw std::runtime_error("singular boundary system");
    k1_ = (r1 * m22 - m12 * r2) / det;
    k2_ = (m11 * r2 - m21 * r1) / det;
}

double LinearExpSolution::value(double x) const {
    return k1_ * std::exp(lambda_plus_ * (x - L_)) + k2_ * std::exp(lambda_minus_ * x) + shift_;
}

double LinearExpSolution::derivative(double x) const {
    return k1_ * lambda_plus_ * std::exp(lambda_plus_ * (x - L_)) +
           k2_ * lambda_minus_ * std::exp(lambda_minus_ * x);
}

double LinearExpSolution::second_derivative(double x) const {
    return k1_ * lambda_plus_ * lambda_plus_ * std::exp(lambda_plus_ * (x - L_)) +
           k2_ * lambda_minus_ * lambda_minus_ * std::exp(lambda_minus_ * x);
}

LinearPowSolution::LinearPowSolution(double epsilon, double A, double B) : epsilon_(epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    double t0 = epsilon;
    double t1 = 1.0 + epsilon;
    double m11 = power(t0, kGolden);
    double m12 = power(t0, 1.0 - kGolden);
    double m21 = power(t1, kGolden);
    double m22 = power(t1, 1.0 - kGolden);
    double det = m11 * m22 - m12 * m21;
    if (std::fabs(det) < 1e-300) throw std::runtime_error("singular boundary system");
    k1_ = (A * m22 - m12 * B) / det;
    k2_ = (m11 * B - m21 * A) / det;
}

double LinearPowSolution::value(double x) const {
    double t = epsilon_ + x;
    return k1_ * power(t, kGolden) + k2_ * power(t, 1.0 - kGolden);
}

double LinearPowSolution::derivative(double x) const {
    double t = epsilon_ + x;
    return k1_ * kGolden * power(t, kGolden - 1.0) +
           k2_ * (1.0 - kGolden) * power(t, -kGolden);
}

double LinearPowSolution::second_derivative(double x) const {
    double t = epsilon_ + x;
    return k1_ * kGolden * (kGolden - 1.0) * power(t, kGolden - 2.0) +
           k2_ * (1.0 - kGolden) * (-kGolden) * power(t, -kGolden - 1.0);
}

double exact_linear_exp(double epsilon, double a0, double b, double c, double A, double K,
                        double L, double x) {
    return LinearExpSolution(epsilon, a0, b, c, A, K, L).value(x);
}

double exact_linear_pow(double epsilon, double A, double B, double x) {
    return LinearPowSolution(epsilon, A, B).value(x);
}

std::optional<LinearExpInstance> detect_linear_exp(const ExpLayerProblem& p) {
    static const double u_probes[] = {-2.5, -0.5, 0.0, 0.7, 1.3, 3.1};
    try {
        double a0 = p.a.evaluate({{"x", 0.0}, {"eps", p.epsilon}});
        for (int i = 0; i <= 4; ++i) {
            double x = p.L * i / 4.0;
            if (!close(p.a.evaluate({{"x", x}, {"eps", p.epsilon}}), a0, 1.0))
                return std::nullopt;
        }
        double g_p = p.g.evaluate({{"u", 1.0}, {"eps", p.epsilon}});
        double g_m = p.g.evaluate({{"u", -1.0}, {"eps", p.epsilon}});
        double b = (g_p - g_m) / 2.0;
        double c = p.g.evaluate({{"u", 0.0}, {"eps", p.epsilon}});
        if (b == 0.0) return std::nullopt;
        for (double u : u_probes)
            if (!close(p.g.evaluate({{"u", u}, {"eps", p.epsilon}}), b * u + c, 1.0))
                return std::nullopt;
        double K = -p.f_boundary.evaluate({{"u", 0.0}, {"eps", p.epsilon}});
        for (double u : u_probes)
            if (!close(p.f_boundary.evaluate({{"u", u}, {"eps", p.epsilon}}), u - K, 1.0))
                return std::nullopt;
        if (!(a0 * a0 + 4.0 * p.epsilon * b > 0.0)) return std::nullopt;
        return LinearExpInstance{a0, b, c, K};
    } catch (const EvalError&) {
        return std::nullopt;
    }
}

bool is_identity_reaction_pow(const PowLayerProblem& p) {
    static const double u_probes[] = {-2.5, -0.5, 0.0, 0.7, 1.3, 3.1};
    try {
        for (int i = 0; i <= 4; ++i) {
            double x = i / 4.0;
            for (double u : u_probes)
                if (!close(p.f.evaluate({{"x", x}, {"u", u}, {"eps", p.epsilon}}), u, 1.0))
                    return false;
        }
        return true;
    } catch (const EvalError&) {
        return false;
    }
}

namespace {

// Central-difference weights for u'' and u' at interior node n of a
// possibly nonuniform mesh.
struct CentralWeights {
    double d2_lower, d2_diag, d2_upper;
    double d1_lower, d1_upper;
};

CentralWeights central_weights(const Mesh& mesh, int n) {
    double hl = mesh.step(n);
    double hr = mesh.step(n + 1);
    double denom = hl + hr;
    CentralWeights w;
    w.d2_lower = 2.0 / (denom * hl);
    w.d2_upper = 2.0 / (denom * hr);
    w.d2_diag = -(w.d2_lower + w.d2_upper);
    w.d1_lower = -1.0 / denom;
    w.d1_upper = 1.0 / denom;
    return w;
}

double exp_reaction_slope(const ExpLayerProblem& p, double center) {
    try {
        double fp = p.g.evaluate({{"u", center + 1.0}, {"eps", p.epsilon}});
        double fm = p.g.evaluate({{"u", center - 1.0}, {"eps", p.epsilon}});
        return std::max(0.0, (fp - fm) / 2.0);
    } catch (const EvalError&) {
        return std::max(0.0, p.g.derivative_at("u", {{"u", center}, {"eps", p.epsilon}}));
    }
}

double pow_reaction_slope(const PowLayerProblem& p, double x, double center) {
    try {
        double fp = p.f.evaluate({{"x", x}, {"u", center + 1.0}, {"eps", p.epsilon}});
        double fm = p.f.evaluate({{"x", x}, {"u", center - 1.0}, {"eps", p.epsilon}});
        return std::max(0.0, (fp - fm) / 2.0);
    } catch (const EvalError&) {
        return std::max(0.0,
                        p.f.derivative_at("u", {{"x", x}, {"u", center}, {"eps", p.epsilon}}));
    }
}

double exp_boundary_slope(const ExpLayerProblem& p, double center) {
    try {
        double fp = p.f_boundary.evaluate({{"u", center + 1.0}, {"eps", p.epsilon}});
        double fm = p.f_boundary.evaluate({{"u", center - 1.0}, {"eps", p.epsilon}});
        return std::max(0.0, (fp - fm) / 2.0);
    } catch (const EvalError&) {
        return std::max(0.0, p.f_boundary.derivative_at("u", {{"u", center}, {"eps", p.epsilon}}));
    }
}

}  // namespace

std::pair<std::vector<double>, SolveStats> classical_central_scheme(const ExpLayerProblem& p,
                                                                    const Mesh& mesh,
                                                                    const SolveOptions& opts,
                                                                    ReactionTreatment treatment) {
    const int N = mesh.intervals();
    auto assemble = [&](std::span<const double> iterate) {
        TridiagonalSystem sys(static_cast<std::size_t>(N) + 1);
        sys.diag[0] = 1.0;
        sys.rhs[0] = p.A;
        for (int n = 1; n < N; ++n) {
            std::size_t i = static_cast<std::size_t>(n);
            CentralWeights w = central_weights(mesh, n);
            double a_n = p.a.evaluate({{"x", mesh.node(n)}, {"eps", p.epsilon}});
            sys.lower[i] = -p.epsilon * w.d2_lower + a_n * w.d1_lower;
            sys.diag[i] = -p.epsilon * w.d2_diag;
            sys.upper[i] = -p.epsilon * w.d2_upper + a_n * w.d1_upper;
            double g_hat = p.g.evaluate({{"u", iterate[i]}, {"eps", p.epsilon}});
            if (treatment == ReactionTreatment::Chord) {
                double slope = exp_reaction_slope(p, iterate[i]);
                sys.diag[i] += slope;
                sys.rhs[i] = -g_hat + slope * iterate[i];
            } else {
                sys.rhs[i] = -g_hat;
            }
        }
        std::size_t i = static_cast<std::size_t>(N);
        double f_hat = p.f_boundary.evaluate({{"u", iterate[i]}, {"eps", p.epsilon}});
        double f_slope = exp_boundary_slope(p, iterate[i]);
        sys.lower[i] = -p.epsilon / mesh.step(N);
        sys.diag[i] = p.epsilon / mesh.step(N) + f_slope;
        sys.rhs[i] = -f_hat + f_slope * iterate[i];
        if (!sys.all_finite()) throw EvalError("assembled system contains non-finite entries");
        return sys;
    };
    std::vector<double> initial(static_cast<std::size_t>(N) + 1, p.A);
    return picard_solve(assemble, std::move(initial), opts);
}

std::pair<std::vector<double>, SolveStats> classical_central_scheme(const PowLayerProblem& p,
                                                                    const Mesh& mesh,
                                                                    const SolveOptions& opts,
                                                                    ReactionTreatment treatment) {
    const int N = mesh.intervals();
    auto assemble = [&](std::span<const double> iterate) {
        TridiagonalSystem sys(static_cast<std::size_t>(N) + 1);
        sys.diag[0] = 1.0;
        sys.rhs[0] = p.A;
        sys.diag[static_cast<std::size_t>(N)] = 1.0;
        sys.rhs[static_cast<std::size_t>(N)] = p.B;
        for (int n = 1; n < N; ++n) {
            std::size_t i = static_cast<std::size_t>(n);
            CentralWeights w = central_weights(mesh, n);
            double t = p.epsilon + mesh.node(n);
            double t2 = t * t;
            sys.lower[i] = t2 * w.d2_lower;
            sys.diag[i] = t2 * w.d2_diag;
            sys.upper[i] = t2 * w.d2_upper;
            double f_hat =
                p.f.evaluate({{"x", mesh.node(n)}, {"u", iterate[i]}, {"eps", p.epsilon}});
            if (treatment == ReactionTreatment::Chord) {
                double slope = pow_reaction_slope(p, mesh.node(n), iterate[i]);
                sys.diag[i] -= slope;
                sys.rhs[i] = f_hat - slope * iterate[i];
            } else {
                sys.rhs[i] = f_hat;
            }
        }
        if (!sys.all_finite()) throw EvalError("assembled system contains non-finite entries");
        return sys;
    };
    std::vector<double> initial(static_cast<std::size_t>(N) + 1);
    for (int n = 0; n <= N; ++n)
        initial[static_cast<std::size_t>(n)] = p.A + (p.B - p.A) * mesh.node(n);
    return picard_solve(assemble, std::move(initial), opts);
}

DiscreteSolution fine_mesh_reference(const ExpLayerProblem& p, int n_ref,
                                     const SolveOptions& opts) {
    auto [sol, stats] = solve_exp(p, Mesh::uniform(p.L, n_ref), opts);
    if (!stats.converged)
        throw std::runtime_error("fine-mesh reference solve did not converge");
    return sol;
}

DiscreteSolution fine_mesh_reference(const PowLayerProblem& p, int n_ref,
                                     const SolveOptions& opts) {
    auto [sol, stats] = solve_pow(p, Mesh::power_layer(p.epsilon, n_ref), opts);
    if (!stats.converged)
        throw std::runtime_error("fine-mesh reference solve did not converge");
    return sol;
}

namespace {

BoundCheckReport ratio_report(std::string name, const std::vector<double>& quantity,
                              const std::vector<double>& envelope,
                              std::optional<double> claimed) {
    double inferred = 0.0;
    for (std::size_t i = 0; i < quantity.size(); ++i)
        inferred = std::max(inferred, quantity[i] / envelope[i]);
    double constant = claimed.value_or(inferred);
    double violation = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < quantity.size(); ++i)
        violation = std::max(violation, quantity[i] - constant * envelope[i]);
    return {std::move(name), violation, static_cast<int>(quantity.size()), inferred};
}

}  // namespace

BoundCheckReport check_derivative_bound_exp(const DiscreteSolution& sol,
                                            const ExpLayerProblem& p, int samples,
                                            std::optional<double> claimed_constant) {
    std::vector<double> q(static_cast<std::size_t>(samples));
    std::vector<double> env(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        double x = p.L * i / (samples - 1);
        q[static_cast<std::size_t>(i)] = std::fabs(sol.derivative(x));
        env[static_cast<std::size_t>(i)] =
            1.0 + std::exp(p.alpha * (x - p.L) / p.epsilon) / p.epsilon;
    }
    return ratio_report("derivative envelope (exponential layer)", q, env, claimed_constant);
}

BoundCheckReport check_derivative_bound_pow(const DiscreteSolution& sol,
                                            const PowLayerProblem& p, int samples,
                                            std::optional<double> claimed_constant) {
    std::vector<double> q(static_cast<std::size_t>(samples));
    std::vector<double> env(static_cast<std::size_t>(samples), 1.0);
    for (int i = 0; i < samples; ++i) {
        double x = static_cast<double>(i) / (samples - 1);
        q[static_cast<std::size_t>(i)] = std::fabs(sol.derivative(x)) * (p.epsilon + x);
    }
    return ratio_report("derivative envelope (power layer)", q, env, claimed_constant);
}

BoundCheckReport check_solution_bound_pow(const DiscreteSolution& sol,
                                          const PowLayerProblem& p) {
    double worst_f0 = 0.0;
    for (double x : sol.mesh().nodes())
        worst_f0 = std::max(
            worst_f0, std::fabs(p.f.evaluate({{"x", x}, {"u", 0.0}, {"eps", p.epsilon}})));
    double bound = worst_f0 / p.alpha;
    double observed = 0.0;
    for (double v : sol.values()) observed = std::max(observed, std::fabs(v));
    double inferred = bound > 0.0 ? observed / bound : (observed > 0.0 ?
        std::numeric_limits<double>::infinity() : 0.0);
    return {"solution bound (power layer)", observed - bound,
            static_cast<int>(sol.values().size()), inferred};
}

}  // namespace layerfd
