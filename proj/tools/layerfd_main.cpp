#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "layerfd/harness.hpp"
#include "layerfd/oracle.hpp"

namespace {

using namespace layerfd;

constexpr int kExitOk = 0;
constexpr int kExitNoConvergence = 1;
constexpr int kExitConfig = 2;

struct CommonFlags {
    std::string problem_path;
    std::string mesh = "uniform";
    std::string scheme = "fitted";
    std::string oracle;
    double tol = 1e-10;
    int max_iter = 100;
    double damping = 1.0;
    bool dense_error = false;
    bool as_printed_signs = false;
    int n_ref = 1 << 14;
    std::string out_path;
};

void add_common(CLI::App* cmd, CommonFlags& flags, const char* default_oracle) {
    flags.oracle = default_oracle;
    cmd->add_option("--problem", flags.problem_path, "problem JSON file")->required();
    cmd->add_option("--mesh", flags.mesh, "uniform|layer")
        ->check(CLI::IsMember({"uniform", "layer"}));
    cmd->add_option("--scheme", flags.scheme, "fitted|classical")
        ->check(CLI::IsMember({"fitted", "classical"}));
    cmd->add_option("--oracle", flags.oracle, "none|closed-form|fine-mesh")
        ->check(CLI::IsMember({"none", "closed-form", "fine-mesh"}));
    cmd->add_option("--tol", flags.tol, "sup-norm stopping threshold");
    cmd->add_option("--max-iter", flags.max_iter, "iteration cap");
    cmd->add_option("--damping", flags.damping, "update damping in (0,1]");
    cmd->add_flag("--dense-error", flags.dense_error,
                  "sample the reconstruction at 10x mesh resolution");
    cmd->add_flag("--as-printed-signs", flags.as_printed_signs,
                  "use the published sign convention (debug/regression)");
    cmd->add_option("--n-ref", flags.n_ref, "fine-mesh reference intervals");
    cmd->add_option("--out", flags.out_path, "output CSV path (default stdout)");
}

RunOptions to_run_options(const CommonFlags& flags) {
    RunOptions run;
    run.solve.tol = flags.tol;
    run.solve.max_iter = flags.max_iter;
    run.solve.damping = flags.damping;
    run.scheme = flags.scheme == "classical" ? Scheme::Classical : Scheme::Fitted;
    run.mesh = flags.mesh == "layer" ? MeshKind::Layer : MeshKind::Uniform;
    run.oracle = flags.oracle == "closed-form" ? OracleKind::ClosedForm
                 : flags.oracle == "fine-mesh" ? OracleKind::FineMesh
                                               : OracleKind::None;
    run.dense_error = flags.dense_error;
    run.signs = flags.as_printed_signs ? SignConvention::AsPrinted : SignConvention::Corrected;
    run.n_ref = flags.n_ref;
    return run;
}

int cmd_solve(const CommonFlags& flags, int N, std::optional<double> eps) {
    SingleConfig config;
    config.problem_path = flags.problem_path;
    config.N = N;
    config.epsilon = eps;
    config.run = to_run_options(flags);
    config.out_path = flags.out_path;
    SingleOutcome outcome = run_single(config, std::cout);
    return outcome.stats.converged ? kExitOk : kExitNoConvergence;
}

int cmd_sweep(const CommonFlags& flags, const std::vector<double>& eps_list,
              const std::vector<int>& n_list) {
    SweepConfig config;
    config.problem_path = flags.problem_path;
    config.epsilons = eps_list;
    config.Ns = n_list;
    config.run = to_run_options(flags);
    config.out_path = flags.out_path;
    ConvergenceReport report = run_sweep(config);
    if (config.out_path.empty()) {
        write_report_csv(std::cout, report);
    } else {
        std::ofstream out(config.out_path);
        if (!out) throw ConfigError("cannot open output file: " + config.out_path);
        write_report_csv(out, report);
        std::cout << "wrote " << report.rows.size() << " rows to " << config.out_path << "\n";
    }
    return report.all_ok() ? kExitOk : kExitNoConvergence;
}

int cmd_verify(const std::string& problem_path, int x_samples, int u_samples,
               std::optional<double> u_lo, std::optional<double> u_hi) {
    ProblemConfig cfg = load_problem_file(problem_path);
    Interval range = default_u_range(cfg.A, cfg.type == ProblemConfig::Type::Power ? cfg.B : 0.0);
    if (u_lo) range.lo = *u_lo;
    if (u_hi) range.hi = *u_hi;

    AssumptionReport report;
    if (cfg.type == ProblemConfig::Type::Exponential)
        report = validate_exp_assumptions(cfg.make_exp(cfg.epsilon), x_samples, range, u_samples);
    else
        report = validate_pow_assumptions(cfg.make_pow(cfg.epsilon), x_samples, range, u_samples);

    if (report.passed) {
        std::cout << "assumptions hold on all sampled points (" << x_samples << " x-samples, "
                  << u_samples << " u-samples over [" << range.lo << ", " << range.hi << "])\n"
                  << "note: sampling can refute the assumptions but cannot prove them\n";
        return kExitOk;
    }
    std::cout << report.violations.size() << " violation(s):\n";
    std::size_t shown = 0;
    for (const auto& v : report.violations) {
        std::cout << "  " << v.condition << " fails at " << v.sample << " (observed " << v.observed
                  << ")\n";
        if (++shown == 20 && report.violations.size() > 20) {
            std::cout << "  ... " << (report.violations.size() - 20) << " more\n";
            break;
        }
    }
    return kExitNoConvergence;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fitted finite-difference schemes for boundary-layer two-point BVPs"};
    app.require_subcommand(1);

    CommonFlags solve_flags;
    int solve_n = 64;
    std::optional<double> solve_eps;
    CLI::App* solve = app.add_subcommand("solve", "single solve, nodal CSV output");
    add_common(solve, solve_flags, "none");
    solve->add_option("--N", solve_n, "number of mesh intervals");
    solve->add_option("--eps", solve_eps, "override the problem file's epsilon");

    CommonFlags sweep_flags;
    std::vector<double> sweep_eps;
    std::vector<int> sweep_n;
    CLI::App* sweep = app.add_subcommand("sweep", "(epsilon, N) convergence sweep, report CSV");
    add_common(sweep, sweep_flags, "closed-form");
    sweep->add_option("--eps", sweep_eps, "epsilon values")->required()->delimiter(',');
    sweep->add_option("--N", sweep_n, "interval counts")->required()->delimiter(',');

    std::string verify_problem;
    int verify_x_samples = 257;
    int verify_u_samples = 257;
    std::optional<double> verify_u_lo, verify_u_hi;
    CLI::App* verify = app.add_subcommand("verify", "sample the structural assumptions");
    verify->add_option("--problem", verify_problem, "problem JSON file")->required();
    verify->add_option("--x-samples", verify_x_samples, "x grid size");
    verify->add_option("--u-samples", verify_u_samples, "u grid size");
    verify->add_option("--u-lo", verify_u_lo, "lower end of the u range");
    verify->add_option("--u-hi", verify_u_hi, "upper end of the u range");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(solve_flags, solve_n, solve_eps);
        if (sweep->parsed()) return cmd_sweep(sweep_flags, sweep_eps, sweep_n);
        if (verify->parsed())
            return cmd_verify(verify_problem, verify_x_samples, verify_u_samples, verify_u_lo,
                              verify_u_hi);
    } catch (const layerfd::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const layerfd::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    }
    return kExitConfig;
}
