#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "layerfd/fitted_exp.hpp"
#include "layerfd/fitted_pow.hpp"
#include "layerfd/problem.hpp"
#include "layerfd/solver.hpp"

namespace layerfd {

/// Bad input: unreadable problem file, malformed JSON or expression,
/// inconsistent flags.  Mapped to exit status 2 by the CLI.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Scheme { Fitted, Classical };
enum class MeshKind { Uniform, Layer };
enum class OracleKind { None, ClosedForm, FineMesh };

/// A loaded problem file.  epsilon from the file is the default; sweeps
/// override it per cell, so problems are instantiated on demand.
struct ProblemConfig {
    enum class Type { Exponential, Power };
    Type type;
    double epsilon;
    std::string a, g, f_boundary;  // exponential type
    std::string f;                 // power type
    double A = 0.0, B = 0.0, L = 1.0;
    double alpha = 1.0, beta = 1e-3, gamma = 0.0;  // gamma 0 = derive from alpha, beta

    ExpLayerProblem make_exp(double eps) const;
    PowLayerProblem make_pow(double eps) const;
};

ProblemConfig load_problem_file(const std::string& path);
ProblemConfig parse_problem_json(const std::string& text);

struct RunOptions {
    SolveOptions solve;
    Scheme scheme = Scheme::Fitted;
    MeshKind mesh = MeshKind::Uniform;
    OracleKind oracle = OracleKind::None;
    bool dense_error = false;
    SignConvention signs = SignConvention::Corrected;
    int n_ref = 1 << 14;
};

struct SingleConfig {
    std::string problem_path;
    int N = 64;
    std::optional<double> epsilon;  // override the file's epsilon
    RunOptions run;
    std::string out_path;  // nodal CSV; empty = stdout
};

struct SingleOutcome {
    SolveStats stats;
    std::optional<double> max_nodal_error;
};

/// One solve: nodal CSV (x, V, V') to out_path plus a one-line summary
/// on `summary`.
SingleOutcome run_single(const SingleConfig& config, std::ostream& summary);

struct SweepConfig {
    std::string problem_path;
    std::vector<double> epsilons;
    std::vector<int> Ns;
    RunOptions run;
    std::string out_path;  // report CSV; empty = stdout
};

struct ReportRow {
    double epsilon;
    int N;
    std::string scheme;  // "fitted" | "classical"
    std::string mesh;    // "uniform" | "layer"
    double max_nodal_error;
    double normalized_error;  // error*N, or error*N/ln(1+1/eps) for the power problem
    std::optional<double> eoc;
    int iterations;
    double runtime_ms;
    std::string status;  // "ok" | "nonconverged" | "failed: ..."

    bool operator==(const ReportRow&) const = default;
};

struct ConvergenceReport {
    std::vector<ReportRow> rows;
    bool all_ok() const;
};

/// Solve every (epsilon, N) cell, measure the max nodal error against
/// the selected oracle, and attach EOC values between same-epsilon rows
/// whose N doubles.  Rows come out sorted by (epsilon, N); individual
/// cell failures are recorded in the status column and do not stop the
/// sweep.
ConvergenceReport run_sweep(const SweepConfig& config);

/// EOC under mesh doubling: rate_k = log2(e_k / e_{k+1}); a zero
/// follow-up error reports +infinity.
std::vector<double> compute_eoc(std::span<const double> errors);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

void write_report_csv(std::ostream& out, const ConvergenceReport& report);
ConvergenceReport read_report_csv(std::istream& in);

}  // namespace layerfd
