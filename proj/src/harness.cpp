#include "layerfd/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "layerfd/oracle.hpp"

namespace layerfd {

namespace {

using json = nlohmann::json;

double get_number(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("problem file is missing \"") + key + "\"");
    if (!j[key].is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number");
    return j[key].get<double>();
}

std::string get_string(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("problem file is missing \"") + key + "\"");
    if (!j[key].is_string()) throw ConfigError(std::string("\"") + key + "\" must be a string");
    return j[key].get<std::string>();
}

Expression parse_coefficient(const std::string& text, const char* key) {
    try {
        return Expression::parse(text);
    } catch (const ParseError& e) {
        throw ConfigError(std::string("in \"") + key + "\": " + e.what());
    }
}

}  // namespace

ExpLayerProblem ProblemConfig::make_exp(double eps) const {
    if (type != Type::Exponential)
        throw ConfigError("problem file does not describe an exponential-layer problem");
    double gamma_eff = gamma > 0.0 ? gamma : alpha * alpha - 4.0 * beta;
    if (!(gamma_eff > 0.0))
        throw ConfigError("cannot derive a positive gamma from alpha and beta; set \"gamma\"");
    try {
        return ExpLayerProblem(eps, parse_coefficient(a, "a"), parse_coefficient(g, "g"),
                               parse_coefficient(f_boundary, "f_boundary"), A, L, alpha, beta,
                               gamma_eff);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

PowLayerProblem ProblemConfig::make_pow(double eps) const {
    if (type != Type::Power)
        throw ConfigError("problem file does not describe a power-layer problem");
    try {
        return PowLayerProblem(eps, parse_coefficient(f, "f"), A, B, alpha);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ProblemConfig parse_problem_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed problem JSON: ") + e.what());
    }
    ProblemConfig cfg;
    std::string type = get_string(j, "type");
    cfg.epsilon = get_number(j, "epsilon");
    if (type == "exponential") {
        cfg.type = ProblemConfig::Type::Exponential;
        cfg.a = get_string(j, "a");
        cfg.g = get_string(j, "g");
        cfg.f_boundary = get_string(j, "f_boundary");
        cfg.A = get_number(j, "A");
        cfg.L = get_number(j, "L");
        if (j.contains("alpha")) cfg.alpha = get_number(j, "alpha");
        if (j.contains("beta")) cfg.beta = get_number(j, "beta");
        if (j.contains("gamma")) cfg.gamma = get_number(j, "gamma");
    } else if (type == "power") {
        cfg.type = ProblemConfig::Type::Power;
        cfg.f = get_string(j, "f");
        cfg.A = get_number(j, "A");
        cfg.B = get_number(j, "B");
        if (j.contains("alpha")) cfg.alpha = get_number(j, "alpha");
    } else {
        throw ConfigError("\"type\" must be \"exponential\" or \"power\"");
    }
    // fail fast on malformed expressions
    if (cfg.type == ProblemConfig::Type::Exponential)
        cfg.make_exp(cfg.epsilon);
    else
        cfg.make_pow(cfg.epsilon);
    return cfg;
}

ProblemConfig load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open problem file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_problem_json(buffer.str());
}

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<double> compute_eoc(std::span<const double> errors) {
    std::vector<double> rates;
    if (errors.size() < 2) return rates;
    rates.reserve(errors.size() - 1);
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        if (errors[k + 1] == 0.0)
            rates.push_back(std::numeric_limits<double>::infinity());
        else
            rates.push_back(std::log2(errors[k] / errors[k + 1]));
    }
    return rates;
}

namespace {

Mesh build_mesh(const ProblemConfig& cfg, double eps, int N, MeshKind kind) {
    if (kind == MeshKind::Layer) {
        if (cfg.type != ProblemConfig::Type::Power)
            throw ConfigError("the layer mesh applies to the power-layer problem only");
        return Mesh::power_layer(eps, N);
    }
    double length = cfg.type == ProblemConfig::Type::Exponential ? cfg.L : 1.0;
    return Mesh::uniform(length, N);
}

using PointOracle = std::function<double(double)>;

PointOracle make_oracle(const ProblemConfig& cfg, double eps, const RunOptions& run) {
    if (run.oracle == OracleKind::ClosedForm) {
        if (cfg.type == ProblemConfig::Type::Exponential) {
            ExpLayerProblem p = cfg.make_exp(eps);
            auto inst = detect_linear_exp(p);
            if (!inst)
                throw ConfigError(
                    "closed-form oracle requires constant a, affine g and f(u) = u - K");
            auto exact = std::make_shared<LinearExpSolution>(eps, inst->a0, inst->b, inst->c,
                                                             p.A, inst->K, p.L);
            return [exact](double x) { return exact->value(x); };
        }
        PowLayerProblem p = cfg.make_pow(eps);
        if (!is_identity_reaction_pow(p))
            throw ConfigError("closed-form oracle requires f(x, u) = u");
        auto exact = std::make_shared<LinearPowSolution>(eps, p.A, p.B);
        return [exact](double x) { return exact->value(x); };
    }
    if (run.oracle == OracleKind::FineMesh) {
        auto reference = std::make_shared<DiscreteSolution>(
            cfg.type == ProblemConfig::Type::Exponential
                ? fine_mesh_reference(cfg.make_exp(eps), run.n_ref, run.solve)
                : fine_mesh_reference(cfg.make_pow(eps), run.n_ref, run.solve));
        return [reference](double x) { return reference->value(x); };
    }
    return {};
}

struct CellResult {
    std::vector<double> values;
    SolveStats stats;
    std::optional<DiscreteSolution> reconstruction;  // fitted scheme only
};

CellResult solve_cell(const ProblemConfig& cfg, double eps, const Mesh& mesh,
                      const RunOptions& run) {
    CellResult result;
    if (cfg.type == ProblemConfig::Type::Exponential) {
        ExpLayerProblem p = cfg.make_exp(eps);
        if (run.scheme == Scheme::Fitted) {
            auto [sol, stats] = solve_exp(p, mesh, run.solve, run.signs);
            result.values.assign(sol.values().begin(), sol.values().end());
            result.stats = stats;
            result.reconstruction = std::move(sol);
        } else {
            auto [values, stats] = classical_central_scheme(p, mesh, run.solve);
            result.values = std::move(values);
            result.stats = stats;
        }
    } else {
        PowLayerProblem p = cfg.make_pow(eps);
        if (run.scheme == Scheme::Fitted) {
            auto [sol, stats] = solve_pow(p, mesh, run.solve);
            result.values.assign(sol.values().begin(), sol.values().end());
            result.stats = stats;
            result.reconstruction = std::move(sol);
        } else {
            auto [values, stats] = classical_central_scheme(p, mesh, run.solve);
            result.values = std::move(values);
            result.stats = stats;
        }
    }
    return result;
}

double measure_error(const CellResult& cell, const Mesh& mesh, const PointOracle& oracle,
                     bool dense) {
    double worst = 0.0;
    for (int n = 0; n <= mesh.intervals(); ++n)
        worst = std::max(worst,
                         std::fabs(cell.values[static_cast<std::size_t>(n)] - oracle(mesh.node(n))));
    if (dense) {
        if (!cell.reconstruction)
            throw ConfigError("--dense-error needs the fitted scheme's reconstruction");
        for (int n = 1; n <= mesh.intervals(); ++n)
            for (int j = 1; j < 10; ++j) {
                double x = mesh.node(n - 1) + mesh.step(n) * j / 10.0;
                worst = std::max(worst, std::fabs(cell.reconstruction->value(x) - oracle(x)));
            }
    }
    return worst;
}

std::string sanitize_status(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n') c = ';';
    return s;
}

const char* scheme_name(Scheme s) { return s == Scheme::Fitted ? "fitted" : "classical"; }
const char* mesh_name(MeshKind m) { return m == MeshKind::Uniform ? "uniform" : "layer"; }

}  // namespace

bool ConvergenceReport::all_ok() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const ReportRow& r) { return r.status == "ok"; });
}

ConvergenceReport run_sweep(const SweepConfig& config) {
    if (config.epsilons.empty() || config.Ns.empty())
        throw ConfigError("sweep needs at least one epsilon and one N");
    for (int n : config.Ns)
        if (n < 2) throw ConfigError("N values must be at least 2");
    ProblemConfig cfg = load_problem_file(config.problem_path);

    if (config.run.oracle == OracleKind::None)
        throw ConfigError("sweep needs an oracle (closed-form or fine-mesh)");
    if (config.run.oracle == OracleKind::FineMesh) {
        int max_n = *std::max_element(config.Ns.begin(), config.Ns.end());
        if (config.run.n_ref < 8 * max_n)
            throw ConfigError("fine-mesh reference must use at least 8x the largest N");
    }

    std::vector<double> epsilons = config.epsilons;
    std::vector<int> Ns = config.Ns;
    std::sort(epsilons.begin(), epsilons.end());
    std::sort(Ns.begin(), Ns.end());

    ConvergenceReport report;
    for (double eps : epsilons) {
        PointOracle oracle;
        std::string oracle_failure;
        try {
            oracle = make_oracle(cfg, eps, config.run);
        } catch (const std::exception& e) {
            oracle_failure = e.what();
        }
        std::vector<double> ok_errors;
        std::vector<int> ok_Ns;
        for (int N : Ns) {
            ReportRow row;
            row.epsilon = eps;
            row.N = N;
            row.scheme = scheme_name(config.run.scheme);
            row.mesh = mesh_name(config.run.mesh);
            row.max_nodal_error = std::numeric_limits<double>::quiet_NaN();
            row.normalized_error = std::numeric_limits<double>::quiet_NaN();
            row.iterations = 0;
            row.runtime_ms = 0.0;
            auto started = std::chrono::steady_clock::now();
            try {
                if (!oracle) throw ConfigError(oracle_failure);
                Mesh mesh = build_mesh(cfg, eps, N, config.run.mesh);
                CellResult cell = solve_cell(cfg, eps, mesh, config.run);
                row.iterations = cell.stats.iterations;
                row.max_nodal_error =
                    measure_error(cell, mesh, oracle, config.run.dense_error);
                row.normalized_error = cfg.type == ProblemConfig::Type::Power
                                           ? row.max_nodal_error * N / std::log1p(1.0 / eps)
                                           : row.max_nodal_error * N;
                row.status = cell.stats.converged ? "ok" : "nonconverged";
            } catch (const std::exception& e) {
                row.status = sanitize_status(std::string("failed: ") + e.what());
            }
            row.runtime_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
            if (row.status == "ok") {
                if (!ok_Ns.empty() && N == 2 * ok_Ns.back()) {
                    std::array<double, 2> pair{ok_errors.back(), row.max_nodal_error};
                    row.eoc = compute_eoc(pair).front();
                }
                ok_Ns.push_back(N);
                ok_errors.push_back(row.max_nodal_error);
            }
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

SingleOutcome run_single(const SingleConfig& config, std::ostream& summary) {
    ProblemConfig cfg = load_problem_file(config.problem_path);
    if (config.N < 2) throw ConfigError("N must be at least 2");
    double eps = config.epsilon.value_or(cfg.epsilon);
    Mesh mesh = build_mesh(cfg, eps, config.N, config.run.mesh);
    CellResult cell = solve_cell(cfg, eps, mesh, config.run);

    SingleOutcome outcome;
    outcome.stats = cell.stats;
    if (config.run.oracle != OracleKind::None) {
        if (config.run.oracle == OracleKind::FineMesh && config.run.n_ref < 8 * config.N)
            throw ConfigError("fine-mesh reference must use at least 8x the largest N");
        PointOracle oracle = make_oracle(cfg, eps, config.run);
        outcome.max_nodal_error = measure_error(cell, mesh, oracle, config.run.dense_error);
    }

    std::ofstream file;
    std::ostream* out = &summary;
    if (!config.out_path.empty()) {
        file.open(config.out_path);
        if (!file) throw ConfigError("cannot open output file: " + config.out_path);
        out = &file;
    }
    *out << "x,V,dV\n";
    for (int n = 0; n <= mesh.intervals(); ++n) {
        double x = mesh.node(n);
        double v = cell.values[static_cast<std::size_t>(n)];
        double dv;
        if (cell.reconstruction) {
            dv = cell.reconstruction->derivative(x);
        } else {
            // classical scheme has no reconstruction; report difference quotients
            int i = std::max(1, std::min(n, mesh.intervals()));
            dv = (cell.values[static_cast<std::size_t>(i)] -
                  cell.values[static_cast<std::size_t>(i) - 1]) /
                 mesh.step(i);
        }
        *out << format_double(x) << ',' << format_double(v) << ',' << format_double(dv) << '\n';
    }

    summary << "scheme=" << scheme_name(config.run.scheme) << " mesh=" << mesh_name(config.run.mesh)
            << " epsilon=" << format_double(eps) << " N=" << config.N
            << " iterations=" << cell.stats.iterations
            << " converged=" << (cell.stats.converged ? "yes" : "no")
            << " update=" << format_double(cell.stats.final_update_norm)
            << " residual=" << format_double(cell.stats.final_residual_norm);
    if (outcome.max_nodal_error)
        summary << " max_error=" << format_double(*outcome.max_nodal_error);
    summary << '\n';
    return outcome;
}

void write_report_csv(std::ostream& out, const ConvergenceReport& report) {
    out << "epsilon,N,scheme,mesh,max_nodal_error,normalized_error,eoc,iterations,runtime_ms,"
           "status\n";
    for (const ReportRow& r : report.rows) {
        out << format_double(r.epsilon) << ',' << r.N << ',' << r.scheme << ',' << r.mesh << ','
            << format_double(r.max_nodal_error) << ',' << format_double(r.normalized_error)
            << ',' << (r.eoc ? format_double(*r.eoc) : "") << ',' << r.iterations << ','
            << format_double(r.runtime_ms) << ',' << r.status << '\n';
    }
}

namespace {

double parse_double_field(const std::string& field, const char* what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ConfigError(std::string("malformed CSV number in column ") + what + ": " + field);
    return v;
}

}  // namespace

ConvergenceReport read_report_csv(std::istream& in) {
    ConvergenceReport report;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty report CSV");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (int k = 0; k < 9; ++k) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) throw ConfigError("report CSV row has too few columns");
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        fields.push_back(line.substr(start));  // status may contain anything but commas
        ReportRow row;
        row.epsilon = parse_double_field(fields[0], "epsilon");
        row.N = static_cast<int>(parse_double_field(fields[1], "N"));
        row.scheme = fields[2];
        row.mesh = fields[3];
        row.max_nodal_error = parse_double_field(fields[4], "max_nodal_error");
        row.normalized_error = parse_double_field(fields[5], "normalized_error");
        row.eoc = fields[6].empty() ? std::nullopt
                                    : std::optional<double>(parse_double_field(fields[6], "eoc"));
        row.iterations = static_cast<int>(parse_double_field(fields[7], "iterations"));
        row.runtime_ms = parse_double_field(fields[8], "runtime_ms");
        row.status = fields[9];
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace layerfd
