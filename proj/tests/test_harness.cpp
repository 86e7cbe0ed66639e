#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "layerfd/harness.hpp"

using namespace layerfd;

namespace {
const std::string kProblems = LAYERFD_PROBLEMS_DIR;
}

TEST_CASE("compute_eoc") {
    {
        std::vector<double> errors{0.4, 0.2, 0.1};
        std::vector<double> rates = compute_eoc(errors);
        REQUIRE(rates.size() == 2);
        CHECK(rates[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(rates[1] == doctest::Approx(1.0).epsilon(1e-14));
    }
    {
        std::vector<double> errors{0.9, 0.3};
        std::vector<double> rates = compute_eoc(errors);
        REQUIRE(rates.size() == 1);
        CHECK(rates[0] == doctest::Approx(std::log2(3.0)).epsilon(1e-14));
    }
    {
        std::vector<double> errors{1e-12, 0.0};
        std::vector<double> rates = compute_eoc(errors);
        REQUIRE(rates.size() == 1);
        CHECK(rates[0] == std::numeric_limits<double>::infinity());
    }
    CHECK(compute_eoc(std::vector<double>{0.5}).empty());
}

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02e23, -0.0, 3.0,
                     std::numeric_limits<double>::infinity()}) {
        std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("problem JSON loading and validation") {
    ProblemConfig cfg = load_problem_file(kProblems + "/linear_exp.json");
    CHECK(cfg.type == ProblemConfig::Type::Exponential);
    CHECK(cfg.epsilon == 1e-4);
    CHECK(cfg.A == 4.0);
    CHECK(cfg.L == 2.25);
    ExpLayerProblem p = cfg.make_exp(1e-6);
    CHECK(p.epsilon == 1e-6);

    ProblemConfig pow = load_problem_file(kProblems + "/golden_pow.json");
    CHECK(pow.type == ProblemConfig::Type::Power);
    CHECK(pow.B == -1.0);

    CHECK_THROWS_AS(load_problem_file(kProblems + "/does_not_exist.json"), ConfigError);
    CHECK_THROWS_AS(parse_problem_json("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_problem_json(R"({"type":"exponential","epsilon":0.1})"), ConfigError);
    CHECK_THROWS_AS(parse_problem_json(R"({"type":"spherical","epsilon":0.1})"), ConfigError);
    // malformed coefficient expression
    CHECK_THROWS_AS(
        parse_problem_json(
            R"({"type":"power","epsilon":0.1,"f":"2*(","A":0,"B":1,"alpha":1})"),
        ConfigError);
    // epsilon outside (0, 1]
    CHECK_THROWS_AS(
        parse_problem_json(
            R"({"type":"power","epsilon":2.0,"f":"u","A":0,"B":1,"alpha":1})"),
        ConfigError);
}

TEST_CASE("run_single on the zero-reaction power problem lands on the straight line") {
    std::string path = kProblems + "/tmp_line_pow.json";
    {
        std::ofstream out(path);
        out << R"({"type":"power","epsilon":0.5,"f":"u - u","A":1.0,"B":3.0,"alpha":1.0})";
    }
    SingleConfig config;
    config.problem_path = path;
    config.N = 8;
    std::ostringstream summary;
    config.out_path = kProblems + "/tmp_line_pow.csv";
    SingleOutcome outcome = run_single(config, summary);
    CHECK(outcome.stats.converged);
    std::ifstream csv(config.out_path);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "x,V,dV");
    std::string line;
    int rows = 0;
    while (std::getline(csv, line)) {
        double x, v, dv;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &v, &dv) == 3);
        CHECK(std::fabs(v - (1.0 + 2.0 * x)) <= 1e-12);
        CHECK(std::fabs(dv - 2.0) <= 1e-12);
        ++rows;
    }
    CHECK(rows == 9);
    CHECK(summary.str().find("converged=yes") != std::string::npos);
    std::remove(path.c_str());
    std::remove(config.out_path.c_str());
}

TEST_CASE("run_single reports the closed-form error within the recorded fixture bound") {
    SingleConfig config;
    config.problem_path = kProblems + "/linear_exp.json";
    config.N = 64;
    config.epsilon = 0.1;
    config.run.oracle = OracleKind::ClosedForm;
    std::ostringstream summary;
    SingleOutcome outcome = run_single(config, summary);
    CHECK(outcome.stats.converged);
    REQUIRE(outcome.max_nodal_error);
    // recorded 2.22e-2 on this fixture
    CHECK(*outcome.max_nodal_error <= 2.5e-2);
    CHECK(summary.str().find("max_error=") != std::string::npos);
}

TEST_CASE("run_single against the fine-mesh reference") {
    SingleConfig config;
    config.problem_path = kProblems + "/cubic_exp.json";
    config.N = 64;
    config.run.oracle = OracleKind::FineMesh;
    config.run.n_ref = 2048;
    std::ostringstream summary;
    SingleOutcome outcome = run_single(config, summary);
    CHECK(outcome.stats.converged);
    REQUIRE(outcome.max_nodal_error);
    CHECK(*outcome.max_nodal_error <= 5e-3);  // recorded 2.8e-3
    config.run.n_ref = 256;                   // under the 8x dominance rule
    CHECK_THROWS_AS(run_single(config, summary), ConfigError);
}

TEST_CASE("run_single propagates configuration errors") {
    SingleConfig config;
    config.problem_path = kProblems + "/no_such_file.json";
    std::ostringstream summary;
    CHECK_THROWS_AS(run_single(config, summary), ConfigError);

    config.problem_path = kProblems + "/linear_exp.json";
    config.run.mesh = MeshKind::Layer;  // layer mesh is power-problem only
    CHECK_THROWS_AS(run_single(config, summary), ConfigError);
}

TEST_CASE("sweep rows are sorted with EOC entries on doubled N") {
    SweepConfig config;
    config.problem_path = kProblems + "/golden_pow.json";
    config.epsilons = {1e-6, 1e-2};  // deliberately unsorted
    config.Ns = {128, 64, 256};
    config.run.mesh = MeshKind::Layer;
    config.run.oracle = OracleKind::ClosedForm;
    ConvergenceReport report = run_sweep(config);
    REQUIRE(report.rows.size() == 6);
    CHECK(report.all_ok());
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const auto& prev = report.rows[i - 1];
        const auto& cur = report.rows[i];
        CHECK((prev.epsilon < cur.epsilon ||
               (prev.epsilon == cur.epsilon && prev.N < cur.N)));
    }
    for (const auto& row : report.rows) {
        CHECK(row.scheme == "fitted");
        CHECK(row.mesh == "layer");
        CHECK(std::isfinite(row.max_nodal_error));
        bool first_of_eps = row.N == 64;
        CHECK(row.eoc.has_value() == !first_of_eps);
        if (row.eoc) CHECK(*row.eoc > 0.5);
    }
}

TEST_CASE("single-cell sweep has one row and no EOC") {
    SweepConfig config;
    config.problem_path = kProblems + "/linear_exp.json";
    config.epsilons = {1e-4};
    config.Ns = {64};
    config.run.oracle = OracleKind::ClosedForm;
    ConvergenceReport report = run_sweep(config);
    REQUIRE(report.rows.size() == 1);
    CHECK(!report.rows[0].eoc);
    CHECK(report.rows[0].status == "ok");
}

TEST_CASE("cell failures are recorded in-row and the sweep continues") {
    SweepConfig config;
    config.problem_path = kProblems + "/cubic_exp.json";  // not a closed-form instance
    config.epsilons = {1e-4};
    config.Ns = {16, 32};
    config.run.oracle = OracleKind::ClosedForm;
    ConvergenceReport report = run_sweep(config);
    REQUIRE(report.rows.size() == 2);
    for (const auto& row : report.rows) {
        CHECK(row.status.substr(0, 7) == "failed:");
        CHECK(!row.eoc);
    }
    CHECK(!report.all_ok());
}

TEST_CASE("sweep rows are deterministic") {
    SweepConfig config;
    config.problem_path = kProblems + "/linear_exp.json";
    config.epsilons = {1e-2, 1e-6};
    config.Ns = {64, 128};
    config.run.oracle = OracleKind::ClosedForm;
    ConvergenceReport a = run_sweep(config);
    ConvergenceReport b = run_sweep(config);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].max_nodal_error == b.rows[i].max_nodal_error);
        CHECK(a.rows[i].normalized_error == b.rows[i].normalized_error);
        CHECK(a.rows[i].iterations == b.rows[i].iterations);
        CHECK(a.rows[i].eoc == b.rows[i].eoc);
    }
}

TEST_CASE("report CSV round-trips exactly") {
    SweepConfig config;
    config.problem_path = kProblems + "/linear_exp.json";
    config.epsilons = {1e-2, 1e-4};
    config.Ns = {64, 128};
    config.run.oracle = OracleKind::ClosedForm;
    ConvergenceReport report = run_sweep(config);
    std::stringstream buffer;
    write_report_csv(buffer, report);
    std::string header;
    {
        std::stringstream probe(buffer.str());
        std::getline(probe, header);
    }
    CHECK(header ==
          "epsilon,N,scheme,mesh,max_nodal_error,normalized_error,eoc,iterations,runtime_ms,"
          "status");
    ConvergenceReport parsed = read_report_csv(buffer);
    REQUIRE(parsed.rows.size() == report.rows.size());
    for (std::size_t i = 0; i < report.rows.size(); ++i) CHECK(parsed.rows[i] == report.rows[i]);
}

TEST_CASE("infinite EOC entries survive the CSV round trip") {
    ConvergenceReport report;
    ReportRow row;
    row.epsilon = 1e-4;
    row.N = 64;
    row.scheme = "fitted";
    row.mesh = "uniform";
    row.max_nodal_error = 0.0;
    row.normalized_error = 0.0;
    row.eoc = std::numeric_limits<double>::infinity();
    row.iterations = 3;
    row.runtime_ms = 0.25;
    row.status = "ok";
    report.rows.push_back(row);
    std::stringstream buffer;
    write_report_csv(buffer, report);
    ConvergenceReport parsed = read_report_csv(buffer);
    REQUIRE(parsed.rows.size() == 1);
    CHECK(parsed.rows[0] == row);
}

TEST_CASE("dense error sampling requires the fitted reconstruction") {
    SweepConfig config;
    config.problem_path = kProblems + "/linear_exp.json";
    config.epsilons = {1e-2};
    config.Ns = {64};
    config.run.oracle = OracleKind::ClosedForm;
    config.run.scheme = Scheme::Classical;
    config.run.dense_error = true;
    ConvergenceReport report = run_sweep(config);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].status.substr(0, 7) == "failed:");

    config.run.scheme = Scheme::Fitted;
    ConvergenceReport ok = run_sweep(config);
    CHECK(ok.rows[0].status == "ok");
    // dense error can only see more than the nodal error
    SweepConfig nodal = config;
    nodal.run.dense_error = false;
    CHECK(ok.rows[0].max_nodal_error >= run_sweep(nodal).rows[0].max_nodal_error);
}

TEST_CASE("fine-mesh oracle must dominate the production resolution") {
    SweepConfig config;
    config.problem_path = kProblems + "/cubic_exp.json";
    config.epsilons = {1e-4};
    config.Ns = {256};
    config.run.oracle = OracleKind::FineMesh;
    config.run.n_ref = 1024;  // less than 8 * 256
    CHECK_THROWS_AS(run_sweep(config), ConfigError);
}

TEST_CASE("empty sweep configuration is rejected") {
    SweepConfig config;
    config.problem_path = kProblems + "/linear_exp.json";
    CHECK_THROWS_AS(run_sweep(config), ConfigError);
    config.epsilons = {0.1};
    config.Ns = {1};
    CHECK_THROWS_AS(run_sweep(config), ConfigError);
}
