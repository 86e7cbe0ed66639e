#include <doctest.h>

#include <cmath>
#include <random>

#include "layerfd/fitted_exp.hpp"
#include "layerfd/mesh.hpp"
#include "layerfd/solver.hpp"
#include "testutil.hpp"

using namespace layerfd;

TEST_CASE("identity system") {
    TridiagonalSystem sys(3);
    sys.diag = {1.0, 1.0, 1.0};
    sys.rhs = {1.0, 2.0, 3.0};
    CHECK(sweep(sys) == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("zero right-hand side gives the zero solution") {
    TridiagonalSystem sys(5);
    for (std::size_t i = 0; i < 5; ++i) {
        sys.diag[i] = 2.0 + static_cast<double>(i);
        if (i > 0) sys.lower[i] = -0.5;
        if (i < 4) sys.upper[i] = 0.25;
    }
    for (double v : sweep(sys)) CHECK(v == 0.0);
}

TEST_CASE("zero pivot names the row") {
    TridiagonalSystem sys(3);
    sys.diag = {1.0, 0.0, 1.0};
    sys.rhs = {1.0, 1.0, 1.0};
    try {
        sweep(sys);
        FAIL("expected SingularSystemError");
    } catch (const SingularSystemError& e) {
        CHECK(e.row() == 1);
        CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }
}

TEST_CASE("sweep matches dense elimination on random diagonally dominant systems") {
    std::mt19937_64 rng(271828);
    std::uniform_int_distribution<int> size(3, 50);
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    std::uniform_real_distribution<double> boost(0.1, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = static_cast<std::size_t>(size(rng));
        TridiagonalSystem sys(n);
        for (std::size_t i = 0; i < n; ++i) {
            double l = i > 0 ? entry(rng) : 0.0;
            double u = i + 1 < n ? entry(rng) : 0.0;
            sys.lower[i] = l;
            sys.upper[i] = u;
            double sign = entry(rng) < 0 ? -1.0 : 1.0;
            sys.diag[i] = sign * (std::fabs(l) + std::fabs(u) + boost(rng));
            sys.rhs[i] = entry(rng) * 10.0;
        }
        std::vector<double> fast = sweep(sys);
        std::vector<double> slow = testutil::dense_solve(sys);
        double scale = 0.0;
        for (double v : slow) scale = std::max(scale, std::fabs(v));
        for (std::size_t i = 0; i < n; ++i) {
            CAPTURE(trial);
            CHECK(std::fabs(fast[i] - slow[i]) <= 1e-11 * (1.0 + scale));
        }
        CHECK(relative_residual(sys, fast) <= 1e-12);
    }
}

namespace {

ExpLayerProblem linear_problem(const char* g_text) {
    return ExpLayerProblem(0.1, Expression::parse("1"), Expression::parse(g_text),
                           Expression::parse("u - 1"), 2.0, 1.0, 1.0, 1e-3, 0.9);
}

}  // namespace

TEST_CASE("affine fixed point is reached after one solve and confirmed by the second") {
    // constant reaction + affine boundary term: the assembled system no
    // longer depends on the iterate, so the first sweep lands exactly
    ExpLayerProblem p = linear_problem("1");
    Mesh mesh = Mesh::uniform(1.0, 32);
    auto assemble = [&](std::span<const double> it) { return assemble_exp_system(p, mesh, it); };
    std::vector<double> initial(33, p.A);
    auto [v, stats] = picard_solve(assemble, initial, SolveOptions{});
    CHECK(stats.converged);
    CHECK(stats.iterations <= 2);
    CHECK(stats.final_update_norm <= 1e-12);
}

TEST_CASE("nonlinear reaction converges within the documented budget") {
    ExpLayerProblem p(1e-4, Expression::parse("1"), Expression::parse("u^3"),
                      Expression::parse("u - 1"), 1.0, 1.0, 1.0, 1e-3, 0.9);
    Mesh mesh = Mesh::uniform(1.0, 128);
    auto assemble = [&](std::span<const double> it) { return assemble_exp_system(p, mesh, it); };
    std::vector<double> initial(129, p.A);
    SolveOptions opts;
    opts.tol = 1e-10;
    opts.max_iter = 50;
    auto [v, stats] = picard_solve(assemble, initial, opts);
    CHECK(stats.converged);
    CHECK(stats.iterations <= 50);
    // measured on this fixture; catches accidental slowdowns
    CHECK(stats.iterations == 15);
}

TEST_CASE("max_iter = 1 on a nonlinear problem returns the best iterate unconverged") {
    ExpLayerProblem p(0.1, Expression::parse("1"), Expression::parse("u^3"),
                      Expression::parse("u - 1"), 2.0, 1.0, 1.0, 1e-3, 0.9);
    Mesh mesh = Mesh::uniform(1.0, 16);
    auto assemble = [&](std::span<const double> it) { return assemble_exp_system(p, mesh, it); };
    SolveOptions opts;
    opts.max_iter = 1;
    auto [v, stats] = picard_solve(assemble, std::vector<double>(17, p.A), opts);
    CHECK(!stats.converged);
    CHECK(stats.iterations == 1);
    CHECK(v.size() == 17);
    for (double x : v) CHECK(std::isfinite(x));
}

TEST_CASE("converged iterate is a fixed point of assemble-and-sweep") {
    ExpLayerProblem p(1e-2, Expression::parse("1 + x"), Expression::parse("u^3"),
                      Expression::parse("u - 1"), 1.0, 1.0, 1.0, 1e-3, 0.9);
    Mesh mesh = Mesh::uniform(1.0, 64);
    auto assemble = [&](std::span<const double> it) { return assemble_exp_system(p, mesh, it); };
    SolveOptions opts;
    auto [v, stats] = picard_solve(assemble, std::vector<double>(65, p.A), opts);
    REQUIRE(stats.converged);
    std::vector<double> again = sweep(assemble(v));
    double max_v = 0.0, max_change = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        max_v = std::max(max_v, std::fabs(v[i]));
        max_change = std::max(max_change, std::fabs(again[i] - v[i]));
    }
    CHECK(max_change <= opts.tol * (1.0 + max_v));
}

TEST_CASE("identical inputs produce bit-identical iterates") {
    ExpLayerProblem p(1e-3, Expression::parse("1"), Expression::parse("u^3"),
                      Expression::parse("u - 1"), 1.0, 1.0, 1.0, 1e-3, 0.9);
    Mesh mesh = Mesh::uniform(1.0, 64);
    auto assemble = [&](std::span<const double> it) { return assemble_exp_system(p, mesh, it); };
    auto run = [&] { return picard_solve(assemble, std::vector<double>(65, p.A), SolveOptions{}); };
    auto [v1, s1] = run();
    auto [v2, s2] = run();
    CHECK(s1.iterations == s2.iterations);
    CHECK(v1 == v2);
}

TEST_CASE("option validation") {
    auto assemble = [](std::span<const double>) { return TridiagonalSystem(2); };
    SolveOptions bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(picard_solve(assemble, {0.0, 0.0}, bad), std::invalid_argument);
    bad = SolveOptions{};
    bad.max_iter = 0;
    CHECK_THROWS_AS(picard_solve(assemble, {0.0, 0.0}, bad), std::invalid_argument);
    bad = SolveOptions{};
    bad.damping = 1.5;
    CHECK_THROWS_AS(picard_solve(assemble, {0.0, 0.0}, bad), std::invalid_argument);
}
