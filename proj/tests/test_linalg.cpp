#include <doctest.h>

#include <cmath>
#include <vector>

#include "disre/dense.hpp"
#include "disre/error.hpp"
#include "disre/generators.hpp"
#include "disre/linalg.hpp"
#include "oracles.hpp"

using namespace disre;

namespace {

std::vector<double> project_per_component(const Graph& g, std::vector<double> x) {
    const Components c = connected_components(g);
    std::vector<double> sum(c.count, 0.0);
    std::vector<double> size(c.count, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum[c.label[i]] += x[i];
        size[c.label[i]] += 1.0;
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= sum[c.label[i]] / size[c.label[i]];
    return x;
}

Graph two_components(std::uint64_t seed) {
    const Graph a = oracle::random_connected(30, 40, seed);
    const Graph b = oracle::random_connected(20, 25, seed + 1);
    std::vector<Edge> edges(a.edges().begin(), a.edges().end());
    for (Edge e : b.edges()) edges.push_back({e.u + 30, e.v + 30, e.weight});
    return build_graph(50, edges);
}

}  // namespace

TEST_CASE("sdd_solve small examples") {
    const Graph g = oracle::random_connected(20, 30, 1);
    const std::vector<double> zero(20, 0.0);
    for (double v : sdd_solve(g, 1.0, zero)) CHECK(v == 0.0);
    const std::vector<double> ones(20, 1.0);
    for (double v : sdd_solve(g, 1.0, ones)) CHECK(v == doctest::Approx(1.0).epsilon(1e-8));

    const std::vector<Edge> one{{0, 1, 1.0}};
    const auto x = sdd_solve(build_graph(2, one), 0.0, std::vector<double>{1.0, -1.0});
    CHECK(x[0] == doctest::Approx(0.5));
    CHECK(x[1] == doctest::Approx(-0.5));
}

TEST_CASE("sdd_solve rejects rhs outside the range at gamma = 0") {
    const Graph g = oracle::random_connected(20, 30, 2);
    CHECK_THROWS_AS(sdd_solve(g, 0.0, std::vector<double>(20, 1.0)), ValidationError);
    CHECK_THROWS_AS(sdd_solve(g, -1.0, std::vector<double>(20, 0.0)), ValidationError);
    CHECK_THROWS_AS(sdd_solve(g, 1.0, std::vector<double>(3, 0.0)), ValidationError);
}

TEST_CASE("sdd_solve meets its residual tolerance and matches the pseudo-inverse oracle") {
    const Preconditioner preconditioners[] = {Preconditioner::none, Preconditioner::jacobi,
                                              Preconditioner::spanning_tree};
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Graph g = seed % 2 ? two_components(seed) : oracle::random_connected(40 + 30 * seed, 80 * seed + 20, seed);
        const std::size_t n = g.num_nodes();
        const Eigen::MatrixXd l = oracle::laplacian(g);
        for (double gamma : {0.0, 0.1, 1.0, 100.0}) {
            const Eigen::MatrixXd pinv = oracle::shifted_pinv(l, gamma);
            auto rhs = oracle::random_vector(n, seed * 31 + 7);
            if (gamma == 0.0) rhs = project_per_component(g, rhs);
            for (Preconditioner p : preconditioners) {
                SolverConfig cfg;
                cfg.preconditioner = p;
                const SolveResult r = sdd_solve_detailed(g, gamma, rhs, cfg);
                CHECK(r.relative_residual <= cfg.rel_tol);
                const Eigen::VectorXd ax = (l + gamma * Eigen::MatrixXd::Identity(n, n)) * oracle::to_eigen(r.x);
                CHECK((ax - oracle::to_eigen(rhs)).norm() <= cfg.rel_tol * oracle::to_eigen(rhs).norm() * 1.0001);
                CHECK(oracle::relative_error(r.x, pinv * oracle::to_eigen(rhs)) <= 10 * cfg.rel_tol);
            }
        }
    }
}

TEST_CASE("gamma = 0 solutions have zero mean on each component") {
    const Graph g = two_components(5);
    const auto rhs = project_per_component(g, oracle::random_vector(50, 3));
    const auto x = sdd_solve(g, 0.0, rhs);
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t i = 0; i < 30; ++i) s1 += x[i];
    for (std::size_t i = 30; i < 50; ++i) s2 += x[i];
    CHECK(std::abs(s1) < 1e-10);
    CHECK(std::abs(s2) < 1e-10);
}

TEST_CASE("solver reports non-convergence with its residual") {
    const Graph g = grid2d_graph(30, 30);
    SolverConfig cfg;
    cfg.max_iters = 2;
    cfg.preconditioner = Preconditioner::none;
    const auto rhs = project_per_component(g, oracle::random_vector(900, 1));
    try {
        sdd_solve(g, 0.0, rhs, cfg);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.residual() > cfg.rel_tol);
        CHECK(e.iterations() >= 2);
    }
}

TEST_CASE("shifted system with per-node shift") {
    const Graph g = oracle::random_connected(25, 40, 9);
    std::vector<double> shift(25, 0.0);
    shift[3] = 1.0;
    shift[7] = 2.0;
    const auto rhs = oracle::random_vector(25, 4);
    const SolveResult r = solve_shifted_laplacian(g, 0.5, shift, rhs, {.rel_tol = 1e-12});
    Eigen::MatrixXd m = 0.5 * oracle::laplacian(g);
    m(3, 3) += 1.0;
    m(7, 7) += 2.0;
    CHECK(oracle::relative_error(r.x, m.ldlt().solve(oracle::to_eigen(rhs))) < 1e-9);
}

TEST_CASE("lambda_max") {
    const std::vector<Edge> one{{0, 1, 1.0}};
    CHECK(lambda_max(build_graph(2, one), 100) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(lambda_max(complete_graph(8), 200) == doctest::Approx(8.0).epsilon(1e-6));
    CHECK(lambda_max(Graph(5), 10) == 0.0);
    const Graph g = oracle::random_connected(40, 60, 2);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::laplacian(g));
    const double top = es.eigenvalues().maxCoeff();
    const double est = lambda_max(g, 500, 1);
    CHECK(est <= top * (1.0 + 1e-12));
    CHECK(est >= 0.9 * top);
    CHECK(est == lambda_max(g, 500, 1));
}

TEST_CASE("lambda2 dense and iterative paths") {
    const std::vector<Edge> one{{0, 1, 1.0}};
    CHECK(lambda2(build_graph(2, one)) == doctest::Approx(2.0));
    CHECK(lambda2(complete_graph(4)) == doctest::Approx(4.0));
    const std::vector<Edge> two{{0, 1, 1.0}, {2, 3, 1.0}};
    CHECK_THROWS_AS(lambda2(build_graph(4, two)), ValidationError);

    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const Graph g = oracle::random_connected(60, 90, seed);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::laplacian(g));
        const double truth = es.eigenvalues()[1];
        CHECK(lambda2(g) == doctest::Approx(truth).epsilon(1e-9));
        Lambda2Options iterative;
        iterative.dense_cap = 0;
        iterative.max_iters = 2000;
        CHECK(lambda2(g, iterative) == doctest::Approx(truth).epsilon(1e-6));
    }
}

TEST_CASE("smooth_signal") {
    const Graph g = grid2d_graph(8, 8);
    std::vector<double> trace;
    const auto v = smooth_signal(g, 300, 3, &trace);
    double sum = 0.0;
    for (double x : v) sum += x;
    CHECK(std::abs(sum) <= 1e-8);
    CHECK(norm2(v) == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(trace.size() == 301);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
    CHECK(smooth_signal(g, 300, 3) == v);

    const Graph p3 = path_graph(3);
    const auto w = smooth_signal(p3, 2000, 0);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::laplacian(p3));
    CHECK(laplacian_quadratic(p3, w) == doctest::Approx(es.eigenvalues()[1]).epsilon(1e-9));

    const std::vector<Edge> two{{0, 1, 1.0}, {2, 3, 1.0}};
    CHECK_THROWS_AS(smooth_signal(build_graph(4, two), 10, 0), ValidationError);
}

TEST_CASE("dense oracle") {
    const Graph g = oracle::random_connected(30, 50, 6);
    const DenseOracle o(g);
    const auto& ev = o.eigenvalues();
    for (Eigen::Index i = 1; i < ev.size(); ++i) CHECK(ev[i] >= ev[i - 1]);
    CHECK(std::abs(ev[0]) <= 1e-8 * ev[ev.size() - 1]);
    CHECK((o.matrix() - o.matrix().transpose()).cwiseAbs().maxCoeff() <= 1e-12);

    const std::vector<double> ones(30, 1.0);
    for (double v : dense_pinv_apply(o, 1.0, ones)) CHECK(v == doctest::Approx(1.0));
    const std::vector<Edge> one{{0, 1, 1.0}};
    const DenseOracle edge(build_graph(2, one));
    const auto x = dense_pinv_apply(edge, 0.0, std::vector<double>{1.0, -1.0});
    CHECK(x[0] == doctest::Approx(0.5));
    CHECK(x[1] == doctest::Approx(-0.5));

    const Eigen::MatrixXd pinv = oracle::shifted_pinv(oracle::laplacian(g), 0.0);
    const auto rhs = oracle::random_vector(30, 2);
    CHECK(oracle::relative_error(dense_pinv_apply(o, 0.0, rhs), pinv * oracle::to_eigen(rhs)) < 1e-9);

    CHECK_THROWS_AS(dense_laplacian(g, 10), ValidationError);
    CHECK_THROWS_AS(DenseOracle(g, 10), ValidationError);
}
