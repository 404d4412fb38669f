#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "disre/error.hpp"
#include "disre/generators.hpp"
#include "disre/learn.hpp"
#include "oracles.hpp"

using namespace disre;

namespace {

Graph unit_edge() {
    const std::vector<Edge> one{{0, 1, 1.0}};
    return build_graph(2, one);
}

LabeledSet random_labels(std::size_t n, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<NodeId> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = static_cast<NodeId>(i);
    std::shuffle(nodes.begin(), nodes.end(), rng);
    std::normal_distribution<double> d;
    LabeledSet s;
    for (std::size_t i = 0; i < count; ++i) {
        s.indices.push_back(nodes[i]);
        s.labels.push_back(d(rng));
    }
    return s;
}

// (lambda l L + I_S)^+ through the rank-revealing oracle.
Eigen::MatrixXd hfs_pinv(const Graph& g, double lambda, const LabeledSet& s) {
    Eigen::MatrixXd a = lambda * static_cast<double>(s.size()) * oracle::laplacian(g);
    for (NodeId i : s.indices) a(i, i) += 1.0;
    return oracle::shifted_pinv(a, 0.0);
}

double variance(const std::vector<double>& f) {
    double mean = 0.0;
    for (double v : f) mean += v / static_cast<double>(f.size());
    double var = 0.0;
    for (double v : f) var += (v - mean) * (v - mean) / static_cast<double>(f.size());
    return var;
}

}  // namespace

TEST_CASE("labeled set validation") {
    LabeledSet s{{0, 3}, {1.0, -1.0}};
    CHECK_NOTHROW(s.validate(4));
    CHECK(s.padded(4) == std::vector<double>{1.0, 0.0, 0.0, -1.0});
    CHECK(s.indicator(4) == std::vector<double>{1.0, 0.0, 0.0, 1.0});
    CHECK_THROWS_AS(s.validate(3), ValidationError);
    CHECK_THROWS_AS((LabeledSet{{1, 1}, {1.0, 1.0}}.validate(4)), ValidationError);
    CHECK_THROWS_AS((LabeledSet{{}, {}}.validate(4)), ValidationError);
    CHECK_THROWS_AS((LabeledSet{{0}, {1.0, 2.0}}.validate(4)), ValidationError);
}

TEST_CASE("lap_smooth") {
    const Graph g = oracle::random_connected(30, 40, 1);
    const auto y = oracle::random_vector(30, 2);
    CHECK(lap_smooth(g, 0.0, y) == y);
    for (double lambda : {0.1, 1.0, 10.0})
        for (double v : lap_smooth(g, lambda, std::vector<double>(30, 2.5))) CHECK(v == doctest::Approx(2.5));

    const auto f = lap_smooth(unit_edge(), 1.0, std::vector<double>{1.0, -1.0});
    CHECK(f[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(f[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-10));

    const Eigen::MatrixXd m = 0.7 * oracle::laplacian(g) + Eigen::MatrixXd::Identity(30, 30);
    CHECK(oracle::relative_error(lap_smooth(g, 0.7, y), m.ldlt().solve(oracle::to_eigen(y))) < 1e-9);
    CHECK_THROWS_AS(lap_smooth(g, -1.0, y), ValidationError);
}

TEST_CASE("hfs small examples") {
    const auto sol = hfs(unit_edge(), 1.0, LabeledSet{{0}, {1.0}});
    CHECK(sol.f[0] == doctest::Approx(1.0));
    CHECK(sol.f[1] == doctest::Approx(1.0));
    CHECK_FALSE(sol.degenerate);

    const Graph g = oracle::random_connected(25, 30, 3);
    LabeledSet all;
    for (NodeId i = 0; i < 25; ++i) {
        all.indices.push_back(i);
        all.labels.push_back(std::sin(static_cast<double>(i)));
    }
    const auto near = hfs(g, 1e-9, all);
    for (std::size_t i = 0; i < 25; ++i) CHECK(near.f[i] == doctest::Approx(all.labels[i]).epsilon(1e-6));

    const LabeledSet few = random_labels(25, 5, 4);
    double last = variance(hfs(g, 0.01, few).f);
    for (double lambda : {1.0, 100.0, 1e4}) {
        const double var = variance(hfs(g, lambda, few).f);
        CHECK(var < last);
        last = var;
    }
    CHECK(last < 1e-3);
    CHECK_THROWS_AS(hfs(g, 0.0, few), ValidationError);
}

TEST_CASE("hfs matches the pseudo-inverse oracle on both paths") {
    LearnOptions iterative;
    iterative.dense_cap = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Graph g = oracle::random_connected(40, 60, seed);
        const LabeledSet s = random_labels(40, 6 + seed, seed + 10);
        const Eigen::VectorXd truth = hfs_pinv(g, 0.05, s) * oracle::to_eigen(s.padded(40));
        CHECK(oracle::relative_error(hfs(g, 0.05, s).f, truth) < 1e-8);
        CHECK(oracle::relative_error(hfs(g, 0.05, s, iterative).f, truth) < 1e-7);
    }
}

TEST_CASE("hfs flags components without labels") {
    const std::vector<Edge> two{{0, 1, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}};
    const Graph g = build_graph(5, two);
    const LabeledSet s{{0}, {1.0}};
    const auto sol = hfs(g, 1.0, s);
    CHECK(sol.degenerate);
    CHECK(sol.f[3] == doctest::Approx(0.0));
    CHECK(sol.f[4] == doctest::Approx(0.0));
    LearnOptions iterative;
    iterative.dense_cap = 0;
    const auto it = hfs(g, 1.0, s, iterative);
    CHECK(it.degenerate);
    for (std::size_t i = 0; i < 5; ++i) CHECK(it.f[i] == doctest::Approx(sol.f[i]).epsilon(1e-8));
}

TEST_CASE("stable_hfs output is centered and matches the oracle") {
    LearnOptions iterative;
    iterative.dense_cap = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t n = 20 + 3 * seed;
        const Graph g = oracle::random_connected(n, n, seed + 100);
        const LabeledSet s = random_labels(n, 3 + seed % 7, seed);
        const double lambda = 0.01 * static_cast<double>(seed + 1);
        const SslSolution sol = stable_hfs(g, lambda, s);
        const Eigen::VectorXd f = oracle::to_eigen(sol.f);
        CHECK(std::abs(f.sum()) <= 1e-6 * f.norm() * std::sqrt(static_cast<double>(n)));

        // Reference: center labels, then mu from the full ones vector.
        double mean = 0.0;
        for (double y : s.labels) mean += y / static_cast<double>(s.size());
        LabeledSet centered = s;
        for (double& y : centered.labels) y -= mean;
        const Eigen::MatrixXd pinv = hfs_pinv(g, lambda, s);
        const Eigen::VectorXd py = pinv * oracle::to_eigen(centered.padded(n));
        const Eigen::VectorXd p1 = pinv * Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
        const double mu = py.sum() / p1.sum();
        CHECK(sol.mu == doctest::Approx(mu).epsilon(1e-8));
        CHECK(oracle::relative_error(sol.f, py - mu * p1) < 1e-8);
        CHECK(oracle::relative_error(stable_hfs(g, lambda, s, iterative).f, py - mu * p1) < 1e-6);
    }
}

TEST_CASE("stable_hfs reduces to hfs when the numerator vanishes") {
    // Symmetric path with antisymmetric labels: A^+ y sums to zero.
    const Graph p = path_graph(5);
    const LabeledSet s{{0, 4}, {1.0, -1.0}};
    const SslSolution st = stable_hfs(p, 0.3, s);
    const SslSolution plain = hfs(p, 0.3, s);
    CHECK(st.mu == doctest::Approx(0.0).scale(1.0));
    for (std::size_t i = 0; i < 5; ++i) CHECK(st.f[i] == doctest::Approx(plain.f[i]));
}

TEST_CASE("stable_hfs recovers the sign of a smooth target") {
    const Graph g = grid2d_graph(30, 30);
    const auto target = smooth_signal(g, 2000, 0);
    std::mt19937_64 rng(5);
    std::vector<NodeId> pos;
    std::vector<NodeId> neg;
    for (NodeId i = 0; i < 900; ++i) (target[i] > 0 ? pos : neg).push_back(i);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    LabeledSet s;
    for (std::size_t i = 0; i < 25; ++i) {
        s.indices.push_back(pos[i]);
        s.labels.push_back(1.0);
        s.indices.push_back(neg[i]);
        s.labels.push_back(-1.0);
    }
    const SslSolution sol = stable_hfs(g, 1e-2, s);
    const auto labeled = s.indicator(900);
    std::size_t right = 0;
    std::size_t total = 0;
    for (std::size_t i = 0; i < 900; ++i) {
        if (labeled[i] > 0.0) continue;
        ++total;
        if ((sol.f[i] > 0) == (target[i] > 0)) ++right;
    }
    CHECK(static_cast<double>(right) >= 0.6 * static_cast<double>(total));
}

TEST_CASE("ltr") {
    LabeledSet all;
    for (NodeId i = 0; i < 4; ++i) {
        all.indices.push_back(i);
        all.labels.push_back(1.0 + i);
    }
    const auto f = ltr(Graph(4), 0.5, 2.0, 2.0, all);
    for (std::size_t i = 0; i < 4; ++i) CHECK(f[i] == doctest::Approx(all.labels[i] * 2.0 / 2.5));

    const Graph g = oracle::random_connected(50, 80, 6);
    LabeledSet zero = random_labels(50, 10, 1);
    std::fill(zero.labels.begin(), zero.labels.end(), 0.0);
    for (double v : ltr(g, 0.1, 5.0, 1.0, zero)) CHECK(v == 0.0);

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Graph h = oracle::random_connected(50, 90, seed + 7);
        const LabeledSet s = random_labels(50, 10, seed);
        Eigen::MatrixXd m = oracle::laplacian(h) + 0.2 * Eigen::MatrixXd::Identity(50, 50);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(50);
        std::vector<double> c(50, 0.5);
        for (std::size_t i = 0; i < s.size(); ++i) {
            c[s.indices[i]] = 3.0;
            rhs(s.indices[i]) = 3.0 * s.labels[i];
        }
        for (int i = 0; i < 50; ++i) m(i, i) += c[i];
        CHECK(oracle::relative_error(ltr(h, 0.2, 3.0, 0.5, s), m.ldlt().solve(rhs)) < 1e-8);
    }
    CHECK_THROWS_AS(ltr(g, 0.1, 1.0, 2.0, zero), ValidationError);
    CHECK_THROWS_AS(ltr(g, 0.0, 2.0, 1.0, zero), ValidationError);
}

TEST_CASE("spectral clustering cost") {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(4, 1);
    f << 1, -1, 1, -1;
    f /= 2.0;
    CHECK(sc_cost(Graph(4), f) == 0.0);

    const Graph b = barbell_graph(3, 1);
    Eigen::MatrixXd ind = Eigen::MatrixXd::Zero(6, 1);
    for (int i = 0; i < 6; ++i) ind(i, 0) = i < 3 ? 1.0 : -1.0;
    ind /= ind.norm();
    const Eigen::MatrixXd l = oracle::laplacian(b);
    CHECK(sc_cost(b, ind) == doctest::Approx((ind.transpose() * l * ind).trace()));

    const Graph g = oracle::random_connected(30, 50, 2);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::laplacian(g));
    const Eigen::MatrixXd bottom = es.eigenvectors().middleCols(1, 3);
    const double expected = es.eigenvalues()[1] + es.eigenvalues()[2] + es.eigenvalues()[3];
    CHECK(sc_cost(g, bottom) == doctest::Approx(expected).epsilon(1e-10));

    Eigen::MatrixXd not_centered = Eigen::MatrixXd::Zero(30, 1);
    not_centered(0, 0) = 1.0;
    CHECK_THROWS_AS(sc_cost(g, not_centered), ValidationError);
    CHECK_THROWS_AS(sc_cost(g, 2.0 * bottom), ValidationError);
}

TEST_CASE("smoothing error bound") {
    BoundInputs in;
    in.epsilon = 0.5;
    in.lambda = 1.0;
    in.gamma = 2.0;
    CHECK(smoothing_error_bound(in, 4.0, 1.0) == doctest::Approx(6.75));
    in.gamma = 0.0;
    CHECK(smoothing_error_bound(in, 4.0, 1.0) == doctest::Approx(0.5 * 0.25 * 4.0));
    in.epsilon = 0.0;
    CHECK(smoothing_error_bound(in, 4.0, 1.0) == 0.0);
    in.epsilon = 1.0;
    CHECK_THROWS_AS(smoothing_error_bound(in, 4.0, 1.0), ValidationError);

    const Graph g = oracle::random_connected(20, 20, 1);
    const auto f = oracle::random_vector(20, 3);
    in.epsilon = 0.3;
    in.gamma = 0.5;
    in.lambda = 2.0;
    const double q = laplacian_quadratic(g, f);
    const double nsq = oracle::to_eigen(f).squaredNorm();
    CHECK(smoothing_error_bound(in, f, g) == doctest::Approx(smoothing_error_bound(in, q, nsq)));
}

TEST_CASE("transductive bound") {
    CHECK(transductive_pi(2, 2) == doctest::Approx(1.52381).epsilon(1e-5));
    CHECK(std::abs(transductive_pi(2, 2) - (4.0 / 3.5) * (4.0 / 3.0)) <= 1e-12);

    BoundInputs in;
    in.epsilon = 0.0;
    in.lambda = 1.0;
    in.lambda2 = 0.5;
    in.label_cap = 1.0;
    in.labeled = 20;
    in.unlabeled = 80;
    in.delta = 0.1;
    in.empirical_risk = 0.05;
    const SslBound b0 = ssl_generalization_bound(in);
    CHECK(b0.approximation_term == 0.0);
    const double gap = 20.0 * 0.5 - 1.0;
    const double beta = 3.0 * std::sqrt(20.0) / (gap * gap) + 4.0 / gap;
    CHECK(b0.beta == doctest::Approx(beta));
    CHECK(b0.pi == doctest::Approx(transductive_pi(20, 80)));
    const double tail = (2.0 * beta + 4.0 * 100.0 / 1600.0) * std::sqrt(b0.pi * std::log(10.0) / 2.0);
    CHECK(b0.bound == doctest::Approx(0.05 + beta + tail));

    in.epsilon = 0.2;
    const SslBound b1 = ssl_generalization_bound(in);
    CHECK(b1.approximation_term > 0.0);
    CHECK(b1.bound > b0.bound - 1e-15);

    // The sparsification term decays like 1/l^2.
    in.labeled = 20000;
    in.unlabeled = 100000;
    const double t1 = ssl_generalization_bound(in).approximation_term;
    in.labeled = 40000;
    const double t2 = ssl_generalization_bound(in).approximation_term;
    CHECK(t1 / t2 == doctest::Approx(4.0).epsilon(0.05));

    in.labeled = 2;
    in.lambda = 0.1;
    CHECK_THROWS_AS(ssl_generalization_bound(in), ValidationError);
}
