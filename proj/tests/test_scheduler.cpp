#include <doctest.h>

#include <cmath>
#include <vector>

#include "disre/error.hpp"
#include "disre/generators.hpp"
#include "disre/resistance.hpp"
#include "disre/scheduler.hpp"
#include "disre/verify.hpp"
#include "oracles.hpp"

using namespace disre;

namespace {

std::size_t ceil_log2(std::size_t k) {
    std::size_t d = 0;
    while ((std::size_t{1} << d) < k) ++d;
    return d;
}

}  // namespace

TEST_CASE("merge tree shapes") {
    const MergeTree b8 = MergeTree::build(8, TreeShape::balanced);
    CHECK(b8.depth() == 3);
    CHECK(b8.internal_count() == 7);
    CHECK(b8.root() == 14);
    CHECK(b8.layers().size() == 3);
    CHECK(b8.layers()[0].size() == 4);

    const MergeTree s8 = MergeTree::build(8, TreeShape::sequential);
    CHECK(s8.depth() == 7);
    CHECK(s8.internal_count() == 7);
    for (const auto& layer : s8.layers()) CHECK(layer.size() == 1);

    const MergeTree one = MergeTree::build(1, TreeShape::balanced);
    CHECK(one.internal_count() == 0);
    CHECK(one.depth() == 0);
    CHECK(one.root() == 0);
    CHECK(one.layers().empty());

    for (std::size_t k = 1; k <= 33; ++k) {
        const MergeTree t = MergeTree::build(k, TreeShape::balanced);
        CHECK(t.depth() == ceil_log2(k));
        CHECK(t.internal_count() == k - 1);
        std::vector<std::size_t> all(k);
        for (std::size_t i = 0; i < k; ++i) all[i] = i;
        CHECK(t.descendant_leaves(t.root()) == all);
        for (const auto& node : t.nodes()) {
            if (node.is_leaf()) continue;
            CHECK(*node.left < node.id);
            CHECK(*node.right < node.id);
            CHECK(node.height == 1 + std::max(t.node(*node.left).height, t.node(*node.right).height));
        }
    }

    const MergeTree c = MergeTree::custom(4, {{2, 3}, {1, 4}, {0, 5}});
    CHECK(c.depth() == 3);
    CHECK(c.descendant_leaves(4) == std::vector<std::size_t>{2, 3});
    CHECK_THROWS_AS(MergeTree::custom(4, {{0, 1}, {0, 2}, {3, 5}}), ValidationError);
    CHECK_THROWS_AS(MergeTree::custom(3, {{0, 1}}), ValidationError);
    CHECK_THROWS_AS(MergeTree::build(0, TreeShape::balanced), ValidationError);
}

TEST_CASE("partitions") {
    const Graph g = oracle::random_connected(30, 40, 3);
    const auto single = partition_graph(g, 1, PartitionStrategy::round_robin);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == g);

    const Graph c = cycle_graph(10);
    const auto halves = partition_graph(c, 2, PartitionStrategy::round_robin);
    CHECK(halves[0].num_edges() == 5);
    CHECK(halves[1].num_edges() == 5);

    for (auto strategy : {PartitionStrategy::round_robin, PartitionStrategy::contiguous, PartitionStrategy::random}) {
        for (std::size_t k : {2, 3, 7}) {
            const auto shards = partition_graph(g, k, strategy, 5);
            REQUIRE(shards.size() == k);
            std::size_t edges = 0;
            Graph sum(g.num_nodes());
            for (const Graph& s : shards) {
                edges += s.num_edges();
                sum = add_graphs(sum, s);
            }
            CHECK(edges == g.num_edges());
            const auto x = oracle::random_vector(30, k);
            const auto a = laplacian_apply(sum, x);
            const auto b = laplacian_apply(g, x);
            for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12 * (1.0 + std::abs(b[i])));
        }
    }
    CHECK(partition_graph(g, 4, PartitionStrategy::random, 9) == partition_graph(g, 4, PartitionStrategy::random, 9));
    CHECK_THROWS_AS(partition_graph(c, 11, PartitionStrategy::round_robin), ValidationError);
}

TEST_CASE("augmented partition adds the spanning tree to every shard") {
    const Graph g = oracle::random_connected(30, 60, 4);
    const Graph tree = bfs_spanning_forest(g);
    const std::size_t k = 4;
    const auto shards = partition_graph(g, k, PartitionStrategy::round_robin, 0, true);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(30, 30);
    for (const Graph& s : shards) {
        CHECK(connected(s));
        sum += oracle::laplacian(s);
    }
    const Eigen::MatrixXd expected = oracle::laplacian(g) + static_cast<double>(k - 1) * oracle::laplacian(tree);
    CHECK((sum - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("single shard passes the graph through") {
    const Graph g = grid2d_graph(6, 6);
    SparsifyConfig cfg;
    cfg.shards = 1;
    const DisreResult r = run_disre(g, cfg);
    CHECK(r.stats.rounds == 0);
    CHECK(r.stats.total_solves == 0);
    CHECK(r.sparsifier == init_sparsifier(g, compute_qbar(0.5, 0.1, 36), 0, 0.5, 0.0));
}

TEST_CASE("output is independent of workers and execution mode") {
    const Graph g = oracle::random_connected(80, 200, 6);
    SparsifyConfig cfg;
    cfg.shards = 8;
    cfg.qbar = 60;
    cfg.seed = 17;
    cfg.gamma = 0.1;
    const DisreResult base = run_disre(g, cfg);
    CHECK(base.stats.rounds == 3);
    for (unsigned workers : {2u, 4u, 8u}) {
        for (auto mode : {ExecutionMode::layered, ExecutionMode::asynchronous}) {
            SparsifyConfig c = cfg;
            c.workers = workers;
            c.execution = mode;
            const DisreResult r = run_disre(g, c);
            CHECK(r.sparsifier == base.sparsifier);
            CHECK(r.stats.rounds == base.stats.rounds);
            CHECK(r.stats.rng_draws == base.stats.rng_draws);
        }
    }
    SparsifyConfig other = cfg;
    other.seed = 18;
    CHECK_FALSE(run_disre(g, other).sparsifier == base.sparsifier);
}

TEST_CASE("run statistics") {
    const Graph g = grid2d_graph(10, 10);
    SparsifyConfig cfg;
    cfg.shards = 6;
    cfg.qbar = 100;
    const DisreResult r = run_disre(g, cfg);
    CHECK(r.stats.qbar == 100);
    CHECK(r.stats.rounds == 3);
    CHECK(r.stats.layers.size() == 3);
    CHECK(r.stats.nodes.size() == 5);
    std::size_t merges = 0;
    std::size_t solves = 0;
    for (const auto& layer : r.stats.layers) {
        merges += layer.merges;
        solves += layer.solves;
        CHECK(layer.edges_out <= layer.edges_in);
    }
    CHECK(merges == 5);
    CHECK(solves == r.stats.total_solves);
    CHECK(r.tree.root() == 10);

    // Loose work cap: 2 (m + k * 3 qbar d_eff * ceil(log2 k)).
    const double deff = effective_dimension(g, 0.0);
    const double cap = 2.0 * (static_cast<double>(g.num_edges()) + 6.0 * 3.0 * 100.0 * deff * 3.0);
    CHECK(static_cast<double>(r.stats.edges_touched) <= cap);

    const std::string line = format_layer_line(r.stats.layers[0]);
    CHECK(line.rfind("layer=1 merges=2 edges_in=", 0) == 0);
    CHECK(line.find(" edges_out=") != std::string::npos);
    CHECK(line.find(" solves=") != std::string::npos);
    CHECK(line.find(" ms=") != std::string::npos);
}

TEST_CASE("intermediate sparsifiers approximate their merged graphs") {
    const Graph g = grid2d_graph(12, 12);
    std::size_t checked = 0;
    std::size_t passed = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SparsifyConfig cfg;
        cfg.shards = 4;
        cfg.seed = seed;
        cfg.keep_intermediate = true;
        const DisreResult r = run_disre(g, cfg);
        REQUIRE(r.node_sparsifiers.size() == r.tree.nodes().size());
        for (const auto& node : r.tree.nodes()) {
            if (node.is_leaf()) continue;
            const Graph exact = node_graph(r.shards, r.tree, node.id);
            // Merged shards may be disconnected at gamma = 0; the check works on range(L).
            const SparsifierReport rep = check_sparsifier(exact, r.node_sparsifiers[node.id], 0.5, 0.0);
            ++checked;
            if (rep.pass) ++passed;
        }
        CHECK(r.node_sparsifiers[r.tree.root()] == r.sparsifier);
    }
    CHECK(static_cast<double>(passed) >= 0.95 * static_cast<double>(checked));
}

TEST_CASE("configuration errors") {
    const std::vector<Edge> two{{0, 1, 1.0}, {2, 3, 1.0}};
    const Graph split = build_graph(4, two);
    SparsifyConfig cfg;
    cfg.shards = 2;
    CHECK_THROWS_AS(run_disre(split, cfg), ValidationError);
    cfg.gamma = 0.5;
    cfg.qbar = 10;
    CHECK_NOTHROW(run_disre(split, cfg));
    cfg.epsilon = 1.0;
    CHECK_THROWS_AS(run_disre(split, cfg), ValidationError);

    for (auto s : {TreeShape::balanced, TreeShape::sequential}) CHECK(parse_tree_shape(to_string(s)) == s);
    for (auto s : {PartitionStrategy::round_robin, PartitionStrategy::contiguous, PartitionStrategy::random})
        CHECK(parse_partition_strategy(to_string(s)) == s);
    for (auto s : {ExecutionMode::layered, ExecutionMode::asynchronous}) CHECK(parse_execution_mode(to_string(s)) == s);
    CHECK_THROWS_AS(parse_tree_shape("star"), ValidationError);
}
