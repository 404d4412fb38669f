#include "disre/scheduler.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <sstream>

#include "disre/error.hpp"
#include "disre/parallel.hpp"
#include "disre/rng.hpp"

namespace disre {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::size_t build_balanced(std::vector<MergeTree::Node>& nodes, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return lo;
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    const std::size_t left = build_balanced(nodes, lo, mid);
    const std::size_t right = build_balanced(nodes, mid, hi);
    MergeTree::Node node;
    node.id = nodes.size();
    node.left = left;
    node.right = right;
    node.height = 1 + std::max(nodes[left].height, nodes[right].height);
    nodes.push_back(node);
    return node.id;
}

}  // namespace

MergeTree MergeTree::build(std::size_t k, TreeShape shape) {
    detail::require(k >= 1, "merge tree: k must be >= 1");
    std::vector<std::pair<std::size_t, std::size_t>> merges;
    if (shape == TreeShape::sequential) {
        std::size_t acc = 0;
        for (std::size_t leaf = 1; leaf < k; ++leaf) {
            merges.emplace_back(acc, leaf);
            acc = k + leaf - 1;
        }
        return custom(k, merges);
    }
    MergeTree tree;
    tree.k_ = k;
    for (std::size_t i = 0; i < k; ++i) tree.nodes_.push_back({i, std::nullopt, std::nullopt, 0});
    build_balanced(tree.nodes_, 0, k);
    return tree;
}

MergeTree MergeTree::custom(std::size_t k, const std::vector<std::pair<std::size_t, std::size_t>>& merges) {
    detail::require(k >= 1, "merge tree: k must be >= 1");
    detail::require(merges.size() + 1 == k, "merge tree: need exactly k - 1 merges");
    MergeTree tree;
    tree.k_ = k;
    for (std::size_t i = 0; i < k; ++i) tree.nodes_.push_back({i, std::nullopt, std::nullopt, 0});
    std::vector<bool> used(2 * k - 1, false);
    for (const auto& [l, r] : merges) {
        const std::size_t id = tree.nodes_.size();
        detail::require(l < id && r < id && l != r, "merge tree: child must precede its parent");
        detail::require(!used[l] && !used[r], "merge tree: node merged twice");
        used[l] = used[r] = true;
        tree.nodes_.push_back({id, l, r, 1 + std::max(tree.nodes_[l].height, tree.nodes_[r].height)});
    }
    return tree;
}

std::vector<std::vector<std::size_t>> MergeTree::layers() const {
    std::vector<std::vector<std::size_t>> out(depth());
    for (std::size_t id = k_; id < nodes_.size(); ++id) out[nodes_[id].height - 1].push_back(id);
    return out;
}

std::vector<std::size_t> MergeTree::descendant_leaves(std::size_t id) const {
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack{id};
    while (!stack.empty()) {
        const Node& node = nodes_.at(stack.back());
        stack.pop_back();
        if (node.is_leaf()) {
            out.push_back(node.id);
        } else {
            stack.push_back(*node.left);
            stack.push_back(*node.right);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Graph> partition_graph(const Graph& g, std::size_t k, PartitionStrategy strategy, std::uint64_t seed,
                                   bool spanning_tree_augment) {
    detail::require(k >= 1, "partition: k must be >= 1");
    if (k > g.num_edges()) throw ValidationError("partition: k exceeds the number of edges");

    std::vector<Edge> pool(g.edges().begin(), g.edges().end());
    Graph tree(g.num_nodes());
    if (spanning_tree_augment) {
        tree = bfs_spanning_forest(g);
        const auto tree_edges = tree.edges();
        std::erase_if(pool, [&](const Edge& e) {
            return std::binary_search(tree_edges.begin(), tree_edges.end(), e,
                                      [](const Edge& a, const Edge& b) {
                                          return a.u != b.u ? a.u < b.u : a.v < b.v;
                                      });
        });
    }

    std::vector<std::vector<Edge>> buckets(k);
    switch (strategy) {
    case PartitionStrategy::round_robin:
        for (std::size_t i = 0; i < pool.size(); ++i) buckets[i % k].push_back(pool[i]);
        break;
    case PartitionStrategy::random: {
        CounterRng rng(seed, {0x7061ULL});
        for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.below(i)]);
        [[fallthrough]];
    }
    case PartitionStrategy::contiguous:
        for (std::size_t s = 0; s < k; ++s) {
            const std::size_t lo = pool.size() * s / k;
            const std::size_t hi = pool.size() * (s + 1) / k;
            buckets[s].assign(pool.begin() + static_cast<std::ptrdiff_t>(lo),
                              pool.begin() + static_cast<std::ptrdiff_t>(hi));
        }
        break;
    }

    std::vector<Graph> shards;
    shards.reserve(k);
    for (auto& bucket : buckets) {
        if (spanning_tree_augment) bucket.insert(bucket.end(), tree.edges().begin(), tree.edges().end());
        shards.push_back(build_graph(g.num_nodes(), bucket));
    }
    return shards;
}

std::uint32_t resolve_qbar(const SparsifyConfig& cfg, std::size_t n) {
    if (cfg.qbar) {
        detail::require(*cfg.qbar >= 1, "qbar override must be >= 1");
        return *cfg.qbar;
    }
    return compute_qbar(cfg.epsilon, cfg.delta, n);
}

Graph node_graph(const std::vector<Graph>& shards, const MergeTree& tree, std::size_t id) {
    std::vector<Edge> edges;
    std::size_t n = 0;
    for (std::size_t leaf : tree.descendant_leaves(id)) {
        const Graph& s = shards.at(leaf);
        n = s.num_nodes();
        edges.insert(edges.end(), s.edges().begin(), s.edges().end());
    }
    return build_graph(n, edges);
}

DisreResult run_disre(const Graph& g, const SparsifyConfig& cfg) {
    detail::require(cfg.epsilon > 0.0 && cfg.epsilon < 1.0, "sparsify: epsilon must be in (0,1)");
    detail::require(cfg.gamma >= 0.0, "sparsify: gamma must be >= 0");
    detail::require(cfg.shards >= 1, "sparsify: k must be >= 1");
    detail::require(g.num_nodes() >= 2, "sparsify: graph needs at least 2 nodes");
    if (cfg.gamma == 0.0 && !connected(g)) {
        throw ValidationError("sparsify: graph is disconnected; use gamma > 0");
    }
    const auto start = Clock::now();

    DisreResult result;
    result.stats.qbar = resolve_qbar(cfg, g.num_nodes());
    result.tree = MergeTree::build(cfg.shards, cfg.shape);
    result.shards = partition_graph(g, cfg.shards, cfg.partition, cfg.seed, cfg.spanning_tree_augment);
    const MergeTree& tree = result.tree;
    const std::size_t k = cfg.shards;

    std::vector<Sparsifier> state(tree.nodes().size());
    for (std::size_t i = 0; i < k; ++i) {
        state[i] = init_sparsifier(result.shards[i], result.stats.qbar, static_cast<std::uint32_t>(i), cfg.epsilon,
                                   cfg.gamma);
    }

    MergeParams params;
    params.gamma = cfg.gamma;
    params.epsilon = cfg.epsilon;
    params.halving_floor = cfg.halving_floor;
    params.resistance = cfg.resistance;

    std::vector<NodeRecord> records(tree.nodes().size());
    auto run_node = [&](std::size_t id) {
        const auto t0 = Clock::now();
        const MergeTree::Node& node = tree.node(id);
        MergeResult merged = merge_resparsify(state[*node.left], state[*node.right], params, {cfg.seed, id});
        state[id] = std::move(merged.sparsifier);
        records[id] = {id, node.height, merged.stats, elapsed_ms(t0)};
        if (!cfg.keep_intermediate) {
            state[*node.left] = Sparsifier();
            state[*node.right] = Sparsifier();
        }
    };

    const auto layers = tree.layers();
    if (cfg.execution == ExecutionMode::layered) {
        for (std::size_t h = 0; h < layers.size(); ++h) {
            const auto t0 = Clock::now();
            parallel_for(layers[h].size(), cfg.workers, [&](std::size_t i) { run_node(layers[h][i]); });
            LayerStats layer;
            layer.height = h + 1;
            layer.merges = layers[h].size();
            layer.ms = elapsed_ms(t0);
            result.stats.layers.push_back(layer);
        }
    } else {
        // Each merge is submitted as soon as both children are done.
        std::vector<std::size_t> parent(tree.nodes().size(), tree.nodes().size());
        for (const auto& node : tree.nodes())
            if (!node.is_leaf()) parent[*node.left] = parent[*node.right] = node.id;
        std::vector<int> pending(tree.nodes().size(), 2);
        std::mutex mutex;
        std::condition_variable done;
        std::size_t remaining = tree.internal_count();
        std::exception_ptr error;
        {
            WorkerPool pool(cfg.workers);
            std::function<void(std::size_t)> submit = [&](std::size_t id) {
                pool.submit([&, id] {
                    try {
                        run_node(id);
                    } catch (...) {
                        std::lock_guard lock(mutex);
                        if (!error) error = std::current_exception();
                        remaining = 0;
                        done.notify_all();
                        return;
                    }
                    std::lock_guard lock(mutex);
                    if (error) return;
                    --remaining;
                    const std::size_t p = parent[id];
                    if (p < parent.size() && --pending[p] == 0) submit(p);
                    if (remaining == 0) done.notify_all();
                });
            };
            {
                std::lock_guard lock(mutex);
                for (std::size_t id = k; id < tree.nodes().size(); ++id) {
                    const auto& node = tree.node(id);
                    pending[id] = static_cast<int>(!tree.node(*node.left).is_leaf()) +
                                  static_cast<int>(!tree.node(*node.right).is_leaf());
                }
                for (std::size_t id = k; id < tree.nodes().size(); ++id)
                    if (pending[id] == 0) submit(id);
            }
            std::unique_lock lock(mutex);
            done.wait(lock, [&] { return remaining == 0; });
        }
        if (error) std::rethrow_exception(error);
        for (std::size_t h = 0; h < layers.size(); ++h) {
            LayerStats layer;
            layer.height = h + 1;
            layer.merges = layers[h].size();
            for (std::size_t id : layers[h]) layer.ms = std::max(layer.ms, records[id].ms);
            result.stats.layers.push_back(layer);
        }
    }

    RunStats& stats = result.stats;
    stats.rounds = layers.size();
    for (std::size_t id = k; id < tree.nodes().size(); ++id) {
        const NodeRecord& r = records[id];
        stats.nodes.push_back(r);
        stats.total_solves += r.stats.resistance_solves;
        stats.solver_iterations += r.stats.solver_iterations;
        stats.rng_draws += r.stats.rng_draws;
        stats.edges_touched += r.stats.edges_in;
        LayerStats& layer = stats.layers[r.height - 1];
        layer.edges_in += r.stats.edges_in;
        layer.edges_out += r.stats.edges_out;
        layer.solves += r.stats.resistance_solves;
    }

    result.sparsifier = state[tree.root()];
    if (cfg.keep_intermediate) result.node_sparsifiers = std::move(state);
    stats.wall_ms = elapsed_ms(start);
    return result;
}

std::string format_layer_line(const LayerStats& layer) {
    std::ostringstream out;
    out << "layer=" << layer.height << " merges=" << layer.merges << " edges_in=" << layer.edges_in
        << " edges_out=" << layer.edges_out << " solves=" << layer.solves << " ms=" << static_cast<long long>(layer.ms);
    return out.str();
}

std::string_view to_string(TreeShape shape) {
    return shape == TreeShape::balanced ? "balanced" : "sequential";
}

std::string_view to_string(PartitionStrategy strategy) {
    switch (strategy) {
    case PartitionStrategy::round_robin: return "round_robin";
    case PartitionStrategy::contiguous: return "contiguous";
    case PartitionStrategy::random: return "random";
    }
    return "round_robin";
}

std::string_view to_string(ExecutionMode mode) {
    return mode == ExecutionMode::layered ? "layered" : "async";
}

TreeShape parse_tree_shape(std::string_view text) {
    if (text == "balanced") return TreeShape::balanced;
    if (text == "sequential") return TreeShape::sequential;
    throw ValidationError("unknown tree shape '" + std::string(text) + "'");
}

PartitionStrategy parse_partition_strategy(std::string_view text) {
    if (text == "round_robin") return PartitionStrategy::round_robin;
    if (text == "contiguous") return PartitionStrategy::contiguous;
    if (text == "random") return PartitionStrategy::random;
    throw ValidationError("unknown partition strategy '" + std::string(text) + "'");
}

ExecutionMode parse_execution_mode(std::string_view text) {
    if (text == "layered") return ExecutionMode::layered;
    if (text == "async") return ExecutionMode::asynchronous;
    throw ValidationError("unknown execution mode '" + std::string(text) + "'");
}

}  // namespace disre
