#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "disre/graph.hpp"
#include "disre/sparsifier.hpp"

namespace disre {

enum class TreeShape { balanced, sequential };
enum class PartitionStrategy { round_robin, contiguous, random };
enum class ExecutionMode { layered, asynchronous };

/**
 * Full binary merge tree over k leaves. Leaves have ids 0..k-1 (shard order);
 * internal nodes k..2k-2 in creation order, the root last. Height of a leaf
 * is 0, of an internal node 1 + max(child heights).
 */
class MergeTree {
public:
    struct Node {
        std::size_t id = 0;
        std::optional<std::size_t> left;
        std::optional<std::size_t> right;
        std::size_t height = 0;
        bool is_leaf() const { return !left.has_value(); }
    };

    static MergeTree build(std::size_t k, TreeShape shape);
    /// Internal nodes given as (left, right) child id pairs, in creation order.
    static MergeTree custom(std::size_t k, const std::vector<std::pair<std::size_t, std::size_t>>& merges);

    std::size_t leaves() const { return k_; }
    std::size_t internal_count() const { return nodes_.size() - k_; }
    std::size_t root() const { return nodes_.size() - 1; }
    std::size_t depth() const { return nodes_.back().height; }
    const Node& node(std::size_t id) const { return nodes_.at(id); }
    const std::vector<Node>& nodes() const { return nodes_; }

    /// Internal node ids grouped by height, layer 1 first.
    std::vector<std::vector<std::size_t>> layers() const;
    /// Leaf ids under `id`, ascending.
    std::vector<std::size_t> descendant_leaves(std::size_t id) const;

private:
    std::size_t k_ = 0;
    std::vector<Node> nodes_;
};

/**
 * Splits E(G) into k shards. With augmentation, one BFS spanning forest of G
 * is removed from the pool before partitioning and a full copy is added to
 * every shard, so the shards sum to L_G + (k - 1) L_tree.
 */
std::vector<Graph> partition_graph(const Graph& g, std::size_t k, PartitionStrategy strategy,
                                   std::uint64_t seed = 0, bool spanning_tree_augment = false);

struct SparsifyConfig {
    double epsilon = 0.5;
    double gamma = 0.0;
    double delta = 0.1;
    std::optional<std::uint32_t> qbar;
    std::size_t shards = 4;
    TreeShape shape = TreeShape::balanced;
    PartitionStrategy partition = PartitionStrategy::round_robin;
    bool spanning_tree_augment = false;
    bool halving_floor = false;
    ExecutionMode execution = ExecutionMode::layered;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    ResistanceConfig resistance{};
    /// Keep every tree node's sparsifier in the result.
    bool keep_intermediate = false;
};

struct NodeRecord {
    std::size_t id = 0;
    std::size_t height = 0;
    MergeStats stats;
    double ms = 0.0;
};

struct LayerStats {
    std::size_t height = 0;
    std::size_t merges = 0;
    std::size_t edges_in = 0;
    std::size_t edges_out = 0;
    std::size_t solves = 0;
    double ms = 0.0;
};

struct RunStats {
    std::size_t rounds = 0;
    std::uint32_t qbar = 0;
    std::size_t total_solves = 0;
    std::size_t solver_iterations = 0;
    std::uint64_t rng_draws = 0;
    std::size_t edges_touched = 0;
    std::vector<NodeRecord> nodes;  ///< internal nodes, by id
    std::vector<LayerStats> layers;
    double wall_ms = 0.0;
};

struct DisreResult {
    Sparsifier sparsifier;
    RunStats stats;
    MergeTree tree;
    std::vector<Graph> shards;
    /// Indexed by tree node id; filled when keep_intermediate is set.
    std::vector<Sparsifier> node_sparsifiers;
};

/// Resolved qbar: the override if present, else compute_qbar(eps, delta, n).
std::uint32_t resolve_qbar(const SparsifyConfig& cfg, std::size_t n);

/**
 * Runs DiSRe: partition, initialize exact leaf sparsifiers, merge-resparsify
 * bottom-up over the tree with up to `workers` merges in flight. The root
 * entry set depends only on (graph, config without workers/execution).
 */
DisreResult run_disre(const Graph& g, const SparsifyConfig& cfg);

/// Exact union of the shards under tree node `id`.
Graph node_graph(const std::vector<Graph>& shards, const MergeTree& tree, std::size_t id);

/// `layer=<h> merges=<c> edges_in=<..> edges_out=<..> solves=<..> ms=<..>`
std::string format_layer_line(const LayerStats& layer);

std::string_view to_string(TreeShape shape);
std::string_view to_string(PartitionStrategy strategy);
std::string_view to_string(ExecutionMode mode);
TreeShape parse_tree_shape(std::string_view text);
PartitionStrategy parse_partition_strategy(std::string_view text);
ExecutionMode parse_execution_mode(std::string_view text);

}  // namespace disre
