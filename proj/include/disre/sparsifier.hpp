#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "disre/graph.hpp"
#include "disre/resistance.hpp"

namespace disre {

/// One sampled edge: `copies` of b_e b_e^T, each weighted 1 / (qbar * probability).
struct SparsifierEntry {
    NodeId u = 0;
    NodeId v = 0;
    double weight = 1.0;  ///< a_e of the original edge
    std::uint32_t copies = 0;
    double probability = 1.0;
    std::uint32_t origin = 0;  ///< shard the edge came from

    friend bool operator==(const SparsifierEntry&, const SparsifierEntry&) = default;
};

/**
 * Sparsifier H = {(e, q_e, p_e)} with Laplacian
 *   L_H = sum_e q_e / (qbar p_e) b_e b_e^T.
 *
 * Entries with zero copies are never stored. Entries from different shards
 * stay separate even when they describe the same node pair.
 */
class Sparsifier {
public:
    Sparsifier() = default;
    Sparsifier(std::size_t n, std::uint32_t qbar, double epsilon, double gamma,
               std::vector<SparsifierEntry> entries);

    std::size_t num_nodes() const noexcept { return n_; }
    std::uint32_t qbar() const noexcept { return qbar_; }
    double epsilon() const noexcept { return epsilon_; }
    double gamma() const noexcept { return gamma_; }
    std::span<const SparsifierEntry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    /// Sum of q_e; the size measure bounded by 3 qbar d_eff.
    std::uint64_t total_copies() const;
    double entry_weight(const SparsifierEntry& e) const {
        return e.weight * static_cast<double>(e.copies) / (static_cast<double>(qbar_) * e.probability);
    }

    friend bool operator==(const Sparsifier&, const Sparsifier&) = default;

private:
    std::size_t n_ = 0;
    std::uint32_t qbar_ = 1;
    double epsilon_ = 0.0;
    double gamma_ = 0.0;
    std::vector<SparsifierEntry> entries_;
};

/// ceil(26 rho ln(3n / delta) / eps^2) with rho = (1 + 3 eps) / (1 - eps).
std::uint32_t compute_qbar(double epsilon, double delta, std::size_t n);

/// Exact starting sparsifier: every shard edge with q = qbar and p = 1.
Sparsifier init_sparsifier(const Graph& shard, std::uint32_t qbar, std::uint32_t origin = 0,
                           double epsilon = 0.0, double gamma = 0.0);

struct MergeParams {
    double gamma = 0.0;
    double epsilon = 0.5;
    /// Use p_new = max(min(r, p_old), p_old / 2) instead of min(r, p_old).
    bool halving_floor = false;
    ResistanceConfig resistance{};
};

/// Key for the per-entry random streams of one merge.
struct MergeRng {
    std::uint64_t seed = 0;
    std::uint64_t node_id = 0;
};

struct MergeStats {
    std::size_t edges_in = 0;
    std::size_t edges_out = 0;
    std::uint64_t copies_in = 0;
    std::uint64_t copies_out = 0;
    std::size_t resistance_solves = 0;
    std::size_t solver_iterations = 0;
    std::uint64_t rng_draws = 0;
};

struct MergeResult {
    Sparsifier sparsifier;
    MergeStats stats;
};

/**
 * Merge two sparsifiers and resparsify the union: re-estimate ridge
 * resistances on the merged graph, lower each probability to
 * min(r~, p_old), and thin copies by Binomial(q_old, p_new / p_old).
 * Entry i of the union draws from the stream (seed, node_id, i).
 */
MergeResult merge_resparsify(const Sparsifier& a, const Sparsifier& b, const MergeParams& params,
                             MergeRng rng);

/// Entry-wise union without resampling.
Sparsifier merge_entries(const Sparsifier& a, const Sparsifier& b);

std::vector<double> sparsifier_laplacian_apply(const Sparsifier& h, std::span<const double> x);

/// Weighted graph with weight a q / (qbar p), duplicate pairs summed.
Graph to_graph(const Sparsifier& h);

/// `# sparsifier n=<n> qbar=<q> eps=<e> gamma=<g>` then `u v a q p` per line.
void write_sparsifier(std::ostream& out, const Sparsifier& h);
Sparsifier read_sparsifier(std::istream& in);

}  // namespace disre
