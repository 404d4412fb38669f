#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace disre {

using NodeId = std::uint32_t;

/// Undirected weighted edge. Canonical edges have u < v.
struct Edge {
    NodeId u = 0;
    NodeId v = 0;
    double weight = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// b_e = sqrt(a_e) (chi_u - chi_v).
struct EdgeVector {
    NodeId u = 0;
    NodeId v = 0;
    double scale = 1.0;

    static EdgeVector of(const Edge& e);
    double dot(std::span<const double> x) const { return scale * (x[u] - x[v]); }
    double norm_squared() const { return 2.0 * scale * scale; }
};

struct BuildOptions {
    bool drop_self_loops = false;
};

/**
 * Immutable weighted undirected graph stored as a canonical edge list:
 * u < v, sorted lexicographically, parallel edges coalesced by summing weights.
 */
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n) : n_(n) {}

    std::size_t num_nodes() const noexcept { return n_; }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    std::span<const Edge> edges() const noexcept { return edges_; }
    const Edge& edge(std::size_t i) const { return edges_[i]; }
    bool empty() const noexcept { return edges_.empty(); }

    double total_weight() const;
    std::vector<std::size_t> degrees() const;
    std::vector<double> weighted_degrees() const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    friend Graph build_graph(std::size_t, std::span<const Edge>, BuildOptions);

    std::size_t n_ = 0;
    std::vector<Edge> edges_;
};

/// Validates and canonicalizes a raw edge list. Throws ValidationError.
Graph build_graph(std::size_t n, std::span<const Edge> raw_edges, BuildOptions options = {});

/// y = L_G x.
std::vector<double> laplacian_apply(const Graph& g, std::span<const double> x);
void laplacian_apply(const Graph& g, std::span<const double> x, std::span<double> y);

/// x^T L_G x = sum_e a_e (x_u - x_v)^2.
double laplacian_quadratic(const Graph& g, std::span<const double> x);

/// Edge-wise weight sum; L_{G1+G2} = L_{G1} + L_{G2}.
Graph add_graphs(const Graph& a, const Graph& b);

/// Scales every weight by `factor` > 0.
Graph scale_weights(const Graph& g, double factor);

bool connected(const Graph& g);

/// Connected-component label per node, labels dense in [0, count).
struct Components {
    std::vector<std::uint32_t> label;
    std::size_t count = 0;
};
Components connected_components(const Graph& g);

/// Breadth-first spanning forest, one tree per component.
Graph bfs_spanning_forest(const Graph& g);

/// Sum_{s=1}^k A^s with the diagonal zeroed, then binarized to unit weights.
Graph densify(const Graph& g, int steps);

}  // namespace disre
