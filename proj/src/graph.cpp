#include "disre/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "disre/error.hpp"

namespace disre {

EdgeVector EdgeVector::of(const Edge& e) { return {e.u, e.v, std::sqrt(e.weight)}; }

Graph build_graph(std::size_t n, std::span<const Edge> raw_edges, BuildOptions options) {
    detail::require(n <= std::size_t{0xffffffffu}, "node count exceeds 32-bit range");
    std::vector<Edge> edges;
    edges.reserve(raw_edges.size());
    for (const Edge& e : raw_edges) {
        if (e.u >= n || e.v >= n) {
            throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                  ") has endpoint >= n=" + std::to_string(n));
        }
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                  ") has non-positive or non-finite weight");
        }
        if (e.u == e.v) {
            if (options.drop_self_loops) continue;
            throw ValidationError("self-loop at node " + std::to_string(e.u));
        }
        edges.push_back(e.u < e.v ? e : Edge{e.v, e.u, e.weight});
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    std::size_t out = 0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (out > 0 && edges[out - 1].u == edges[i].u && edges[out - 1].v == edges[i].v) {
            edges[out - 1].weight += edges[i].weight;
        } else {
            edges[out++] = edges[i];
        }
    }
    edges.resize(out);

    Graph g;
    g.n_ = n;
    g.edges_ = std::move(edges);
    return g;
}

double Graph::total_weight() const {
    double total = 0.0;
    for (const Edge& e : edges_) total += e.weight;
    return total;
}

std::vector<std::size_t> Graph::degrees() const {
    std::vector<std::size_t> deg(n_, 0);
    for (const Edge& e : edges_) {
        ++deg[e.u];
        ++deg[e.v];
    }
    return deg;
}

std::vector<double> Graph::weighted_degrees() const {
    std::vector<double> deg(n_, 0.0);
    for (const Edge& e : edges_) {
        deg[e.u] += e.weight;
        deg[e.v] += e.weight;
    }
    return deg;
}

void laplacian_apply(const Graph& g, std::span<const double> x, std::span<double> y) {
    if (x.size() != g.num_nodes() || y.size() != g.num_nodes()) {
        throw ValidationError("laplacian_apply: dimension mismatch");
    }
    std::fill(y.begin(), y.end(), 0.0);
    for (const Edge& e : g.edges()) {
        const double d = e.weight * (x[e.u] - x[e.v]);
        y[e.u] += d;
        y[e.v] -= d;
    }
}

std::vector<double> laplacian_apply(const Graph& g, std::span<const double> x) {
    std::vector<double> y(g.num_nodes());
    laplacian_apply(g, x, y);
    return y;
}

double laplacian_quadratic(const Graph& g, std::span<const double> x) {
    if (x.size() != g.num_nodes()) throw ValidationError("laplacian_quadratic: dimension mismatch");
    double total = 0.0;
    for (const Edge& e : g.edges()) {
        const double d = x[e.u] - x[e.v];
        total += e.weight * d * d;
    }
    return total;
}

Graph add_graphs(const Graph& a, const Graph& b) {
    if (a.num_nodes() != b.num_nodes()) throw ValidationError("add_graphs: node count mismatch");
    std::vector<Edge> all(a.edges().begin(), a.edges().end());
    all.insert(all.end(), b.edges().begin(), b.edges().end());
    return build_graph(a.num_nodes(), all);
}

Graph scale_weights(const Graph& g, double factor) {
    detail::require(factor > 0.0 && std::isfinite(factor), "scale_weights: factor must be positive");
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    for (Edge& e : edges) e.weight *= factor;
    return build_graph(g.num_nodes(), edges);
}

namespace {

struct DisjointSets {
    std::vector<std::uint32_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

std::vector<std::vector<std::pair<NodeId, double>>> adjacency(const Graph& g) {
    std::vector<std::vector<std::pair<NodeId, double>>> adj(g.num_nodes());
    for (const Edge& e : g.edges()) {
        adj[e.u].emplace_back(e.v, e.weight);
        adj[e.v].emplace_back(e.u, e.weight);
    }
    return adj;
}

}  // namespace

Components connected_components(const Graph& g) {
    DisjointSets sets(g.num_nodes());
    for (const Edge& e : g.edges()) sets.unite(e.u, e.v);
    Components c;
    c.label.assign(g.num_nodes(), 0);
    std::vector<std::uint32_t> remap(g.num_nodes(), 0xffffffffu);
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        const std::uint32_t root = sets.find(static_cast<std::uint32_t>(i));
        if (remap[root] == 0xffffffffu) remap[root] = static_cast<std::uint32_t>(c.count++);
        c.label[i] = remap[root];
    }
    return c;
}

bool connected(const Graph& g) { return connected_components(g).count <= 1; }

Graph bfs_spanning_forest(const Graph& g) {
    const auto adj = adjacency(g);
    std::vector<bool> seen(g.num_nodes(), false);
    std::vector<Edge> tree;
    std::queue<NodeId> frontier;
    for (std::size_t s = 0; s < g.num_nodes(); ++s) {
        if (seen[s]) continue;
        seen[s] = true;
        frontier.push(static_cast<NodeId>(s));
        while (!frontier.empty()) {
            const NodeId u = frontier.front();
            frontier.pop();
            for (auto [v, w] : adj[u]) {
                if (seen[v]) continue;
                seen[v] = true;
                tree.push_back({u, v, w});
                frontier.push(v);
            }
        }
    }
    return build_graph(g.num_nodes(), tree);
}

Graph densify(const Graph& g, int steps) {
    detail::require(steps >= 1, "densify: steps must be >= 1");
    const std::size_t n = g.num_nodes();
    // With positive weights, (sum_s A^s)_{ij} > 0 iff dist(i, j) <= steps.
    const auto adj = adjacency(g);
    std::vector<Edge> out;
    std::vector<int> dist(n, -1);
    std::vector<NodeId> touched;
    for (std::size_t s = 0; s < n; ++s) {
        touched.clear();
        std::vector<NodeId> frontier{static_cast<NodeId>(s)};
        dist[s] = 0;
        touched.push_back(static_cast<NodeId>(s));
        for (int hop = 1; hop <= steps && !frontier.empty(); ++hop) {
            std::vector<NodeId> next;
            for (NodeId u : frontier) {
                for (auto [v, w] : adj[u]) {
                    if (dist[v] >= 0) continue;
                    dist[v] = hop;
                    touched.push_back(v);
                    next.push_back(v);
                }
            }
            frontier = std::move(next);
        }
        for (NodeId v : touched) {
            if (v > s) out.push_back({static_cast<NodeId>(s), v, 1.0});
            dist[v] = -1;
        }
    }
    return build_graph(n, out);
}

}  // namespace disre
