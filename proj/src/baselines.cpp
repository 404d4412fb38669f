#include "disre/baselines.hpp"

#include <algorithm>
#include <vector>

#include "disre/error.hpp"
#include "disre/rng.hpp"

namespace disre {

namespace {

std::size_t sample_cumulative(const std::vector<double>& cumulative, double u) {
    const double target = u * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace

Graph kn_sparsify(const Graph& g, std::size_t k, std::uint64_t seed) {
    detail::require(k >= 1, "kn_sparsify: k must be >= 1");
    const std::size_t n = g.num_nodes();
    const auto edges = g.edges();
    std::vector<std::vector<std::size_t>> incident(n);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        incident[edges[i].u].push_back(i);
        incident[edges[i].v].push_back(i);
    }
    // contribution[i] accumulates both endpoints' estimates of a_e.
    std::vector<double> contribution(edges.size(), 0.0);
    std::vector<double> cumulative;
    for (std::size_t x = 0; x < n; ++x) {
        const auto& inc = incident[x];
        if (inc.size() <= k) {
            for (std::size_t i : inc) contribution[i] += edges[i].weight;
            continue;
        }
        cumulative.clear();
        double degree = 0.0;
        for (std::size_t i : inc) {
            degree += edges[i].weight;
            cumulative.push_back(degree);
        }
        CounterRng rng(seed, {0x6b6eULL, x});
        const double per_draw = degree / static_cast<double>(k);
        for (std::size_t draw = 0; draw < k; ++draw) {
            contribution[inc[sample_cumulative(cumulative, rng.uniform())]] += per_draw;
        }
    }
    std::vector<Edge> out;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (contribution[i] > 0.0) out.push_back({edges[i].u, edges[i].v, 0.5 * contribution[i]});
    }
    return build_graph(n, out);
}

Graph uniform_sparsify(const Graph& g, std::size_t count, std::uint64_t seed) {
    detail::require(count >= 1, "uniform_sparsify: count must be >= 1");
    if (g.empty()) return Graph(g.num_nodes());
    const auto edges = g.edges();
    std::vector<double> cumulative;
    cumulative.reserve(edges.size());
    double total = 0.0;
    for (const Edge& e : edges) {
        total += e.weight;
        cumulative.push_back(total);
    }
    const double per_draw = total / static_cast<double>(count);
    CounterRng rng(seed, {0x756eULL});
    std::vector<Edge> out;
    out.reserve(count);
    for (std::size_t d = 0; d < count; ++d) {
        const Edge& e = edges[sample_cumulative(cumulative, rng.uniform())];
        out.push_back({e.u, e.v, per_draw});
    }
    return build_graph(g.num_nodes(), out);
}

}  // namespace disre
