#include "disre/generators.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <utility>

#include "disre/error.hpp"
#include "disre/rng.hpp"

namespace disre {

namespace {

constexpr std::pair<GraphKind, std::string_view> kKindNames[] = {
    {GraphKind::path, "path"},
    {GraphKind::cycle, "cycle"},
    {GraphKind::grid2d, "grid2d"},
    {GraphKind::complete, "complete"},
    {GraphKind::barbell, "barbell"},
    {GraphKind::random_regular, "random_regular"},
    {GraphKind::preferential_attachment, "preferential_attachment"},
};

std::size_t param(const GeneratorSpec& spec, std::size_t i, std::size_t fallback) {
    return i < spec.params.size() ? spec.params[i] : fallback;
}

void require_params(const GeneratorSpec& spec, std::size_t min_count) {
    if (spec.params.size() < min_count) {
        throw ValidationError(std::string(to_string(spec.kind)) + " needs " +
                              std::to_string(min_count) + " parameter(s)");
    }
}

}  // namespace

std::string_view to_string(GraphKind kind) {
    for (auto [k, name] : kKindNames)
        if (k == kind) return name;
    return "unknown";
}

GeneratorSpec parse_generator_spec(std::string_view text) {
    GeneratorSpec spec;
    const auto colon = text.find(':');
    const std::string_view name = text.substr(0, colon);
    bool found = false;
    for (auto [k, kname] : kKindNames) {
        if (kname == name) {
            spec.kind = k;
            found = true;
        }
    }
    if (!found) throw ValidationError("unknown graph kind '" + std::string(name) + "'");
    if (colon == std::string_view::npos) return spec;

    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
        if (ec != std::errc{} || ptr == rest.data()) {
            throw ValidationError("bad generator parameters in '" + std::string(text) + "'");
        }
        spec.params.push_back(value);
        rest.remove_prefix(static_cast<std::size_t>(ptr - rest.data()));
        if (!rest.empty()) {
            if (rest.front() != ',' && rest.front() != 'x') {
                throw ValidationError("bad separator in '" + std::string(text) + "'");
            }
            rest.remove_prefix(1);
        }
    }
    return spec;
}

std::string to_string(const GeneratorSpec& spec) {
    std::string out(to_string(spec.kind));
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
        out += i == 0 ? ":" : (spec.kind == GraphKind::grid2d ? "x" : ",");
        out += std::to_string(spec.params[i]);
    }
    return out;
}

Graph path_graph(std::size_t n) {
    detail::require(n >= 1, "path: n must be >= 1");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < n; ++i)
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1), 1.0});
    return build_graph(n, edges);
}

Graph cycle_graph(std::size_t n) {
    detail::require(n >= 3, "cycle: n must be >= 3");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n), 1.0});
    return build_graph(n, edges);
}

Graph grid2d_graph(std::size_t rows, std::size_t cols) {
    detail::require(rows >= 1 && cols >= 1, "grid2d: dimensions must be >= 1");
    std::vector<Edge> edges;
    auto id = [cols](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * cols + c); };
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), 1.0});
            if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), 1.0});
        }
    }
    return build_graph(rows * cols, edges);
}

Graph complete_graph(std::size_t n) {
    detail::require(n >= 1, "complete: n must be >= 1");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 1.0});
    return build_graph(n, edges);
}

Graph barbell_graph(std::size_t clique, std::size_t bridge) {
    detail::require(clique >= 2, "barbell: clique size must be >= 2");
    detail::require(bridge >= 1, "barbell: bridge length must be >= 1");
    // Left clique 0..c-1, path interior c..c+bridge-2, right clique after.
    const std::size_t n = 2 * clique + bridge - 1;
    const std::size_t right = clique + bridge - 1;
    std::vector<Edge> edges;
    for (std::size_t base : {std::size_t{0}, right})
        for (std::size_t i = 0; i < clique; ++i)
            for (std::size_t j = i + 1; j < clique; ++j)
                edges.push_back({static_cast<NodeId>(base + i), static_cast<NodeId>(base + j), 1.0});
    NodeId prev = static_cast<NodeId>(clique - 1);
    for (std::size_t s = 0; s + 1 < bridge; ++s) {
        const auto next = static_cast<NodeId>(clique + s);
        edges.push_back({prev, next, 1.0});
        prev = next;
    }
    edges.push_back({prev, static_cast<NodeId>(right), 1.0});
    return build_graph(n, edges);
}

Graph random_regular_graph(std::size_t n, std::size_t degree, std::uint64_t seed) {
    detail::require(degree >= 1 && degree < n, "random_regular: need 1 <= d < n");
    detail::require((n * degree) % 2 == 0, "random_regular: n*d must be even");
    // Pairing model: match random stub pairs, redrawing only the offending pair
    // on a self-loop or repeated edge, and restarting when no valid pair is left.
    constexpr int kMaxAttempts = 1000;
    constexpr int kPairTries = 200;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        CounterRng rng(seed, {0x7265677572ULL, static_cast<std::uint64_t>(attempt)});
        std::vector<NodeId> stubs;
        stubs.reserve(n * degree);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < degree; ++j) stubs.push_back(static_cast<NodeId>(i));

        std::set<std::pair<NodeId, NodeId>> seen;
        std::vector<Edge> edges;
        bool ok = true;
        while (!stubs.empty() && ok) {
            ok = false;
            for (int t = 0; t < kPairTries; ++t) {
                const std::size_t i = rng.below(stubs.size());
                const std::size_t j = rng.below(stubs.size());
                NodeId a = stubs[i];
                NodeId b = stubs[j];
                if (i == j || a == b) continue;
                if (a > b) std::swap(a, b);
                if (seen.count({a, b})) continue;
                seen.insert({a, b});
                edges.push_back({a, b, 1.0});
                const std::size_t hi = std::max(i, j);
                const std::size_t lo = std::min(i, j);
                std::swap(stubs[hi], stubs.back());
                stubs.pop_back();
                std::swap(stubs[lo], stubs.back());
                stubs.pop_back();
                ok = true;
                break;
            }
        }
        if (ok) return build_graph(n, edges);
    }
    throw ValidationError("random_regular: failed to sample a simple graph");
}

Graph preferential_attachment_graph(std::size_t n, std::size_t attach, std::uint64_t seed) {
    detail::require(attach >= 1, "preferential_attachment: attach must be >= 1");
    detail::require(n > attach, "preferential_attachment: need n > attach");
    CounterRng rng(seed, {0x7061ULL});
    std::vector<Edge> edges;
    // Endpoint multiset; sampling uniformly from it is sampling proportional to degree.
    std::vector<NodeId> endpoints;
    const std::size_t seed_nodes = attach + 1;
    for (std::size_t i = 0; i < seed_nodes; ++i) {
        for (std::size_t j = i + 1; j < seed_nodes; ++j) {
            edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 1.0});
            endpoints.push_back(static_cast<NodeId>(i));
            endpoints.push_back(static_cast<NodeId>(j));
        }
    }
    for (std::size_t v = seed_nodes; v < n; ++v) {
        std::vector<NodeId> targets;
        while (targets.size() < attach) {
            const NodeId t = endpoints[rng.below(endpoints.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
        }
        for (NodeId t : targets) {
            edges.push_back({t, static_cast<NodeId>(v), 1.0});
            endpoints.push_back(t);
            endpoints.push_back(static_cast<NodeId>(v));
        }
    }
    return build_graph(n, edges);
}

Graph generate_graph(const GeneratorSpec& spec, std::uint64_t seed) {
    switch (spec.kind) {
        case GraphKind::path:
            require_params(spec, 1);
            return path_graph(spec.params[0]);
        case GraphKind::cycle:
            require_params(spec, 1);
            return cycle_graph(spec.params[0]);
        case GraphKind::grid2d:
            require_params(spec, 1);
            return grid2d_graph(spec.params[0], param(spec, 1, spec.params[0]));
        case GraphKind::complete:
            require_params(spec, 1);
            return complete_graph(spec.params[0]);
        case GraphKind::barbell:
            require_params(spec, 1);
            return barbell_graph(spec.params[0], param(spec, 1, 1));
        case GraphKind::random_regular:
            require_params(spec, 2);
            return random_regular_graph(spec.params[0], spec.params[1], seed);
        case GraphKind::preferential_attachment:
            require_params(spec, 1);
            return preferential_attachment_graph(spec.params[0], param(spec, 1, 2), seed);
    }
    throw ValidationError("unknown graph kind");
}

}  // namespace disre
