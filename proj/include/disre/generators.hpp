#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "disre/graph.hpp"

namespace disre {

enum class GraphKind {
    path,
    cycle,
    grid2d,
    complete,
    barbell,
    random_regular,
    preferential_attachment,
};

/**
 * Generator request. Parameter meaning per kind:
 *   path/cycle/complete: {n}
 *   grid2d: {rows, cols}
 *   barbell: {clique size, bridge path length in edges}
 *   random_regular: {n, degree}
 *   preferential_attachment: {n, edges per new node (default 2)}
 */
struct GeneratorSpec {
    GraphKind kind = GraphKind::path;
    std::vector<std::size_t> params;
};

/// Parses "grid2d:20x20", "barbell:20,1", "random_regular:100,6", "path:5", ...
GeneratorSpec parse_generator_spec(std::string_view text);
std::string to_string(const GeneratorSpec& spec);
std::string_view to_string(GraphKind kind);

/// Deterministic for a fixed seed; unit weights.
Graph generate_graph(const GeneratorSpec& spec, std::uint64_t seed = 0);

Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph grid2d_graph(std::size_t rows, std::size_t cols);
Graph complete_graph(std::size_t n);
Graph barbell_graph(std::size_t clique, std::size_t bridge);
Graph random_regular_graph(std::size_t n, std::size_t degree, std::uint64_t seed);
Graph preferential_attachment_graph(std::size_t n, std::size_t attach, std::uint64_t seed);

}  // namespace disre
