#pragma once

#include <cstddef>
#include <cstdint>

#include "disre/graph.hpp"

namespace disre {

/**
 * k-neighbors heuristic. A node of degree <= k keeps all its edges; a
 * higher-degree node draws k incident edges with replacement, proportional
 * to weight, each draw carrying weight d_w(node) / k. An edge survives if
 * either endpoint keeps it; its weight is the mean of the two endpoint
 * contributions, so E[output weight] = a_e.
 */
Graph kn_sparsify(const Graph& g, std::size_t k, std::uint64_t seed);

/// `count` i.i.d. edge draws proportional to weight, each adding A / count.
Graph uniform_sparsify(const Graph& g, std::size_t count, std::uint64_t seed);

}  // namespace disre
