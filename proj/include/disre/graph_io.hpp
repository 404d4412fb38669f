#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "disre/graph.hpp"

namespace disre {

/**
 * Edge-list text format: one edge per line, `u<TAB>v<TAB>w` (any whitespace
 * accepted when reading), weight optional (default 1.0). Lines starting with
 * `#` are comments; a `# nodes=N` comment fixes the node count, otherwise it
 * is 1 + max index.
 */
Graph read_edge_list(std::istream& in, BuildOptions options = {});
Graph read_edge_list(const std::filesystem::path& path, BuildOptions options = {});
void write_edge_list(std::ostream& out, const Graph& g);

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Shortest decimal form that round-trips a double exactly.
std::string format_double(double value);

}  // namespace disre
