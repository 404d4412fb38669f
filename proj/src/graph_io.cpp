#include "disre/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include <unistd.h>

#include "disre/error.hpp"

namespace disre {

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

namespace {

bool parse_header_nodes(const std::string& line, std::size_t& nodes) {
    const auto pos = line.find("nodes=");
    if (pos == std::string::npos) return false;
    std::istringstream rest(line.substr(pos + 6));
    return static_cast<bool>(rest >> nodes);
}

}  // namespace

Graph read_edge_list(std::istream& in, BuildOptions options) {
    std::vector<Edge> edges;
    std::size_t declared_nodes = 0;
    bool have_declared = false;
    std::size_t max_index = 0;
    bool any_edge = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            std::size_t nodes = 0;
            if (parse_header_nodes(line, nodes)) {
                declared_nodes = nodes;
                have_declared = true;
            }
            continue;
        }
        std::istringstream fields(line);
        long long u = -1;
        long long v = -1;
        if (!(fields >> u >> v) || u < 0 || v < 0) {
            throw ValidationError("edge list line " + std::to_string(line_no) + ": expected 'u v [w]'");
        }
        double w = 1.0;
        std::string extra;
        if (fields >> extra) {
            try {
                std::size_t used = 0;
                w = std::stod(extra, &used);
                if (used != extra.size()) throw std::invalid_argument(extra);
            } catch (const std::exception&) {
                throw ValidationError("edge list line " + std::to_string(line_no) + ": bad weight '" +
                                      extra + "'");
            }
        }
        if (u > 0xffffffffLL || v > 0xffffffffLL) {
            throw ValidationError("edge list line " + std::to_string(line_no) + ": node index too large");
        }
        edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), w});
        max_index = std::max<std::size_t>(max_index, static_cast<std::size_t>(std::max(u, v)));
        any_edge = true;
    }
    const std::size_t n = have_declared ? declared_nodes : (any_edge ? max_index + 1 : 0);
    return build_graph(n, edges, options);
}

Graph read_edge_list(const std::filesystem::path& path, BuildOptions options) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open edge list '" + path.string() + "'");
    return read_edge_list(in, options);
}

void write_edge_list(std::ostream& out, const Graph& g) {
    out << "# nodes=" << g.num_nodes() << '\n';
    for (const Edge& e : g.edges()) {
        out << e.u << '\t' << e.v << '\t' << format_double(e.weight) << '\n';
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
        out << contents;
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace disre
