#include "disre/sparsifier.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "disre/error.hpp"
#include "disre/graph_io.hpp"
#include "disre/rng.hpp"

namespace disre {

Sparsifier::Sparsifier(std::size_t n, std::uint32_t qbar, double epsilon, double gamma,
                       std::vector<SparsifierEntry> entries)
    : n_(n), qbar_(qbar), epsilon_(epsilon), gamma_(gamma), entries_(std::move(entries)) {
    detail::require(qbar_ >= 1, "sparsifier: qbar must be >= 1");
    for (const SparsifierEntry& e : entries_) {
        detail::require(e.u < n_ && e.v < n_ && e.u != e.v, "sparsifier: bad entry endpoints");
        detail::require(e.weight > 0.0 && std::isfinite(e.weight), "sparsifier: bad entry weight");
        detail::require(e.copies >= 1 && e.copies <= qbar_, "sparsifier: copies must be in [1, qbar]");
        detail::require(e.probability > 0.0 && e.probability <= 1.0, "sparsifier: probability must be in (0,1]");
    }
}

std::uint64_t Sparsifier::total_copies() const {
    std::uint64_t total = 0;
    for (const SparsifierEntry& e : entries_) total += e.copies;
    return total;
}

std::uint32_t compute_qbar(double epsilon, double delta, std::size_t n) {
    detail::require(epsilon > 0.0 && epsilon < 1.0, "qbar: epsilon must be in (0,1)");
    detail::require(delta > 0.0 && delta < 1.0, "qbar: delta must be in (0,1)");
    detail::require(n >= 2, "qbar: n must be >= 2");
    const double rho = (1.0 + 3.0 * epsilon) / (1.0 - epsilon);
    const double q = std::ceil(26.0 * rho * std::log(3.0 * static_cast<double>(n) / delta) /
                               (epsilon * epsilon));
    if (!std::isfinite(q) || q > static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
        throw ValidationError("qbar: value overflows (epsilon too close to 1?)");
    }
    return static_cast<std::uint32_t>(q);
}

Sparsifier init_sparsifier(const Graph& shard, std::uint32_t qbar, std::uint32_t origin, double epsilon,
                           double gamma) {
    std::vector<SparsifierEntry> entries;
    entries.reserve(shard.num_edges());
    for (const Edge& e : shard.edges()) entries.push_back({e.u, e.v, e.weight, qbar, 1.0, origin});
    return Sparsifier(shard.num_nodes(), qbar, epsilon, gamma, std::move(entries));
}

Sparsifier merge_entries(const Sparsifier& a, const Sparsifier& b) {
    if (a.num_nodes() != b.num_nodes()) throw ValidationError("merge: node count mismatch");
    if (a.qbar() != b.qbar()) throw ValidationError("merge: qbar mismatch");
    std::vector<SparsifierEntry> entries(a.entries().begin(), a.entries().end());
    entries.insert(entries.end(), b.entries().begin(), b.entries().end());
    return Sparsifier(a.num_nodes(), a.qbar(), a.epsilon(), a.gamma(), std::move(entries));
}

MergeResult merge_resparsify(const Sparsifier& a, const Sparsifier& b, const MergeParams& params,
                             MergeRng rng) {
    detail::require(params.epsilon >= 0.0 && params.epsilon < 1.0, "merge: epsilon must be in [0,1)");
    detail::require(params.gamma >= 0.0, "merge: gamma must be >= 0");
    const Sparsifier merged = merge_entries(a, b);
    const auto entries = merged.entries();

    MergeResult result;
    MergeStats& stats = result.stats;
    stats.edges_in = entries.size();
    stats.copies_in = merged.total_copies();

    std::vector<Edge> probes;
    probes.reserve(entries.size());
    for (const SparsifierEntry& e : entries) probes.push_back({e.u, e.v, e.weight});
    const Graph merged_graph = to_graph(merged);
    const ResistanceEstimates est =
        estimate_resistances(merged_graph, probes, params.gamma, params.epsilon, params.resistance);
    stats.resistance_solves = est.solves;
    stats.solver_iterations = est.solver_iterations;

    std::vector<SparsifierEntry> out;
    out.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        SparsifierEntry e = entries[i];
        const double p_old = e.probability;
        double p_new = std::min(est.values[i], p_old);
        if (params.halving_floor) p_new = std::max(p_new, 0.5 * p_old);
        std::uint32_t kept = e.copies;
        if (p_new < p_old) {
            const double keep = p_new / p_old;
            CounterRng stream(rng.seed, {rng.node_id, static_cast<std::uint64_t>(i)});
            kept = 0;
            for (std::uint32_t c = 0; c < e.copies; ++c)
                if (stream.uniform() < keep) ++kept;
            stats.rng_draws += e.copies;
        }
        if (kept == 0) continue;
        e.copies = kept;
        e.probability = p_new;
        out.push_back(e);
    }
    result.sparsifier =
        Sparsifier(merged.num_nodes(), merged.qbar(), params.epsilon, params.gamma, std::move(out));
    stats.edges_out = result.sparsifier.size();
    stats.copies_out = result.sparsifier.total_copies();
    return result;
}

std::vector<double> sparsifier_laplacian_apply(const Sparsifier& h, std::span<const double> x) {
    if (x.size() != h.num_nodes()) throw ValidationError("sparsifier_laplacian_apply: dimension mismatch");
    std::vector<double> y(h.num_nodes(), 0.0);
    for (const SparsifierEntry& e : h.entries()) {
        const double d = h.entry_weight(e) * (x[e.u] - x[e.v]);
        y[e.u] += d;
        y[e.v] -= d;
    }
    return y;
}

Graph to_graph(const Sparsifier& h) {
    std::vector<Edge> edges;
    edges.reserve(h.size());
    for (const SparsifierEntry& e : h.entries()) edges.push_back({e.u, e.v, h.entry_weight(e)});
    return build_graph(h.num_nodes(), edges);
}

void write_sparsifier(std::ostream& out, const Sparsifier& h) {
    out << "# sparsifier n=" << h.num_nodes() << " qbar=" << h.qbar() << " eps=" << format_double(h.epsilon())
        << " gamma=" << format_double(h.gamma()) << '\n';
    for (const SparsifierEntry& e : h.entries()) {
        out << e.u << '\t' << e.v << '\t' << format_double(e.weight) << '\t' << e.copies << '\t'
            << format_double(e.probability) << '\n';
    }
}

Sparsifier read_sparsifier(std::istream& in) {
    std::string line;
    std::size_t n = 0;
    std::uint64_t qbar = 0;
    double eps = 0.0;
    double gamma = 0.0;
    bool header = false;
    std::vector<SparsifierEntry> entries;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("sparsifier") == std::string::npos) continue;
            std::istringstream tokens(line.substr(1));
            std::string tok;
            while (tokens >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = tok.substr(0, eq);
                const std::string value = tok.substr(eq + 1);
                try {
                    if (key == "n") n = std::stoull(value);
                    else if (key == "qbar") qbar = std::stoull(value);
                    else if (key == "eps") eps = std::stod(value);
                    else if (key == "gamma") gamma = std::stod(value);
                } catch (const std::exception&) {
                    throw ValidationError("sparsifier header: bad value for '" + key + "'");
                }
            }
            header = true;
            continue;
        }
        if (!header) throw ValidationError("sparsifier file: missing '# sparsifier' header");
        std::istringstream fields(line);
        long long u = -1;
        long long v = -1;
        SparsifierEntry e;
        long long q = 0;
        if (!(fields >> u >> v >> e.weight >> q >> e.probability) || u < 0 || v < 0 || q < 0 ||
            q > 0xffffffffLL) {
            throw ValidationError("sparsifier line " + std::to_string(line_no) + ": expected 'u v a q p'");
        }
        e.u = static_cast<NodeId>(u);
        e.v = static_cast<NodeId>(v);
        e.copies = static_cast<std::uint32_t>(q);
        entries.push_back(e);
    }
    if (!header) throw ValidationError("sparsifier file: missing '# sparsifier' header");
    if (qbar == 0 || qbar > 0xffffffffULL) throw ValidationError("sparsifier header: bad qbar");
    return Sparsifier(n, static_cast<std::uint32_t>(qbar), eps, gamma, std::move(entries));
}

}  // namespace disre
