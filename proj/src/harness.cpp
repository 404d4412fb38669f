#include "disre/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "disre/baselines.hpp"
#include "disre/error.hpp"
#include "disre/generators.hpp"
#include "disre/graph_io.hpp"
#include "disre/linalg.hpp"
#include "disre/parallel.hpp"
#include "disre/rng.hpp"

namespace disre {

namespace {

constexpr std::uint64_t kNoiseTag = 0x6e6f697365ULL;
constexpr std::uint64_t kLabelTag = 0x6c6162656cULL;

bool wants(const ExperimentConfig& cfg, std::string_view method) {
    return std::find(cfg.methods.begin(), cfg.methods.end(), method) != cfg.methods.end();
}

template <typename T>
std::string join(const std::vector<T>& values) {
    std::ostringstream out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ',';
        if constexpr (std::is_floating_point_v<T>) {
            out << format_double(values[i]);
        } else {
            out << values[i];
        }
    }
    return out.str();
}

/// A sparsified graph the downstream tasks run on.
struct MethodGraph {
    std::string method;
    double gamma = 0.0;
    std::uint32_t qbar = 0;
    Graph graph;
    std::uint64_t copies = 0;
};

std::vector<MethodGraph> build_methods(const ExperimentConfig& cfg, const Graph& g,
                                       const std::vector<double>& gammas, std::uint64_t seed) {
    std::vector<MethodGraph> out;
    if (wants(cfg, "exact")) out.push_back({"exact", 0.0, 0, g, g.num_edges()});
    if (wants(cfg, "disre")) {
        for (double gamma : gammas) {
            const DisreResult r = run_disre(g, sparsify_config(cfg, gamma, seed));
            out.push_back({"disre", gamma, r.stats.qbar, to_graph(r.sparsifier), r.sparsifier.total_copies()});
        }
    }
    if (wants(cfg, "kn")) {
        Graph h = kn_sparsify(g, resolve_kn_k(cfg, g), seed);
        const std::size_t m = h.num_edges();
        out.push_back({"kn", 0.0, 0, std::move(h), m});
    }
    if (wants(cfg, "uniform")) {
        const std::size_t draws = cfg.uniform_draws ? cfg.uniform_draws : (g.num_edges() + 1) / 2;
        Graph h = uniform_sparsify(g, draws, seed);
        out.push_back({"uniform", 0.0, 0, std::move(h), draws});
    }
    return out;
}

ResultRow row(std::string task, const MethodGraph& m, double lambda, std::uint64_t seed, std::string metric,
              double value) {
    return {std::move(task), m.method, m.gamma, m.qbar, lambda, seed, m.graph.num_edges(), std::move(metric), value};
}

std::vector<ResultRow> flatten(std::vector<std::vector<ResultRow>>& parts) {
    std::vector<ResultRow> out;
    for (auto& p : parts) out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    return out;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
    detail::require(cfg.epsilon > 0.0 && cfg.epsilon < 1.0, "eps must be in (0,1)");
    detail::require(cfg.delta > 0.0 && cfg.delta < 1.0, "delta must be in (0,1)");
    detail::require(cfg.shards >= 1, "k must be >= 1");
    detail::require(!cfg.gammas.empty(), "gamma grid is empty");
    detail::require(!cfg.lambdas.empty() && !cfg.ssl_lambdas.empty(), "lambda grid is empty");
    detail::require(!cfg.sigmas.empty(), "sigma grid is empty");
    detail::require(!cfg.labels.empty(), "label grid is empty");
    detail::require(!cfg.seeds.empty(), "seed list is empty");
    detail::require(!cfg.methods.empty(), "method list is empty");
    std::vector<std::uint64_t> seeds = cfg.seeds;
    std::sort(seeds.begin(), seeds.end());
    detail::require(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end(), "seeds must be distinct");
    for (double l : cfg.lambdas) detail::require(l >= 0.0, "smoothing lambdas must be >= 0");
    for (double l : cfg.ssl_lambdas) detail::require(l > 0.0, "ssl lambdas must be > 0");
    for (double s : cfg.sigmas) detail::require(s >= 0.0, "sigmas must be >= 0");
    for (double l : cfg.labels) detail::require(l > 0.0, "label counts must be > 0");
    for (const auto& m : cfg.methods) {
        detail::require(m == "exact" || m == "disre" || m == "kn" || m == "uniform", "unknown method '" + m + "'");
    }
}

Graph load_graph(const ExperimentConfig& cfg) {
    Graph g;
    if (!cfg.input.empty()) {
        g = read_edge_list(std::filesystem::path(cfg.input));
    } else if (!cfg.gen.empty()) {
        g = generate_graph(parse_generator_spec(cfg.gen), cfg.graph_seed);
    } else {
        throw ValidationError("no graph: pass --input or --gen");
    }
    if (cfg.densify) g = densify(g, cfg.densify_steps);
    return g;
}

double resolve_gamma(std::string_view text, const Graph& g) {
    std::string s(text);
    double factor = 1.0;
    bool relative = false;
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "l2") == 0) {
        relative = true;
        s.resize(s.size() - 2);
        if (!s.empty() && s.back() == '*') s.pop_back();
    }
    if (!s.empty()) {
        std::size_t used = 0;
        try {
            factor = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size()) throw ValidationError("bad gamma '" + std::string(text) + "'");
    }
    detail::require(factor >= 0.0 && std::isfinite(factor), "gamma must be finite and >= 0");
    return relative ? factor * lambda2(g) : factor;
}

std::vector<double> resolve_gammas(const ExperimentConfig& cfg, const Graph& g) {
    std::vector<double> out;
    for (const auto& text : cfg.gammas) out.push_back(resolve_gamma(text, g));
    return out;
}

SparsifyConfig sparsify_config(const ExperimentConfig& cfg, double gamma, std::uint64_t seed) {
    SparsifyConfig s;
    s.epsilon = cfg.epsilon;
    s.gamma = gamma;
    s.delta = cfg.delta;
    s.qbar = cfg.qbar;
    s.shards = cfg.shards;
    s.shape = cfg.shape;
    s.partition = cfg.partition;
    s.spanning_tree_augment = cfg.spanning_tree_augment;
    s.halving_floor = cfg.halving_floor;
    s.execution = cfg.execution;
    s.seed = seed;
    s.workers = 1;
    s.resistance.mode = cfg.resistance;
    s.resistance.jl_epsilon = cfg.jl_epsilon;
    s.resistance.sketch_seed = derive_key(seed, {0x736bULL});
    return s;
}

std::size_t resolve_kn_k(const ExperimentConfig& cfg, const Graph& g) {
    if (cfg.kn_k) return cfg.kn_k;
    const double avg = 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(std::max<std::size_t>(1, g.num_nodes()));
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(avg / 2.0)));
}

std::size_t resolve_label_count(double spec, std::size_t n) {
    detail::require(spec > 0.0, "label count must be > 0");
    std::size_t count = 0;
    if (spec < 1.0) {
        count = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(spec * static_cast<double>(n))));
    } else {
        detail::require(spec == std::floor(spec), "label counts >= 1 must be integers");
        count = static_cast<std::size_t>(spec);
    }
    detail::require(count <= n, "label count exceeds the number of nodes");
    return count;
}

LabeledSet balanced_labels(std::span<const double> signal, std::size_t count, std::uint64_t seed) {
    detail::require(count >= 1 && count <= signal.size(), "balanced_labels: bad label count");
    std::vector<NodeId> pos;
    std::vector<NodeId> neg;
    for (std::size_t i = 0; i < signal.size(); ++i) (signal[i] >= 0.0 ? pos : neg).push_back(static_cast<NodeId>(i));
    CounterRng rng(seed, {kLabelTag});
    auto shuffle = [&](std::vector<NodeId>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
    };
    shuffle(pos);
    shuffle(neg);
    std::size_t take_pos = std::min(pos.size(), (count + 1) / 2);
    std::size_t take_neg = std::min(neg.size(), count - take_pos);
    take_pos = std::min(pos.size(), count - take_neg);
    LabeledSet out;
    for (std::size_t i = 0; i < take_pos; ++i) out.indices.push_back(pos[i]);
    for (std::size_t i = 0; i < take_neg; ++i) out.indices.push_back(neg[i]);
    std::sort(out.indices.begin(), out.indices.end());
    for (NodeId i : out.indices) out.labels.push_back(signal[i] >= 0.0 ? 1.0 : -1.0);
    return out;
}

std::vector<double> target_signal(const ExperimentConfig& cfg, const Graph& g) {
    return smooth_signal(g, cfg.signal_iters, cfg.graph_seed);
}

std::vector<ResultRow> run_smoothing(const ExperimentConfig& cfg, const Graph& g) {
    validate(cfg);
    const std::vector<double> gammas = resolve_gammas(cfg, g);
    const std::vector<double> fstar = target_signal(cfg, g);
    const std::size_t n = g.num_nodes();

    std::vector<std::vector<ResultRow>> parts(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), cfg.workers, [&](std::size_t si) {
        const std::uint64_t seed = cfg.seeds[si];
        auto& rows = parts[si];
        const auto methods = build_methods(cfg, g, gammas, seed);
        rows.push_back({"smooth", "signal", 0.0, 0, 0.0, seed, g.num_edges(), "fstar_norm2", dot(fstar, fstar)});
        for (const auto& m : methods) rows.push_back(row("smooth", m, 0.0, seed, "copies", static_cast<double>(m.copies)));

        for (std::size_t k = 0; k < cfg.sigmas.size(); ++k) {
            const double sigma = cfg.sigmas[k];
            CounterRng noise(seed, {kNoiseTag, k});
            std::vector<double> y(fstar);
            for (std::size_t i = 0; i < n; ++i) y[i] += sigma * noise.normal();
            const std::string task = "smooth:sigma=" + format_double(sigma);
            for (double lambda : cfg.lambdas) {
                for (const auto& m : methods) {
                    const std::vector<double> f = lap_smooth(m.graph, lambda, y);
                    double d = 0.0;
                    for (std::size_t i = 0; i < n; ++i) d += (fstar[i] - f[i]) * (fstar[i] - f[i]);
                    rows.push_back(row(task, m, lambda, seed, "D", d));
                }
            }
        }
    });
    return flatten(parts);
}

std::vector<ResultRow> run_ssl(const ExperimentConfig& cfg, const Graph& g) {
    validate(cfg);
    const std::vector<double> gammas = resolve_gammas(cfg, g);
    const std::vector<double> fstar = target_signal(cfg, g);
    const std::size_t n = g.num_nodes();

    std::vector<std::vector<ResultRow>> parts(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), cfg.workers, [&](std::size_t si) {
        const std::uint64_t seed = cfg.seeds[si];
        auto& rows = parts[si];
        const auto methods = build_methods(cfg, g, gammas, seed);
        for (const auto& m : methods) rows.push_back(row("ssl", m, 0.0, seed, "copies", static_cast<double>(m.copies)));

        for (std::size_t k = 0; k < cfg.labels.size(); ++k) {
            const std::size_t count = resolve_label_count(cfg.labels[k], n);
            const LabeledSet labeled = balanced_labels(fstar, count, derive_key(seed, {kLabelTag, k}));
            std::vector<bool> is_labeled(n, false);
            for (NodeId i : labeled.indices) is_labeled[i] = true;
            const std::string task = "ssl:l=" + std::to_string(count);
            const std::size_t unlabeled = n - count;
            for (double lambda : cfg.ssl_lambdas) {
                for (const auto& m : methods) {
                    if (unlabeled == 0) {
                        rows.push_back(row(task, m, lambda, seed, "error", 0.0));
                        rows.push_back(row(task, m, lambda, seed, "unlabeled_empty", 1.0));
                        continue;
                    }
                    SslSolution sol;
                    try {
                        sol = stable_hfs(m.graph, lambda, labeled);
                    } catch (const SolverError&) {
                        rows.push_back(row(task, m, lambda, seed, "solver_failure", 1.0));
                        continue;
                    }
                    std::size_t wrong = 0;
                    for (std::size_t i = 0; i < n; ++i) {
                        if (is_labeled[i]) continue;
                        const bool predicted = sol.f[i] >= 0.0;
                        const bool truth = fstar[i] >= 0.0;
                        if (predicted != truth) ++wrong;
                    }
                    rows.push_back(row(task, m, lambda, seed, "error",
                                       static_cast<double>(wrong) / static_cast<double>(unlabeled)));
                    if (sol.degenerate) rows.push_back(row(task, m, lambda, seed, "degenerate", 1.0));
                }
            }
        }
    });
    return flatten(parts);
}

std::vector<ResultRow> run_bench(const ExperimentConfig& cfg, const Graph& g, std::ostream* log) {
    validate(cfg);
    const std::vector<double> gammas = resolve_gammas(cfg, g);
    std::vector<ResultRow> rows;
    for (double gamma : gammas) {
        for (std::uint64_t seed : cfg.seeds) {
            std::optional<Sparsifier> reference;
            for (unsigned w : cfg.bench_workers) {
                SparsifyConfig s = sparsify_config(cfg, gamma, seed);
                s.workers = w;
                const DisreResult r = run_disre(g, s);
                if (log) {
                    for (const auto& layer : r.stats.layers) *log << format_layer_line(layer) << '\n';
                }
                const bool same = !reference || *reference == r.sparsifier;
                if (!reference) reference = r.sparsifier;
                const std::string task = "bench:workers=" + std::to_string(w);
                const std::size_t edges = r.sparsifier.size();
                auto add = [&](std::string metric, double value) {
                    rows.push_back({task, "disre", gamma, r.stats.qbar, 0.0, seed, edges, std::move(metric), value});
                };
                add("ms", r.stats.wall_ms);
                add("rounds", static_cast<double>(r.stats.rounds));
                add("solves", static_cast<double>(r.stats.total_solves));
                add("copies", static_cast<double>(r.sparsifier.total_copies()));
                add("edges_touched", static_cast<double>(r.stats.edges_touched));
                add("identical", same ? 1.0 : 0.0);
            }
        }
    }
    return rows;
}

std::string describe(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "input=" << cfg.input << '\n'
        << "gen=" << cfg.gen << '\n'
        << "graph_seed=" << cfg.graph_seed << '\n'
        << "densify=" << (cfg.densify ? cfg.densify_steps : 0) << '\n'
        << "eps=" << format_double(cfg.epsilon) << '\n'
        << "delta=" << format_double(cfg.delta) << '\n'
        << "gamma=" << join(cfg.gammas) << '\n'
        << "qbar=" << (cfg.qbar ? std::to_string(*cfg.qbar) : std::string("auto")) << '\n'
        << "k=" << cfg.shards << '\n'
        << "shape=" << to_string(cfg.shape) << '\n'
        << "partition=" << to_string(cfg.partition) << '\n'
        << "execution=" << to_string(cfg.execution) << '\n'
        << "augment=" << (cfg.spanning_tree_augment ? 1 : 0) << '\n'
        << "halving_floor=" << (cfg.halving_floor ? 1 : 0) << '\n'
        << "resistance=" << to_string(cfg.resistance) << '\n'
        << "jl_eps=" << format_double(cfg.jl_epsilon) << '\n'
        << "lambda=" << join(cfg.lambdas) << '\n'
        << "ssl_lambda=" << join(cfg.ssl_lambdas) << '\n'
        << "sigma=" << join(cfg.sigmas) << '\n'
        << "labels=" << join(cfg.labels) << '\n'
        << "seeds=" << join(cfg.seeds) << '\n'
        << "methods=" << join(cfg.methods) << '\n'
        << "kn_k=" << cfg.kn_k << '\n'
        << "uniform_draws=" << cfg.uniform_draws << '\n'
        << "signal_iters=" << cfg.signal_iters << '\n'
        << "bench_workers=" << join(cfg.bench_workers) << '\n'
        << "workers=" << cfg.workers << '\n';
    return out.str();
}

std::string format_csv(const ExperimentConfig& cfg, std::string_view task, const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    out << "# disre " << version_string() << '\n' << "# task=" << task << '\n';
    std::istringstream lines(describe(cfg));
    std::string line;
    while (std::getline(lines, line)) out << "# " << line << '\n';
    out << "task,method,gamma,qbar,lambda,seed,edges,metric,value\n";
    for (const ResultRow& r : rows) {
        out << r.task << ',' << r.method << ',' << format_double(r.gamma) << ',' << r.qbar << ','
            << format_double(r.lambda) << ',' << r.seed << ',' << r.edges << ',' << r.metric << ','
            << format_double(r.value) << '\n';
    }
    return out.str();
}

std::vector<CellMean> cell_means(const std::vector<ResultRow>& rows, std::string_view metric) {
    std::vector<CellMean> cells;
    std::map<std::tuple<std::string, std::string, double, double>, std::size_t> index;
    for (const ResultRow& r : rows) {
        if (r.metric != metric) continue;
        const auto key = std::make_tuple(r.task, r.method, r.gamma, r.lambda);
        auto [it, inserted] = index.try_emplace(key, cells.size());
        if (inserted) cells.push_back({r.task, r.method, r.gamma, r.lambda, 0.0, 0});
        CellMean& c = cells[it->second];
        c.mean += r.value;
        ++c.count;
    }
    for (CellMean& c : cells) c.mean /= static_cast<double>(c.count);
    return cells;
}

std::optional<CellMean> best_cell(const std::vector<CellMean>& cells, std::string_view task, std::string_view method,
                                  double gamma) {
    std::optional<CellMean> best;
    for (const CellMean& c : cells) {
        if (c.task != task || c.method != method || c.gamma != gamma) continue;
        if (!best || c.mean < best->mean) best = c;
    }
    return best;
}

std::string_view version_string() { return DISRE_VERSION; }

}  // namespace disre
