#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "disre/error.hpp"
#include "disre/graph_io.hpp"
#include "disre/harness.hpp"
#include "disre/scheduler.hpp"
#include "disre/sparsifier.hpp"
#include "disre/verify.hpp"

namespace {

using namespace disre;

void emit(const std::string& out_path, const std::string& contents) {
    if (out_path.empty() || out_path == "-") {
        std::cout << contents;
    } else {
        write_file_atomic(out_path, contents);
    }
}

std::string stats_json(const ExperimentConfig& cfg, const DisreResult& r, double gamma, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["version"] = std::string(version_string());
    j["seed"] = seed;
    j["gamma"] = gamma;
    j["qbar"] = r.stats.qbar;
    j["k"] = cfg.shards;
    j["rounds"] = r.stats.rounds;
    j["entries"] = r.sparsifier.size();
    j["copies"] = r.sparsifier.total_copies();
    j["total_solves"] = r.stats.total_solves;
    j["solver_iterations"] = r.stats.solver_iterations;
    j["rng_draws"] = r.stats.rng_draws;
    j["edges_touched"] = r.stats.edges_touched;
    j["wall_ms"] = r.stats.wall_ms;
    auto& layers = j["layers"] = nlohmann::ordered_json::array();
    for (const auto& l : r.stats.layers) {
        layers.push_back({{"layer", l.height},
                          {"merges", l.merges},
                          {"edges_in", l.edges_in},
                          {"edges_out", l.edges_out},
                          {"solves", l.solves},
                          {"ms", l.ms}});
    }
    auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : r.stats.nodes) {
        nodes.push_back({{"id", n.id},
                         {"height", n.height},
                         {"edges_in", n.stats.edges_in},
                         {"edges_out", n.stats.edges_out},
                         {"copies_in", n.stats.copies_in},
                         {"copies_out", n.stats.copies_out},
                         {"solves", n.stats.resistance_solves},
                         {"rng_draws", n.stats.rng_draws},
                         {"ms", n.ms}});
    }
    std::istringstream lines(describe(cfg));
    std::string line;
    auto& config = j["config"] = nlohmann::ordered_json::object();
    while (std::getline(lines, line)) {
        const auto eq = line.find('=');
        config[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed ridge-resistance spectral sparsification and Laplacian learning"};
    app.set_version_flag("--version", std::string(version_string()));
    app.set_config("--config", "", "key=value file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    ExperimentConfig cfg;
    std::string shape = "balanced";
    std::string partition = "round_robin";
    std::string execution = "layered";
    std::string resistance = "auto";
    std::uint32_t qbar = 0;
    int densify_steps = 0;
    std::string out;
    std::string stats_path;
    std::string sparsifier_path;
    bool quiet = false;

    app.add_option("--input", cfg.input, "edge-list file (u v [w] per line)");
    app.add_option("--gen", cfg.gen, "generator spec, e.g. grid2d:20x20, barbell:20,1, random_regular:100,6");
    app.add_option("--graph-seed", cfg.graph_seed, "seed for random generators and the target signal");
    app.add_option("--densify", densify_steps, "replace the graph by its s-step neighborhood graph");
    app.add_option("--eps", cfg.epsilon, "sparsifier accuracy");
    app.add_option("--delta", cfg.delta, "failure probability used for qbar");
    app.add_option("--gamma", cfg.gammas, "ridge values; 'l2' suffix scales lambda2, e.g. 0,l2,10l2")->delimiter(',');
    app.add_option("--qbar", qbar, "override the copy budget");
    app.add_option("--k", cfg.shards, "number of shards");
    app.add_option("--shape", shape, "merge tree shape")->check(CLI::IsMember({"balanced", "sequential"}));
    app.add_option("--partition", partition, "edge partition")
        ->check(CLI::IsMember({"round_robin", "contiguous", "random"}));
    app.add_option("--execution", execution, "merge scheduling")->check(CLI::IsMember({"layered", "async"}));
    app.add_flag("--augment", cfg.spanning_tree_augment, "add a BFS spanning tree to every shard");
    app.add_flag("--halving-floor", cfg.halving_floor, "never lower a probability by more than half per merge");
    app.add_option("--resistance", resistance, "resistance estimator")
        ->check(CLI::IsMember({"auto", "exact", "dense", "sketch"}));
    app.add_option("--jl-eps", cfg.jl_epsilon, "sketch distortion");
    app.add_option("--lambda", cfg.lambdas, "smoothing regularization grid")->delimiter(',');
    app.add_option("--ssl-lambda", cfg.ssl_lambdas, "SSL regularization grid")->delimiter(',');
    app.add_option("--sigma", cfg.sigmas, "noise levels")->delimiter(',');
    app.add_option("--labels", cfg.labels, "label counts (values < 1 are fractions of n)")->delimiter(',');
    app.add_option("--seed", cfg.seeds, "seeds (first one used by sparsify)")->delimiter(',');
    app.add_option("--methods", cfg.methods, "subset of exact,disre,kn,uniform")->delimiter(',');
    app.add_option("--kn-k", cfg.kn_k, "kN degree cap (0 = half the average degree)");
    app.add_option("--uniform-draws", cfg.uniform_draws, "uniform baseline draws (0 = m/2)");
    app.add_option("--signal-iters", cfg.signal_iters, "power iterations for the target signal");
    app.add_option("--workers", cfg.workers, "worker threads");
    app.add_option("--bench-workers", cfg.bench_workers, "worker counts compared by bench")->delimiter(',');
    app.add_option("--out", out, "output file (default stdout)");
    app.add_flag("--quiet", quiet, "suppress per-layer log lines");

    auto* sparsify = app.add_subcommand("sparsify", "build a sparsifier and write it with run statistics");
    sparsify->add_option("--stats", stats_path, "statistics JSON (default <out>.stats.json)");
    auto* smooth = app.add_subcommand("smooth", "Laplacian smoothing experiment, CSV output");
    auto* ssl = app.add_subcommand("ssl", "semi-supervised learning experiment, CSV output");
    auto* verify = app.add_subcommand("verify", "check a sparsifier file against its graph, JSON output");
    verify->add_option("--sparsifier", sparsifier_path, "sparsifier file")->required();
    auto* gen = app.add_subcommand("gen", "write a generated graph as an edge list");
    auto* bench = app.add_subcommand("bench", "time DiSRe over worker counts, CSV output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        cfg.shape = parse_tree_shape(shape);
        cfg.partition = parse_partition_strategy(partition);
        cfg.execution = parse_execution_mode(execution);
        cfg.resistance = parse_resistance_mode(resistance);
        if (qbar) cfg.qbar = qbar;
        if (densify_steps > 0) {
            cfg.densify = true;
            cfg.densify_steps = densify_steps;
        }
        validate(cfg);
        const Graph g = load_graph(cfg);

        if (gen->parsed()) {
            std::ostringstream s;
            write_edge_list(s, g);
            emit(out, s.str());
        } else if (sparsify->parsed()) {
            const double gamma = resolve_gamma(cfg.gammas.front(), g);
            const std::uint64_t seed = cfg.seeds.front();
            SparsifyConfig s = sparsify_config(cfg, gamma, seed);
            s.workers = cfg.workers;
            const DisreResult r = run_disre(g, s);
            if (!quiet) {
                for (const auto& layer : r.stats.layers) std::cerr << format_layer_line(layer) << '\n';
            }
            std::ostringstream text;
            write_sparsifier(text, r.sparsifier);
            emit(out, text.str());
            const std::string json = stats_json(cfg, r, gamma, seed);
            if (!stats_path.empty()) {
                write_file_atomic(stats_path, json);
            } else if (!out.empty() && out != "-") {
                write_file_atomic(out + ".stats.json", json);
            } else if (!quiet) {
                std::cerr << json;
            }
        } else if (smooth->parsed()) {
            emit(out, format_csv(cfg, "smooth", run_smoothing(cfg, g)));
        } else if (ssl->parsed()) {
            emit(out, format_csv(cfg, "ssl", run_ssl(cfg, g)));
        } else if (bench->parsed()) {
            emit(out, format_csv(cfg, "bench", run_bench(cfg, g, quiet ? nullptr : &std::cerr)));
        } else if (verify->parsed()) {
            std::ifstream in(sparsifier_path);
            if (!in) throw ValidationError("cannot open sparsifier file '" + sparsifier_path + "'");
            const Sparsifier h = read_sparsifier(in);
            if (h.num_nodes() != g.num_nodes()) throw ValidationError("sparsifier and graph differ in node count");
            const double gamma = resolve_gamma(cfg.gammas.front(), g);
            emit(out, to_json(check_sparsifier(g, h, cfg.epsilon, gamma)) + "\n");
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << " (residual " << e.residual() << " after " << e.iterations()
                  << " iterations)\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
