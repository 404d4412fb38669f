#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "disre/graph.hpp"
#include "disre/learn.hpp"
#include "disre/scheduler.hpp"

namespace disre {

/// Everything a harness run needs. Gamma entries are numbers or multiples of lambda2 written like "10l2".
struct ExperimentConfig {
    std::string input;       ///< edge-list path; wins over `gen` when set
    std::string gen;         ///< generator spec such as "grid2d:20x20"
    std::uint64_t graph_seed = 0;
    bool densify = false;
    int densify_steps = 2;

    double epsilon = 0.5;
    double delta = 0.1;
    std::vector<std::string> gammas{"0"};
    std::optional<std::uint32_t> qbar;
    std::size_t shards = 4;
    TreeShape shape = TreeShape::balanced;
    PartitionStrategy partition = PartitionStrategy::round_robin;
    ExecutionMode execution = ExecutionMode::layered;
    bool spanning_tree_augment = false;
    bool halving_floor = false;
    ResistanceMode resistance = ResistanceMode::automatic;
    double jl_epsilon = 0.25;

    std::vector<double> lambdas{1e-3, 1e-2, 1e-1, 1.0, 10.0};
    std::vector<double> ssl_lambdas{1e-6, 1e-4, 1e-2, 1.0};
    std::vector<double> sigmas{1e-3, 1e-2, 1e-1, 1.0};
    /// Label counts; values below 1 are fractions of n.
    std::vector<double> labels{0.1};
    std::vector<std::uint64_t> seeds{0};
    std::vector<unsigned> bench_workers{1, 2, 4};
    std::vector<std::string> methods{"exact", "disre", "kn", "uniform"};
    /// kN degree cap; 0 means ceil(average degree / 2).
    std::size_t kn_k = 0;
    /// Uniform baseline draws; 0 means ceil(m / 2).
    std::size_t uniform_draws = 0;
    std::size_t signal_iters = 2000;
    unsigned workers = 1;
};

/// One CSV row: task,method,gamma,qbar,lambda,seed,edges,metric,value
struct ResultRow {
    std::string task;
    std::string method;
    double gamma = 0.0;
    std::uint32_t qbar = 0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::size_t edges = 0;
    std::string metric;
    double value = 0.0;
};

void validate(const ExperimentConfig& cfg);

/// Reads `input` or generates from `gen`, then densifies when asked.
Graph load_graph(const ExperimentConfig& cfg);

/// Parses "0.5", "l2" or "10l2"; the lambda2 suffix needs a connected graph.
double resolve_gamma(std::string_view text, const Graph& g);
std::vector<double> resolve_gammas(const ExperimentConfig& cfg, const Graph& g);

SparsifyConfig sparsify_config(const ExperimentConfig& cfg, double gamma, std::uint64_t seed);

std::size_t resolve_kn_k(const ExperimentConfig& cfg, const Graph& g);
std::size_t resolve_label_count(double spec, std::size_t n);

/// Balanced by sign of `signal`: half the labels from each side where possible.
LabeledSet balanced_labels(std::span<const double> signal, std::size_t count, std::uint64_t seed);

/// Unit-norm smooth target used by the smoothing and SSL tasks.
std::vector<double> target_signal(const ExperimentConfig& cfg, const Graph& g);

std::vector<ResultRow> run_smoothing(const ExperimentConfig& cfg, const Graph& g);
std::vector<ResultRow> run_ssl(const ExperimentConfig& cfg, const Graph& g);
std::vector<ResultRow> run_bench(const ExperimentConfig& cfg, const Graph& g, std::ostream* log = nullptr);

/// key=value summary of every field, one per line.
std::string describe(const ExperimentConfig& cfg);

/// Header comments (version, task, resolved config), the column row, then rows.
std::string format_csv(const ExperimentConfig& cfg, std::string_view task, const std::vector<ResultRow>& rows);

struct CellMean {
    std::string task;
    std::string method;
    double gamma = 0.0;
    double lambda = 0.0;
    double mean = 0.0;
    std::size_t count = 0;
};

/// Means over seeds of `metric`, grouped by (task, method, gamma, lambda), in first-seen order.
std::vector<CellMean> cell_means(const std::vector<ResultRow>& rows, std::string_view metric);

/// Best lambda cell (smallest mean) for a task/method/gamma, if any.
std::optional<CellMean> best_cell(const std::vector<CellMean>& cells, std::string_view task, std::string_view method,
                                  double gamma = 0.0);

std::string_view version_string();

}  // namespace disre
