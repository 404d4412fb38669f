#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "disre/dense.hpp"
#include "disre/graph.hpp"
#include "disre/linalg.hpp"

namespace disre {

enum class ResistanceMode {
    automatic,  ///< dense up to dense_threshold nodes, exact up to exact_edge_limit edges, else sketch
    exact,      ///< one PCG solve per distinct probe pair
    dense,      ///< Cholesky of the shifted Laplacian, all pairs at once
    sketch,     ///< Johnson-Lindenstrauss projection of the resistance decomposition
};

struct ResistanceConfig {
    ResistanceMode mode = ResistanceMode::automatic;
    SolverConfig solver{.rel_tol = 1e-10};
    double jl_epsilon = 0.25;
    std::uint64_t sketch_seed = 0;
    unsigned workers = 1;
    std::size_t dense_threshold = 1000;
    std::size_t exact_edge_limit = 5000;
};

/// r~_e = (1 - eps) b_e^T (L + (1 + eps) gamma I)^{-1} b_e for each probe edge.
struct ResistanceEstimates {
    std::vector<double> values;
    double gamma = 0.0;
    double epsilon = 0.0;
    ResistanceMode mode = ResistanceMode::automatic;
    std::size_t solves = 0;
    std::size_t solver_iterations = 0;
};

/// Smallest value an estimate may take; also the lower clip.
inline constexpr double kMinResistance = 1e-12;

/// b_e^T (L_G + gamma I)^{-1} b_e by a single solve (pseudo-inverse when gamma = 0).
double effective_resistance_exact(const Graph& g, double gamma, const Edge& e,
                                  const SolverConfig& cfg = {.rel_tol = 1e-12});

/**
 * Ridge resistance estimates of `probes` measured on the graph `h`.
 *
 * Probe weights define b_e; they need not match weights in `h`. With
 * gamma = 0 each probe's endpoints must share a connected component of `h`
 * and results are clipped into [kMinResistance, 1].
 */
ResistanceEstimates estimate_resistances(const Graph& h, std::span<const Edge> probes, double gamma,
                                         double epsilon, const ResistanceConfig& cfg = {});

/// r_e(gamma) for every edge of g.
ResistanceEstimates effective_resistances(const Graph& g, double gamma,
                                          const ResistanceConfig& cfg = {});

/// d_eff(gamma) = sum_e r_e(gamma).
double effective_dimension(const Graph& g, double gamma, const ResistanceConfig& cfg = {});

/// d_eff(gamma) = sum over nonzero eigenvalues of lambda / (lambda + gamma).
double effective_dimension_spectral(const DenseOracle& oracle, double gamma);

/// Rows of the JL sketch: ceil(8 ln(m) / eps^2).
std::size_t jl_dimension(std::size_t m, double jl_epsilon);

ResistanceMode resolve_mode(const ResistanceConfig& cfg, std::size_t nodes, std::size_t edges);

std::string_view to_string(ResistanceMode mode);
ResistanceMode parse_resistance_mode(std::string_view text);

}  // namespace disre
