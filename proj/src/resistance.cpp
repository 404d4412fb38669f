#include "disre/resistance.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "disre/error.hpp"
#include "disre/parallel.hpp"
#include "disre/rng.hpp"

namespace disre {

namespace {

struct PairIndex {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    std::vector<std::size_t> probe_to_pair;
};

PairIndex index_pairs(std::span<const Edge> probes) {
    PairIndex idx;
    std::map<std::pair<NodeId, NodeId>, std::size_t> seen;
    idx.probe_to_pair.reserve(probes.size());
    for (const Edge& e : probes) {
        const auto key = std::minmax(e.u, e.v);
        auto [it, inserted] = seen.try_emplace({key.first, key.second}, idx.pairs.size());
        if (inserted) idx.pairs.emplace_back(key.first, key.second);
        idx.probe_to_pair.push_back(it->second);
    }
    return idx;
}

void check_same_component(const Components& comps, NodeId u, NodeId v) {
    if (comps.label[u] != comps.label[v]) {
        throw ValidationError("resistance: endpoints (" + std::to_string(u) + "," + std::to_string(v) +
                              ") lie in different components and gamma = 0");
    }
}

/// Unit resistances (chi_u - chi_v)^T M^{-1} (chi_u - chi_v) from a dense factorization.
std::vector<double> unit_resistances_dense(const Graph& h, double shift, const PairIndex& idx) {
    Eigen::MatrixXd m = dense_laplacian(h, std::max<std::size_t>(h.num_nodes(), kDenseCap));
    const auto n = static_cast<Eigen::Index>(h.num_nodes());
    if (shift > 0.0) {
        m.diagonal().array() += shift;
    } else {
        // L + sum_C 1_C 1_C^T / |C| is invertible and agrees with L^+ on 1-perp vectors.
        const Components comps = connected_components(h);
        std::vector<std::vector<Eigen::Index>> members(comps.count);
        for (Eigen::Index i = 0; i < n; ++i) members[comps.label[i]].push_back(i);
        for (const auto& c : members) {
            const double w = 1.0 / static_cast<double>(c.size());
            for (auto i : c)
                for (auto j : c) m(i, j) += w;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw SolverError("dense resistance: shifted Laplacian is not positive definite", 0.0, 0);
    }
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    std::vector<double> out(idx.pairs.size());
    for (std::size_t p = 0; p < idx.pairs.size(); ++p) {
        const auto [u, v] = idx.pairs[p];
        out[p] = inv(u, u) + inv(v, v) - inv(u, v) - inv(v, u);
    }
    return out;
}

std::vector<double> unit_resistances_exact(const Graph& h, double shift, const PairIndex& idx,
                                           const ResistanceConfig& cfg, std::size_t& iterations) {
    std::vector<double> out(idx.pairs.size());
    std::vector<std::size_t> iters(idx.pairs.size());
    parallel_for(idx.pairs.size(), cfg.workers, [&](std::size_t p) {
        const auto [u, v] = idx.pairs[p];
        std::vector<double> rhs(h.num_nodes(), 0.0);
        rhs[u] = 1.0;
        rhs[v] = -1.0;
        const SolveResult res = sdd_solve_detailed(h, shift, rhs, cfg.solver);
        out[p] = res.x[u] - res.x[v];
        iters[p] = res.iterations;
    });
    for (std::size_t it : iters) iterations += it;
    return out;
}

/**
 * r(s) = ||B M^{-1} b||^2 + s ||M^{-1} b||^2 with M = B^T B + s I. Both norms
 * are estimated by Rademacher projections; each sketch row costs one solve.
 */
std::vector<double> unit_resistances_sketch(const Graph& h, double shift, const PairIndex& idx,
                                            const ResistanceConfig& cfg, std::size_t& solves,
                                            std::size_t& iterations) {
    detail::require(cfg.jl_epsilon > 0.0 && cfg.jl_epsilon < 1.0, "sketch mode needs jl_epsilon in (0,1)");
    const std::size_t n = h.num_nodes();
    const std::size_t k = jl_dimension(std::max<std::size_t>(h.num_edges(), 2), cfg.jl_epsilon);
    const std::size_t rows = shift > 0.0 ? 2 * k : k;
    const double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(k));
    std::vector<std::vector<double>> z(rows);
    std::vector<std::size_t> iters(rows);
    const std::vector<double> shift_vec(n, shift);
    parallel_for(rows, cfg.workers, [&](std::size_t row) {
        CounterRng rng(cfg.sketch_seed, {0x6a6cULL, row});
        std::vector<double> rhs(n, 0.0);
        if (row < k) {
            for (const Edge& f : h.edges()) {
                const double c = rng.rademacher() * inv_sqrt_k * std::sqrt(f.weight);
                rhs[f.u] += c;
                rhs[f.v] -= c;
            }
        } else {
            const double c = std::sqrt(shift) * inv_sqrt_k;
            for (double& r : rhs) r = rng.rademacher() * c;
        }
        SolveResult res =
            solve_shifted_laplacian(h, 1.0, shift_vec, rhs, cfg.solver, NullSpacePolicy::project);
        z[row] = std::move(res.x);
        iters[row] = res.iterations;
    });
    solves += rows;
    for (std::size_t it : iters) iterations += it;
    std::vector<double> out(idx.pairs.size(), 0.0);
    for (std::size_t p = 0; p < idx.pairs.size(); ++p) {
        const auto [u, v] = idx.pairs[p];
        double s = 0.0;
        for (const auto& row : z) {
            const double d = row[u] - row[v];
            s += d * d;
        }
        out[p] = s;
    }
    return out;
}

}  // namespace

std::size_t jl_dimension(std::size_t m, double jl_epsilon) {
    detail::require(jl_epsilon > 0.0 && jl_epsilon < 1.0, "jl_epsilon must be in (0,1)");
    const double lm = std::log(static_cast<double>(std::max<std::size_t>(m, 2)));
    return static_cast<std::size_t>(std::ceil(8.0 * lm / (jl_epsilon * jl_epsilon)));
}

ResistanceMode resolve_mode(const ResistanceConfig& cfg, std::size_t nodes, std::size_t edges) {
    if (cfg.mode != ResistanceMode::automatic) return cfg.mode;
    if (nodes <= cfg.dense_threshold) return ResistanceMode::dense;
    if (edges <= cfg.exact_edge_limit) return ResistanceMode::exact;
    return ResistanceMode::sketch;
}

double effective_resistance_exact(const Graph& g, double gamma, const Edge& e, const SolverConfig& cfg) {
    detail::require(gamma >= 0.0, "effective_resistance_exact: gamma must be >= 0");
    detail::require(e.u < g.num_nodes() && e.v < g.num_nodes() && e.u != e.v,
                    "effective_resistance_exact: bad edge");
    std::vector<double> rhs(g.num_nodes(), 0.0);
    const double s = std::sqrt(e.weight);
    rhs[e.u] = s;
    rhs[e.v] = -s;
    const std::vector<double> x = sdd_solve(g, gamma, rhs, cfg);
    return s * (x[e.u] - x[e.v]);
}

ResistanceEstimates estimate_resistances(const Graph& h, std::span<const Edge> probes, double gamma,
                                         double epsilon, const ResistanceConfig& cfg) {
    detail::require(gamma >= 0.0 && std::isfinite(gamma), "resistance: gamma must be >= 0");
    detail::require(epsilon >= 0.0 && epsilon < 1.0, "resistance: epsilon must be in [0,1)");
    for (const Edge& e : probes) {
        detail::require(e.u < h.num_nodes() && e.v < h.num_nodes() && e.u != e.v,
                        "resistance: probe edge out of range");
    }
    ResistanceEstimates est;
    est.gamma = gamma;
    est.epsilon = epsilon;
    est.mode = resolve_mode(cfg, h.num_nodes(), h.num_edges());
    if (probes.empty()) return est;

    const PairIndex idx = index_pairs(probes);
    const double shift = (1.0 + epsilon) * gamma;
    if (shift == 0.0) {
        const Components comps = connected_components(h);
        for (auto [u, v] : idx.pairs) check_same_component(comps, u, v);
    }
    std::vector<double> unit;
    switch (est.mode) {
        case ResistanceMode::dense:
            unit = unit_resistances_dense(h, shift, idx);
            est.solves = 1;
            break;
        case ResistanceMode::exact:
            unit = unit_resistances_exact(h, shift, idx, cfg, est.solver_iterations);
            est.solves = idx.pairs.size();
            break;
        case ResistanceMode::sketch:
            unit = unit_resistances_sketch(h, shift, idx, cfg, est.solves, est.solver_iterations);
            break;
        case ResistanceMode::automatic: break;
    }
    est.values.resize(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
        double r = (1.0 - epsilon) * probes[i].weight * unit[idx.probe_to_pair[i]];
        r = std::max(r, kMinResistance);
        if (gamma == 0.0) r = std::min(r, 1.0);
        est.values[i] = r;
    }
    return est;
}

ResistanceEstimates effective_resistances(const Graph& g, double gamma, const ResistanceConfig& cfg) {
    return estimate_resistances(g, g.edges(), gamma, 0.0, cfg);
}

double effective_dimension(const Graph& g, double gamma, const ResistanceConfig& cfg) {
    const ResistanceEstimates est = effective_resistances(g, gamma, cfg);
    double total = 0.0;
    for (double r : est.values) total += r;
    return total;
}

double effective_dimension_spectral(const DenseOracle& oracle, double gamma) {
    detail::require(gamma >= 0.0, "effective_dimension_spectral: gamma must be >= 0");
    const auto& values = oracle.eigenvalues();
    const double cut = oracle.null_threshold();
    double total = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values[i] <= cut) continue;
        total += values[i] / (values[i] + gamma);
    }
    return total;
}

std::string_view to_string(ResistanceMode mode) {
    switch (mode) {
    case ResistanceMode::automatic: return "auto";
    case ResistanceMode::exact: return "exact";
    case ResistanceMode::dense: return "dense";
    case ResistanceMode::sketch: return "sketch";
    }
    return "auto";
}

ResistanceMode parse_resistance_mode(std::string_view text) {
    if (text == "auto") return ResistanceMode::automatic;
    if (text == "exact") return ResistanceMode::exact;
    if (text == "dense") return ResistanceMode::dense;
    if (text == "sketch") return ResistanceMode::sketch;
    throw ValidationError("unknown resistance mode '" + std::string(text) + "'");
}

}  // namespace disre
