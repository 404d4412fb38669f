#include "disre/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>

#include "disre/dense.hpp"
#include "disre/error.hpp"
#include "disre/rng.hpp"

namespace disre {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void remove_mean(std::span<double> x) {
    if (x.empty()) return;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (double& v : x) v -= mean;
}

namespace {

/// Mean removal restricted to the singular components of the system.
class NullSpaceProjector {
public:
    NullSpaceProjector(const Graph& g, std::span<const double> shift) {
        const Components comps = connected_components(g);
        std::vector<bool> singular(comps.count, true);
        for (std::size_t i = 0; i < g.num_nodes(); ++i)
            if (shift[i] != 0.0) singular[comps.label[i]] = false;
        label_.assign(g.num_nodes(), kNone);
        std::vector<std::uint32_t> remap(comps.count, kNone);
        for (std::size_t i = 0; i < g.num_nodes(); ++i) {
            const auto c = comps.label[i];
            if (!singular[c]) continue;
            if (remap[c] == kNone) {
                remap[c] = static_cast<std::uint32_t>(sizes_.size());
                sizes_.push_back(0);
            }
            label_[i] = remap[c];
            ++sizes_[remap[c]];
        }
        sums_.resize(sizes_.size());
    }

    bool active() const { return !sizes_.empty(); }

    void apply(std::span<double> x) {
        if (!active()) return;
        std::fill(sums_.begin(), sums_.end(), 0.0);
        for (std::size_t i = 0; i < x.size(); ++i)
            if (label_[i] != kNone) sums_[label_[i]] += x[i];
        for (std::size_t i = 0; i < x.size(); ++i)
            if (label_[i] != kNone) x[i] -= sums_[label_[i]] / static_cast<double>(sizes_[label_[i]]);
    }

private:
    static constexpr std::uint32_t kNone = 0xffffffffu;
    std::vector<std::uint32_t> label_;
    std::vector<std::size_t> sizes_;
    std::vector<double> sums_;
};

/// Exact solver for (scale * (L_T + D_G - D_T) + diag(shift)) where T is a BFS forest of G.
class TreePreconditioner {
public:
    TreePreconditioner(const Graph& g, double scale, std::span<const double> shift) {
        const std::size_t n = g.num_nodes();
        std::vector<std::vector<std::pair<NodeId, double>>> adj(n);
        for (const Edge& e : g.edges()) {
            adj[e.u].emplace_back(e.v, e.weight);
            adj[e.v].emplace_back(e.u, e.weight);
        }
        const std::vector<double> wdeg = g.weighted_degrees();
        parent_.assign(n, kRoot);
        weight_.assign(n, 0.0);
        pivot_.resize(n);
        for (std::size_t i = 0; i < n; ++i) pivot_[i] = scale * wdeg[i] + shift[i];
        order_.reserve(n);
        std::vector<bool> seen(n, false);
        std::queue<NodeId> frontier;
        for (std::size_t s = 0; s < n; ++s) {
            if (seen[s]) continue;
            seen[s] = true;
            frontier.push(static_cast<NodeId>(s));
            while (!frontier.empty()) {
                const NodeId u = frontier.front();
                frontier.pop();
                order_.push_back(u);
                for (auto [v, w] : adj[u]) {
                    if (seen[v]) continue;
                    seen[v] = true;
                    parent_[v] = u;
                    weight_[v] = scale * w;
                    frontier.push(v);
                }
            }
        }
        scale_ref_.assign(pivot_.begin(), pivot_.end());
        for (std::size_t k = order_.size(); k-- > 0;) {
            const NodeId v = order_[k];
            if (parent_[v] == kRoot) continue;
            pivot_[parent_[v]] -= weight_[v] * weight_[v] / pivot_[v];
        }
    }

    void apply(std::span<const double> r, std::span<double> z) const {
        std::copy(r.begin(), r.end(), z.begin());
        for (std::size_t k = order_.size(); k-- > 0;) {
            const NodeId v = order_[k];
            if (parent_[v] == kRoot) continue;
            z[parent_[v]] += weight_[v] / pivot_[v] * z[v];
        }
        for (const NodeId v : order_) {
            if (parent_[v] == kRoot) {
                // A vanishing root pivot marks a singular tree component.
                z[v] = pivot_[v] > 1e-13 * std::max(scale_ref_[v], 1e-300) ? z[v] / pivot_[v] : 0.0;
            } else {
                z[v] = (z[v] + weight_[v] * z[parent_[v]]) / pivot_[v];
            }
        }
    }

private:
    static constexpr NodeId kRoot = 0xffffffffu;
    std::vector<NodeId> order_;
    std::vector<NodeId> parent_;
    std::vector<double> weight_;
    std::vector<double> pivot_;
    std::vector<double> scale_ref_;
};

void apply_operator(const Graph& g, double scale, std::span<const double> shift,
                    std::span<const double> x, std::span<double> y) {
    laplacian_apply(g, x, y);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = scale * y[i] + shift[i] * x[i];
}

}  // namespace

SolveResult solve_shifted_laplacian(const Graph& g, double scale, std::span<const double> shift,
                                    std::span<const double> rhs, const SolverConfig& cfg,
                                    NullSpacePolicy policy) {
    const std::size_t n = g.num_nodes();
    if (rhs.size() != n || shift.size() != n) throw ValidationError("solver: dimension mismatch");
    detail::require(cfg.rel_tol > 0.0, "solver: rel_tol must be positive");
    detail::require(scale >= 0.0 && std::isfinite(scale), "solver: scale must be >= 0");
    for (double s : shift) {
        detail::require(s >= 0.0 && std::isfinite(s), "solver: shift must be >= 0");
        detail::require(scale > 0.0 || s > 0.0, "solver: zero scale needs a positive shift");
    }

    SolveResult result;
    result.x.assign(n, 0.0);
    const std::size_t max_iters = cfg.max_iters > 0 ? cfg.max_iters : std::max<std::size_t>(10 * n, 50);

    NullSpaceProjector projector(g, shift);
    std::vector<double> b(rhs.begin(), rhs.end());
    const double rhs_norm = norm2(b);
    if (rhs_norm == 0.0) return result;
    if (projector.active()) {
        projector.apply(b);
        std::vector<double> diff(n);
        for (std::size_t i = 0; i < n; ++i) diff[i] = rhs[i] - b[i];
        if (policy == NullSpacePolicy::reject &&
            norm2(diff) > std::max(cfg.rel_tol, 1e-10) * rhs_norm) {
            throw ValidationError("solver: rhs is not orthogonal to the null space");
        }
    }
    const double b_norm = norm2(b);
    if (b_norm == 0.0) return result;

    std::vector<double> inv_diag;
    std::optional<TreePreconditioner> tree;
    if (cfg.preconditioner == Preconditioner::jacobi) {
        const auto wdeg = g.weighted_degrees();
        inv_diag.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = scale * wdeg[i] + shift[i];
            inv_diag[i] = d > 0.0 ? 1.0 / d : 1.0;
        }
    } else if (cfg.preconditioner == Preconditioner::spanning_tree) {
        tree.emplace(g, scale, shift);
    }
    auto precondition = [&](std::span<const double> r, std::span<double> z) {
        switch (cfg.preconditioner) {
            case Preconditioner::none: std::copy(r.begin(), r.end(), z.begin()); break;
            case Preconditioner::jacobi:
                for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
                break;
            case Preconditioner::spanning_tree: tree->apply(r, z); break;
        }
        projector.apply(z);
    };

    std::vector<double>& x = result.x;
    std::vector<double> r = b;
    std::vector<double> z(n), p(n), ap(n);
    const double target = cfg.rel_tol * b_norm;
    std::size_t it = 0;
    double r_norm = b_norm;

    // Outer loop restarts from the true residual if recurrence drift fooled the inner test.
    for (int restart = 0; restart < 4; ++restart) {
        precondition(r, z);
        p = z;
        double rz = dot(r, z);
        while (it < max_iters && r_norm > target) {
            apply_operator(g, scale, shift, p, ap);
            const double pap = dot(p, ap);
            if (!(pap > 0.0)) break;
            const double alpha = rz / pap;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            ++it;
            r_norm = norm2(r);
            if (r_norm <= target) break;
            precondition(r, z);
            const double rz_next = dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
        projector.apply(x);
        apply_operator(g, scale, shift, x, ap);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
        projector.apply(r);
        r_norm = norm2(r);
        if (r_norm <= target || it >= max_iters) break;
    }
    result.iterations = it;
    result.relative_residual = r_norm / b_norm;
    if (r_norm > target) {
        throw SolverError("PCG did not converge: relative residual " + std::to_string(r_norm / b_norm) +
                              " after " + std::to_string(it) + " iterations",
                          r_norm / b_norm, it);
    }
    return result;
}

SolveResult sdd_solve_detailed(const Graph& g, double gamma, std::span<const double> rhs,
                               const SolverConfig& cfg) {
    detail::require(gamma >= 0.0 && std::isfinite(gamma), "sdd_solve: gamma must be >= 0");
    const std::vector<double> shift(g.num_nodes(), gamma);
    return solve_shifted_laplacian(g, 1.0, shift, rhs, cfg, NullSpacePolicy::reject);
}

std::vector<double> sdd_solve(const Graph& g, double gamma, std::span<const double> rhs,
                              const SolverConfig& cfg) {
    return sdd_solve_detailed(g, gamma, rhs, cfg).x;
}

double lambda_max(const Graph& g, std::size_t iters, std::uint64_t seed) {
    detail::require(iters >= 1, "lambda_max: iters must be >= 1");
    const std::size_t n = g.num_nodes();
    if (n == 0 || g.empty()) return 0.0;
    CounterRng rng(seed, {0x6c6d6178ULL});
    std::vector<double> x(n), y(n);
    for (double& v : x) v = rng.normal();
    double rq = 0.0;
    for (std::size_t it = 0; it < iters; ++it) {
        const double norm = norm2(x);
        if (norm == 0.0) return 0.0;
        for (double& v : x) v /= norm;
        laplacian_apply(g, x, y);
        rq = dot(x, y);
        x.swap(y);
    }
    return rq;
}

double lambda2(const Graph& g, const Lambda2Options& options) {
    const std::size_t n = g.num_nodes();
    detail::require(n >= 2, "lambda2: need at least two nodes");
    if (!connected(g)) throw ValidationError("lambda2: graph is disconnected (lambda_2 = 0)");
    if (n <= options.dense_cap) {
        DenseOracle oracle(g, options.dense_cap);
        return oracle.eigenvalues()[1];
    }
    // Inverse power iteration on L^+ restricted to 1-perp.
    CounterRng rng(options.seed, {0x6c616d32ULL});
    std::vector<double> x(n);
    for (double& v : x) v = rng.normal();
    remove_mean(x);
    double rq = 0.0;
    for (std::size_t it = 0; it < options.max_iters; ++it) {
        const double norm = norm2(x);
        for (double& v : x) v /= norm;
        const double next = laplacian_quadratic(g, x);
        if (it > 0 && std::abs(next - rq) <= options.tol * next) {
            rq = next;
            break;
        }
        rq = next;
        x = sdd_solve(g, 0.0, x, options.solver);
    }
    return rq;
}

std::vector<double> smooth_signal(const Graph& g, std::size_t iters, std::uint64_t seed,
                                  std::vector<double>* rayleigh_trace) {
    detail::require(iters >= 1, "smooth_signal: iters must be >= 1");
    const std::size_t n = g.num_nodes();
    detail::require(n >= 2, "smooth_signal: need at least two nodes");
    if (!connected(g)) throw ValidationError("smooth_signal: graph is disconnected");
    const double sigma = 1.01 * lambda_max(g, 300, seed);
    CounterRng rng(seed, {0x736d6f6fULL});
    std::vector<double> x(n), lx(n);
    for (double& v : x) v = rng.normal();
    remove_mean(x);
    double norm = norm2(x);
    for (double& v : x) v /= norm;
    if (rayleigh_trace) rayleigh_trace->clear();
    for (std::size_t it = 0; it < iters; ++it) {
        laplacian_apply(g, x, lx);
        if (rayleigh_trace) rayleigh_trace->push_back(dot(x, lx));
        for (std::size_t i = 0; i < n; ++i) x[i] = sigma * x[i] - lx[i];
        remove_mean(x);
        norm = norm2(x);
        for (double& v : x) v /= norm;
    }
    if (rayleigh_trace) rayleigh_trace->push_back(laplacian_quadratic(g, x));
    return x;
}

}  // namespace disre
