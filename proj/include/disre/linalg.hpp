#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "disre/graph.hpp"

namespace disre {

/// Largest graph the dense oracle will materialize.
inline constexpr std::size_t kDenseCap = 2000;

enum class Preconditioner { none, jacobi, spanning_tree };

struct SolverConfig {
    double rel_tol = 1e-8;
    /// 0 means 10 * n.
    std::size_t max_iters = 0;
    Preconditioner preconditioner = Preconditioner::jacobi;
};

struct SolveResult {
    std::vector<double> x;
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

/// What to do with right-hand-side mass in the null space of singular components.
enum class NullSpacePolicy {
    reject,   ///< ValidationError when rhs is not orthogonal to 1 on singular components.
    project,  ///< Silently drop it (pseudo-inverse semantics).
};

/**
 * Preconditioned conjugate gradient for (scale * L_G + diag(shift)) x = rhs.
 *
 * A connected component on which every shift entry is zero is singular; it is
 * solved in the pseudo-inverse sense and the returned x has zero mean there.
 * Throws SolverError when the tolerance is not met within max_iters.
 */
SolveResult solve_shifted_laplacian(const Graph& g, double scale, std::span<const double> shift,
                                    std::span<const double> rhs, const SolverConfig& cfg = {},
                                    NullSpacePolicy policy = NullSpacePolicy::reject);

/// (L_G + gamma I) x = rhs; gamma = 0 gives the mean-free pseudo-inverse solution.
SolveResult sdd_solve_detailed(const Graph& g, double gamma, std::span<const double> rhs,
                               const SolverConfig& cfg = {});
std::vector<double> sdd_solve(const Graph& g, double gamma, std::span<const double> rhs,
                              const SolverConfig& cfg = {});

/// Power-iteration lower bound on the largest Laplacian eigenvalue.
double lambda_max(const Graph& g, std::size_t iters, std::uint64_t seed = 0);

struct Lambda2Options {
    std::size_t dense_cap = kDenseCap;
    std::size_t max_iters = 500;
    double tol = 1e-10;
    SolverConfig solver{.rel_tol = 1e-10};
    std::uint64_t seed = 0;
};

/// Smallest nonzero Laplacian eigenvalue of a connected graph.
double lambda2(const Graph& g, const Lambda2Options& options = {});

/**
 * Approximate Fiedler vector by power iteration on (sigma I - L) with
 * sigma = 1.01 * lambda_max, re-projected onto 1-perp every step.
 * Unit norm, orthogonal to 1. `rayleigh_trace`, when given, receives x^T L x
 * after every iteration.
 */
std::vector<double> smooth_signal(const Graph& g, std::size_t iters, std::uint64_t seed,
                                  std::vector<double>* rayleigh_trace = nullptr);

// Small vector helpers shared across modules.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
void remove_mean(std::span<double> x);

}  // namespace disre
