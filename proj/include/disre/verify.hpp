#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "disre/dense.hpp"
#include "disre/graph.hpp"
#include "disre/sparsifier.hpp"

namespace disre {

/**
 * Dense whitening of a reference Laplacian: W = V (Lambda + gamma)^{-1/2},
 * keeping only eigenvectors with eigenvalue above the null threshold when
 * gamma = 0.
 */
class Whitener {
public:
    Whitener(const DenseOracle& reference, double gamma);
    const Eigen::MatrixXd& matrix() const { return w_; }
    double gamma() const { return gamma_; }

private:
    Eigen::MatrixXd w_;
    double gamma_;
};

/// Largest |eigenvalue| of W^T (L_H - L_G) W.
double spectral_error(const Whitener& whitener, const Eigen::MatrixXd& lh, const Eigen::MatrixXd& lg);
double spectral_error(const Graph& g, const Graph& h, double gamma);

struct SparsifierReport {
    double spectral_error = 0.0;
    std::uint64_t edge_count = 0;  ///< sum of copies (plain edge count for a graph)
    double deff = 0.0;
    double size_bound = 0.0;  ///< 3 qbar d_eff
    bool size_bound_ok = false;
    double epsilon = 0.0;
    double gamma = 0.0;
    bool pass = false;
};

/// Full check of H against G, reusing a cached oracle of G when given.
SparsifierReport check_sparsifier(const Graph& g, const Sparsifier& h, double epsilon, double gamma);
SparsifierReport check_sparsifier(const DenseOracle& g_oracle, const Sparsifier& h, double epsilon, double gamma);
/// Graph form: every edge counts once, qbar taken as 1 for the size bound.
SparsifierReport check_sparsifier(const Graph& g, const Graph& h, double epsilon, double gamma);

std::string to_json(const SparsifierReport& report);

/**
 * Max over `trials` random n x k orthonormal F of
 *   Tr(F^T L_H F) - (1 + eps) Tr(F^T L_G F) - eps gamma k.
 */
double check_projection_bound(const Graph& g, const Graph& h, double epsilon, double gamma, std::size_t k,
                              std::size_t trials, std::uint64_t seed);

/// Random n x k matrix with orthonormal columns (thin Q of a Gaussian matrix).
Eigen::MatrixXd random_orthonormal(std::size_t n, std::size_t k, std::uint64_t seed);

struct UnbiasednessReport {
    double max_z = 0.0;
    /// Max |mean - target| over entries whose sample variance is zero.
    double max_deterministic_gap = 0.0;
    std::size_t entries_tested = 0;
    std::size_t repetitions = 0;
};

/**
 * Repeats merge_resparsify(a, b) with independent seeds and compares the
 * entrywise mean of the output Laplacian with the Laplacian of the plain
 * union of a and b.
 */
UnbiasednessReport unbiasedness_check(const Sparsifier& a, const Sparsifier& b, const MergeParams& params,
                                      std::size_t repetitions, std::uint64_t seed);

/**
 * Worst violation of (1-eps) lambda_i(G) - eps gamma <= lambda_i(H) <= (1+eps) lambda_i(G) + eps gamma;
 * <= 0 when every eigenvalue is inside its bracket.
 */
double eigenvalue_bracket_violation(const Graph& g, const Graph& h, double epsilon, double gamma);

}  // namespace disre
