#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "disre/graph.hpp"
#include "disre/linalg.hpp"

namespace disre {

/// Observed labels on a subset of nodes.
struct LabeledSet {
    std::vector<NodeId> indices;
    std::vector<double> labels;

    std::size_t size() const { return indices.size(); }
    /// Throws ValidationError unless indices are distinct, < n, non-empty and match labels.
    void validate(std::size_t n) const;
    /// Length-n vector with the labels at their indices and zero elsewhere.
    std::vector<double> padded(std::size_t n) const;
    /// Length-n 0/1 indicator of the labeled nodes.
    std::vector<double> indicator(std::size_t n) const;
};

struct LearnOptions {
    /// Pseudo-inverses are taken densely up to this many nodes, by PCG above.
    std::size_t dense_cap = kDenseCap;
    SolverConfig solver{.rel_tol = 1e-10};
};

/// (lambda L + I) f = y.
std::vector<double> lap_smooth(const Graph& g, double lambda, std::span<const double> y,
                               const LearnOptions& options = {});

struct SslSolution {
    std::vector<double> f;
    /// Some connected component holds no labeled node, so the system is singular there.
    bool degenerate = false;
    double mu = 0.0;
};

/// (lambda l L + I_S)^+ y_S with y_S zero-padded.
SslSolution hfs(const Graph& g, double lambda, const LabeledSet& labeled, const LearnOptions& options = {});

/**
 * Centered HFS. Labels are centered on S, then
 *   mu = (A^+ y)^T 1 / (A^+ 1)^T 1,   f = A^+ (y - mu 1),   A = lambda l L + I_S,
 * which makes f orthogonal to the all-ones vector.
 */
SslSolution stable_hfs(const Graph& g, double lambda, const LabeledSet& labeled, const LearnOptions& options = {});

/// ((L + lambda I) + C) f = C y_S with C = c_l on S and c_u elsewhere.
std::vector<double> ltr(const Graph& g, double lambda, double c_labeled, double c_unlabeled,
                        const LabeledSet& labeled, const LearnOptions& options = {});

/// Tr(F^T L F) for column-orthonormal F with columns orthogonal to 1.
double sc_cost(const Graph& g, const Eigen::MatrixXd& f);

struct BoundInputs {
    double epsilon = 0.0;
    double lambda = 1.0;  ///< task regularizer
    double gamma = 0.0;   ///< sparsifier ridge
    double lambda2 = 0.0;
    double label_cap = 1.0;
    std::size_t labeled = 1;
    std::size_t unlabeled = 1;
    double delta = 0.1;
    double empirical_risk = 0.0;
};

/// (eps^2 / (1 - eps)) (1/4 + lambda gamma) (lambda f^T L f + lambda gamma |f|^2).
double smoothing_error_bound(const BoundInputs& in, double quadratic, double norm_squared);
double smoothing_error_bound(const BoundInputs& in, std::span<const double> fhat, const Graph& g);

/// l u / (l + u - 1/2) * 2 max(l,u) / (2 max(l,u) - 1).
double transductive_pi(std::size_t labeled, std::size_t unlabeled);

struct SslBound {
    double bound = 0.0;
    double beta = 0.0;
    double pi = 0.0;
    /// The sparsification term; exactly zero when eps = 0.
    double approximation_term = 0.0;
};

/// Generalization bound for centered HFS on an eps-sparsifier. Throws when (1-eps) l lambda lambda2 <= 1.
SslBound ssl_generalization_bound(const BoundInputs& in);

}  // namespace disre
