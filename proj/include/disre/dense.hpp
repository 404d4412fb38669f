#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "disre/graph.hpp"
#include "disre/linalg.hpp"

namespace disre {

/// Dense n x n Laplacian. Throws ValidationError above `dense_cap` nodes.
Eigen::MatrixXd dense_laplacian(const Graph& g, std::size_t dense_cap = kDenseCap);

/**
 * Dense reference for a symmetric PSD matrix (usually a graph Laplacian).
 *
 * The eigendecomposition is computed on first use and cached; concurrent
 * readers are safe. Eigenvalues are ascending.
 */
class DenseOracle {
public:
    explicit DenseOracle(const Graph& g, std::size_t dense_cap = kDenseCap);
    explicit DenseOracle(Eigen::MatrixXd matrix);

    std::size_t size() const { return static_cast<std::size_t>(state_->matrix.rows()); }
    const Eigen::MatrixXd& matrix() const { return state_->matrix; }
    const Eigen::VectorXd& eigenvalues() const;
    const Eigen::MatrixXd& eigenvectors() const;

    /// Eigenvalues at or below this are treated as zero in pseudo-inverses.
    double null_threshold() const;

    /// (M + gamma I)^+ rhs through the eigendecomposition.
    Eigen::VectorXd pinv_apply(double gamma, const Eigen::VectorXd& rhs) const;

private:
    struct State {
        Eigen::MatrixXd matrix;
        std::once_flag once;
        Eigen::VectorXd values;
        Eigen::MatrixXd vectors;
    };
    void decompose() const;

    std::shared_ptr<State> state_;
};

std::vector<double> dense_pinv_apply(const DenseOracle& oracle, double gamma,
                                     std::span<const double> rhs);

inline Eigen::Map<const Eigen::VectorXd> as_eigen(std::span<const double> x) {
    return {x.data(), static_cast<Eigen::Index>(x.size())};
}

inline std::vector<double> to_std(const Eigen::VectorXd& x) { return {x.data(), x.data() + x.size()}; }

}  // namespace disre
