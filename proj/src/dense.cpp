#include "disre/dense.hpp"

#include "disre/error.hpp"

namespace disre {

Eigen::MatrixXd dense_laplacian(const Graph& g, std::size_t dense_cap) {
    const std::size_t n = g.num_nodes();
    if (n > dense_cap) {
        throw ValidationError("dense oracle refuses n=" + std::to_string(n) + " above cap " +
                              std::to_string(dense_cap));
    }
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const Edge& e : g.edges()) {
        l(e.u, e.u) += e.weight;
        l(e.v, e.v) += e.weight;
        l(e.u, e.v) -= e.weight;
        l(e.v, e.u) -= e.weight;
    }
    return l;
}

DenseOracle::DenseOracle(const Graph& g, std::size_t dense_cap)
    : DenseOracle(dense_laplacian(g, dense_cap)) {}

DenseOracle::DenseOracle(Eigen::MatrixXd matrix) : state_(std::make_shared<State>()) {
    detail::require(matrix.rows() == matrix.cols(), "DenseOracle: matrix must be square");
    state_->matrix = std::move(matrix);
}

void DenseOracle::decompose() const {
    std::call_once(state_->once, [s = state_.get()] {
        if (s->matrix.rows() == 0) return;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s->matrix);
        if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
        s->values = solver.eigenvalues();
        s->vectors = solver.eigenvectors();
    });
}

const Eigen::VectorXd& DenseOracle::eigenvalues() const {
    decompose();
    return state_->values;
}

const Eigen::MatrixXd& DenseOracle::eigenvectors() const {
    decompose();
    return state_->vectors;
}

double DenseOracle::null_threshold() const {
    const auto& values = eigenvalues();
    if (values.size() == 0) return 0.0;
    return 1e-10 * std::max(values[values.size() - 1], 0.0);
}

Eigen::VectorXd DenseOracle::pinv_apply(double gamma, const Eigen::VectorXd& rhs) const {
    detail::require(rhs.size() == matrix().rows(), "pinv_apply: dimension mismatch");
    detail::require(gamma >= 0.0, "pinv_apply: gamma must be >= 0");
    const auto& values = eigenvalues();
    const auto& vectors = eigenvectors();
    if (values.size() == 0) return rhs;
    const double cut = null_threshold();
    Eigen::VectorXd coeff = vectors.transpose() * rhs;
    for (Eigen::Index i = 0; i < coeff.size(); ++i) {
        const double lam = values[i] + gamma;
        const bool drop = gamma == 0.0 ? values[i] <= cut : lam <= 0.0;
        coeff[i] = drop ? 0.0 : coeff[i] / lam;
    }
    return vectors * coeff;
}

std::vector<double> dense_pinv_apply(const DenseOracle& oracle, double gamma,
                                     std::span<const double> rhs) {
    return to_std(oracle.pinv_apply(gamma, as_eigen(rhs)));
}

}  // namespace disre
