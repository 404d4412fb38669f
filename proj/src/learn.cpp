#include "disre/learn.hpp"

#include <cmath>
#include <optional>

#include "disre/dense.hpp"
#include "disre/error.hpp"

namespace disre {

namespace {

bool has_unlabeled_component(const Graph& g, const LabeledSet& labeled) {
    const Components comps = connected_components(g);
    std::vector<bool> seen(comps.count, false);
    for (NodeId i : labeled.indices) seen[comps.label[i]] = true;
    for (bool s : seen)
        if (!s) return true;
    return false;
}

/// Applies (scale L + diag(shift))^+ to several right-hand sides.
class PinvSolver {
public:
    PinvSolver(const Graph& g, double scale, std::vector<double> shift, const LearnOptions& options)
        : g_(g), scale_(scale), shift_(std::move(shift)), options_(options) {
        if (g.num_nodes() <= options.dense_cap) {
            Eigen::MatrixXd m = scale * dense_laplacian(g, options.dense_cap);
            for (std::size_t i = 0; i < shift_.size(); ++i) m(i, i) += shift_[i];
            oracle_.emplace(std::move(m));
        }
    }

    std::vector<double> apply(std::span<const double> rhs) const {
        if (oracle_) return dense_pinv_apply(*oracle_, 0.0, rhs);
        return solve_shifted_laplacian(g_, scale_, shift_, rhs, options_.solver, NullSpacePolicy::project).x;
    }

private:
    const Graph& g_;
    double scale_;
    std::vector<double> shift_;
    LearnOptions options_;
    std::optional<DenseOracle> oracle_;
};

}  // namespace

void LabeledSet::validate(std::size_t n) const {
    if (indices.empty()) throw ValidationError("labeled set is empty");
    if (indices.size() != labels.size()) throw ValidationError("labeled set: indices and labels differ in length");
    std::vector<bool> seen(n, false);
    for (NodeId i : indices) {
        if (i >= n) throw ValidationError("labeled set: index out of range");
        if (seen[i]) throw ValidationError("labeled set: duplicate index");
        seen[i] = true;
    }
    for (double y : labels)
        if (!std::isfinite(y)) throw ValidationError("labeled set: non-finite label");
}

std::vector<double> LabeledSet::padded(std::size_t n) const {
    std::vector<double> y(n, 0.0);
    for (std::size_t j = 0; j < indices.size(); ++j) y[indices[j]] = labels[j];
    return y;
}

std::vector<double> LabeledSet::indicator(std::size_t n) const {
    std::vector<double> s(n, 0.0);
    for (NodeId i : indices) s[i] = 1.0;
    return s;
}

std::vector<double> lap_smooth(const Graph& g, double lambda, std::span<const double> y,
                               const LearnOptions& options) {
    detail::require(lambda >= 0.0, "lap_smooth: lambda must be >= 0");
    if (y.size() != g.num_nodes()) throw ValidationError("lap_smooth: dimension mismatch");
    if (lambda == 0.0 || g.empty()) return {y.begin(), y.end()};
    const std::vector<double> ones(g.num_nodes(), 1.0);
    return solve_shifted_laplacian(g, lambda, ones, y, options.solver).x;
}

SslSolution hfs(const Graph& g, double lambda, const LabeledSet& labeled, const LearnOptions& options) {
    detail::require(lambda > 0.0, "hfs: lambda must be > 0");
    const std::size_t n = g.num_nodes();
    labeled.validate(n);
    const double scale = lambda * static_cast<double>(labeled.size());
    PinvSolver solver(g, scale, labeled.indicator(n), options);
    SslSolution out;
    out.f = solver.apply(labeled.padded(n));
    out.degenerate = has_unlabeled_component(g, labeled);
    return out;
}

SslSolution stable_hfs(const Graph& g, double lambda, const LabeledSet& labeled, const LearnOptions& options) {
    detail::require(lambda > 0.0, "stable_hfs: lambda must be > 0");
    const std::size_t n = g.num_nodes();
    labeled.validate(n);
    const double scale = lambda * static_cast<double>(labeled.size());
    PinvSolver solver(g, scale, labeled.indicator(n), options);

    double mean = 0.0;
    for (double y : labeled.labels) mean += y;
    mean /= static_cast<double>(labeled.size());
    LabeledSet centered = labeled;
    for (double& y : centered.labels) y -= mean;
    std::vector<double> y = centered.padded(n);

    const std::vector<double> ones(n, 1.0);
    const std::vector<double> a_y = solver.apply(y);
    const std::vector<double> a_one = solver.apply(ones);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += a_y[i];
        den += a_one[i];
    }
    if (std::abs(den) < 1e-12) throw SolverError("stable_hfs: centering denominator vanishes", 0.0, 0);

    SslSolution out;
    out.mu = num / den;
    for (std::size_t i = 0; i < n; ++i) y[i] -= out.mu;
    out.f = solver.apply(y);
    out.degenerate = has_unlabeled_component(g, labeled);
    return out;
}

std::vector<double> ltr(const Graph& g, double lambda, double c_labeled, double c_unlabeled,
                        const LabeledSet& labeled, const LearnOptions& options) {
    detail::require(lambda > 0.0, "ltr: lambda must be > 0");
    detail::require(c_unlabeled > 0.0 && c_labeled >= c_unlabeled, "ltr: need c_l >= c_u > 0");
    const std::size_t n = g.num_nodes();
    labeled.validate(n);
    std::vector<double> shift(n, lambda + c_unlabeled);
    std::vector<double> rhs(n, 0.0);
    for (std::size_t j = 0; j < labeled.size(); ++j) {
        shift[labeled.indices[j]] = lambda + c_labeled;
        rhs[labeled.indices[j]] = c_labeled * labeled.labels[j];
    }
    return solve_shifted_laplacian(g, 1.0, shift, rhs, options.solver).x;
}

double sc_cost(const Graph& g, const Eigen::MatrixXd& f) {
    const auto n = static_cast<Eigen::Index>(g.num_nodes());
    if (f.rows() != n) throw ValidationError("sc_cost: F must have n rows");
    const Eigen::MatrixXd gram = f.transpose() * f - Eigen::MatrixXd::Identity(f.cols(), f.cols());
    if (gram.cwiseAbs().maxCoeff() > 1e-8) throw ValidationError("sc_cost: F is not column-orthonormal");
    const double limit = 1e-8 * std::sqrt(static_cast<double>(n));
    double total = 0.0;
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
        if (std::abs(f.col(c).sum()) > limit) throw ValidationError("sc_cost: column not orthogonal to 1");
        total += laplacian_quadratic(g, {f.col(c).data(), static_cast<std::size_t>(n)});
    }
    return total;
}

double smoothing_error_bound(const BoundInputs& in, double quadratic, double norm_squared) {
    detail::require(in.epsilon >= 0.0 && in.epsilon < 1.0, "smoothing bound: epsilon must be in [0,1)");
    const double eps = in.epsilon;
    const double lg = in.lambda * in.gamma;
    return eps * eps / (1.0 - eps) * (0.25 + lg) * (in.lambda * quadratic + lg * norm_squared);
}

double smoothing_error_bound(const BoundInputs& in, std::span<const double> fhat, const Graph& g) {
    const double q = laplacian_quadratic(g, fhat);
    return smoothing_error_bound(in, q, dot(fhat, fhat));
}

double transductive_pi(std::size_t labeled, std::size_t unlabeled) {
    detail::require(labeled >= 1 && unlabeled >= 1, "pi: l and u must be >= 1");
    const double l = static_cast<double>(labeled);
    const double u = static_cast<double>(unlabeled);
    const double big = 2.0 * std::max(l, u);
    return l * u / (l + u - 0.5) * big / (big - 1.0);
}

SslBound ssl_generalization_bound(const BoundInputs& in) {
    detail::require(in.epsilon >= 0.0 && in.epsilon < 1.0, "ssl bound: epsilon must be in [0,1)");
    detail::require(in.delta > 0.0 && in.delta < 1.0, "ssl bound: delta must be in (0,1)");
    detail::require(in.lambda > 0.0 && in.lambda2 > 0.0 && in.label_cap > 0.0,
                    "ssl bound: lambda, lambda2 and c must be positive");
    const double eps = in.epsilon;
    const double l = static_cast<double>(in.labeled);
    const double u = static_cast<double>(in.unlabeled);
    const double c = in.label_cap;
    const double scale = l * in.lambda * in.lambda2;
    const double gap = (1.0 - eps) * scale - 1.0;
    if (!(gap > 0.0)) throw ValidationError("ssl bound: (1 - eps) l lambda lambda2 <= 1, the bound is vacuous");

    SslBound out;
    out.pi = transductive_pi(in.labeled, in.unlabeled);
    out.beta = 3.0 * c * std::sqrt(l) / (gap * gap) + 4.0 * c / gap;
    const double spread = (2.0 * out.beta + 4.0 * c * c * (l + u) / (l * u)) *
                          std::sqrt(out.pi * std::log(1.0 / in.delta) / 2.0);
    const double inner = 2.0 * (1.0 + eps) * eps * scale * c / (gap * gap);
    out.approximation_term = inner * inner / (1.0 - eps);
    out.bound = in.empirical_risk + out.beta + spread + out.approximation_term;
    return out;
}

}  // namespace disre
