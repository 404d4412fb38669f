#include "disre/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "disre/error.hpp"
#include "disre/resistance.hpp"
#include "disre/rng.hpp"

namespace disre {

Whitener::Whitener(const DenseOracle& reference, double gamma) : gamma_(gamma) {
    detail::require(gamma >= 0.0, "whitener: gamma must be >= 0");
    const auto& values = reference.eigenvalues();
    const auto& vectors = reference.eigenvectors();
    const double cut = gamma == 0.0 ? reference.null_threshold() : -1.0;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (values[i] > cut) keep.push_back(i);
    w_.resize(values.size(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        const double lam = std::max(values[keep[j]], 0.0);
        w_.col(static_cast<Eigen::Index>(j)) = vectors.col(keep[j]) / std::sqrt(lam + gamma);
    }
}

double spectral_error(const Whitener& whitener, const Eigen::MatrixXd& lh, const Eigen::MatrixXd& lg) {
    const Eigen::MatrixXd& w = whitener.matrix();
    if (w.cols() == 0) return 0.0;
    const Eigen::MatrixXd diff = w.transpose() * (lh - lg) * w;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(diff, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
}

double spectral_error(const Graph& g, const Graph& h, double gamma) {
    if (g.num_nodes() != h.num_nodes()) throw ValidationError("spectral_error: node count mismatch");
    const DenseOracle oracle(g);
    return spectral_error(Whitener(oracle, gamma), dense_laplacian(h), oracle.matrix());
}

namespace {

SparsifierReport make_report(const DenseOracle& g_oracle, const Graph& h, std::uint64_t edge_count, double qbar,
                             double epsilon, double gamma) {
    if (g_oracle.size() != h.num_nodes()) throw ValidationError("check_sparsifier: node count mismatch");
    SparsifierReport r;
    r.epsilon = epsilon;
    r.gamma = gamma;
    r.spectral_error = spectral_error(Whitener(g_oracle, gamma), dense_laplacian(h), g_oracle.matrix());
    r.edge_count = edge_count;
    r.deff = effective_dimension_spectral(g_oracle, gamma);
    r.size_bound = 3.0 * qbar * r.deff;
    r.size_bound_ok = static_cast<double>(edge_count) <= r.size_bound;
    r.pass = r.spectral_error <= epsilon;
    return r;
}

}  // namespace

SparsifierReport check_sparsifier(const DenseOracle& g_oracle, const Sparsifier& h, double epsilon, double gamma) {
    return make_report(g_oracle, to_graph(h), h.total_copies(), static_cast<double>(h.qbar()), epsilon, gamma);
}

SparsifierReport check_sparsifier(const Graph& g, const Sparsifier& h, double epsilon, double gamma) {
    return check_sparsifier(DenseOracle(g), h, epsilon, gamma);
}

SparsifierReport check_sparsifier(const Graph& g, const Graph& h, double epsilon, double gamma) {
    return make_report(DenseOracle(g), h, h.num_edges(), 1.0, epsilon, gamma);
}

std::string to_json(const SparsifierReport& report) {
    nlohmann::ordered_json j;
    j["spectral_error"] = report.spectral_error;
    j["edge_count"] = report.edge_count;
    j["deff"] = report.deff;
    j["size_bound"] = report.size_bound;
    j["size_bound_ok"] = report.size_bound_ok;
    j["epsilon"] = report.epsilon;
    j["gamma"] = report.gamma;
    j["pass"] = report.pass;
    return j.dump();
}

Eigen::MatrixXd random_orthonormal(std::size_t n, std::size_t k, std::uint64_t seed) {
    detail::require(k >= 1 && k <= n, "random_orthonormal: need 1 <= k <= n");
    CounterRng rng(seed, {0x716fULL});
    Eigen::MatrixXd m(n, k);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
}

double check_projection_bound(const Graph& g, const Graph& h, double epsilon, double gamma, std::size_t k,
                              std::size_t trials, std::uint64_t seed) {
    if (g.num_nodes() != h.num_nodes()) throw ValidationError("projection bound: node count mismatch");
    detail::require(trials >= 1, "projection bound: trials must be >= 1");
    const std::size_t n = g.num_nodes();
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
        const Eigen::MatrixXd f = random_orthonormal(n, k, derive_key(seed, {t}));
        double th = 0.0;
        double tg = 0.0;
        for (Eigen::Index c = 0; c < f.cols(); ++c) {
            const std::span<const double> col(f.col(c).data(), n);
            th += laplacian_quadratic(h, col);
            tg += laplacian_quadratic(g, col);
        }
        worst = std::max(worst, th - (1.0 + epsilon) * tg - epsilon * gamma * static_cast<double>(k));
    }
    return worst;
}

UnbiasednessReport unbiasedness_check(const Sparsifier& a, const Sparsifier& b, const MergeParams& params,
                                      std::size_t repetitions, std::uint64_t seed) {
    detail::require(repetitions >= 2, "unbiasedness: need at least 2 repetitions");
    const std::size_t n = a.num_nodes();
    const Eigen::MatrixXd target = dense_laplacian(to_graph(merge_entries(a, b)));
    // Moments are taken around the first draw so constant entries give exactly zero variance.
    Eigen::MatrixXd shift;
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t r = 0; r < repetitions; ++r) {
        const MergeResult out = merge_resparsify(a, b, params, {derive_key(seed, {r}), 1});
        const Eigen::MatrixXd l = out.sparsifier.empty() ? Eigen::MatrixXd::Zero(n, n)
                                                         : dense_laplacian(to_graph(out.sparsifier));
        if (r == 0) shift = l;
        const Eigen::MatrixXd d = l - shift;
        sum += d;
        sum_sq += d.cwiseProduct(d);
    }
    const double reps = static_cast<double>(repetitions);
    UnbiasednessReport report;
    report.repetitions = repetitions;
    for (Eigen::Index i = 0; i < target.rows(); ++i) {
        for (Eigen::Index j = i; j < target.cols(); ++j) {
            const double dmean = sum(i, j) / reps;
            const double mean = shift(i, j) + dmean;
            const double var = std::max(0.0, (sum_sq(i, j) - reps * dmean * dmean) / (reps - 1.0));
            const double gap = std::abs(mean - target(i, j));
            const double stderr_ = std::sqrt(var / reps);
            if (stderr_ <= 1e-12 * std::max(1.0, std::abs(mean))) {
                report.max_deterministic_gap = std::max(report.max_deterministic_gap, gap);
                continue;
            }
            report.max_z = std::max(report.max_z, gap / stderr_);
            ++report.entries_tested;
        }
    }
    return report;
}

double eigenvalue_bracket_violation(const Graph& g, const Graph& h, double epsilon, double gamma) {
    const DenseOracle og(g);
    const DenseOracle oh(h);
    const auto& lg = og.eigenvalues();
    const auto& lh = oh.eigenvalues();
    const double slack = 1e-9 * std::max(1.0, lg.maxCoeff());
    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < lg.size(); ++i) {
        const double lo = (1.0 - epsilon) * lg[i] - epsilon * gamma;
        const double hi = (1.0 + epsilon) * lg[i] + epsilon * gamma;
        worst = std::max({worst, lo - lh[i] - slack, lh[i] - hi - slack});
    }
    return worst;
}

}  // namespace disre
