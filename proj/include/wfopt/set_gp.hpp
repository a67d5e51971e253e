#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wfopt/diffevo.hpp"
#include "wfopt/geometry.hpp"

namespace wfopt {

struct Hyperparams {
    double length_scale = 1.0;     // l, meters
    double signal_variance = 1.0;  // sigma^2
    double noise_variance = 0.0;   // sigma_n^2

    void validate() const {
        if (!(length_scale > 0.0)) throw std::invalid_argument("gp: length_scale must be positive");
        if (!(signal_variance > 0.0))
            throw std::invalid_argument("gp: signal_variance must be positive");
        if (!(noise_variance >= 0.0))
            throw std::invalid_argument("gp: noise_variance must be >= 0");
    }
};

// Search box for hyperparameter fitting; noise is in normalized-target units.
struct HyperparamBounds {
    double length_scale_min = 10.0, length_scale_max = 1e5;
    double signal_variance_min = 1e-3, signal_variance_max = 1e3;
    double noise_variance_min = 1e-8, noise_variance_max = 1.0;
};

// RBF base kernel between two turbine coordinates (noise-free).
inline double base_kernel(const Turbine& a, const Turbine& b, const Hyperparams& h) {
    return h.signal_variance *
           std::exp(-squared_distance(a, b) / (2.0 * h.length_scale * h.length_scale));
}

namespace detail {

// Orders canonical layouts by size then coordinates; fixes the summation
// orientation so set_kernel is exactly symmetric.
inline bool canonical_before(const Layout& a, const Layout& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].x != b[i].x) return a[i].x < b[i].x;
        if (a[i].y != b[i].y) return a[i].y < b[i].y;
    }
    return false;
}

}  // namespace detail

// Mean of pairwise base-kernel values. Summation runs over the canonical
// (sorted) turbine order of both sets with a deterministic loop orientation,
// so the result is bit-identical under member reordering and argument swap.
inline double set_kernel(const Layout& a, const Layout& b, const Hyperparams& h) {
    if (a.empty() || b.empty()) throw std::invalid_argument("set kernel: empty set");
    Layout ca = a.canonical();
    Layout cb = b.canonical();
    if (detail::canonical_before(cb, ca)) std::swap(ca, cb);
    double sum = 0.0;
    for (const auto& x : ca)
        for (const auto& y : cb) sum += base_kernel(x, y, h);
    return sum / (static_cast<double>(ca.size()) * static_cast<double>(cb.size()));
}

// Set covariance of a batch of layouts; noise is added once on the diagonal.
inline Eigen::MatrixXd covariance_matrix(const std::vector<Layout>& sets, const Hyperparams& h) {
    h.validate();
    const auto n = static_cast<Eigen::Index>(sets.size());
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double k = set_kernel(sets[static_cast<std::size_t>(i)],
                                        sets[static_cast<std::size_t>(j)], h);
            K(i, j) = k;
            K(j, i) = k;
        }
        K(i, i) += h.noise_variance;
    }
    return K;
}

namespace detail {

// Cholesky with jitter escalation 1e-10 .. 1e-6 on the diagonal.
inline Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(const Eigen::MatrixXd& K) {
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    double jitter = 1e-10;
    const auto n = K.rows();
    while (llt.info() != Eigen::Success && jitter <= 1e-6) {
        llt.compute(K + jitter * Eigen::MatrixXd::Identity(n, n));
        jitter *= 10.0;
    }
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("gp: covariance not positive definite after jitter escalation");
    return llt;
}

inline double log_marginal_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt,
                                    const Eigen::VectorXd& y) {
    const Eigen::VectorXd alpha = llt.solve(y);
    double log_det = 0.0;
    const auto& L = llt.matrixLLT();
    for (Eigen::Index i = 0; i < L.rows(); ++i) log_det += std::log(L(i, i));
    return -0.5 * y.dot(alpha) - log_det -
           0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
}

// Squared distances between members of every set pair, precomputed once so
// hyperparameter search does not re-walk the layouts per candidate.
class SetDistanceCache {
public:
    explicit SetDistanceCache(const std::vector<Layout>& sets) : n_(sets.size()) {
        pair_d2_.resize(n_ * (n_ + 1) / 2);
        for (std::size_t i = 0; i < n_; ++i) {
            if (sets[i].empty()) throw std::invalid_argument("set kernel: empty set");
            for (std::size_t j = i; j < n_; ++j) {
                auto& d2 = pair_d2_[index(i, j)];
                d2.reserve(sets[i].size() * sets[j].size());
                for (const auto& a : sets[i])
                    for (const auto& b : sets[j]) d2.push_back(squared_distance(a, b));
            }
        }
    }

    // K with noise on the diagonal, for given hyperparameters.
    Eigen::MatrixXd covariance(const Hyperparams& h) const {
        const double inv = 1.0 / (2.0 * h.length_scale * h.length_scale);
        Eigen::MatrixXd K(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i; j < n_; ++j) {
                const auto& d2 = pair_d2_[index(i, j)];
                double sum = 0.0;
                for (double d : d2) sum += std::exp(-d * inv);
                const double k = h.signal_variance * sum / static_cast<double>(d2.size());
                K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k;
                K(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = k;
            }
            K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += h.noise_variance;
        }
        return K;
    }

private:
    std::size_t index(std::size_t i, std::size_t j) const { return i * n_ - i * (i + 1) / 2 + j; }
    std::size_t n_;
    std::vector<std::vector<double>> pair_d2_;
};

}  // namespace detail

// Log marginal likelihood of targets y under the set GP with hyperparams h.
inline double log_marginal_likelihood(const std::vector<Layout>& sets, const Eigen::VectorXd& y,
                                      const Hyperparams& h) {
    if (static_cast<std::size_t>(y.size()) != sets.size())
        throw std::invalid_argument("gp: target/set count mismatch");
    const auto llt = detail::cholesky_with_jitter(covariance_matrix(sets, h));
    return detail::log_marginal_from_llt(llt, y);
}

// Training archive: layouts with one target per objective.
struct SetDataset {
    std::vector<Layout> sets;
    Eigen::MatrixXd targets;  // rows = sets, cols = objectives

    void validate() const {
        if (static_cast<std::size_t>(targets.rows()) != sets.size())
            throw std::invalid_argument("dataset: target/set count mismatch");
    }
    std::size_t size() const { return sets.size(); }
    Eigen::Index objectives() const { return targets.cols(); }
};

// Fitted single-objective set GP. Immutable after construction; predictions
// are pure and safe to call concurrently.
class SetGpModel {
public:
    SetGpModel(std::vector<Layout> sets, Eigen::VectorXd raw_targets, Hyperparams h)
        : sets_(std::move(sets)), raw_targets_(std::move(raw_targets)), hyperparams_(h) {
        hyperparams_.validate();
        if (static_cast<std::size_t>(raw_targets_.size()) != sets_.size())
            throw std::invalid_argument("gp: target/set count mismatch");
        if (sets_.size() < 1) throw std::invalid_argument("gp: empty training data");

        target_mean_ = raw_targets_.mean();
        const double var =
            (raw_targets_.array() - target_mean_).square().sum() / raw_targets_.size();
        target_scale_ = var > 0.0 ? std::sqrt(var) : 1.0;
        y_ = (raw_targets_.array() - target_mean_) / target_scale_;

        llt_ = detail::cholesky_with_jitter(covariance_matrix(sets_, hyperparams_));
        alpha_ = llt_.solve(y_);
    }

    struct Prediction {
        double mean = 0.0;
        double variance = 0.0;  // in raw-target units
    };

    Prediction predict(const Layout& query) const {
        if (query.empty()) throw std::invalid_argument("gp: cannot predict an empty set");
        const auto n = static_cast<Eigen::Index>(sets_.size());
        Eigen::VectorXd k(n);
        for (Eigen::Index i = 0; i < n; ++i)
            k[i] = set_kernel(query, sets_[static_cast<std::size_t>(i)], hyperparams_);
        const double mean_norm = k.dot(alpha_);
        const double var_norm =
            set_kernel(query, query, hyperparams_) - k.dot(llt_.solve(k));
        Prediction out;
        out.mean = mean_norm * target_scale_ + target_mean_;
        out.variance = std::max(var_norm, 0.0) * target_scale_ * target_scale_;
        return out;
    }

    double log_marginal() const { return detail::log_marginal_from_llt(llt_, y_); }

    const Hyperparams& hyperparams() const { return hyperparams_; }
    const std::vector<Layout>& training_sets() const { return sets_; }
    const Eigen::VectorXd& raw_targets() const { return raw_targets_; }
    double target_mean() const { return target_mean_; }
    double target_scale() const { return target_scale_; }

private:
    std::vector<Layout> sets_;
    Eigen::VectorXd raw_targets_;
    Hyperparams hyperparams_;
    double target_mean_ = 0.0;
    double target_scale_ = 1.0;
    Eigen::VectorXd y_;      // normalized targets
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;  // K^-1 y
};

// Fits one objective by maximising the log marginal likelihood with
// differential evolution over log10-transformed hyperparameters.
inline SetGpModel fit_gp(const std::vector<Layout>& sets, const Eigen::VectorXd& raw_targets,
                         const HyperparamBounds& bounds, std::uint64_t seed,
                         const DeConfig& de = DeConfig{}) {
    if (sets.size() < 2) throw std::invalid_argument("gp: need at least 2 training sets");

    const double mean = raw_targets.mean();
    const double var = (raw_targets.array() - mean).square().sum() / raw_targets.size();
    const double scale = var > 0.0 ? std::sqrt(var) : 1.0;
    const Eigen::VectorXd y = (raw_targets.array() - mean) / scale;

    const detail::SetDistanceCache cache(sets);

    Eigen::VectorXd lower(3), upper(3);
    lower << std::log10(bounds.length_scale_min), std::log10(bounds.signal_variance_min),
        std::log10(bounds.noise_variance_min);
    upper << std::log10(bounds.length_scale_max), std::log10(bounds.signal_variance_max),
        std::log10(bounds.noise_variance_max);

    auto negative_lml = [&](const Eigen::VectorXd& t) {
        Hyperparams h{std::pow(10.0, t[0]), std::pow(10.0, t[1]), std::pow(10.0, t[2])};
        try {
            const auto llt = detail::cholesky_with_jitter(cache.covariance(h));
            return -detail::log_marginal_from_llt(llt, y);
        } catch (const std::runtime_error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    DeResult best;
    try {
        best = differential_evolution(negative_lml, lower, upper, de, seed);
    } catch (const std::runtime_error&) {
        throw std::runtime_error("gp: every hyperparameter candidate failed Cholesky");
    }
    const Hyperparams h{std::pow(10.0, best.x[0]), std::pow(10.0, best.x[1]),
                        std::pow(10.0, best.x[2])};
    return SetGpModel(sets, raw_targets, h);
}

// One model per objective column.
inline std::vector<SetGpModel> fit(const SetDataset& dataset, const HyperparamBounds& bounds,
                                   std::uint64_t seed, const DeConfig& de = DeConfig{}) {
    dataset.validate();
    std::vector<SetGpModel> models;
    models.reserve(static_cast<std::size_t>(dataset.objectives()));
    for (Eigen::Index j = 0; j < dataset.objectives(); ++j)
        models.push_back(fit_gp(dataset.sets, dataset.targets.col(j), bounds,
                                seed + static_cast<std::uint64_t>(j), de));
    return models;
}

}  // namespace wfopt
