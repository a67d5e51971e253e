#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace wfopt {

using ObjVec = std::vector<double>;

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Partial expectation E[(c - Y)+] for Y ~ N(mu, sigma^2).
// Well defined at sigma = 0, where it degenerates to max(c - mu, 0).
inline double partial_expectation(double c, double mu, double sigma) {
    if (sigma <= 0.0) return std::max(c - mu, 0.0);
    const double z = (c - mu) / sigma;
    return sigma * normal_pdf(z) + (c - mu) * normal_cdf(z);
}

// Strict Pareto dominance under minimisation.
inline bool dominates(const ObjVec& a, const ObjVec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dominates: dimension mismatch");
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strict = true;
    }
    return strict;
}

namespace detail {

// Exact 2-D hypervolume: sweep by first objective, accumulate rectangles.
inline double hypervolume_2d(std::vector<ObjVec> points, const ObjVec& ref) {
    std::sort(points.begin(), points.end(),
              [](const ObjVec& a, const ObjVec& b) { return a[0] < b[0]; });
    double hv = 0.0;
    double upper2 = ref[1];
    for (const auto& p : points) {
        if (p[1] < upper2) {
            hv += (ref[0] - p[0]) * (upper2 - p[1]);
            upper2 = p[1];
        }
    }
    return hv;
}

// Dimension-sweep hypervolume for w >= 3 (small point counts only).
inline double hypervolume_nd(std::vector<ObjVec> points, ObjVec ref) {
    const std::size_t w = ref.size();
    if (points.empty()) return 0.0;
    if (w == 1) {
        double best = ref[0];
        for (const auto& p : points) best = std::min(best, p[0]);
        return ref[0] - best;
    }
    if (w == 2) return hypervolume_2d(std::move(points), ref);

    std::sort(points.begin(), points.end(),
              [w](const ObjVec& a, const ObjVec& b) { return a[w - 1] < b[w - 1]; });
    ObjVec sub_ref(ref.begin(), ref.end() - 1);
    double hv = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const double z_lo = points[k][w - 1];
        const double z_hi = (k + 1 < points.size()) ? points[k + 1][w - 1] : ref[w - 1];
        if (z_hi <= z_lo) continue;
        std::vector<ObjVec> slice;
        slice.reserve(k + 1);
        for (std::size_t i = 0; i <= k; ++i)
            slice.emplace_back(points[i].begin(), points[i].end() - 1);
        hv += hypervolume_nd(std::move(slice), sub_ref) * (z_hi - z_lo);
    }
    return hv;
}

}  // namespace detail

// Hypervolume dominated by `points` and bounded by `ref` (minimisation).
// Every point must be component-wise strictly below the reference.
inline double hypervolume(const std::vector<ObjVec>& points, const ObjVec& ref) {
    for (const auto& p : points) {
        if (p.size() != ref.size())
            throw std::invalid_argument("hypervolume: dimension mismatch");
        for (std::size_t i = 0; i < p.size(); ++i)
            if (!(p[i] < ref[i]))
                throw std::invalid_argument("hypervolume: point not dominated by reference");
    }
    if (points.empty()) return 0.0;
    if (ref.size() == 2) return detail::hypervolume_2d(points, ref);
    return detail::hypervolume_nd(points, ref);
}

// HV(P u {y}) - HV(P); zero when y is dominated or outside the reference box.
inline double hv_improvement(const std::vector<ObjVec>& points, const ObjVec& ref,
                             const ObjVec& candidate) {
    if (candidate.size() != ref.size())
        throw std::invalid_argument("hv_improvement: dimension mismatch");
    for (std::size_t i = 0; i < candidate.size(); ++i)
        if (!(candidate[i] < ref[i])) return 0.0;
    for (const auto& p : points)
        if (dominates(p, candidate) || p == candidate) return 0.0;
    std::vector<ObjVec> augmented = points;
    augmented.push_back(candidate);
    return hypervolume(augmented, ref) - hypervolume(points, ref);
}

// Independent Gaussian posterior over objective space.
struct PredictiveBox {
    ObjVec mean;
    ObjVec stddev;

    void validate() const {
        if (mean.size() != stddev.size())
            throw std::invalid_argument("predictive box: dimension mismatch");
        for (double s : stddev)
            if (!(s >= 0.0)) throw std::invalid_argument("predictive box: stddev must be >= 0");
    }
};

// Exact two-objective EHVI.
//
// Writing the hypervolume improvement as an integral over the improvement
// region and swapping integration order gives
//   EHVI = integral over the non-dominated region below r of
//          CDF_1(u1) * CDF_2(u2) du,
// which decomposes into vertical strips of the attainment staircase, each
// contributing a product of one-dimensional partial expectations.
inline double ehvi_exact_2d(const std::vector<ObjVec>& points, const ObjVec& ref,
                            const PredictiveBox& box) {
    std::vector<ObjVec> sorted;
    for (const auto& p : points)
        if (p[0] < ref[0] && p[1] < ref[1]) sorted.push_back(p);
    std::sort(sorted.begin(), sorted.end(),
              [](const ObjVec& a, const ObjVec& b) { return a[0] < b[0]; });
    // keep the non-dominated staircase (second coordinate strictly decreasing)
    std::vector<ObjVec> stair;
    for (const auto& p : sorted)
        if (stair.empty() || p[1] < stair.back()[1]) {
            if (!stair.empty() && p[0] == stair.back()[0])
                stair.back() = p;
            else
                stair.push_back(p);
        }

    auto psi1 = [&](double c) { return partial_expectation(c, box.mean[0], box.stddev[0]); };
    auto psi2 = [&](double c) { return partial_expectation(c, box.mean[1], box.stddev[1]); };

    double total = 0.0;
    double height = ref[1];  // u2 upper bound for the strip left of the first point
    double left = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= stair.size(); ++k) {
        const double right = (k < stair.size()) ? stair[k][0] : ref[0];
        if (right > left) {
            const double width = psi1(right) - (std::isinf(left) ? 0.0 : psi1(left));
            total += width * psi2(height);
        }
        if (k < stair.size()) {
            left = std::max(left, right);
            height = stair[k][1];
        }
    }
    return std::max(total, 0.0);
}

// Monte Carlo EHVI for any objective count; used as the w > 2 fallback.
inline double ehvi_monte_carlo(const std::vector<ObjVec>& points, const ObjVec& ref,
                               const PredictiveBox& box, std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t w = ref.size();
    double sum = 0.0;
    ObjVec y(w);
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t i = 0; i < w; ++i) y[i] = box.mean[i] + box.stddev[i] * gauss(rng);
        sum += hv_improvement(points, ref, y);
    }
    return sum / static_cast<double>(samples);
}

// Expected hypervolume improvement of a candidate with independent Gaussian
// posterior `box`. Exact for two objectives; Monte Carlo otherwise.
inline double ehvi(const std::vector<ObjVec>& points, const ObjVec& ref, const PredictiveBox& box,
                   std::size_t mc_samples = 100000, std::uint64_t mc_seed = 0) {
    box.validate();
    if (box.mean.size() != ref.size())
        throw std::invalid_argument("ehvi: dimension mismatch");
    if (ref.size() == 2) return ehvi_exact_2d(points, ref, box);
    return ehvi_monte_carlo(points, ref, box, mc_samples, mc_seed);
}

// Reference point: component-wise worst candidate value pushed out by
// `margin` in shifted-positive space, so every candidate ends strictly
// inside the reference box.
inline ObjVec update_reference(const std::vector<ObjVec>& candidates, double margin = 0.1) {
    if (candidates.empty())
        throw std::invalid_argument("update_reference: empty candidate list");
    if (!(margin > 0.0)) throw std::invalid_argument("update_reference: margin must be positive");
    const std::size_t w = candidates.front().size();
    ObjVec ref(w);
    for (std::size_t i = 0; i < w; ++i) {
        double worst = -std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : candidates) {
            if (c.size() != w) throw std::invalid_argument("update_reference: dimension mismatch");
            worst = std::max(worst, c[i]);
            best = std::min(best, c[i]);
        }
        const double shift = best <= 0.0 ? 1.0 - best : 0.0;
        ref[i] = (worst + shift) * (1.0 + margin) - shift;
    }
    return ref;
}

// Archive of mutually non-dominated objective vectors bounded by a
// reference point (canonical minimisation space).
class ParetoArchive {
public:
    explicit ParetoArchive(ObjVec reference) : ref_(std::move(reference)) {}

    // Inserts y if non-dominated; prunes newly dominated members.
    // Returns false (archive unchanged) for dominated or duplicate points.
    bool insert(const ObjVec& y) {
        if (y.size() != ref_.size())
            throw std::invalid_argument("archive: dimension mismatch");
        for (std::size_t i = 0; i < y.size(); ++i)
            if (!(y[i] < ref_[i])) return false;
        for (const auto& p : points_)
            if (dominates(p, y) || p == y) return false;
        std::erase_if(points_, [&y](const ObjVec& p) { return dominates(y, p); });
        points_.push_back(y);
        return true;
    }

    const std::vector<ObjVec>& points() const { return points_; }
    const ObjVec& reference() const { return ref_; }

    double hypervolume() const { return wfopt::hypervolume(points_, ref_); }
    double hv_improvement(const ObjVec& y) const { return wfopt::hv_improvement(points_, ref_, y); }
    double ehvi(const PredictiveBox& box, std::size_t mc_samples = 100000,
                std::uint64_t mc_seed = 0) const {
        return wfopt::ehvi(points_, ref_, box, mc_samples, mc_seed);
    }

private:
    std::vector<ObjVec> points_;
    ObjVec ref_;
};

// Non-dominated filter of a batch of objective vectors against a reference.
inline ParetoArchive non_dominated(const std::vector<ObjVec>& candidates, const ObjVec& ref) {
    ParetoArchive archive(ref);
    for (const auto& c : candidates) archive.insert(c);
    return archive;
}

}  // namespace wfopt
