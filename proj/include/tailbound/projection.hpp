#pragma once
// Random linear projection phi : R^d -> R^k from k independent random unit
// vectors u_1..u_k, with phi_i(p) = <p, u_i>. The projection itself is left
// unscaled; the sqrt(d/k) factor that makes distances comparable is applied
// when distortion is measured, so
//
//   ratio(p, p') = sqrt(d/k) * ||phi(p) - phi(p')|| / ||p - p'||
//
// and the all-pairs guarantee under test is ratio in [1 - eps, 1 + eps].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tailbound/point_set.hpp"
#include "tailbound/rng.hpp"

namespace tailbound {

// Uniform draw from the unit sphere S^{d-1}: d standard normals, normalized.
// The all-zero draw (possible in floating point, measure zero in theory) is
// resampled.
inline std::vector<double> sample_unit_vector(std::size_t d, Rng& rng) {
    if (d == 0) throw std::domain_error("sample_unit_vector: d must be >= 1");
    std::vector<double> v(d);
    for (;;) {
        double norm_sq = 0.0;
        for (auto& x : v) {
            x = rng.normal();
            norm_sq += x * x;
        }
        if (norm_sq > 0.0 && std::isfinite(norm_sq)) {
            // Dividing (not multiplying by the inverse) keeps d=1 draws at
            // exactly +/-1.
            const double norm = std::sqrt(norm_sq);
            for (auto& x : v) x /= norm;
            return v;
        }
    }
}

// k random unit vectors in R^d, stored as rows.
class ProjectionBasis {
  public:
    ProjectionBasis(std::size_t k, std::size_t d, std::vector<double> rows)
        : k_(k), d_(d), rows_(std::move(rows)) {
        if (k_ == 0 || d_ == 0)
            throw std::invalid_argument("ProjectionBasis: k and d must be positive");
        if (rows_.size() != k_ * d_)
            throw std::invalid_argument("ProjectionBasis: expected k*d entries");
        for (std::size_t i = 0; i < k_; ++i) {
            double norm_sq = 0.0;
            for (std::size_t j = 0; j < d_; ++j) norm_sq += rows_[i * d_ + j] * rows_[i * d_ + j];
            if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-9)
                throw std::invalid_argument("ProjectionBasis: every row must be a unit vector");
        }
    }

    // Debug basis: the first k standard axes of R^d. With k = d this makes
    // phi an isometry, so every distortion ratio is exactly 1.
    static ProjectionBasis standard_axes(std::size_t k, std::size_t d) {
        if (k == 0 || d == 0 || k > d)
            throw std::invalid_argument("ProjectionBasis::standard_axes: need 1 <= k <= d");
        std::vector<double> rows(k * d, 0.0);
        for (std::size_t i = 0; i < k; ++i) rows[i * d + i] = 1.0;
        return ProjectionBasis(k, d, std::move(rows));
    }

    std::size_t target_dimension() const { return k_; }
    std::size_t source_dimension() const { return d_; }
    std::span<const double> row(std::size_t i) const { return {rows_.data() + i * d_, d_}; }
    std::span<const double> flat() const { return rows_; }

  private:
    std::size_t k_, d_;
    std::vector<double> rows_;
};

// k independent (not necessarily orthogonal) unit vectors, deterministic
// given the rng state.
inline ProjectionBasis make_projection(std::size_t d, std::size_t k, Rng& rng) {
    if (d == 0 || k == 0) throw std::domain_error("make_projection: d and k must be >= 1");
    std::vector<double> rows;
    rows.reserve(k * d);
    for (std::size_t i = 0; i < k; ++i) {
        const auto u = sample_unit_vector(d, rng);
        rows.insert(rows.end(), u.begin(), u.end());
    }
    return ProjectionBasis(k, d, std::move(rows));
}

// Coordinate i of the output is <p, u_i>. Linear in p.
inline std::vector<double> project(const ProjectionBasis& basis, std::span<const double> p) {
    if (p.size() != basis.source_dimension())
        throw std::domain_error("project: point dimension does not match basis");
    std::vector<double> out(basis.target_dimension());
    for (std::size_t i = 0; i < basis.target_dimension(); ++i) {
        const auto u = basis.row(i);
        double dot = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) dot += p[j] * u[j];
        out[i] = dot;
    }
    return out;
}

struct DistortionReport {
    struct PairRatio {
        std::size_t first = 0, second = 0;  // point indices, first < second
        double ratio = 0.0;
    };

    std::vector<PairRatio> pair_ratios;  // lexicographic (i, j) order
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    bool satisfied = false;  // every ratio in [1 - epsilon, 1 + epsilon]
    double epsilon = 0.0;
    std::size_t skipped_pairs = 0;  // coincident pairs, where the guarantee is vacuous
};

// One distortion ratio per unordered pair of distinct points. Pairs with
// ||p - p'|| = 0 are skipped (and counted) rather than failing the report.
inline DistortionReport distortion_report(const PointSet& points, const ProjectionBasis& basis,
                                          double epsilon) {
    if (points.dimension() != basis.source_dimension())
        throw std::domain_error("distortion_report: point dimension does not match basis");
    if (!(epsilon > 0.0) || !(epsilon <= 0.5))
        throw std::domain_error("distortion_report: epsilon must lie in (0, 1/2]");

    const std::size_t n = points.size();
    const std::size_t k = basis.target_dimension();
    const double scale = std::sqrt(static_cast<double>(points.dimension()) / static_cast<double>(k));

    std::vector<double> projected(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto q = project(basis, points.point(i));
        std::copy(q.begin(), q.end(), projected.begin() + static_cast<std::ptrdiff_t>(i * k));
    }

    DistortionReport report;
    report.epsilon = epsilon;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double dist_sq = 0.0;
            const auto pi = points.point(i);
            const auto pj = points.point(j);
            for (std::size_t c = 0; c < pi.size(); ++c) {
                const double diff = pi[c] - pj[c];
                dist_sq += diff * diff;
            }
            if (dist_sq == 0.0) {
                ++report.skipped_pairs;
                continue;
            }
            double proj_sq = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                const double diff = projected[i * k + c] - projected[j * k + c];
                proj_sq += diff * diff;
            }
            const double ratio = scale * std::sqrt(proj_sq) / std::sqrt(dist_sq);
            if (report.pair_ratios.empty()) {
                report.min_ratio = report.max_ratio = ratio;
            } else {
                report.min_ratio = std::min(report.min_ratio, ratio);
                report.max_ratio = std::max(report.max_ratio, ratio);
            }
            report.pair_ratios.push_back({i, j, ratio});
        }
    }
    if (report.pair_ratios.empty())
        throw std::domain_error("distortion_report: no pair of distinct points to evaluate");
    report.satisfied = report.min_ratio >= 1.0 - epsilon && report.max_ratio <= 1.0 + epsilon;
    return report;
}

struct MomentEstimate {
    double mean = 0.0;
    double variance = 0.0;  // sample variance over trials
};

// Monte Carlo estimate of the per-coordinate moments of
// X = (d/k) <u, v>^2 for a fixed unit direction v and fresh random unit u
// each trial. By spherical symmetry the direction does not matter, so the
// first axis is used. E[X] = 1/k; the variance estimate is what it is and
// callers compare it against whatever bound they are probing.
inline MomentEstimate squared_ratio_moments(std::size_t d, std::size_t k, std::size_t trials,
                                            Rng& rng) {
    if (d == 0 || k == 0) throw std::domain_error("squared_ratio_moments: d and k must be >= 1");
    if (trials == 0) throw std::domain_error("squared_ratio_moments: trials must be >= 1");
    const double factor = static_cast<double>(d) / static_cast<double>(k);
    double mean = 0.0, m2 = 0.0;  // Welford
    for (std::size_t t = 0; t < trials; ++t) {
        const auto u = sample_unit_vector(d, rng);
        const double x = factor * u[0] * u[0];
        const double delta = x - mean;
        mean += delta / static_cast<double>(t + 1);
        m2 += delta * (x - mean);
    }
    const double variance = trials > 1 ? m2 / static_cast<double>(trials - 1) : 0.0;
    return MomentEstimate{mean, variance};
}

}  // namespace tailbound
