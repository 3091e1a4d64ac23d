#pragma once
// Closed-form tail bounds for sums of independent bounded random variables,
// the elementary inequalities they rest on, and sample-size planners obtained
// by inverting the bounds.
//
// For M = sum of r independent X_i and any alpha > 0:
//
//   width form     Pr[|M - E[M]| > alpha] <= 2 exp( -2 alpha^2 / sum_i Delta_i^2 ),
//                  Delta_i = b_i - a_i when a_i <= X_i <= b_i;
//   iid form       Pr[|M| > alpha]        <= 2 exp( -alpha^2 / (2 r Delta^2) ),
//                  for iid X_i in [-Delta, Delta] with E[X_i] = 0;
//   variance form  Pr[|M - E[M]| > alpha] <= 2 exp( -alpha^2 / (4 sum_i Var[X_i]) ),
//                  valid only for alpha in (0, 2 Var[M] / max_i |X_i - E[X_i]|).
//
// All logarithms here are natural logs. Every function is pure and
// thread-safe: no state, no randomness.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tailbound {

// Widths Delta_i = b_i - a_i of r independent bounded random variables.
struct BoundedVariableSpec {
    std::vector<double> widths;

    explicit BoundedVariableSpec(std::vector<double> w) : widths(std::move(w)) {
        if (widths.empty())
            throw std::invalid_argument("BoundedVariableSpec: widths must be non-empty");
        for (double x : widths)
            if (!(x > 0.0) || !std::isfinite(x))
                throw std::invalid_argument("BoundedVariableSpec: every width must be positive and finite");
    }

    // r variables of equal width.
    static BoundedVariableSpec uniform(std::size_t count, double width) {
        return BoundedVariableSpec(std::vector<double>(count, width));
    }

    std::size_t count() const { return widths.size(); }

    double sum_squared_widths() const {
        double s = 0.0;
        for (double x : widths) s += x * x;
        return s;
    }
};

// r iid variables with |X_i| <= half_width and E[X_i] = 0.
struct IidSpec {
    std::size_t count;
    double half_width;

    IidSpec(std::size_t count_, double half_width_) : count(count_), half_width(half_width_) {
        if (count == 0) throw std::invalid_argument("IidSpec: count must be >= 1");
        if (!(half_width > 0.0) || !std::isfinite(half_width))
            throw std::invalid_argument("IidSpec: half_width must be positive and finite");
    }
};

// Per-variable variances plus the largest possible deviation of any single
// variable from its mean; the variance form is only valid on a window that
// depends on both.
struct VarianceSpec {
    std::vector<double> variances;
    double max_abs_deviation;

    VarianceSpec(std::vector<double> variances_, double max_abs_deviation_)
        : variances(std::move(variances_)), max_abs_deviation(max_abs_deviation_) {
        if (variances.empty())
            throw std::invalid_argument("VarianceSpec: variances must be non-empty");
        if (!(max_abs_deviation > 0.0) || !std::isfinite(max_abs_deviation))
            throw std::invalid_argument("VarianceSpec: max_abs_deviation must be positive and finite");
        const double cap = max_abs_deviation * max_abs_deviation;
        for (double v : variances) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("VarianceSpec: every variance must be non-negative and finite");
            if (v > cap)
                throw std::invalid_argument(
                    "VarianceSpec: a bounded variable's variance cannot exceed max_abs_deviation^2");
        }
    }

    double total_variance() const {
        double s = 0.0;
        for (double v : variances) s += v;
        return s;
    }

    // Open admissibility window (0, upper) for alpha.
    double alpha_window_upper() const { return 2.0 * total_variance() / max_abs_deviation; }
};

// Value of a tail-bound formula. The 2*exp(...) expressions exceed 1 for
// small alpha, so the raw value is kept alongside the clamped probability:
// algebra uses raw, comparisons against empirical frequencies use
// as_probability.
struct TailBound {
    double raw = 0.0;
    double as_probability = 0.0;

    static TailBound from_raw(double raw) {
        if (!(raw >= 0.0)) throw std::domain_error("TailBound: raw value must be non-negative");
        return TailBound{raw, std::min(raw, 1.0)};
    }
};

namespace detail {
inline void require_positive_alpha(double alpha, const char* who) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::domain_error(std::string(who) + ": alpha must be positive and finite");
}
}  // namespace detail

// Pr[|M - E[M]| > alpha] <= 2 exp(-2 alpha^2 / sum_i Delta_i^2).
inline TailBound hoeffding_bound(const BoundedVariableSpec& spec, double alpha) {
    detail::require_positive_alpha(alpha, "hoeffding_bound");
    return TailBound::from_raw(2.0 * std::exp(-2.0 * alpha * alpha / spec.sum_squared_widths()));
}

// Pr[|M| > alpha] <= 2 exp(-alpha^2 / (2 r Delta^2)). Equals the width form
// with every Delta_i = 2 * half_width.
inline TailBound hoeffding_bound_iid(const IidSpec& spec, double alpha) {
    detail::require_positive_alpha(alpha, "hoeffding_bound_iid");
    const double r = static_cast<double>(spec.count);
    return TailBound::from_raw(
        2.0 * std::exp(-alpha * alpha / (2.0 * r * spec.half_width * spec.half_width)));
}

// Pr[|M - E[M]| > alpha] <= 2 exp(-alpha^2 / (4 sum_i Var[X_i])). Rejects
// alpha outside the open window (0, 2 sum Var / max_abs_deviation) that the
// variance form requires.
inline TailBound variance_bound(const VarianceSpec& spec, double alpha) {
    const double total = spec.total_variance();
    if (!(total > 0.0))
        throw std::domain_error("variance_bound: total variance must be positive");
    const double upper = spec.alpha_window_upper();
    if (!(alpha > 0.0) || !(alpha < upper) || !std::isfinite(alpha)) {
        std::ostringstream msg;
        msg << "variance_bound: alpha must lie in the open window (0, " << upper << "); got " << alpha;
        throw std::domain_error(msg.str());
    }
    return TailBound::from_raw(2.0 * std::exp(-alpha * alpha / (4.0 * total)));
}

// Pr[X > alpha] <= E[X] / alpha for non-negative X.
inline TailBound markov_bound(double expectation, double alpha) {
    if (!(expectation >= 0.0) || !std::isfinite(expectation))
        throw std::domain_error("markov_bound: expectation must be non-negative and finite");
    detail::require_positive_alpha(alpha, "markov_bound");
    return TailBound::from_raw(expectation / alpha);
}

// Pr[all t events hold] >= 1 - sum_i (1 - p_i), valid for dependent events.
// Deliberately not clamped below 0: a negative value means the bound is
// vacuous, which callers may want to see.
inline double union_bound(std::span<const double> success_probabilities) {
    double slack = 0.0;
    for (double p : success_probabilities) {
        if (!(p >= 0.0) || !(p <= 1.0))
            throw std::domain_error("union_bound: probabilities must lie in [0, 1]");
        slack += 1.0 - p;
    }
    return 1.0 - slack;
}

inline double union_bound(const std::vector<double>& success_probabilities) {
    return union_bound(std::span<const double>(success_probabilities));
}

struct PerEventBudget {
    double per_event_union;        // gamma <= delta / t
    double per_event_independent;  // gamma <= ln(1/(1-delta)) / t
};

// How much per-event failure probability a total budget delta over t events
// allows: via the union bound versus via exact independence. The union value
// never exceeds the independence value, and for small delta the two are
// nearly identical (delta = 0.01 gives ln(1/0.99) = 0.01005...).
inline PerEventBudget union_vs_independence(double delta, std::int64_t t) {
    if (!(delta > 0.0) || !(delta < 1.0))
        throw std::domain_error("union_vs_independence: delta must lie in (0, 1)");
    if (t < 1) throw std::domain_error("union_vs_independence: t must be >= 1");
    const double td = static_cast<double>(t);
    return PerEventBudget{delta / td, std::log(1.0 / (1.0 - delta)) / td};
}

// exp(x^2/2) - (e^x + e^-x)/2, the gap in the exponential inequality
// cosh(x) <= exp(x^2/2). Non-negative for every admissible x. Admissible
// range is |x| <= 700; past |x| ~ 37.6 the result saturates to +infinity
// because exp(x^2/2) leaves double range while cosh(x) stays finite.
inline double cosh_exp_gap(double x) {
    if (!std::isfinite(x) || std::abs(x) > 700.0)
        throw std::range_error("cosh_exp_gap: |x| must be <= 700");
    return std::exp(0.5 * x * x) - 0.5 * (std::exp(x) + std::exp(-x));
}

namespace detail {
inline std::int64_t ceil_at_least_one(double v) {
    const double c = std::ceil(v);
    return c < 1.0 ? 1 : static_cast<std::int64_t>(c);
}
}  // namespace detail

// Smallest k with 2 exp(-2 eps^2 k) <= gamma, i.e.
// k = ceil( ln(2/gamma) / (2 eps^2) ). Never returns 0.
inline std::int64_t plan_hoeffding_samples(double epsilon, double gamma) {
    if (!(epsilon > 0.0) || !(epsilon < 0.5))
        throw std::domain_error("plan_hoeffding_samples: epsilon must lie in (0, 1/2)");
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw std::domain_error("plan_hoeffding_samples: gamma must lie in (0, 1)");
    return detail::ceil_at_least_one(std::log(2.0 / gamma) / (2.0 * epsilon * epsilon));
}

// Target dimension k = ceil( (8/eps^2) ln(n/delta) ) for preserving all
// pairwise distances of n points to relative error eps with probability
// >= 1 - delta. (The constant follows the union-bound derivation, 8/eps^2;
// a literal (8/eps)^2 reading would give an 8x larger k at eps = 1/2.)
inline std::int64_t plan_jl_dimension(std::int64_t n, double epsilon, double delta) {
    if (n < 2) throw std::domain_error("plan_jl_dimension: n must be >= 2");
    if (!(epsilon > 0.0) || !(epsilon <= 0.5))
        throw std::domain_error("plan_jl_dimension: epsilon must lie in (0, 1/2]");
    if (!(delta > 0.0) || !(delta < 1.0))
        throw std::domain_error("plan_jl_dimension: delta must lie in (0, 1)");
    return detail::ceil_at_least_one(8.0 / (epsilon * epsilon) *
                                     std::log(static_cast<double>(n) / delta));
}

// Sample size k = ceil( (d/eps^2) ln(2n/delta) ) making a uniform
// with-replacement sample of P an eps-approximation for every axis-aligned
// rectangle query, with probability >= 1 - delta.
inline std::int64_t plan_range_sample(std::int64_t n, std::int64_t d, double epsilon, double delta) {
    if (n < 1) throw std::domain_error("plan_range_sample: n must be >= 1");
    if (d < 1) throw std::domain_error("plan_range_sample: d must be >= 1");
    if (!(epsilon > 0.0) || !(epsilon < 0.5))
        throw std::domain_error("plan_range_sample: epsilon must lie in (0, 1/2)");
    if (!(delta > 0.0) || !(delta < 1.0))
        throw std::domain_error("plan_range_sample: delta must lie in (0, 1)");
    return detail::ceil_at_least_one(static_cast<double>(d) / (epsilon * epsilon) *
                                     std::log(2.0 * static_cast<double>(n) / delta));
}

}  // namespace tailbound
