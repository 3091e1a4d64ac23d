#pragma once
// Axis-aligned rectangle range counting, uniform with-replacement subset
// sampling, canonical-subset enumeration, and exact maximum discrepancy
// between a point set and a sample of it.
//
// Everything here leans on one combinatorial fact: which points a closed
// rectangle captures depends only on which run of sorted distinct coordinate
// values it covers in each dimension. Shrinking a rectangle to the bounding
// box of the points inside it (its canonical rectangle, touching at most 2
// points per dimension) never changes membership, so a sweep over coordinate
// runs sees every realizable subset -- at most n^{2d} nonempty ones, plus
// the empty set.
//
// max_discrepancy exploits the same fact without materializing candidate
// rectangles: it fixes a value run in each dimension but the first and
// solves the first dimension exactly as a signed maximum-subarray problem in
// integer arithmetic, which keeps the n = 100, d = 2 experiments exact and
// fast. enumerate_canonical_subsets is the literal budget-guarded sweep for
// desk-scale instances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tailbound/bounds.hpp"
#include "tailbound/point_set.hpp"
#include "tailbound/rng.hpp"

namespace tailbound {

// Thrown when an enumeration would exceed its candidate budget.
class BudgetError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

struct Interval {
    double lo = 0.0, hi = 0.0;
};

// Closed axis-aligned box [lo_1, hi_1] x ... x [lo_d, hi_d]. Points exactly
// on a face count as inside.
class Rectangle {
  public:
    explicit Rectangle(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
        if (intervals_.empty())
            throw std::invalid_argument("Rectangle: need at least one interval");
        for (const auto& iv : intervals_)
            if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo <= iv.hi))
                throw std::invalid_argument("Rectangle: every interval needs finite lo <= hi");
    }

    std::size_t dimension() const { return intervals_.size(); }
    const Interval& interval(std::size_t j) const { return intervals_[j]; }
    const std::vector<Interval>& intervals() const { return intervals_; }

    bool contains(std::span<const double> p) const {
        for (std::size_t j = 0; j < intervals_.size(); ++j)
            if (p[j] < intervals_[j].lo || p[j] > intervals_[j].hi) return false;
        return true;
    }

  private:
    std::vector<Interval> intervals_;
};

// q(P) = |P intersect R|, duplicates counted.
inline std::size_t count_query(const PointSet& points, const Rectangle& rect) {
    if (rect.dimension() != points.dimension())
        throw std::domain_error("count_query: rectangle dimension does not match point set");
    std::size_t count = 0;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (rect.contains(points.point(i))) ++count;
    return count;
}

// k points drawn independently and uniformly WITH replacement, so k may
// exceed |P|. Deterministic given the rng state.
inline PointSet sample_subset(const PointSet& points, std::size_t k, Rng& rng) {
    if (k == 0) throw std::domain_error("sample_subset: k must be >= 1");
    const std::size_t d = points.dimension();
    std::vector<double> coords;
    coords.reserve(k * d);
    for (std::size_t t = 0; t < k; ++t) {
        const auto p = points.point(rng.below(points.size()));
        coords.insert(coords.end(), p.begin(), p.end());
    }
    return PointSet(k, d, std::move(coords));
}

// A rectangle-realizable subset of a point set, shrunk to canonical form:
// the minimal closed rectangle containing the members, pinned by at most 2d
// of them. The empty subset has no rectangle.
struct CanonicalSubset {
    std::vector<std::uint32_t> members;           // sorted point indices
    std::vector<std::uint32_t> defining_indices;  // <= 2d members touching a face
    std::optional<Rectangle> rectangle;
};

namespace detail {

inline CanonicalSubset make_canonical_subset(const PointSet& points,
                                             std::vector<std::uint32_t> members) {
    CanonicalSubset subset;
    subset.members = std::move(members);
    if (subset.members.empty()) return subset;

    const std::size_t d = points.dimension();
    std::vector<Interval> box(d);
    std::vector<std::uint32_t> defining;
    for (std::size_t j = 0; j < d; ++j) {
        std::uint32_t lo_idx = subset.members.front(), hi_idx = subset.members.front();
        for (std::uint32_t i : subset.members) {
            if (points.coord(i, j) < points.coord(lo_idx, j)) lo_idx = i;
            if (points.coord(i, j) > points.coord(hi_idx, j)) hi_idx = i;
        }
        box[j] = {points.coord(lo_idx, j), points.coord(hi_idx, j)};
        defining.push_back(lo_idx);
        defining.push_back(hi_idx);
    }
    std::sort(defining.begin(), defining.end());
    defining.erase(std::unique(defining.begin(), defining.end()), defining.end());
    subset.defining_indices = std::move(defining);
    subset.rectangle = Rectangle(std::move(box));
    return subset;
}

inline std::string membership_key(const std::vector<std::uint32_t>& members) {
    std::string key;
    key.reserve(members.size() * sizeof(std::uint32_t));
    for (std::uint32_t i : members)
        key.append(reinterpret_cast<const char*>(&i), sizeof(std::uint32_t));
    return key;
}

// Sorted distinct coordinate values per dimension, and for each point the
// index of its value in that list.
struct ValueGrid {
    std::vector<std::vector<double>> values;       // per dimension
    std::vector<std::vector<std::size_t>> index;   // per point set passed in

    static ValueGrid build(std::span<const PointSet* const> sets) {
        const std::size_t d = sets.front()->dimension();
        ValueGrid grid;
        grid.values.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            auto& vals = grid.values[j];
            for (const PointSet* ps : sets)
                for (std::size_t i = 0; i < ps->size(); ++i) vals.push_back(ps->coord(i, j));
            std::sort(vals.begin(), vals.end());
            vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        }
        for (const PointSet* ps : sets) {
            std::vector<std::size_t> idx(ps->size() * d);
            for (std::size_t i = 0; i < ps->size(); ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    const auto& vals = grid.values[j];
                    idx[i * d + j] = static_cast<std::size_t>(
                        std::lower_bound(vals.begin(), vals.end(), ps->coord(i, j)) - vals.begin());
                }
            grid.index.push_back(std::move(idx));
        }
        return grid;
    }

    std::size_t value_index(std::size_t set, std::size_t point, std::size_t dim, std::size_t d) const {
        return index[set][point * d + dim];
    }
};

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

inline std::uint64_t interval_pair_count(std::size_t m) {
    return static_cast<std::uint64_t>(m) * (m + 1) / 2;
}

struct SubarrayMax {
    std::int64_t sum = 0;  // empty subarray allowed, so never negative
    std::size_t begin = 0, end = 0;
    bool nonempty = false;
};

// First maximal subarray in scan order; deterministic.
inline SubarrayMax max_subarray(std::span<const std::int64_t> w) {
    SubarrayMax best;
    std::int64_t running = 0;
    std::size_t start = 0;
    for (std::size_t c = 0; c < w.size(); ++c) {
        running += w[c];
        if (running > best.sum) best = {running, start, c, true};
        if (running < 0) {
            running = 0;
            start = c + 1;
        }
    }
    return best;
}

}  // namespace detail

// The subset of P inside R, shrunk to its canonical rectangle. Shrinking
// never changes membership.
inline CanonicalSubset canonicalize(const PointSet& points, const Rectangle& rect) {
    if (rect.dimension() != points.dimension())
        throw std::domain_error("canonicalize: rectangle dimension does not match point set");
    std::vector<std::uint32_t> members;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (rect.contains(points.point(i))) members.push_back(static_cast<std::uint32_t>(i));
    return detail::make_canonical_subset(points, std::move(members));
}

// Every subset of P realizable by some axis-aligned rectangle, the empty
// subset included, deduplicated by membership. Sweeps all rectangles whose
// faces sit at point coordinates: per dimension every (lo, hi) value pair
// with lo <= hi. Intended for desk scale; candidate combinations above
// `budget` raise BudgetError.
inline std::vector<CanonicalSubset> enumerate_canonical_subsets(
    const PointSet& points, std::uint64_t budget = kDefaultEnumerationBudget) {
    const std::size_t n = points.size();
    const std::size_t d = points.dimension();
    const PointSet* sets[] = {&points};
    const auto grid = detail::ValueGrid::build(sets);

    std::uint64_t candidates = 1;
    for (std::size_t j = 0; j < d; ++j)
        candidates = detail::saturating_mul(candidates, detail::interval_pair_count(grid.values[j].size()));
    if (candidates > budget) {
        std::ostringstream msg;
        msg << "enumerate_canonical_subsets: " << candidates
            << " candidate rectangles exceed the enumeration budget of " << budget;
        throw BudgetError(msg.str());
    }

    // All (lo, hi) index pairs per dimension, lo <= hi.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pairs(d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t a = 0; a < grid.values[j].size(); ++a)
            for (std::size_t b = a; b < grid.values[j].size(); ++b) pairs[j].push_back({a, b});

    std::vector<CanonicalSubset> result;
    std::unordered_set<std::string> seen;
    result.push_back(CanonicalSubset{});  // empty subset is always realizable
    seen.insert(std::string());

    std::vector<std::size_t> combo(d, 0);
    std::vector<std::uint32_t> members;
    for (;;) {
        members.clear();
        for (std::size_t i = 0; i < n; ++i) {
            bool inside = true;
            for (std::size_t j = 0; j < d; ++j) {
                const auto [lo, hi] = pairs[j][combo[j]];
                const std::size_t v = grid.value_index(0, i, j, d);
                if (v < lo || v > hi) {
                    inside = false;
                    break;
                }
            }
            if (inside) members.push_back(static_cast<std::uint32_t>(i));
        }
        if (seen.insert(detail::membership_key(members)).second)
            result.push_back(detail::make_canonical_subset(points, members));

        std::size_t j = 0;
        for (; j < d; ++j) {
            if (++combo[j] < pairs[j].size()) break;
            combo[j] = 0;
        }
        if (j == d) break;
    }
    return result;
}

struct DiscrepancyReport {
    double max_discrepancy = 0.0;
    CanonicalSubset witness;  // the subset of P inside the maximizing rectangle
    std::optional<Rectangle> witness_rectangle;
    std::size_t witness_full_count = 0;    // q(P) at the witness
    std::size_t witness_sample_count = 0;  // q(S) at the witness
    // Candidate run combinations the scan covers, empty rectangle included.
    // Every realizable subset is hit at least once, so this never undercounts
    // the realizable family and never exceeds n^{2d} + 1 for n distinct
    // points of P united with S.
    std::uint64_t subsets_examined = 0;
};

// Exact maximum over all axis-aligned rectangle queries of
// |q(P)/|P| - q(S)/|S||. Faces only matter at coordinates of P united with
// S, so the scan fixes a coordinate run per dimension beyond the first and
// maximizes over first-dimension runs by signed maximum-subarray on the
// exact integer weights q_col(P)*|S| - q_col(S)*|P|.
inline DiscrepancyReport max_discrepancy(const PointSet& points, const PointSet& sample,
                                         std::uint64_t budget = kDefaultEnumerationBudget) {
    if (points.dimension() != sample.dimension())
        throw std::domain_error("max_discrepancy: point sets must share a dimension");
    const std::size_t d = points.dimension();
    const std::size_t np = points.size(), ns = sample.size();
    const PointSet* sets[] = {&points, &sample};
    const auto grid = detail::ValueGrid::build(sets);

    // Budget meters the interval combinations actually iterated: the scan
    // handles dimension 0 in one pass, so only dimensions 1..d-1 multiply.
    std::uint64_t outer_combos = 1;
    for (std::size_t j = 1; j < d; ++j)
        outer_combos = detail::saturating_mul(outer_combos, detail::interval_pair_count(grid.values[j].size()));
    if (outer_combos > budget) {
        std::ostringstream msg;
        msg << "max_discrepancy: " << outer_combos
            << " interval combinations exceed the enumeration budget of " << budget;
        throw BudgetError(msg.str());
    }

    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pairs(d);
    for (std::size_t j = 1; j < d; ++j)
        for (std::size_t a = 0; a < grid.values[j].size(); ++a)
            for (std::size_t b = a; b < grid.values[j].size(); ++b) pairs[j].push_back({a, b});

    const std::size_t m0 = grid.values[0].size();
    std::vector<std::int64_t> weight(m0);

    std::int64_t best = 0;
    std::size_t best_begin = 0, best_end = 0;
    std::vector<std::pair<std::size_t, std::size_t>> best_outer;
    bool have_witness = false;

    std::vector<std::size_t> combo(d > 1 ? d - 1 : 0, 0);
    for (;;) {
        std::fill(weight.begin(), weight.end(), std::int64_t{0});
        auto in_outer = [&](std::size_t set, std::size_t i) {
            for (std::size_t j = 1; j < d; ++j) {
                const auto [lo, hi] = pairs[j][combo[j - 1]];
                const std::size_t v = grid.value_index(set, i, j, d);
                if (v < lo || v > hi) return false;
            }
            return true;
        };
        for (std::size_t i = 0; i < np; ++i)
            if (in_outer(0, i)) weight[grid.value_index(0, i, 0, d)] += static_cast<std::int64_t>(ns);
        for (std::size_t i = 0; i < ns; ++i)
            if (in_outer(1, i)) weight[grid.value_index(1, i, 0, d)] -= static_cast<std::int64_t>(np);

        for (int sign = 0; sign < 2; ++sign) {
            if (sign == 1)
                for (auto& w : weight) w = -w;
            const auto sub = detail::max_subarray(weight);
            if (sub.nonempty && sub.sum > best) {
                best = sub.sum;
                best_begin = sub.begin;
                best_end = sub.end;
                best_outer.clear();
                for (std::size_t j = 1; j < d; ++j) best_outer.push_back(pairs[j][combo[j - 1]]);
                have_witness = true;
            }
        }

        std::size_t j = 0;
        for (; j < combo.size(); ++j) {
            if (++combo[j] < pairs[j + 1].size()) break;
            combo[j] = 0;
        }
        if (j == combo.size()) break;
    }

    DiscrepancyReport report;
    report.max_discrepancy =
        static_cast<double>(best) / (static_cast<double>(np) * static_cast<double>(ns));
    std::uint64_t examined = detail::interval_pair_count(m0);
    for (std::size_t j = 1; j < d; ++j)
        examined = detail::saturating_mul(examined, detail::interval_pair_count(grid.values[j].size()));
    report.subsets_examined =
        examined == std::numeric_limits<std::uint64_t>::max() ? examined : examined + 1;  // + empty

    if (have_witness && best > 0) {
        std::vector<Interval> box(d);
        box[0] = {grid.values[0][best_begin], grid.values[0][best_end]};
        for (std::size_t j = 1; j < d; ++j)
            box[j] = {grid.values[j][best_outer[j - 1].first], grid.values[j][best_outer[j - 1].second]};
        Rectangle rect(std::move(box));
        report.witness = canonicalize(points, rect);
        report.witness_full_count = count_query(points, rect);
        report.witness_sample_count = count_query(sample, rect);
        report.witness_rectangle = std::move(rect);
    }
    return report;
}

struct EpsilonSampleCheck {
    std::int64_t sample_size = 0;
    bool passed = false;
    DiscrepancyReport report;
};

// Draws the planned-size sample and checks the discrepancy guarantee
// exactly: k = plan_range_sample(n, d, eps, delta), S ~ uniform with
// replacement, passed iff max_discrepancy(P, S) <= eps.
inline EpsilonSampleCheck epsilon_sample_check(const PointSet& points, double epsilon, double delta,
                                               Rng& rng,
                                               std::uint64_t budget = kDefaultEnumerationBudget) {
    const auto k = plan_range_sample(static_cast<std::int64_t>(points.size()),
                                     static_cast<std::int64_t>(points.dimension()), epsilon, delta);
    const PointSet sample = sample_subset(points, static_cast<std::size_t>(k), rng);
    EpsilonSampleCheck check;
    check.sample_size = k;
    check.report = max_discrepancy(points, sample, budget);
    check.passed = check.report.max_discrepancy <= epsilon;
    return check;
}

}  // namespace tailbound
