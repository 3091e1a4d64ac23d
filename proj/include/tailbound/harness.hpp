#pragma once
// Seeded Monte Carlo experiment runner. Each experiment simulates some
// guarantee many times, counts failures, and compares the empirical failure
// rate against the matching theoretical bound with the fixed verdict rule
//
//   pass  iff  empirical_rate <= bound + 3 * sqrt(rate * (1 - rate) / trials).
//
// Determinism contract: results are a pure function of the config. Trial t
// seeds its own generator with derive_seed(master_seed, t) and fixed inputs
// (the epsilon-sample base set, the fixed-query point set) come from their
// own reserved stream, so the worker count never changes a single output
// byte.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tailbound/bounds.hpp"
#include "tailbound/point_set.hpp"
#include "tailbound/projection.hpp"
#include "tailbound/rangespace.hpp"
#include "tailbound/rng.hpp"

namespace tailbound {

enum class ExperimentKind { Tail, Jl, Epsample, FixedQuery };
enum class DataModel { Gaussian, UniformBox, FromFile };
enum class TailFamily { Bernoulli, Uniform };

inline const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Tail: return "tail";
        case ExperimentKind::Jl: return "jl";
        case ExperimentKind::Epsample: return "epsample";
        case ExperimentKind::FixedQuery: return "fixed-query";
    }
    return "?";
}

inline const char* to_string(DataModel model) {
    switch (model) {
        case DataModel::Gaussian: return "gaussian";
        case DataModel::UniformBox: return "uniform-box";
        case DataModel::FromFile: return "from-file";
    }
    return "?";
}

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Tail;
    std::uint64_t master_seed = 1;
    std::size_t trials = 100;
    std::size_t threads = 1;

    // point data (jl / epsample / fixed-query); the default model depends on
    // the experiment: gaussian for jl, uniform-box for the range-space runs
    std::optional<DataModel> data_model;
    std::string points_file;

    std::size_t n = 100;
    std::size_t d = 2;
    std::optional<std::size_t> k;  // overrides the planner when set
    double eps = 0.1;
    double delta = 0.1;

    // tail experiment
    TailFamily family = TailFamily::Bernoulli;
    std::size_t r = 10;
    double p = 0.5;
    double lo = 0.0, hi = 1.0;  // uniform family support
    double alpha = 1.0;

    // fixed-query experiment
    std::optional<double> gamma;      // per-query budget; sets k via the planner
    std::optional<Rectangle> rect;    // defaults to the lower half of the unit box

    std::uint64_t enumeration_budget = kDefaultEnumerationBudget;

    // debug contracts, reachable from the CLI
    bool debug_orthonormal_basis = false;  // jl: first-k-axes basis instead of random
    bool debug_sample_equals_p = false;    // epsample: S = P, discrepancy 0
};

struct AggregateResult {
    std::string kind;
    std::size_t trials = 0;
    std::size_t failures = 0;
    double empirical_failure_rate = 0.0;
    double theoretical_bound = 0.0;
    double standard_error = 0.0;
    bool verdict = false;
    std::uint64_t seed = 0;
    std::string params;  // semicolon-separated key=value record of the run
};

// CSV floating-point convention: 10 significant digits.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

namespace detail {

// Stream tag for inputs generated once per experiment rather than per trial.
inline constexpr std::uint64_t kFixedInputStream = 0xfffffffffffffff0ULL;

inline AggregateResult aggregate(const char* kind, std::size_t trials, std::size_t failures,
                                 double bound, std::uint64_t seed, std::string params) {
    AggregateResult res;
    res.kind = kind;
    res.trials = trials;
    res.failures = failures;
    res.empirical_failure_rate = static_cast<double>(failures) / static_cast<double>(trials);
    res.theoretical_bound = bound;
    res.standard_error = std::sqrt(res.empirical_failure_rate * (1.0 - res.empirical_failure_rate) /
                                   static_cast<double>(trials));
    res.verdict = res.empirical_failure_rate <= bound + 3.0 * res.standard_error;
    res.seed = seed;
    res.params = std::move(params);
    return res;
}

// Runs `fails(t)` for t in [0, trials) on up to `threads` workers and counts
// the true results. Static partition + commutative integer sum, so the
// worker count cannot change the outcome.
template <class TrialFn>
std::size_t count_failures(std::size_t trials, std::size_t threads, TrialFn&& fails) {
    threads = std::clamp<std::size_t>(threads, 1, trials);
    if (threads == 1) {
        std::size_t failures = 0;
        for (std::size_t t = 0; t < trials; ++t)
            if (fails(t)) ++failures;
        return failures;
    }
    std::vector<std::size_t> partial(threads, 0);
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            const std::size_t begin = trials * w / threads;
            const std::size_t end = trials * (w + 1) / threads;
            std::size_t local = 0;
            for (std::size_t t = begin; t < end; ++t)
                if (fails(t)) ++local;
            partial[w] = local;
        });
    }
    for (auto& worker : workers) worker.join();
    std::size_t failures = 0;
    for (std::size_t c : partial) failures += c;
    return failures;
}

inline void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace detail

inline PointSet gaussian_points(std::size_t n, std::size_t d, Rng& rng) {
    std::vector<double> coords(n * d);
    for (auto& c : coords) c = rng.normal();
    return PointSet(n, d, std::move(coords));
}

inline PointSet uniform_box_points(std::size_t n, std::size_t d, Rng& rng) {
    std::vector<double> coords(n * d);
    for (auto& c : coords) c = rng.uniform01();
    return PointSet(n, d, std::move(coords));
}

namespace detail {

inline PointSet make_points(const ExperimentConfig& cfg, DataModel fallback, Rng& rng) {
    switch (cfg.data_model.value_or(fallback)) {
        case DataModel::Gaussian: return gaussian_points(cfg.n, cfg.d, rng);
        case DataModel::UniformBox: return uniform_box_points(cfg.n, cfg.d, rng);
        case DataModel::FromFile:
            detail::require(!cfg.points_file.empty(), "config: points file required for data=from-file");
            return read_points_file(cfg.points_file);
    }
    throw std::invalid_argument("config: unknown data model");
}

}  // namespace detail

// Simulates M = sum of r bounded variables per trial and counts
// |M - E[M]| > alpha events against the width-form bound.
inline AggregateResult run_tail_experiment(const ExperimentConfig& cfg) {
    detail::require(cfg.kind == ExperimentKind::Tail, "tail: config kind mismatch");
    detail::require(cfg.trials >= 1, "tail: trials must be >= 1");
    detail::require(cfg.r >= 1, "tail: r must be >= 1");
    detail::require(cfg.alpha > 0.0, "tail: alpha must be positive");

    double width = 0.0, expected = 0.0;
    std::string family_name;
    if (cfg.family == TailFamily::Bernoulli) {
        detail::require(cfg.p >= 0.0 && cfg.p <= 1.0, "tail: p must lie in [0, 1]");
        width = 1.0;
        expected = static_cast<double>(cfg.r) * cfg.p;
        family_name = "bernoulli";
    } else {
        detail::require(cfg.lo < cfg.hi, "tail: uniform family needs lo < hi");
        width = cfg.hi - cfg.lo;
        expected = static_cast<double>(cfg.r) * 0.5 * (cfg.lo + cfg.hi);
        family_name = "uniform";
    }
    const double bound =
        hoeffding_bound(BoundedVariableSpec::uniform(cfg.r, width), cfg.alpha).as_probability;

    const auto failures = detail::count_failures(cfg.trials, cfg.threads, [&](std::size_t t) {
        Rng rng(derive_seed(cfg.master_seed, t));
        double sum = 0.0;
        for (std::size_t i = 0; i < cfg.r; ++i)
            sum += cfg.family == TailFamily::Bernoulli ? (rng.uniform01() < cfg.p ? 1.0 : 0.0)
                                                       : rng.uniform(cfg.lo, cfg.hi);
        return std::abs(sum - expected) > cfg.alpha;
    });

    std::ostringstream params;
    params << "family=" << family_name << ";r=" << cfg.r;
    if (cfg.family == TailFamily::Bernoulli)
        params << ";p=" << format_double(cfg.p);
    else
        params << ";lo=" << format_double(cfg.lo) << ";hi=" << format_double(cfg.hi);
    params << ";alpha=" << format_double(cfg.alpha);
    return detail::aggregate("tail", cfg.trials, failures, bound, cfg.master_seed, params.str());
}

// Fresh point set and fresh random basis per trial; a failure is any pair
// whose distortion ratio leaves [1 - eps, 1 + eps]. The bound is delta.
inline AggregateResult run_jl_experiment(const ExperimentConfig& cfg) {
    detail::require(cfg.kind == ExperimentKind::Jl, "jl: config kind mismatch");
    detail::require(cfg.trials >= 1, "jl: trials must be >= 1");
    detail::require(cfg.eps > 0.0 && cfg.eps <= 0.5, "jl: eps must lie in (0, 1/2]");
    detail::require(cfg.delta > 0.0 && cfg.delta < 1.0, "jl: delta must lie in (0, 1)");

    const DataModel model = cfg.data_model.value_or(DataModel::Gaussian);
    // A file-backed point set cannot be redrawn per trial; load it once.
    std::optional<PointSet> fixed_points;
    if (model == DataModel::FromFile) {
        detail::require(!cfg.points_file.empty(), "jl: points file required for data=from-file");
        fixed_points = read_points_file(cfg.points_file);
    }
    const std::size_t n = fixed_points ? fixed_points->size() : cfg.n;
    const std::size_t d = fixed_points ? fixed_points->dimension() : cfg.d;
    detail::require(n >= 2, "jl: n must be >= 2");
    detail::require(d >= 1, "jl: d must be >= 1");

    const std::size_t k =
        cfg.k ? *cfg.k
              : static_cast<std::size_t>(
                    plan_jl_dimension(static_cast<std::int64_t>(n), cfg.eps, cfg.delta));
    detail::require(!cfg.debug_orthonormal_basis || k <= d,
                    "jl: orthonormal debug basis needs k <= d");

    const auto failures = detail::count_failures(cfg.trials, cfg.threads, [&](std::size_t t) {
        Rng rng(derive_seed(cfg.master_seed, t));
        const PointSet points =
            fixed_points ? *fixed_points : detail::make_points(cfg, DataModel::Gaussian, rng);
        const ProjectionBasis basis = cfg.debug_orthonormal_basis
                                          ? ProjectionBasis::standard_axes(k, points.dimension())
                                          : make_projection(points.dimension(), k, rng);
        return !distortion_report(points, basis, cfg.eps).satisfied;
    });

    std::ostringstream params;
    params << "n=" << n << ";d=" << d << ";k=" << k << ";eps=" << format_double(cfg.eps)
           << ";delta=" << format_double(cfg.delta) << ";data=" << to_string(model);
    if (cfg.debug_orthonormal_basis) params << ";basis=orthonormal-debug";
    return detail::aggregate("jl", cfg.trials, failures, cfg.delta, cfg.master_seed, params.str());
}

// Fixed base set P, fresh sample per trial; a failure is exact maximum
// discrepancy above eps. The bound is delta.
inline AggregateResult run_epsample_experiment(const ExperimentConfig& cfg) {
    detail::require(cfg.kind == ExperimentKind::Epsample, "epsample: config kind mismatch");
    detail::require(cfg.trials >= 1, "epsample: trials must be >= 1");
    detail::require(cfg.n >= 1 && cfg.d >= 1, "epsample: n and d must be >= 1");
    detail::require(cfg.eps > 0.0 && cfg.eps < 0.5, "epsample: eps must lie in (0, 1/2)");
    detail::require(cfg.delta > 0.0 && cfg.delta < 1.0, "epsample: delta must lie in (0, 1)");

    const DataModel model = cfg.data_model.value_or(DataModel::UniformBox);
    Rng data_rng(derive_seed(cfg.master_seed, detail::kFixedInputStream));
    const PointSet points = detail::make_points(cfg, DataModel::UniformBox, data_rng);
    const std::size_t k =
        cfg.k ? *cfg.k
              : static_cast<std::size_t>(plan_range_sample(static_cast<std::int64_t>(points.size()),
                                                           static_cast<std::int64_t>(points.dimension()),
                                                           cfg.eps, cfg.delta));

    const auto failures = detail::count_failures(cfg.trials, cfg.threads, [&](std::size_t t) {
        Rng rng(derive_seed(cfg.master_seed, t));
        const PointSet sample = cfg.debug_sample_equals_p ? points : sample_subset(points, k, rng);
        return max_discrepancy(points, sample, cfg.enumeration_budget).max_discrepancy > cfg.eps;
    });

    std::ostringstream params;
    params << "n=" << points.size() << ";d=" << points.dimension() << ";k=" << k
           << ";eps=" << format_double(cfg.eps) << ";delta=" << format_double(cfg.delta)
           << ";data=" << to_string(model);
    if (cfg.debug_sample_equals_p) params << ";sample=debug-copy-of-p";
    return detail::aggregate("epsample", cfg.trials, failures, cfg.delta, cfg.master_seed,
                             params.str());
}

// One fixed rectangle query against a fixed P; per trial, a fresh sample and
// a failure when |q(S)/|S| - q(P)/|P|| >= eps. The bound is
// min(1, 2 exp(-2 eps^2 k)).
inline AggregateResult run_fixed_query_experiment(const ExperimentConfig& cfg) {
    detail::require(cfg.kind == ExperimentKind::FixedQuery, "fixed-query: config kind mismatch");
    detail::require(cfg.trials >= 1, "fixed-query: trials must be >= 1");
    detail::require(cfg.n >= 1 && cfg.d >= 1, "fixed-query: n and d must be >= 1");
    detail::require(cfg.eps > 0.0 && cfg.eps < 1.0, "fixed-query: eps must lie in (0, 1)");

    const DataModel model = cfg.data_model.value_or(DataModel::UniformBox);
    Rng data_rng(derive_seed(cfg.master_seed, detail::kFixedInputStream));
    const PointSet points = detail::make_points(cfg, DataModel::UniformBox, data_rng);

    std::size_t k = 0;
    if (cfg.k) {
        k = *cfg.k;
    } else if (cfg.gamma) {
        k = static_cast<std::size_t>(plan_hoeffding_samples(cfg.eps, *cfg.gamma));
    } else {
        throw std::invalid_argument("fixed-query: set k or gamma");
    }
    detail::require(k >= 1, "fixed-query: k must be >= 1");

    Rectangle query = [&] {
        if (cfg.rect) {
            detail::require(cfg.rect->dimension() == points.dimension(),
                            "fixed-query: rect dimension does not match the data");
            return *cfg.rect;
        }
        detail::require(model == DataModel::UniformBox,
                        "fixed-query: rect required unless data=uniform-box");
        // Default query: the lower half of the unit box along the first axis.
        std::vector<Interval> box(points.dimension(), Interval{0.0, 1.0});
        box[0] = {0.0, 0.5};
        return Rectangle(std::move(box));
    }();

    const double full_fraction =
        static_cast<double>(count_query(points, query)) / static_cast<double>(points.size());
    const double bound =
        TailBound::from_raw(2.0 * std::exp(-2.0 * cfg.eps * cfg.eps * static_cast<double>(k)))
            .as_probability;

    const auto failures = detail::count_failures(cfg.trials, cfg.threads, [&](std::size_t t) {
        Rng rng(derive_seed(cfg.master_seed, t));
        const PointSet sample = sample_subset(points, k, rng);
        const double sample_fraction =
            static_cast<double>(count_query(sample, query)) / static_cast<double>(k);
        return std::abs(sample_fraction - full_fraction) >= cfg.eps;
    });

    std::ostringstream params;
    params << "n=" << points.size() << ";d=" << points.dimension() << ";k=" << k
           << ";eps=" << format_double(cfg.eps) << ";data=" << to_string(model) << ";rect=";
    for (std::size_t j = 0; j < query.dimension(); ++j) {
        if (j) params << ',';
        params << format_double(query.interval(j).lo) << ':'
               << format_double(query.interval(j).hi);
    }
    return detail::aggregate("fixed-query", cfg.trials, failures, bound, cfg.master_seed,
                             params.str());
}

inline AggregateResult run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
        case ExperimentKind::Tail: return run_tail_experiment(cfg);
        case ExperimentKind::Jl: return run_jl_experiment(cfg);
        case ExperimentKind::Epsample: return run_epsample_experiment(cfg);
        case ExperimentKind::FixedQuery: return run_fixed_query_experiment(cfg);
    }
    throw std::invalid_argument("run_experiment: unknown kind");
}

// CSV with a fixed header, one row per result in input order, floating
// values printed to 10 significant digits. The file is loss-free for
// recomputing every verdict.
inline void emit_results(std::span<const AggregateResult> results, std::ostream& out) {
    out << "kind,trials,failures,empirical_rate,bound,std_err,verdict,seed,params\n";
    for (const auto& r : results) {
        out << r.kind << ',' << r.trials << ',' << r.failures << ','
            << format_double(r.empirical_failure_rate) << ','
            << format_double(r.theoretical_bound) << ','
            << format_double(r.standard_error) << ',' << (r.verdict ? "pass" : "fail") << ','
            << r.seed << ',' << r.params << '\n';
    }
    if (!out) throw std::runtime_error("emit_results: output stream failed");
}

inline void emit_results(const std::vector<AggregateResult>& results, std::ostream& out) {
    emit_results(std::span<const AggregateResult>(results), out);
}

inline void write_results_file(std::span<const AggregateResult> results, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_results_file: cannot open " + path);
    emit_results(results, out);
}

// ---- configuration files -------------------------------------------------
//
// Flat key=value lines, '#' comments. CLI flags override file values.

inline std::map<std::string, std::string> parse_config(std::istream& in) {
    std::map<std::string, std::string> entries;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto first = s.find_first_not_of(" \t\r");
        const auto last = s.find_last_not_of(" \t\r");
        return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "config: line " << lineno << " is not key=value";
            throw std::invalid_argument(msg.str());
        }
        entries[trim(trimmed.substr(0, eq))] = trim(trimmed.substr(eq + 1));
    }
    return entries;
}

inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_config_file: cannot open " + path);
    return parse_config(in);
}

inline ExperimentKind parse_kind(const std::string& name) {
    if (name == "tail") return ExperimentKind::Tail;
    if (name == "jl") return ExperimentKind::Jl;
    if (name == "epsample") return ExperimentKind::Epsample;
    if (name == "fixed-query") return ExperimentKind::FixedQuery;
    throw std::invalid_argument("config: unknown kind '" + name + "'");
}

inline DataModel parse_data_model(const std::string& name) {
    if (name == "gaussian") return DataModel::Gaussian;
    if (name == "uniform-box") return DataModel::UniformBox;
    if (name == "from-file") return DataModel::FromFile;
    throw std::invalid_argument("config: unknown data model '" + name + "'");
}

inline TailFamily parse_tail_family(const std::string& name) {
    if (name == "bernoulli") return TailFamily::Bernoulli;
    if (name == "uniform") return TailFamily::Uniform;
    throw std::invalid_argument("config: unknown tail family '" + name + "'");
}

// "lo:hi,lo:hi,..." with one interval per dimension.
inline Rectangle parse_rectangle(const std::string& text) {
    std::vector<Interval> intervals;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        const auto colon = part.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("config: rect intervals must look like lo:hi");
        try {
            intervals.push_back(
                {std::stod(part.substr(0, colon)), std::stod(part.substr(colon + 1))});
        } catch (const std::logic_error&) {
            throw std::invalid_argument("config: rect interval '" + part + "' is not numeric");
        }
    }
    return Rectangle(std::move(intervals));
}

namespace detail {

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T parsed{};
    in >> parsed;
    if (in.fail() || !in.eof())
        throw std::invalid_argument("config: field '" + key + "' has malformed value '" + value + "'");
    return parsed;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::invalid_argument("config: field '" + key + "' must be a boolean, got '" + value + "'");
}

}  // namespace detail

// Applies key=value entries onto a config. Unknown keys are an error naming
// the field.
inline void apply_config(ExperimentConfig& cfg, const std::map<std::string, std::string>& entries) {
    for (const auto& [key, value] : entries) {
        if (key == "kind") cfg.kind = parse_kind(value);
        else if (key == "seed") cfg.master_seed = detail::parse_number<std::uint64_t>(key, value);
        else if (key == "trials") cfg.trials = detail::parse_number<std::size_t>(key, value);
        else if (key == "threads") cfg.threads = detail::parse_number<std::size_t>(key, value);
        else if (key == "n") cfg.n = detail::parse_number<std::size_t>(key, value);
        else if (key == "d") cfg.d = detail::parse_number<std::size_t>(key, value);
        else if (key == "k") cfg.k = detail::parse_number<std::size_t>(key, value);
        else if (key == "eps") cfg.eps = detail::parse_number<double>(key, value);
        else if (key == "delta") cfg.delta = detail::parse_number<double>(key, value);
        else if (key == "alpha") cfg.alpha = detail::parse_number<double>(key, value);
        else if (key == "gamma") cfg.gamma = detail::parse_number<double>(key, value);
        else if (key == "r") cfg.r = detail::parse_number<std::size_t>(key, value);
        else if (key == "p") cfg.p = detail::parse_number<double>(key, value);
        else if (key == "lo") cfg.lo = detail::parse_number<double>(key, value);
        else if (key == "hi") cfg.hi = detail::parse_number<double>(key, value);
        else if (key == "family") cfg.family = parse_tail_family(value);
        else if (key == "data") cfg.data_model = parse_data_model(value);
        else if (key == "points") cfg.points_file = value;
        else if (key == "rect") cfg.rect = parse_rectangle(value);
        else if (key == "budget") cfg.enumeration_budget = detail::parse_number<std::uint64_t>(key, value);
        else if (key == "debug_orthonormal") cfg.debug_orthonormal_basis = detail::parse_bool(key, value);
        else if (key == "debug_sample_equals_p") cfg.debug_sample_equals_p = detail::parse_bool(key, value);
        else throw std::invalid_argument("config: unknown field '" + key + "'");
    }
}

}  // namespace tailbound
