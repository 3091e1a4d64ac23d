// tailbound command-line front end.
//
// Subcommands:
//   bound        evaluate a tail-bound formula from flags
//   plan         sample-size planners (hoeffding | jl | range)
//   tail         Monte Carlo check of the width-form bound
//   jl           all-pairs random projection experiment
//   epsample     epsilon-sample experiment with the exact discrepancy oracle
//   fixed-query  single fixed rectangle query experiment
//   enumerate    dump the canonical subsets of a point file
//
// Experiments write the CSV described in emit_results to --out (default
// stdout) and exit 0 only if every verdict passes. Trial counts and data
// models have defaults chosen by this tool, not prescribed by the theory
// being checked; see --help per subcommand.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tailbound/tailbound.hpp"

namespace {

using tailbound::ExperimentConfig;

struct CommonFlags {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> threads;
    std::optional<std::size_t> n, d, k;
    std::optional<double> eps, delta, alpha, gamma, p, lo, hi;
    std::optional<std::size_t> r;
    std::optional<std::string> family, data, points, rect;
    std::optional<std::uint64_t> budget;
    bool debug_orthonormal = false;
    bool debug_sample_equals_p = false;
    std::string out;
};

void add_common_flags(CLI::App& cmd, CommonFlags& flags) {
    cmd.add_option("--config", flags.config_path, "key=value config file; explicit flags win");
    cmd.add_option("--seed", flags.seed, "master seed (default 1)");
    cmd.add_option("--trials", flags.trials, "Monte Carlo trials (default 100, a tool choice)");
    cmd.add_option("--threads", flags.threads, "worker threads; never changes the output");
    cmd.add_option("--n", flags.n, "number of points");
    cmd.add_option("--d", flags.d, "ambient dimension");
    cmd.add_option("--k", flags.k, "override the planned sample size / target dimension");
    cmd.add_option("--eps", flags.eps, "accuracy parameter");
    cmd.add_option("--delta", flags.delta, "failure probability budget");
    cmd.add_option("--alpha", flags.alpha, "deviation threshold (tail)");
    cmd.add_option("--gamma", flags.gamma, "per-query budget (fixed-query planner)");
    cmd.add_option("--r", flags.r, "number of summed variables (tail)");
    cmd.add_option("--p", flags.p, "Bernoulli success probability (tail)");
    cmd.add_option("--lo", flags.lo, "uniform family lower end (tail)");
    cmd.add_option("--hi", flags.hi, "uniform family upper end (tail)");
    cmd.add_option("--family", flags.family, "tail variable family: bernoulli | uniform");
    cmd.add_option("--data", flags.data,
                   "point model: gaussian | uniform-box | from-file (defaults are a tool choice)");
    cmd.add_option("--points", flags.points, "point file for data=from-file");
    cmd.add_option("--rect", flags.rect, "query rectangle, lo:hi per dimension, comma separated");
    cmd.add_option("--budget", flags.budget, "enumeration budget (candidate combinations)");
    cmd.add_flag("--debug-orthonormal", flags.debug_orthonormal,
                 "jl: use the first k standard axes instead of a random basis");
    cmd.add_flag("--debug-sample-equals-p", flags.debug_sample_equals_p,
                 "epsample: use S = P instead of sampling");
    cmd.add_option("--out", flags.out, "write CSV here instead of stdout");
}

ExperimentConfig build_config(tailbound::ExperimentKind kind, const CommonFlags& flags) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    if (flags.config_path) {
        auto entries = tailbound::parse_config_file(*flags.config_path);
        entries.erase("kind");  // the subcommand fixes the kind
        tailbound::apply_config(cfg, entries);
        cfg.kind = kind;
    }
    if (flags.seed) cfg.master_seed = *flags.seed;
    if (flags.trials) cfg.trials = *flags.trials;
    if (flags.threads) cfg.threads = *flags.threads;
    if (flags.n) cfg.n = *flags.n;
    if (flags.d) cfg.d = *flags.d;
    if (flags.k) cfg.k = *flags.k;
    if (flags.eps) cfg.eps = *flags.eps;
    if (flags.delta) cfg.delta = *flags.delta;
    if (flags.alpha) cfg.alpha = *flags.alpha;
    if (flags.gamma) cfg.gamma = *flags.gamma;
    if (flags.r) cfg.r = *flags.r;
    if (flags.p) cfg.p = *flags.p;
    if (flags.lo) cfg.lo = *flags.lo;
    if (flags.hi) cfg.hi = *flags.hi;
    if (flags.family) cfg.family = tailbound::parse_tail_family(*flags.family);
    if (flags.data) cfg.data_model = tailbound::parse_data_model(*flags.data);
    if (flags.points) cfg.points_file = *flags.points;
    if (flags.rect) cfg.rect = tailbound::parse_rectangle(*flags.rect);
    if (flags.budget) cfg.enumeration_budget = *flags.budget;
    if (flags.debug_orthonormal) cfg.debug_orthonormal_basis = true;
    if (flags.debug_sample_equals_p) cfg.debug_sample_equals_p = true;
    return cfg;
}

int run_and_emit(const ExperimentConfig& cfg, const std::string& out_path) {
    const auto result = tailbound::run_experiment(cfg);
    std::vector<tailbound::AggregateResult> results{result};
    if (out_path.empty()) {
        tailbound::emit_results(results, std::cout);
    } else {
        tailbound::write_results_file(results, out_path);
    }
    return result.verdict ? 0 : 1;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) values.push_back(std::stod(part));
    return values;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Chernoff-Hoeffding tail bounds, sample-size planners, random projection and\n"
        "epsilon-sample experiments with exact oracles."};
    app.require_subcommand(1);

    // bound ------------------------------------------------------------
    auto* bound_cmd = app.add_subcommand("bound", "evaluate a tail-bound formula");
    std::string bound_form;
    std::string widths_text, variances_text, probs_text;
    double bound_alpha = 0.0, bound_half_width = 0.0, bound_max_dev = 0.0;
    double bound_expectation = 0.0, bound_delta = 0.0, bound_x = 0.0;
    std::size_t bound_r = 0;
    std::int64_t bound_t = 1;
    bound_cmd->add_option("--form", bound_form,
                          "hoeffding | iid | variance | markov | union | union-vs-indep | cosh-gap")
        ->required();
    bound_cmd->add_option("--widths", widths_text, "comma-separated widths (hoeffding)");
    bound_cmd->add_option("--r", bound_r, "variable count (iid)");
    bound_cmd->add_option("--half-width", bound_half_width, "half width (iid)");
    bound_cmd->add_option("--variances", variances_text, "comma-separated variances (variance)");
    bound_cmd->add_option("--max-dev", bound_max_dev, "max |X_i - E[X_i]| (variance)");
    bound_cmd->add_option("--alpha", bound_alpha, "deviation threshold");
    bound_cmd->add_option("--expectation", bound_expectation, "E[X] (markov)");
    bound_cmd->add_option("--probs", probs_text, "comma-separated success probabilities (union)");
    bound_cmd->add_option("--delta", bound_delta, "total failure budget (union-vs-indep)");
    bound_cmd->add_option("--t", bound_t, "event count (union-vs-indep)");
    bound_cmd->add_option("--x", bound_x, "argument (cosh-gap)");

    // plan -------------------------------------------------------------
    auto* plan_cmd = app.add_subcommand("plan", "sample-size planners");
    std::string plan_which;
    double plan_eps = 0.0, plan_delta = 0.0, plan_gamma = 0.0;
    std::int64_t plan_n = 0, plan_d = 1;
    plan_cmd->add_option("--which", plan_which, "hoeffding | jl | range")->required();
    plan_cmd->add_option("--eps", plan_eps, "accuracy parameter")->required();
    plan_cmd->add_option("--gamma", plan_gamma, "per-query failure budget (hoeffding)");
    plan_cmd->add_option("--delta", plan_delta, "total failure budget (jl, range)");
    plan_cmd->add_option("--n", plan_n, "number of points (jl, range)");
    plan_cmd->add_option("--d", plan_d, "dimension (range)");

    // experiments --------------------------------------------------------
    auto* tail_cmd = app.add_subcommand("tail", "tail-deviation Monte Carlo experiment");
    auto* jl_cmd = app.add_subcommand("jl", "all-pairs distance distortion experiment");
    auto* eps_cmd = app.add_subcommand("epsample", "epsilon-sample discrepancy experiment");
    auto* fixed_cmd = app.add_subcommand("fixed-query", "single fixed rectangle query experiment");
    CommonFlags tail_flags, jl_flags, eps_flags, fixed_flags;
    add_common_flags(*tail_cmd, tail_flags);
    add_common_flags(*jl_cmd, jl_flags);
    add_common_flags(*eps_cmd, eps_flags);
    add_common_flags(*fixed_cmd, fixed_flags);

    // enumerate ----------------------------------------------------------
    auto* enum_cmd = app.add_subcommand("enumerate", "dump canonical subsets of a point file");
    std::string enum_points;
    std::uint64_t enum_budget = tailbound::kDefaultEnumerationBudget;
    enum_cmd->add_option("--points", enum_points, "point file")->required();
    enum_cmd->add_option("--budget", enum_budget, "candidate rectangle budget");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bound_cmd->parsed()) {
            using tailbound::TailBound;
            auto print = [](const TailBound& b) {
                std::cout << "raw=" << tailbound::format_double(b.raw)
                          << " as_probability=" << tailbound::format_double(b.as_probability)
                          << '\n';
            };
            if (bound_form == "hoeffding") {
                print(tailbound::hoeffding_bound(
                    tailbound::BoundedVariableSpec(parse_double_list(widths_text)), bound_alpha));
            } else if (bound_form == "iid") {
                print(tailbound::hoeffding_bound_iid(tailbound::IidSpec(bound_r, bound_half_width),
                                                     bound_alpha));
            } else if (bound_form == "variance") {
                print(tailbound::variance_bound(
                    tailbound::VarianceSpec(parse_double_list(variances_text), bound_max_dev),
                    bound_alpha));
            } else if (bound_form == "markov") {
                print(tailbound::markov_bound(bound_expectation, bound_alpha));
            } else if (bound_form == "union") {
                std::cout << "all_hold_at_least="
                          << tailbound::format_double(
                                 tailbound::union_bound(parse_double_list(probs_text)))
                          << '\n';
            } else if (bound_form == "union-vs-indep") {
                const auto budget = tailbound::union_vs_independence(bound_delta, bound_t);
                std::cout << "per_event_union="
                          << tailbound::format_double(budget.per_event_union)
                          << " per_event_independent="
                          << tailbound::format_double(budget.per_event_independent) << '\n';
            } else if (bound_form == "cosh-gap") {
                std::cout << "gap=" << tailbound::format_double(tailbound::cosh_exp_gap(bound_x))
                          << '\n';
            } else {
                std::cerr << "unknown --form '" << bound_form << "'\n";
                return 2;
            }
            return 0;
        }

        if (plan_cmd->parsed()) {
            std::int64_t k = 0;
            if (plan_which == "hoeffding") {
                k = tailbound::plan_hoeffding_samples(plan_eps, plan_gamma);
            } else if (plan_which == "jl") {
                k = tailbound::plan_jl_dimension(plan_n, plan_eps, plan_delta);
            } else if (plan_which == "range") {
                k = tailbound::plan_range_sample(plan_n, plan_d, plan_eps, plan_delta);
            } else {
                std::cerr << "unknown --which '" << plan_which << "'\n";
                return 2;
            }
            std::cout << "k=" << k << '\n';
            return 0;
        }

        if (tail_cmd->parsed())
            return run_and_emit(build_config(tailbound::ExperimentKind::Tail, tail_flags),
                                tail_flags.out);
        if (jl_cmd->parsed())
            return run_and_emit(build_config(tailbound::ExperimentKind::Jl, jl_flags), jl_flags.out);
        if (eps_cmd->parsed())
            return run_and_emit(build_config(tailbound::ExperimentKind::Epsample, eps_flags),
                                eps_flags.out);
        if (fixed_cmd->parsed())
            return run_and_emit(build_config(tailbound::ExperimentKind::FixedQuery, fixed_flags),
                                fixed_flags.out);

        if (enum_cmd->parsed()) {
            const auto points = tailbound::read_points_file(enum_points);
            const auto subsets = tailbound::enumerate_canonical_subsets(points, enum_budget);
            for (const auto& subset : subsets) {
                std::cout << "{";
                for (std::size_t i = 0; i < subset.members.size(); ++i) {
                    if (i) std::cout << ' ';
                    std::cout << subset.members[i];
                }
                std::cout << "}";
                if (subset.rectangle) {
                    std::cout << " rect=";
                    for (std::size_t j = 0; j < subset.rectangle->dimension(); ++j) {
                        if (j) std::cout << ',';
                        const auto& iv = subset.rectangle->interval(j);
                        std::cout << tailbound::format_double(iv.lo) << ':'
                                  << tailbound::format_double(iv.hi);
                    }
                }
                std::cout << '\n';
            }
            std::cout << "count=" << subsets.size() << '\n';
            return 0;
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    }
    return 2;
}
