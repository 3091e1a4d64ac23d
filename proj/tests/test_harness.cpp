#include <catch2/catch.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tailbound/harness.hpp"

using Catch::Matchers::Contains;
using namespace tailbound;

namespace {

std::string csv_of(const AggregateResult& result) {
    std::ostringstream out;
    emit_results(std::vector<AggregateResult>{result}, out);
    return out.str();
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, sep)) parts.push_back(part);
    return parts;
}

}  // namespace

TEST_CASE("seed derivation is a pure, spreading function") {
    CHECK(derive_seed(5, 0) == derive_seed(5, 0));
    CHECK(derive_seed(5, 0) != derive_seed(5, 1));
    CHECK(derive_seed(5, 0) != derive_seed(6, 0));
    Rng a(derive_seed(5, 3)), b(derive_seed(5, 3));
    for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("tail experiment") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::Tail;
    cfg.r = 10;
    cfg.p = 0.5;
    cfg.alpha = 2.5;
    cfg.trials = 20'000;
    cfg.master_seed = 1001;

    SECTION("bernoulli rate matches the exact binomial value, verdict passes") {
        const auto result = run_tail_experiment(cfg);
        CHECK(result.theoretical_bound == Approx(0.5730095937).epsilon(1e-9));
        CHECK(std::abs(result.empirical_failure_rate - 112.0 / 1024.0) <= 0.01);
        CHECK(result.verdict);
        CHECK(result.kind == "tail");
        CHECK_THAT(result.params, Contains("family=bernoulli"));
        CHECK_THAT(result.params, Contains("alpha=2.5"));
    }
    SECTION("impossible deviations never fire") {
        cfg.alpha = 11.0;  // exceeds r * width
        cfg.trials = 2'000;
        CHECK(run_tail_experiment(cfg).failures == 0);
    }
    SECTION("uniform family") {
        cfg.family = TailFamily::Uniform;
        cfg.lo = -1.0;
        cfg.hi = 1.0;
        cfg.alpha = 3.0;
        cfg.trials = 5'000;
        const auto result = run_tail_experiment(cfg);
        CHECK(result.theoretical_bound ==
              Approx(std::min(1.0, 2.0 * std::exp(-2.0 * 9.0 / (10.0 * 4.0)))).epsilon(1e-12));
        CHECK(result.verdict);
    }
    SECTION("reruns are bit-identical") {
        const auto first = run_tail_experiment(cfg);
        const auto second = run_tail_experiment(cfg);
        CHECK(csv_of(first) == csv_of(second));
    }
    SECTION("config validation names the field") {
        cfg.trials = 0;
        CHECK_THROWS_WITH(run_tail_experiment(cfg), Contains("trials"));
        cfg.trials = 10;
        cfg.alpha = 0.0;
        CHECK_THROWS_WITH(run_tail_experiment(cfg), Contains("alpha"));
    }
}

TEST_CASE("jl experiment") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::Jl;
    cfg.master_seed = 2002;

    SECTION("orthonormal debug basis with k = d never fails") {
        cfg.n = 12;
        cfg.d = 6;
        cfg.k = 6;
        cfg.eps = 0.25;
        cfg.delta = 0.1;
        cfg.trials = 50;
        cfg.debug_orthonormal_basis = true;
        const auto result = run_jl_experiment(cfg);
        CHECK(result.failures == 0);
        CHECK(result.verdict);
        CHECK_THAT(result.params, Contains("basis=orthonormal-debug"));
    }
    SECTION("two points, planned k, wide margin") {
        cfg.n = 2;
        cfg.d = 10;
        cfg.eps = 0.5;
        cfg.delta = 0.5;
        cfg.trials = 200;
        const auto result = run_jl_experiment(cfg);
        CHECK_THAT(result.params, Contains("k=45"));  // ceil(32 ln 4)
        CHECK(result.theoretical_bound == 0.5);
        CHECK(result.empirical_failure_rate <=
              result.theoretical_bound + 3.0 * result.standard_error);
    }
    SECTION("validation") {
        cfg.n = 1;
        CHECK_THROWS_WITH(run_jl_experiment(cfg), Contains("n must be >= 2"));
        cfg.n = 10;
        cfg.eps = 0.7;
        CHECK_THROWS_WITH(run_jl_experiment(cfg), Contains("eps"));
    }
}

TEST_CASE("epsample experiment") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::Epsample;
    cfg.master_seed = 3003;
    cfg.n = 15;
    cfg.d = 1;
    cfg.eps = 0.3;
    cfg.delta = 0.2;
    cfg.trials = 40;

    SECTION("debug S = P never fails") {
        cfg.debug_sample_equals_p = true;
        const auto result = run_epsample_experiment(cfg);
        CHECK(result.failures == 0);
        CHECK_THAT(result.params, Contains("sample=debug-copy-of-p"));
    }
    SECTION("one-dimensional run passes quickly") {
        const auto result = run_epsample_experiment(cfg);
        CHECK(result.theoretical_bound == 0.2);
        CHECK(result.verdict);
    }
}

TEST_CASE("fixed-query experiment") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::FixedQuery;
    cfg.master_seed = 4004;
    cfg.n = 100;
    cfg.d = 2;
    cfg.eps = 0.1;
    cfg.trials = 500;

    SECTION("planner path: gamma fixes k") {
        cfg.gamma = 0.02;
        const auto result = run_fixed_query_experiment(cfg);
        CHECK_THAT(result.params, Contains("k=231"));
        CHECK(result.theoretical_bound == Approx(2.0 * std::exp(-2.0 * 0.01 * 231)).epsilon(1e-9));
        CHECK(result.verdict);
    }
    SECTION("a rectangle covering everything never fails") {
        cfg.k = 25;
        cfg.rect = Rectangle({{-1.0, 2.0}, {-1.0, 2.0}});
        const auto result = run_fixed_query_experiment(cfg);
        CHECK(result.failures == 0);
    }
    SECTION("k=1 with tiny eps: the bound clamps to 1 and passes vacuously") {
        cfg.k = 1;
        cfg.eps = 0.01;
        cfg.trials = 200;
        const auto result = run_fixed_query_experiment(cfg);
        CHECK(result.theoretical_bound == 1.0);
        CHECK(result.empirical_failure_rate > 0.5);  // half-box query misses constantly
        CHECK(result.verdict);
    }
    SECTION("k or gamma is required") {
        CHECK_THROWS_WITH(run_fixed_query_experiment(cfg), Contains("k or gamma"));
    }
}

TEST_CASE("results CSV") {
    SECTION("empty input emits exactly the header") {
        std::ostringstream out;
        emit_results(std::vector<AggregateResult>{}, out);
        CHECK(out.str() == "kind,trials,failures,empirical_rate,bound,std_err,verdict,seed,params\n");
    }
    SECTION("one result is two lines with 10-significant-digit floats") {
        ExperimentConfig cfg;
        cfg.kind = ExperimentKind::Tail;
        cfg.trials = 300;
        cfg.alpha = 2.5;
        const auto result = run_tail_experiment(cfg);
        const auto text = csv_of(result);
        const auto lines = split(text, '\n');
        REQUIRE(lines.size() == 2);
        CHECK(format_double(1.0 / 3.0) == "0.3333333333");
        const auto fields = split(lines[1], ',');
        REQUIRE(fields.size() >= 9);
        CHECK(fields[0] == "tail");
        CHECK(fields[1] == "300");
    }
    SECTION("verdicts recompute losslessly from the emitted columns") {
        std::vector<AggregateResult> results;
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            ExperimentConfig cfg;
            cfg.kind = ExperimentKind::Tail;
            cfg.trials = 4'000;
            cfg.alpha = 1.0 + static_cast<double>(seed);
            cfg.master_seed = seed;
            results.push_back(run_tail_experiment(cfg));
        }
        std::ostringstream out;
        emit_results(results, out);
        const auto lines = split(out.str(), '\n');
        REQUIRE(lines.size() == 4);
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const auto fields = split(lines[i], ',');
            REQUIRE(fields.size() >= 9);
            const double rate = std::stod(fields[3]);
            const double bound = std::stod(fields[4]);
            const double se = std::stod(fields[5]);
            const bool expected = rate <= bound + 3.0 * se;
            CHECK(fields[6] == (expected ? "pass" : "fail"));
        }
    }
}

TEST_CASE("worker count never changes the output bytes") {
    auto run_all = [](std::size_t threads) {
        std::vector<AggregateResult> results;

        ExperimentConfig tail;
        tail.kind = ExperimentKind::Tail;
        tail.trials = 5'000;
        tail.alpha = 2.0;
        tail.master_seed = 11;
        tail.threads = threads;
        results.push_back(run_tail_experiment(tail));

        ExperimentConfig jl;
        jl.kind = ExperimentKind::Jl;
        jl.n = 8;
        jl.d = 16;
        jl.k = 40;
        jl.eps = 0.5;
        jl.delta = 0.3;
        jl.trials = 60;
        jl.master_seed = 12;
        jl.threads = threads;
        results.push_back(run_jl_experiment(jl));

        ExperimentConfig eps;
        eps.kind = ExperimentKind::Epsample;
        eps.n = 12;
        eps.d = 1;
        eps.eps = 0.3;
        eps.delta = 0.2;
        eps.trials = 30;
        eps.master_seed = 13;
        eps.threads = threads;
        results.push_back(run_epsample_experiment(eps));

        ExperimentConfig fixed;
        fixed.kind = ExperimentKind::FixedQuery;
        fixed.n = 50;
        fixed.d = 1;
        fixed.eps = 0.2;
        fixed.k = 30;
        fixed.trials = 400;
        fixed.master_seed = 14;
        fixed.threads = threads;
        results.push_back(run_fixed_query_experiment(fixed));

        std::ostringstream out;
        emit_results(results, out);
        return out.str();
    };
    const auto one = run_all(1);
    CHECK(one == run_all(2));
    CHECK(one == run_all(5));
}

TEST_CASE("config files") {
    SECTION("key=value parsing with comments") {
        std::istringstream in(
            "# comment line\n"
            "kind = epsample\n"
            "trials=25   # trailing comment\n"
            "eps=0.2\n"
            "\n"
            "seed = 99\n");
        const auto entries = parse_config(in);
        ExperimentConfig cfg;
        apply_config(cfg, entries);
        CHECK(cfg.kind == ExperimentKind::Epsample);
        CHECK(cfg.trials == 25);
        CHECK(cfg.eps == 0.2);
        CHECK(cfg.master_seed == 99);
    }
    SECTION("unknown keys are named") {
        ExperimentConfig cfg;
        CHECK_THROWS_WITH(apply_config(cfg, {{"epsilon", "0.2"}}), Contains("epsilon"));
    }
    SECTION("malformed values are named") {
        ExperimentConfig cfg;
        CHECK_THROWS_WITH(apply_config(cfg, {{"trials", "many"}}), Contains("trials"));
        std::istringstream bad("this line has no equals\n");
        CHECK_THROWS_AS(parse_config(bad), std::invalid_argument);
    }
    SECTION("rectangles parse as lo:hi per dimension") {
        const auto rect = parse_rectangle("0:0.5,-1:1");
        REQUIRE(rect.dimension() == 2);
        CHECK(rect.interval(0).lo == 0.0);
        CHECK(rect.interval(0).hi == 0.5);
        CHECK(rect.interval(1).lo == -1.0);
        CHECK(rect.interval(1).hi == 1.0);
        CHECK_THROWS_AS(parse_rectangle("0,1"), std::invalid_argument);
    }
    SECTION("later entries override earlier ones, mirroring flag precedence") {
        ExperimentConfig cfg;
        apply_config(cfg, {{"eps", "0.2"}, {"trials", "10"}});
        apply_config(cfg, {{"eps", "0.4"}});
        CHECK(cfg.eps == 0.4);
        CHECK(cfg.trials == 10);
    }
}

TEST_CASE("point files") {
    SECTION("round trip through the text format") {
        const PointSet points = PointSet::from_rows({{0.5, -1.25}, {3.0, 4.0}, {1e-3, 2e6}});
        std::ostringstream out;
        write_points(points, out);
        std::istringstream in(out.str());
        const auto back = read_points(in);
        REQUIRE(back.size() == points.size());
        REQUIRE(back.dimension() == points.dimension());
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = 0; j < points.dimension(); ++j)
                CHECK(back.coord(i, j) == points.coord(i, j));
    }
    SECTION("comments and blank lines are ignored") {
        std::istringstream in(
            "# a point file\n"
            "\n"
            "0 1  # first point\n"
            "2 3\n");
        const auto points = read_points(in);
        CHECK(points.size() == 2);
        CHECK(points.dimension() == 2);
    }
    SECTION("malformed input is rejected") {
        std::istringstream bad_dims("1 2\n3\n");
        CHECK_THROWS_AS(read_points(bad_dims), std::invalid_argument);
        std::istringstream bad_token("1 2\n3 x\n");
        CHECK_THROWS_AS(read_points(bad_token), std::invalid_argument);
        std::istringstream empty("# only comments\n");
        CHECK_THROWS_AS(read_points(empty), std::invalid_argument);
        std::istringstream non_finite("1 nan\n");
        CHECK_THROWS_AS(read_points(non_finite), std::invalid_argument);
    }
    SECTION("experiments can read their data from a file") {
        const auto path = std::filesystem::temp_directory_path() / "tailbound_points_test.txt";
        {
            std::ofstream out(path);
            for (int i = 0; i < 10; ++i) out << 0.1 * i << ' ' << 0.05 * i << '\n';
        }
        ExperimentConfig cfg;
        cfg.kind = ExperimentKind::Epsample;
        cfg.data_model = DataModel::FromFile;
        cfg.points_file = path.string();
        cfg.eps = 0.3;
        cfg.delta = 0.2;
        cfg.trials = 10;
        const auto result = run_epsample_experiment(cfg);
        CHECK_THAT(result.params, Contains("n=10"));
        CHECK_THAT(result.params, Contains("data=from-file"));
        std::filesystem::remove(path);
    }
}
