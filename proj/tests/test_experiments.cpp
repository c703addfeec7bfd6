#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "declip/experiments.hpp"

using namespace declip;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

std::filesystem::path temp_dir(const char* tag) {
    auto p = std::filesystem::temp_directory_path() / (std::string("declip_test_") + tag);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("run_trial: no saturation at lambda >= 1 makes both runs identical") {
    ExperimentConfig cfg;
    cfg.n = 6;
    cfg.m = 14;
    cfg.lambda = 1.0;  // unit frame, unit target: nothing clips
    cfg.iters = 12;
    const TrialResult t = run_trial(cfg, 3);
    for (std::size_t k = 0; k < cfg.iters; ++k)
        CHECK(t.linear_errors[k] == doctest::Approx(t.nonlinear_errors[k]).epsilon(1e-14));
}

TEST_CASE("run_trial determinism and golden values") {
    ExperimentConfig cfg;
    cfg.lambda = 0.4;
    const TrialResult a = run_trial(cfg, 0);
    const TrialResult b = run_trial(cfg, 0);
    CHECK(a.linear_errors == b.linear_errors);
    CHECK(a.nonlinear_errors == b.nonlinear_errors);

    // reference-run goldens for (n=10, m=30, lambda=0.4, seed 42, trial 0)
    CHECK(a.redraws == 0);
    CHECK(a.linear_errors[0] == doctest::Approx(0.71464309452003227).epsilon(1e-15));
    CHECK(a.nonlinear_errors[0] == doctest::Approx(0.57208627598747774).epsilon(1e-15));
    CHECK(a.linear_errors[49] == doctest::Approx(2.2178959346706953e-05).epsilon(1e-12));
    CHECK(a.nonlinear_errors[49] == doctest::Approx(1.4918775981502851e-05).epsilon(1e-12));

    const TrialResult c = run_trial(cfg, 1);
    CHECK(c.linear_errors != a.linear_errors);
}

TEST_CASE("single-trial report collapses to the trial curves") {
    ExperimentConfig cfg;
    cfg.lambda = 0.35;
    cfg.trials = 1;
    cfg.iters = 20;
    const ExperimentReport r = run_experiment(cfg);
    const TrialResult t = run_trial(cfg, 0);
    for (std::size_t k = 0; k < cfg.iters; ++k) {
        CHECK(r.mean_err_linear[k] == doctest::Approx(t.linear_errors[k]).epsilon(1e-15));
        CHECK(r.q1_reduction_db[k] == doctest::Approx(r.mean_reduction_db[k]).epsilon(1e-15));
        CHECK(r.q3_reduction_db[k] == doctest::Approx(r.mean_reduction_db[k]).epsilon(1e-15));
    }
}

TEST_CASE("reduction dB identities") {
    // equal errors give exactly 0 dB; an error ratio of 2 gives 10 log10 4
    ExperimentConfig cfg;
    cfg.lambda = 1.0;  // identical traces
    cfg.trials = 2;
    cfg.iters = 5;
    const ExperimentReport r = run_experiment(cfg);
    for (std::size_t k = 0; k < cfg.iters; ++k) CHECK(r.mean_reduction_db[k] == 0.0);
    CHECK(10.0 * std::log10(4.0) == doctest::Approx(6.0205999132796239).epsilon(1e-15));
}

TEST_CASE("experiment report: smoke-scale goldens at lambda 0.4") {
    ExperimentConfig cfg;
    cfg.lambda = 0.4;
    cfg.trials = 100;
    const ExperimentReport r = run_experiment(cfg);
    CHECK(r.mean_reduction_db[49] == doctest::Approx(8.3871288935639576).epsilon(1e-12));
    CHECK(r.mean_err_linear[49] == doctest::Approx(0.00450294593061397).epsilon(1e-12));
    CHECK(r.mean_err_nonlinear[49] == doctest::Approx(0.0012304186929421677).epsilon(1e-12));
    CHECK(r.q1_reduction_db[49] == doctest::Approx(4.0982973548420851).epsilon(1e-12));
    CHECK(r.q3_reduction_db[49] == doctest::Approx(11.705001826061386).epsilon(1e-12));
    CHECK(r.nonlinear_worse_iters.empty());
    CHECK(r.q1_reduction_db[49] <= r.mean_reduction_db[49]);
    CHECK(r.mean_reduction_db[49] <= r.q3_reduction_db[49]);
}

TEST_CASE("report is independent of the thread count") {
    ExperimentConfig cfg;
    cfg.lambda = 0.3;
    cfg.trials = 40;
    cfg.iters = 15;
    cfg.threads = 1;
    const ExperimentReport a = run_experiment(cfg);
    cfg.threads = 3;
    const ExperimentReport b = run_experiment(cfg);
    CHECK(a.mean_err_linear == b.mean_err_linear);
    CHECK(a.mean_err_nonlinear == b.mean_err_nonlinear);
    CHECK(a.mean_reduction_db == b.mean_reduction_db);
    CHECK(a.q1_reduction_db == b.q1_reduction_db);
    CHECK(a.q3_reduction_db == b.q3_reduction_db);
}

TEST_CASE("emit and reload round trip") {
    ExperimentConfig cfg;
    cfg.lambda = 0.32;
    cfg.trials = 25;
    cfg.iters = 10;
    cfg.keep_raw = true;
    const ExperimentReport r = run_experiment(cfg);
    const auto dir = temp_dir("roundtrip");
    emit_report(r, dir);

    // 17 significant digits round-trip doubles exactly
    const ExperimentReport back = load_summary(dir / "summary.csv");
    REQUIRE(back.iters == cfg.iters);
    for (std::size_t k = 0; k < cfg.iters; ++k) {
        CHECK(back.mean_err_linear[k] == r.mean_err_linear[k]);
        CHECK(back.mean_err_nonlinear[k] == r.mean_err_nonlinear[k]);
        CHECK(back.mean_reduction_db[k] == r.mean_reduction_db[k]);
        CHECK(back.q1_reduction_db[k] == r.q1_reduction_db[k]);
        CHECK(back.q3_reduction_db[k] == r.q3_reduction_db[k]);
    }

    // summary.csv has header + iters rows
    const std::string text = slurp(dir / "summary.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(cfg.iters) + 1);

    // plot.dat carries three named blocks; raw.csv one row per (trial, iter)
    const std::string plot = slurp(dir / "plot.dat");
    CHECK(plot.find("# mean_err_linear") != std::string::npos);
    CHECK(plot.find("# mean_err_nonlinear") != std::string::npos);
    CHECK(plot.find("# mean_red_db") != std::string::npos);
    const std::string raw = slurp(dir / "raw.csv");
    CHECK(std::count(raw.begin(), raw.end(), '\n') ==
          static_cast<long>(cfg.trials * cfg.iters) + 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("early-iteration advantage and matched late slopes at lambda 0.4") {
    ExperimentConfig cfg;
    cfg.lambda = 0.4;
    cfg.trials = 300;
    cfg.keep_raw = true;
    const ExperimentReport r = run_experiment(cfg);

    CHECK(r.mean_err_nonlinear[0] < r.mean_err_linear[0]);
    CHECK(r.mean_err_linear[0] / r.mean_err_nonlinear[0] >= 1.1);
    CHECK(r.nonlinear_worse_iters.empty());

    // per-trial least-squares slopes of log error over iterations 40..50
    auto slope = [](const std::vector<double>& errs) {
        double kb = 0.0, yb = 0.0;
        const std::size_t lo = 40, hi = 50;
        for (std::size_t k = lo; k <= hi; ++k) {
            kb += k;
            yb += std::log(errs[k - 1]);
        }
        const double nn = hi - lo + 1;
        kb /= nn;
        yb /= nn;
        double num = 0.0, den = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) {
            num += (k - kb) * (std::log(errs[k - 1]) - yb);
            den += (k - kb) * (k - kb);
        }
        return num / den;
    };
    double sl = 0.0, sn = 0.0;
    for (std::size_t t = 0; t < r.raw_linear.size(); ++t) {
        sl += slope(r.raw_linear[t]);
        sn += slope(r.raw_nonlinear[t]);
    }
    sl /= r.raw_linear.size();
    sn /= r.raw_nonlinear.size();
    CHECK(std::abs(sl - sn) <= 0.1 * std::max(std::abs(sl), std::abs(sn)));
}

TEST_CASE("config validation") {
    ExperimentConfig cfg;
    cfg.lambda = 0.0;
    CHECK_THROWS_AS(run_experiment(cfg), BadLambda);
    cfg.lambda = 0.4;
    cfg.trials = 0;
    CHECK_THROWS_AS(run_experiment(cfg), BadValue);
    cfg.trials = 1;
    cfg.m = 4;
    cfg.n = 10;
    CHECK_THROWS_AS(run_experiment(cfg), BadShape);
}
