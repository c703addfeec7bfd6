#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "declip/recovery.hpp"

namespace declip {

// Head-to-head benchmark configuration: random unit frames of m vectors in
// R^n, a random unit target per trial, both algorithm variants run on the
// clipped coefficients with alpha = beta = 2/(A+B) from the per-trial
// optimal full-frame bounds (beta = 0 for the linear variant).
struct ExperimentConfig {
    std::size_t n = 10;
    std::size_t m = 30;
    double lambda = 0.4;
    std::size_t trials = 1000;
    std::size_t iters = 50;
    std::uint64_t master_seed = 42;
    std::size_t threads = 0;  // 0 = auto (hardware concurrency)
    bool keep_raw = false;    // retain per-trial error curves in the report
};

// Error curves of one trial, iterations 1..iters.
struct TrialResult {
    std::vector<double> linear_errors;
    std::vector<double> nonlinear_errors;
    std::size_t redraws = 0;  // degenerate draws replaced (unsaturated family did not span)
};

// Deterministic in (cfg, trial_index): the trial stream is seeded with
// derive_seed(master_seed, trial_index); degenerate draws are redrawn with a
// salted child seed, up to 100 times.
TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial_index);

// Aggregated per-iteration statistics. Error reduction per trial:
// 10*log10((|y_k - x| / |y~_k - x|)^2), linear over nonlinear; quartiles by
// the inclusive nearest-rank method over trial-level values.
struct ExperimentReport {
    std::size_t iters = 0;
    std::size_t trials = 0;
    double lambda = 0.0;
    std::vector<double> mean_err_linear;     // index k-1 <-> iteration k
    std::vector<double> mean_err_nonlinear;
    std::vector<double> mean_reduction_db;
    std::vector<double> q1_reduction_db;
    std::vector<double> q3_reduction_db;
    std::size_t degenerate_redraws = 0;
    // iterations where the nonlinear mean exceeded the linear mean (expected
    // empty; reported rather than enforced)
    std::vector<std::size_t> nonlinear_worse_iters;
    // populated when cfg.keep_raw
    std::vector<std::vector<double>> raw_linear;
    std::vector<std::vector<double>> raw_nonlinear;
};

// Pure function of the config; trials may run on several threads but results
// are aggregated in trial order, so the report is identical for any thread
// count.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Writes summary.csv (header iter,mean_err_linear,mean_err_nonlinear,
// mean_red_db,q1_red_db,q3_red_db), plot.dat (gnuplot-style two-column
// blocks, one per curve), and raw.csv when raw curves are present. Floats at
// 17 significant digits, '\n' newlines.
void emit_report(const ExperimentReport& report, const std::filesystem::path& dir);

// Inverse of the summary.csv writer.
ExperimentReport load_summary(const std::filesystem::path& csv_path);

}  // namespace declip
