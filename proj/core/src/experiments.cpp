#include "declip/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace declip {

namespace {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.n < 1 || cfg.m < cfg.n) throw BadShape("experiment: need m >= n >= 1");
    if (cfg.trials < 1) throw BadValue("experiment: trials must be >= 1");
    if (cfg.iters < 1) throw BadValue("experiment: iters must be >= 1");
    if (cfg.lambda <= 0.0) throw BadLambda("experiment: lambda must be positive");
}

// Unsaturated coordinates per the algorithm's classification; the linear
// variant diverges-in-place (stalls) when they fail to span.
bool unsaturated_spans(const Frame& f, const Vec& sat_coeffs, double lambda) {
    std::vector<std::size_t> unsat;
    for (std::size_t j = 0; j < f.size(); ++j)
        if (std::abs(sat_coeffs[j]) < lambda - 1e-12) unsat.push_back(j);
    if (unsat.size() < f.dim()) return false;
    Mat rows(unsat.size(), f.dim());
    for (std::size_t r = 0; r < unsat.size(); ++r)
        for (std::size_t c = 0; c < f.dim(); ++c) rows(r, c) = f[unsat[r]][c];
    return rank(rows, 1e-10) == f.dim();
}

double reduction_db(double err_linear, double err_nonlinear) {
    const bool lin_zero = err_linear < 1e-300;
    const bool non_zero = err_nonlinear < 1e-300;
    if (lin_zero && non_zero) return 0.0;
    if (non_zero) return 300.0;
    if (lin_zero) return -300.0;
    const double r = err_linear / err_nonlinear;
    return 10.0 * std::log10(r * r);
}

// inclusive nearest-rank quantile on a sorted sample
double nearest_rank(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial_index) {
    validate(cfg);
    const std::uint64_t trial_seed = derive_seed(cfg.master_seed, trial_index);

    TrialResult out;
    for (std::size_t salt = 0;; ++salt) {
        if (salt > 100) throw ConvergenceFailure("run_trial: exceeded redraw budget (100)");
        Rng rng(salt == 0 ? trial_seed : derive_seed(trial_seed, salt));
        Frame frame = random_unit_frame(cfg.n, cfg.m, rng);
        const Vec x = normal_unit_vector(cfg.n, rng);
        const Vec sat = saturate(analysis(frame, x), cfg.lambda);
        if (!unsaturated_spans(frame, sat, cfg.lambda)) {
            ++out.redraws;
            continue;
        }
        const FrameBounds bounds = frame_bounds(frame);
        const double a = 2.0 / (bounds.lower + bounds.upper);

        const RecoveryTrace lin = saturated_frame_algorithm(
            frame, sat, cfg.lambda, StepSchedule::constant(a, 0.0), cfg.iters, x);
        const RecoveryTrace non = saturated_frame_algorithm(
            frame, sat, cfg.lambda, StepSchedule::constant(a, a), cfg.iters, x);

        out.linear_errors.assign(lin.errors.begin() + 1, lin.errors.end());
        out.nonlinear_errors.assign(non.errors.begin() + 1, non.errors.end());
        return out;
    }
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);

    std::vector<TrialResult> results(cfg.trials);
    std::size_t threads = cfg.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<std::size_t>(threads, cfg.trials);

    if (threads <= 1) {
        for (std::size_t t = 0; t < cfg.trials; ++t) results[t] = run_trial(cfg, t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t t = next.fetch_add(1);
                    if (t >= cfg.trials) return;
                    results[t] = run_trial(cfg, t);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    ExperimentReport rep;
    rep.iters = cfg.iters;
    rep.trials = cfg.trials;
    rep.lambda = cfg.lambda;
    rep.mean_err_linear.assign(cfg.iters, 0.0);
    rep.mean_err_nonlinear.assign(cfg.iters, 0.0);
    rep.mean_reduction_db.assign(cfg.iters, 0.0);
    rep.q1_reduction_db.assign(cfg.iters, 0.0);
    rep.q3_reduction_db.assign(cfg.iters, 0.0);

    std::vector<double> db(cfg.trials);
    for (std::size_t k = 0; k < cfg.iters; ++k) {
        double sum_lin = 0.0, sum_non = 0.0, sum_db = 0.0;
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            const double el = results[t].linear_errors[k];
            const double en = results[t].nonlinear_errors[k];
            sum_lin += el;
            sum_non += en;
            db[t] = reduction_db(el, en);
            sum_db += db[t];
        }
        rep.mean_err_linear[k] = sum_lin / static_cast<double>(cfg.trials);
        rep.mean_err_nonlinear[k] = sum_non / static_cast<double>(cfg.trials);
        rep.mean_reduction_db[k] = sum_db / static_cast<double>(cfg.trials);
        std::vector<double> sorted = db;
        std::sort(sorted.begin(), sorted.end());
        rep.q1_reduction_db[k] = nearest_rank(sorted, 0.25);
        rep.q3_reduction_db[k] = nearest_rank(sorted, 0.75);
        if (rep.mean_err_nonlinear[k] > rep.mean_err_linear[k]) rep.nonlinear_worse_iters.push_back(k + 1);
    }
    for (const TrialResult& t : results) rep.degenerate_redraws += t.redraws;
    if (cfg.keep_raw) {
        rep.raw_linear.reserve(cfg.trials);
        rep.raw_nonlinear.reserve(cfg.trials);
        for (TrialResult& t : results) {
            rep.raw_linear.push_back(std::move(t.linear_errors));
            rep.raw_nonlinear.push_back(std::move(t.nonlinear_errors));
        }
    }
    return rep;
}

void emit_report(const ExperimentReport& rep, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("emit_report: cannot create " + dir.string() + ": " + ec.message());

    {
        const auto path = dir / "summary.csv";
        std::ofstream out(path);
        if (!out) throw IoError("emit_report: cannot open " + path.string());
        out << "iter,mean_err_linear,mean_err_nonlinear,mean_red_db,q1_red_db,q3_red_db\n";
        for (std::size_t k = 0; k < rep.iters; ++k) {
            out << (k + 1) << ',' << format_double(rep.mean_err_linear[k]) << ','
                << format_double(rep.mean_err_nonlinear[k]) << ','
                << format_double(rep.mean_reduction_db[k]) << ','
                << format_double(rep.q1_reduction_db[k]) << ','
                << format_double(rep.q3_reduction_db[k]) << '\n';
        }
        if (!out) throw IoError("emit_report: write failure on " + path.string());
    }
    {
        const auto path = dir / "plot.dat";
        std::ofstream out(path);
        if (!out) throw IoError("emit_report: cannot open " + path.string());
        auto block = [&](const char* name, const std::vector<double>& ys) {
            out << "# " << name << '\n';
            for (std::size_t k = 0; k < ys.size(); ++k)
                out << (k + 1) << ' ' << format_double(ys[k]) << '\n';
            out << "\n\n";
        };
        block("mean_err_linear", rep.mean_err_linear);
        block("mean_err_nonlinear", rep.mean_err_nonlinear);
        block("mean_red_db", rep.mean_reduction_db);
        if (!out) throw IoError("emit_report: write failure on " + path.string());
    }
    if (!rep.raw_linear.empty()) {
        const auto path = dir / "raw.csv";
        std::ofstream out(path);
        if (!out) throw IoError("emit_report: cannot open " + path.string());
        out << "trial,iter,err_linear,err_nonlinear\n";
        for (std::size_t t = 0; t < rep.raw_linear.size(); ++t)
            for (std::size_t k = 0; k < rep.raw_linear[t].size(); ++k)
                out << t << ',' << (k + 1) << ',' << format_double(rep.raw_linear[t][k]) << ','
                    << format_double(rep.raw_nonlinear[t][k]) << '\n';
        if (!out) throw IoError("emit_report: write failure on " + path.string());
    }
}

ExperimentReport load_summary(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw IoError("load_summary: cannot open " + csv_path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("load_summary: empty file");
    if (line != "iter,mean_err_linear,mean_err_nonlinear,mean_red_db,q1_red_db,q3_red_db")
        throw IoError("load_summary: unexpected header: " + line);

    ExperimentReport rep;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        std::size_t iter = 0;
        double ml = 0, mn = 0, md = 0, q1 = 0, q3 = 0;
        if (!(ss >> iter >> ml >> mn >> md >> q1 >> q3))
            throw IoError("load_summary: malformed row: " + line);
        rep.mean_err_linear.push_back(ml);
        rep.mean_err_nonlinear.push_back(mn);
        rep.mean_reduction_db.push_back(md);
        rep.q1_reduction_db.push_back(q1);
        rep.q3_reduction_db.push_back(q3);
    }
    rep.iters = rep.mean_err_linear.size();
    return rep;
}

}  // namespace declip
