// declip: frame generation, critical-saturation-level analysis, single-shot
// recovery from clipped coefficients, and the Monte-Carlo experiment harness.
//
// Exit codes: 0 success, 2 usage, 3 numeric/method failure, 4 I/O.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "declip/experiments.hpp"
#include "declip/packing.hpp"
#include "declip/recovery.hpp"

using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 42;  // fixed, never time-based

void write_text(const std::optional<std::string>& out_path, const std::string& text) {
    if (!out_path) {
        std::cout << text;
        return;
    }
    std::ofstream out(*out_path);
    if (!out) throw declip::IoError("cannot open " + *out_path);
    out << text;
    if (!out) throw declip::IoError("write failure on " + *out_path);
}

declip::Vec read_coeffs(const std::string& path, std::size_t expected) {
    std::ifstream in(path);
    if (!in) throw declip::IoError("cannot open " + path);
    std::vector<double> xs;
    std::string tok;
    while (in >> tok) {
        char* end = nullptr;
        const double x = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw declip::IoError("bad number '" + tok + "' in " + path);
        if (!std::isfinite(x)) throw declip::NonFinite("non-finite entry '" + tok + "' in " + path);
        xs.push_back(x);
    }
    if (xs.size() != expected)
        throw declip::BadShape("coefficient file " + path + " has " + std::to_string(xs.size()) +
                               " entries, expected " + std::to_string(expected));
    return declip::Vec(std::move(xs));
}

std::string emit_record(const json& record, const std::string& format) {
    if (format == "json") return record.dump() + "\n";
    // terse CSV: op,method,then the scalar payload
    std::ostringstream line;
    line << record.at("op").get<std::string>() << ',' << record.at("method").get<std::string>();
    if (record.contains("value")) line << ',' << record.at("value").dump();
    if (record.contains("interval"))
        line << ',' << record.at("interval")[0].dump() << ',' << record.at("interval")[1].dump();
    if (record.contains("estimate")) line << ',' << record.at("estimate").dump();
    line << '\n';
    return line.str();
}

std::size_t threads_from_env() {
    const char* env = std::getenv("DECLIP_THREADS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0') throw declip::BadValue("DECLIP_THREADS must be a nonnegative integer");
    return static_cast<std::size_t>(v);
}

struct GenArgs {
    std::string kind;
    std::size_t n = 10;
    std::optional<std::size_t> m;
    std::uint64_t seed = kDefaultSeed;
    std::optional<std::string> out;
};

int run_gen(const GenArgs& a) {
    declip::Rng rng(a.seed);
    std::optional<declip::Frame> frame;
    if (a.kind == "random") {
        frame = declip::random_unit_frame(a.n, a.m.value_or(30), rng);
    } else if (a.kind == "onb") {
        if (a.m && *a.m != a.n) throw declip::BadShape("onb: m must equal n");
        frame = declip::orthonormal_basis(a.n);
    } else {
        if (a.m && *a.m != a.n + 1) throw declip::BadShape("etf: m must equal n+1");
        frame = declip::simplex_etf(a.n);
    }
    std::ostringstream text;
    declip::save_frame(*frame, text);
    write_text(a.out, text.str());
    return 0;
}

struct LambdaCArgs {
    std::string frame_path;
    std::string method;
    std::size_t restarts = 50;
    std::uint64_t seed = kDefaultSeed;
    std::string format = "json";
    std::optional<std::string> out;
};

int run_lambda_c(const LambdaCArgs& a) {
    const declip::Frame f = declip::load_frame(a.frame_path);
    json rec;
    rec["op"] = "lambda_c";
    rec["inputs"] = {{"frame", a.frame_path}, {"n", f.dim()}, {"m", f.size()}, {"method", a.method}};
    rec["method"] = a.method;
    if (a.method == "exact") {
        const declip::LambdaCResult r = declip::lambda_c_exact_simplex_case(f);
        rec["value"] = r.value;
        rec["certificate"] = {{"closed_form", true}};
    } else if (a.method == "bounds") {
        const declip::LambdaCResult r = declip::lambda_c_bounds(f);
        rec["interval"] = {r.lower, r.upper};
        rec["certificate"] = {{"alpha", r.lower}, {"exhaustive", r.certified}};
    } else if (a.method == "estimate") {
        declip::Rng rng(a.seed);
        const declip::LambdaCResult r = declip::lambda_c_estimate(f, a.restarts, rng);
        rec["inputs"]["restarts"] = a.restarts;
        rec["inputs"]["seed"] = a.seed;
        rec["estimate"] = r.value;
        rec["certificate"] = {{"starts", r.restarts}, {"lower_bound", true}};
    } else {  // oracle-n2
        rec["value"] = declip::lambda_c_oracle_n2(f);
        rec["certificate"] = {{"grid_points", 1000000}};
    }
    write_text(a.out, emit_record(rec, a.format));
    return 0;
}

struct RecoverArgs {
    std::string frame_path;
    std::string coeffs_path;
    std::string algo;
    double lambda = 0.0;
    std::optional<double> alpha, beta;
    std::size_t iters = 50;
    std::optional<std::string> truth_path;
    std::optional<std::string> out;
};

int run_recover(const RecoverArgs& a) {
    const declip::Frame f = declip::load_frame(a.frame_path);
    const declip::Vec coeffs = read_coeffs(a.coeffs_path, f.size());
    std::optional<declip::Vec> truth;
    if (a.truth_path) {
        const declip::Vec t = read_coeffs(*a.truth_path, f.dim());
        truth = t;
    }
    const declip::FrameBounds bounds = declip::frame_bounds(f);
    const double optimal = 2.0 / (bounds.lower + bounds.upper);
    const double alpha = a.alpha.value_or(optimal);

    declip::RecoveryTrace trace;
    std::optional<double> lambda;
    if (a.algo == "linear") {
        trace = declip::linear_frame_algorithm(f, coeffs, alpha, a.iters, truth);
    } else {
        if (a.lambda <= 0.0) throw declip::BadLambda("recover --algo saturated requires --lambda > 0");
        lambda = a.lambda;
        const double beta = a.beta.value_or(optimal);
        trace = declip::saturated_frame_algorithm(f, coeffs, a.lambda,
                                                  declip::StepSchedule::constant(alpha, beta),
                                                  a.iters, truth);
    }
    std::ostringstream text;
    declip::save_trace(trace, f, coeffs, lambda, text);
    write_text(a.out, text.str());
    return 0;
}

struct ExperimentArgs {
    declip::ExperimentConfig cfg;
    std::string out_dir;
};

int run_experiment_cmd(ExperimentArgs& a) {
    a.cfg.threads = threads_from_env();
    const declip::ExperimentReport rep = declip::run_experiment(a.cfg);
    declip::emit_report(rep, a.out_dir);
    return 0;
}

struct WelchArgs {
    std::size_t m = 0, n = 0;
    std::string format = "json";
    std::optional<std::string> out;
};

int run_welch(const WelchArgs& a) {
    json rec;
    rec["op"] = "welch_bound";
    rec["inputs"] = {{"m", a.m}, {"n", a.n}};
    rec["method"] = "closed_form";
    rec["value"] = declip::welch_bound(a.m, a.n);
    rec["certificate"] = {{"exact", true}};
    write_text(a.out, emit_record(rec, a.format));
    return 0;
}

struct MultipackArgs {
    std::string frame_path;
    double epsilon = 0.0;
    std::size_t fold = 1;
    std::size_t samples = 100000;
    std::uint64_t seed = kDefaultSeed;
    std::string format = "json";
    std::optional<std::string> out;
};

int run_multipack(const MultipackArgs& a) {
    const declip::Frame f = declip::load_frame(a.frame_path);
    declip::Rng rng(a.seed);
    const declip::MultiPackingVerdict v = declip::is_multipacking(f, a.epsilon, a.fold, a.samples, rng);
    json rec;
    rec["op"] = "is_multipacking";
    rec["inputs"] = {{"frame", a.frame_path}, {"epsilon", a.epsilon}, {"fold", a.fold},
                     {"samples", a.samples}, {"seed", a.seed}};
    rec["method"] = v.exact ? "exact-n2" : "sampled";
    rec["value"] = v.is_multipacking;
    json cert = {{"exact", v.exact},
                 {"samples_checked", v.samples_checked},
                 {"boundary_ties", v.boundary_ties}};
    if (v.witness) cert["witness"] = v.witness->entries();
    rec["certificate"] = cert;
    write_text(a.out, emit_record(rec, a.format));
    return 0;
}

struct StabilityArgs {
    std::string frame_path;
    double lambda = 0.0;
    double radius = 1.0;
    std::size_t pairs = 100000;
    std::uint64_t seed = kDefaultSeed;
    std::string format = "json";
    std::optional<std::string> out;
};

int run_stability(const StabilityArgs& a) {
    const declip::Frame f = declip::load_frame(a.frame_path);
    declip::Rng rng(a.seed);
    const declip::StabilityEstimate est = declip::stability_estimate(f, a.lambda, a.radius, a.pairs, rng);
    json rec;
    rec["op"] = "stability";
    rec["inputs"] = {{"frame", a.frame_path}, {"lambda", a.lambda}, {"radius", a.radius},
                     {"pairs", a.pairs}, {"seed", a.seed}};
    rec["method"] = "monte_carlo";
    if (est.failure_witness) {
        rec["estimate"] = "inf";
    } else {
        rec["estimate"] = est.value;
    }
    rec["certificate"] = {{"lower_bound", true},
                          {"failure_witness", est.failure_witness},
                          {"pairs_evaluated", est.pairs_evaluated},
                          {"pairs_skipped", est.pairs_skipped}};
    write_text(a.out, emit_record(rec, a.format));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"declip: recovery of vectors from saturated frame measurements"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a frame file");
    gen_cmd->add_option("--kind", gen.kind, "Frame family")
        ->required()
        ->check(CLI::IsMember({"random", "onb", "etf"}));
    gen_cmd->add_option("--n", gen.n, "Ambient dimension")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--m", gen.m, "Number of vectors (random: default 30)");
    gen_cmd->add_option("--seed", gen.seed, "RNG seed (default 42)");
    gen_cmd->add_option("--out", gen.out, "Output path (default stdout)");

    LambdaCArgs lc;
    auto* lc_cmd = app.add_subcommand("lambda-c", "Critical saturation level of a frame");
    lc_cmd->add_option("--frame", lc.frame_path, "Frame file")->required();
    lc_cmd->add_option("--method", lc.method, "exact (m=n+1) | bounds | estimate | oracle-n2")
        ->required()
        ->check(CLI::IsMember({"exact", "bounds", "estimate", "oracle-n2"}));
    lc_cmd->add_option("--restarts", lc.restarts, "Random restarts for estimate (default 50)");
    lc_cmd->add_option("--seed", lc.seed, "RNG seed (default 42)");
    lc_cmd->add_option("--format", lc.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    lc_cmd->add_option("--out", lc.out, "Output path (default stdout)");

    RecoverArgs rc;
    auto* rc_cmd = app.add_subcommand("recover", "Reconstruct a vector from coefficients");
    rc_cmd->add_option("--frame", rc.frame_path, "Frame file")->required();
    rc_cmd->add_option("--coeffs", rc.coeffs_path, "Coefficient file (whitespace-separated)")->required();
    rc_cmd->add_option("--algo", rc.algo, "linear | saturated")
        ->required()
        ->check(CLI::IsMember({"linear", "saturated"}));
    rc_cmd->add_option("--lambda", rc.lambda, "Clip level (saturated)");
    rc_cmd->add_option("--alpha", rc.alpha, "Step coefficient (default 2/(A+B))");
    rc_cmd->add_option("--beta", rc.beta, "Saturated-term coefficient (default 2/(A+B))");
    rc_cmd->add_option("--iters", rc.iters, "Iteration count (default 50)")->check(CLI::PositiveNumber);
    rc_cmd->add_option("--truth", rc.truth_path, "Ground-truth vector file (error column)");
    rc_cmd->add_option("--out", rc.out, "Output path (default stdout)");

    ExperimentArgs ex;
    auto* ex_cmd = app.add_subcommand("experiment", "Linear vs clip-aware Monte-Carlo comparison");
    ex_cmd->add_option("--lambda", ex.cfg.lambda, "Clip level")->required();
    ex_cmd->add_option("--n", ex.cfg.n, "Dimension (default 10)")->check(CLI::PositiveNumber);
    ex_cmd->add_option("--m", ex.cfg.m, "Frame size (default 30)")->check(CLI::PositiveNumber);
    ex_cmd->add_option("--trials", ex.cfg.trials, "Trials (default 1000)")->check(CLI::PositiveNumber);
    ex_cmd->add_option("--iters", ex.cfg.iters, "Iterations (default 50)")->check(CLI::PositiveNumber);
    ex_cmd->add_option("--seed", ex.cfg.master_seed, "Master seed (default 42)");
    ex_cmd->add_option("--out-dir", ex.out_dir, "Report directory")->required();
    ex_cmd->add_flag("--raw", ex.cfg.keep_raw, "Also write per-trial raw.csv");

    WelchArgs we;
    auto* we_cmd = app.add_subcommand("welch", "Welch coherence bound for (m, n)");
    we_cmd->add_option("--m", we.m, "Number of vectors")->required()->check(CLI::PositiveNumber);
    we_cmd->add_option("--n", we.n, "Dimension")->required()->check(CLI::PositiveNumber);
    we_cmd->add_option("--format", we.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    we_cmd->add_option("--out", we.out, "Output path (default stdout)");

    MultipackArgs mp;
    auto* mp_cmd = app.add_subcommand("multipack", "L-fold multi-packing verdict");
    mp_cmd->add_option("--frame", mp.frame_path, "Frame file (unit vectors)")->required();
    mp_cmd->add_option("--epsilon", mp.epsilon, "Ball radius in radians, (0, pi/2]")->required();
    mp_cmd->add_option("--fold", mp.fold, "L")->required()->check(CLI::PositiveNumber);
    mp_cmd->add_option("--samples", mp.samples, "Samples when n > 2 (default 100000)");
    mp_cmd->add_option("--seed", mp.seed, "RNG seed (default 42)");
    mp_cmd->add_option("--format", mp.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    mp_cmd->add_option("--out", mp.out, "Output path (default stdout)");

    StabilityArgs st;
    auto* st_cmd = app.add_subcommand("stability", "Monte-Carlo stability-constant lower bound");
    st_cmd->add_option("--frame", st.frame_path, "Frame file")->required();
    st_cmd->add_option("--lambda", st.lambda, "Clip level")->required();
    st_cmd->add_option("--radius", st.radius, "Ball radius (default 1)");
    st_cmd->add_option("--pairs", st.pairs, "Sampled pairs (default 100000)")->check(CLI::PositiveNumber);
    st_cmd->add_option("--seed", st.seed, "RNG seed (default 42)");
    st_cmd->add_option("--format", st.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    st_cmd->add_option("--out", st.out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen_cmd->parsed()) return run_gen(gen);
        if (lc_cmd->parsed()) return run_lambda_c(lc);
        if (rc_cmd->parsed()) return run_recover(rc);
        if (ex_cmd->parsed()) return run_experiment_cmd(ex);
        if (we_cmd->parsed()) return run_welch(we);
        if (mp_cmd->parsed()) return run_multipack(mp);
        if (st_cmd->parsed()) return run_stability(st);
    } catch (const declip::IoError& e) {
        std::cerr << "declip: " << e.what() << '\n';
        return 4;
    } catch (const declip::Error& e) {
        std::cerr << "declip: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "declip: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
