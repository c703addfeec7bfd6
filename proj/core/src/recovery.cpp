#include "declip/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace declip {

namespace {

void require_schedule_entries(const std::vector<double>& xs, const char* what) {
    if (xs.empty()) throw BadValue(std::string(what) + ": empty schedule");
    for (double x : xs) {
        if (!std::isfinite(x) || x < 0.0) throw BadValue(std::string(what) + ": coefficients must be finite and >= 0");
    }
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

StepSchedule StepSchedule::constant(double alpha, double beta) {
    return StepSchedule({alpha}, {beta});
}

StepSchedule::StepSchedule(std::vector<double> alphas, std::vector<double> betas)
    : alphas_(std::move(alphas)), betas_(std::move(betas)) {
    require_schedule_entries(alphas_, "StepSchedule alpha");
    require_schedule_entries(betas_, "StepSchedule beta");
}

double StepSchedule::alpha(std::size_t k) const { return alphas_[std::min(k, alphas_.size() - 1)]; }
double StepSchedule::beta(std::size_t k) const { return betas_[std::min(k, betas_.size() - 1)]; }

double convergence_factor(double lower, double upper, double alpha) {
    if (!(0.0 < lower && lower <= upper)) throw BadValue("convergence_factor: need 0 < A <= B");
    if (alpha <= 0.0) throw BadValue("convergence_factor: alpha must be positive");
    return std::max(std::abs(1.0 - alpha * lower), std::abs(1.0 - alpha * upper));
}

RecoveryTrace linear_frame_algorithm(const Frame& f, const Vec& coeffs, double alpha,
                                     std::size_t iters, const std::optional<Vec>& ground_truth) {
    if (coeffs.size() != f.size()) throw BadShape("linear_frame_algorithm: coefficient length mismatch");
    if (iters < 1) throw BadValue("linear_frame_algorithm: iters must be >= 1");
    if (ground_truth && ground_truth->size() != f.dim())
        throw BadShape("linear_frame_algorithm: ground truth dimension mismatch");

    const FrameBounds bounds = frame_bounds(f);
    if (!(alpha > 0.0) || alpha >= 2.0 / bounds.upper)
        throw StepOutOfRange("linear_frame_algorithm: need 0 < alpha < 2/B");
    const double factor = convergence_factor(bounds.lower, bounds.upper, alpha);

    RecoveryTrace trace;
    trace.errors_are_residuals = !ground_truth.has_value();
    Vec y(f.dim());
    auto record_error = [&](const Vec& yk) {
        if (ground_truth) return norm(*ground_truth - yk);
        return norm(analysis(f, yk) - coeffs);
    };
    trace.iterates.push_back(y);
    trace.errors.push_back(record_error(y));

    for (std::size_t k = 0; k < iters; ++k) {
        Vec step(f.dim());
        for (std::size_t j = 0; j < f.size(); ++j) axpy(step, coeffs[j] - dot(y, f[j]), f[j]);
        axpy(y, alpha, step);
        trace.iterates.push_back(y);
        trace.errors.push_back(record_error(y));
        trace.alphas_used.push_back(alpha);
        trace.betas_used.push_back(0.0);
        if (ground_truth && trace.errors[k + 1] > factor * trace.errors[k] + 1e-9)
            throw ContractViolation("linear_frame_algorithm: step exceeded contraction factor");
    }
    return trace;
}

RecoveryTrace saturated_frame_algorithm(const Frame& f, const Vec& sat_coeffs, double lambda,
                                        const StepSchedule& schedule, std::size_t iters,
                                        const std::optional<Vec>& ground_truth) {
    if (lambda <= 0.0) throw BadLambda("saturated_frame_algorithm: lambda must be positive");
    if (sat_coeffs.size() != f.size()) throw BadShape("saturated_frame_algorithm: coefficient length mismatch");
    if (iters < 1) throw BadValue("saturated_frame_algorithm: iters must be >= 1");
    if (ground_truth && ground_truth->size() != f.dim())
        throw BadShape("saturated_frame_algorithm: ground truth dimension mismatch");

    const std::size_t m = f.size();
    std::vector<std::size_t> unsat, pos, neg;
    for (std::size_t j = 0; j < m; ++j) {
        const double c = sat_coeffs[j];
        if (std::abs(c) > lambda + 1e-12)
            throw BadCoeffs("saturated_frame_algorithm: coefficient outside [-lambda, lambda]");
        if (c >= lambda - 1e-12) {
            pos.push_back(j);
        } else if (c <= -(lambda - 1e-12)) {
            neg.push_back(j);
        } else {
            unsat.push_back(j);
        }
    }

    RecoveryTrace trace;
    trace.errors_are_residuals = !ground_truth.has_value();
    Vec y(f.dim());
    auto record_error = [&](const Vec& yk) {
        if (ground_truth) return norm(*ground_truth - yk);
        return norm(saturate(analysis(f, yk), lambda) - sat_coeffs);
    };
    trace.iterates.push_back(y);
    trace.errors.push_back(record_error(y));

    for (std::size_t k = 0; k < iters; ++k) {
        const double a = schedule.alpha(k);
        const double b = schedule.beta(k);
        RelativeSaturation active;
        Vec step(f.dim());
        for (std::size_t j : unsat) axpy(step, a * (sat_coeffs[j] - dot(y, f[j])), f[j]);
        for (std::size_t j : pos) {
            const double yj = dot(y, f[j]);
            if (yj < lambda) {
                active.pos_active.push_back(j);
                axpy(step, b * (lambda - yj), f[j]);
            }
        }
        for (std::size_t j : neg) {
            const double yj = dot(y, f[j]);
            if (yj > -lambda) {
                active.neg_active.push_back(j);
                axpy(step, b * (-lambda - yj), f[j]);
            }
        }
        axpy(y, 1.0, step);
        trace.iterates.push_back(y);
        trace.errors.push_back(record_error(y));
        trace.active_sets.push_back(std::move(active));
        trace.alphas_used.push_back(a);
        trace.betas_used.push_back(b);
    }
    return trace;
}

StepComparison compare_step(const Frame& f, const Vec& x, const Vec& y, double lambda) {
    const SaturationPattern p = pattern(f, x, lambda);
    const RelativeSaturation rel = relative_pattern(f, x, y, lambda);

    if (p.unsaturated.size() < f.dim())
        throw NotAFrame("compare_step: unsaturated sub-family cannot span");
    FrameBounds unsat_bounds;
    try {
        unsat_bounds = frame_bounds(subframe(f, p.unsaturated));
    } catch (const NotAFrame&) {
        throw NotAFrame("compare_step: unsaturated sub-family does not span");
    }

    std::vector<std::size_t> extended = p.unsaturated;
    extended.insert(extended.end(), rel.pos_active.begin(), rel.pos_active.end());
    extended.insert(extended.end(), rel.neg_active.begin(), rel.neg_active.end());
    std::sort(extended.begin(), extended.end());
    const FrameBounds ext_bounds = frame_bounds(subframe(f, extended));

    const FrameBounds full = frame_bounds(f);
    const double a = 2.0 / (full.lower + full.upper);
    const Vec c = analysis(f, x);

    // linear step on the unsaturated coordinates
    Vec y_lin = y;
    {
        Vec step(f.dim());
        for (std::size_t j : p.unsaturated) axpy(step, c[j] - dot(y, f[j]), f[j]);
        axpy(y_lin, a, step);
    }
    // clip-aware step
    Vec y_sat = y;
    {
        Vec step(f.dim());
        for (std::size_t j : p.unsaturated) axpy(step, c[j] - dot(y, f[j]), f[j]);
        for (std::size_t j : rel.pos_active) axpy(step, lambda - dot(y, f[j]), f[j]);
        for (std::size_t j : rel.neg_active) axpy(step, -lambda - dot(y, f[j]), f[j]);
        axpy(y_sat, a, step);
    }

    StepComparison out;
    out.lower_unsaturated = unsat_bounds.lower;
    out.lower_extended = ext_bounds.lower;
    out.err_linear = norm(x - y_lin);
    out.err_saturated = norm(x - y_sat);
    out.gap_positive = ext_bounds.lower > unsat_bounds.lower;
    if (out.gap_positive && out.err_saturated > out.err_linear + 1e-9)
        throw ContractViolation("compare_step: clip-aware step lost to the linear step despite a bound gap");
    return out;
}

bool parseval_contraction_check(const Frame& f, const Vec& x, double lambda, double stability_c,
                                std::size_t iters) {
    if (stability_c <= 1.0) throw BadValue("parseval_contraction_check: C must exceed 1");
    Mat residual = f.frame_operator();
    for (std::size_t i = 0; i < f.dim(); ++i) residual(i, i) -= 1.0;
    if (frobenius_norm(residual) > 1e-8)
        throw NotParseval("parseval_contraction_check: frame operator is not I");

    const Vec sat = saturate(analysis(f, x), lambda);
    const RecoveryTrace trace =
        saturated_frame_algorithm(f, sat, lambda, StepSchedule::constant(1.0, 1.0), iters, x);
    const double rate = std::sqrt(1.0 - 1.0 / (stability_c * stability_c));
    const double x_norm = norm(x);
    double envelope = x_norm;
    for (std::size_t k = 0; k < trace.errors.size(); ++k) {
        if (trace.errors[k] > envelope * (1.0 + 1e-6)) return false;
        envelope *= rate;
    }
    return true;
}

namespace {

void write_trace(const RecoveryTrace& trace, const Frame& f, const Vec& coeffs,
                 std::optional<double> lambda, std::ostream& out) {
    out << "iter,error,residual,n_pos_active,n_neg_active\n";
    for (std::size_t k = 1; k < trace.iterates.size(); ++k) {
        const Vec& yk = trace.iterates[k];
        const double residual = lambda ? norm(saturate(analysis(f, yk), *lambda) - coeffs)
                                       : norm(analysis(f, yk) - coeffs);
        std::size_t npos = 0, nneg = 0;
        if (k - 1 < trace.active_sets.size()) {
            npos = trace.active_sets[k - 1].pos_active.size();
            nneg = trace.active_sets[k - 1].neg_active.size();
        }
        out << k << ',' << format_double(trace.errors[k]) << ',' << format_double(residual) << ','
            << npos << ',' << nneg << '\n';
    }
    if (!out) throw IoError("save_trace: write failure");
}

}  // namespace

void save_trace(const RecoveryTrace& trace, const Frame& f, const Vec& coeffs,
                std::optional<double> lambda, std::ostream& out) {
    write_trace(trace, f, coeffs, lambda, out);
}

void save_trace(const RecoveryTrace& trace, const Frame& f, const Vec& coeffs,
                std::optional<double> lambda, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_trace: cannot open " + path.string());
    write_trace(trace, f, coeffs, lambda, out);
}

}  // namespace declip
