#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "declip/saturation.hpp"

namespace declip {

// Per-iteration step coefficients (alpha_k, beta_k >= 0). A single pair acts
// as a constant schedule; a sequence repeats its last entry past the end.
// beta == 0 everywhere reduces the clip-aware iteration to the linear frame
// algorithm on the unsaturated coordinates.
class StepSchedule {
public:
    static StepSchedule constant(double alpha, double beta);
    StepSchedule(std::vector<double> alphas, std::vector<double> betas);

    double alpha(std::size_t k) const;
    double beta(std::size_t k) const;

private:
    std::vector<double> alphas_, betas_;
};

// Full record of a reconstruction run: iterates y_0 = 0 .. y_K, per-iterate
// error (|x - y_k| against ground truth when supplied, otherwise the
// residual |Phi Theta y_k - c|), and the active saturated sets used for each
// step.
struct RecoveryTrace {
    std::vector<Vec> iterates;
    std::vector<double> errors;                  // length K+1, aligned with iterates
    bool errors_are_residuals = false;
    std::vector<RelativeSaturation> active_sets;  // length K; sets used to form y_{k+1}
    std::vector<double> alphas_used, betas_used;  // length K
};

// Richardson iteration y_{k+1} = y_k + alpha * Theta^*(c - Theta y_k) on the
// given frame. Requires 0 < alpha < 2/B (StepOutOfRange otherwise). With
// ground truth supplied, each step is verified against the contraction
// factor max(|1 - alpha A|, |1 - alpha B|) with 1e-9 slack.
RecoveryTrace linear_frame_algorithm(const Frame& f, const Vec& coeffs, double alpha,
                                     std::size_t iters,
                                     const std::optional<Vec>& ground_truth = std::nullopt);

// max(|1 - alpha A|, |1 - alpha B|); minimized at alpha = 2/(A+B) where it
// equals (B-A)/(B+A).
double convergence_factor(double lower, double upper, double alpha);

// Clip-aware iteration on saturated coefficients c = Phi_lambda(Theta x):
//   y_{k+1} = y_k + alpha_k sum_{unsat} (c_j - <y_k, x_j>) x_j
//                 + beta_k sum_{pos active} (lambda - <y_k, x_j>) x_j
//                 + beta_k sum_{neg active} (-lambda - <y_k, x_j>) x_j
// Entries with |c_j| >= lambda - 1e-12 are treated as saturated with their
// sign (a receiver of clipped data cannot distinguish the boundary case;
// at the boundary the saturated-term update equals the linear residual).
// Throws BadCoeffs when any |c_j| > lambda + 1e-12.
RecoveryTrace saturated_frame_algorithm(const Frame& f, const Vec& sat_coeffs, double lambda,
                                        const StepSchedule& schedule, std::size_t iters,
                                        const std::optional<Vec>& ground_truth = std::nullopt);

// One-step comparison at an iterate y: optimal lower frame bounds of the
// unsaturated sub-family versus the unsaturated-plus-active sub-family, and
// the errors after a single step of each variant with alpha = beta =
// 2/(A+B) (full-frame bounds). When the bound gap is strictly positive the
// clip-aware step must not lose to the linear step (ContractViolation
// otherwise). Throws NotAFrame when the unsaturated sub-family does not
// span.
struct StepComparison {
    double lower_unsaturated = 0.0;
    double lower_extended = 0.0;
    double err_linear = 0.0;
    double err_saturated = 0.0;
    bool gap_positive = false;
};

StepComparison compare_step(const Frame& f, const Vec& x, const Vec& y, double lambda);

// Does the run with alpha = beta = 1 on a Parseval frame stay inside the
// geometric envelope |x - y_k| <= (1 - C^-2)^{k/2} |x| (multiplicative slack
// 1 + 1e-6)? C must be a stability constant valid on 2|x| B; Monte-Carlo
// estimates only lower-bound C, so a failed check with an estimated C is
// inconclusive.
bool parseval_contraction_check(const Frame& f, const Vec& x, double lambda, double stability_c,
                                std::size_t iters);

// CSV serialization: header "iter,error,residual,n_pos_active,n_neg_active",
// one row per iteration k = 1..K, floats at 17 significant digits.
void save_trace(const RecoveryTrace& trace, const Frame& f, const Vec& coeffs,
                std::optional<double> lambda, std::ostream& out);
void save_trace(const RecoveryTrace& trace, const Frame& f, const Vec& coeffs,
                std::optional<double> lambda, const std::filesystem::path& path);

}  // namespace declip
