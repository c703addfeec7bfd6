#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "declip/frames.hpp"

namespace declip {

// Distance between the lines spanned by two unit vectors: acos(|<x, y>|),
// in [0, pi/2].
double projective_distance(const Vec& x, const Vec& y);

// Coherence lower bound for m unit vectors in R^n: sqrt((m-n)/(n(m-1))).
double welch_bound(std::size_t m, std::size_t n);

// Exact n = 2 primitive shared by the multi-packing and ball-recovery
// verdicts: the maximum, over directions theta on the projective circle, of
// the number of frame lines within angle acos(lambda) of theta (equivalently
// the number of coefficients with |cos| strictly above lambda). The depth is
// piecewise constant with breakpoints at arc endpoints, so evaluating the
// open segments between consecutive endpoints is exact. Candidates within
// 1e-12 of the threshold are counted as non-violations and tallied.
struct ArcSweepResult {
    std::size_t max_depth = 0;
    double witness_theta = 0.0;
    std::size_t boundary_ties = 0;
};

ArcSweepResult saturation_depth_n2(const Frame& f, double lambda);

struct MultiPackingVerdict {
    double epsilon = 0.0;
    std::size_t fold = 0;  // L
    bool is_multipacking = false;
    bool exact = false;
    std::optional<Vec> witness;  // point with more than L centers within epsilon
    std::size_t samples_checked = 0;
    std::size_t boundary_ties = 0;
};

// Are the open epsilon-balls around the frame lines an L-fold multi-packing
// of projective space? Exact for n = 2 (arc sweep); sampled otherwise.
MultiPackingVerdict is_multipacking_exact_n2(const Frame& f, double epsilon, std::size_t fold);
MultiPackingVerdict is_multipacking_sampled(const Frame& f, double epsilon, std::size_t fold,
                                            std::size_t samples, Rng& rng);
// Dispatches to the exact path when n == 2.
MultiPackingVerdict is_multipacking(const Frame& f, double epsilon, std::size_t fold,
                                    std::size_t samples, Rng& rng);

// Critical saturation level result. Exactly one representation is active:
//   Exact    -> value
//   Interval -> [lower, upper]      (two-sided enclosure when certified)
//   Estimate -> value               (certified lower bound from sphere ascent)
struct LambdaCResult {
    enum class Method { Exact, Interval, Estimate };
    Method method = Method::Exact;
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::size_t restarts = 0;   // Estimate only
    bool certified = true;      // Interval: alpha search was exhaustive
    std::string method_name() const;
};

// m = n+1 closed form: sqrt((1 + coherence)/2) for full-spark unit frames,
// exactly 1 otherwise.
LambdaCResult lambda_c_exact_simplex_case(const Frame& f);

// Two-sided bounds [alpha, sqrt((1+alpha)/2)] where alpha maximizes, over
// (m-n+1)-subsets, the minimum pairwise |<x_i, x_j>|. Exhaustive when
// C(m, m-n+1) <= 10^6; otherwise greedy with random restarts, flagged
// certified = false (alpha is then only a lower bound and the interval is
// not a guaranteed enclosure). Requires a full-spark unit frame with m > n.
LambdaCResult lambda_c_bounds(const Frame& f);

// Sphere ascent on f(x) = (m-n+1)-th largest |<x, x_j>|: random restarts
// (frame vectors are always included as starts), local ascent along the
// pivot coefficient's gradient with step doubling/halving (stop below
// 1e-10), then a pairwise-bisector polish. The maximum found is a certified
// lower bound on lambda_c.
LambdaCResult lambda_c_estimate(const Frame& f, std::size_t restarts, Rng& rng);

// Deterministic n = 2 oracle: dense theta grid (10^6 points) over [0, pi),
// golden-section refinement (to 1e-12 intervals) around every grid-local
// maximum.
double lambda_c_oracle_n2(const Frame& f);

// Monte-Carlo lower bound for the stability constant of lambda-saturation
// recovery on the ball of the given radius: sup |x-y| / |Phi Theta x - Phi
// Theta y| over sampled pairs. 80% independent uniform-in-ball pairs, 20%
// near-collision pairs y = x + delta u with delta log-uniform in
// [1e-6, 1e-2]; when the unsaturated coordinates of x fail to span, the
// perturbation direction is taken from their null space, which exhibits the
// recovery failure as an exact coefficient collision.
struct StabilityEstimate {
    double value = 0.0;  // +infinity when a failure witness was found
    bool failure_witness = false;
    std::size_t pairs_evaluated = 0;
    std::size_t pairs_skipped = 0;
};

StabilityEstimate stability_estimate(const Frame& f, double lambda, double radius,
                                     std::size_t pairs, Rng& rng);

}  // namespace declip
