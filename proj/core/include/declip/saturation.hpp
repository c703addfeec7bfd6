#pragma once

#include <optional>
#include <vector>

#include "declip/frames.hpp"

namespace declip {

// Hard clamp to [-lambda, lambda]; the boundary |t| = lambda passes through
// unchanged (unsaturated by convention).
double phi(double t, double lambda);

// Entrywise phi.
Vec saturate(const Vec& c, double lambda);

// Index sets of a point's frame coefficients at clip level lambda.
// {unsaturated, positive, negative} partition {0..m-1};
// strictly_unsaturated uses |.| < lambda and is contained in unsaturated.
struct SaturationPattern {
    double lambda = 0.0;
    std::vector<std::size_t> unsaturated;           // |<x, x_j>| <= lambda
    std::vector<std::size_t> strictly_unsaturated;  // |<x, x_j>| <  lambda
    std::vector<std::size_t> positive;              // <x, x_j> >  lambda
    std::vector<std::size_t> negative;              // <x, x_j> < -lambda
};

SaturationPattern pattern(const Frame& f, const Vec& x, double lambda);

// Saturated coordinates of x that are still actively wrong at an iterate y:
// pos_active = {j in positive(x) : <y, x_j> <  lambda},
// neg_active = {j in negative(x) : <y, x_j> > -lambda}.
struct RelativeSaturation {
    std::vector<std::size_t> pos_active;
    std::vector<std::size_t> neg_active;
};

RelativeSaturation relative_pattern(const Frame& f, const Vec& x, const Vec& y, double lambda);

// Do the unsaturated coordinates of x span R^n? (strict variant uses the
// strictly unsaturated set). Rank test with tolerance 1e-10.
bool recovers_at(const Frame& f, const Vec& x, double lambda, bool strict = false);

struct BallRecoveryVerdict {
    bool holds = false;
    // true when the verdict is provably exact (trivial clip level, a
    // non-spanning family, or the n = 2 arc sweep for full-spark unit
    // frames); false for sampled checks, where `holds` only means no
    // counterexample among the samples.
    bool exact = false;
    std::optional<Vec> counterexample;  // definitive failure point when found
    std::size_t samples_checked = 0;
};

// Does the frame recover every vector of norm <= alpha from lambda-clipped
// coefficients? Exact for n = 2 full-spark unit frames and for trivially
// large lambda; otherwise sampled on the sphere of radius alpha.
BallRecoveryVerdict recovers_on_ball(const Frame& f, double lambda, double alpha,
                                     std::size_t samples, Rng& rng);

// The four overshoot conditions under which the clip-aware iteration leaves
// the ball of radius |x| at step two, evaluated for a Parseval frame:
//   (a) <x, x_1> > lambda
//   (b) <x, x_2> = lambda                        (within 1e-9)
//   (c) |<x, x_j>| + |<x, x_1> - lambda| |<x_1, x_j>| <= lambda  for j >= 3
//   (d) <x, x_1> |x_1|^2 < -<x_1, x_2> lambda
struct OvershootReport {
    bool cond_a = false, cond_b = false, cond_c = false, cond_d = false;
    bool all_hold = false;
    std::optional<Vec> y2;  // second iterate, computed when all four hold
    bool overshoot = false;  // |y2| > |x|
};

OvershootReport badfa_conditions(const Frame& parseval, const Vec& x, double lambda);

}  // namespace declip
