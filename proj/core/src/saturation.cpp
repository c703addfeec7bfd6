#include "declip/saturation.hpp"

#include <algorithm>
#include <cmath>

#include "declip/packing.hpp"
#include "declip/recovery.hpp"

namespace declip {

double phi(double t, double lambda) {
    if (lambda <= 0.0) throw BadLambda("phi: lambda must be positive");
    if (t > lambda) return lambda;
    if (t < -lambda) return -lambda;
    return t;
}

Vec saturate(const Vec& c, double lambda) {
    if (lambda <= 0.0) throw BadLambda("saturate: lambda must be positive");
    Vec out(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) out[j] = phi(c[j], lambda);
    return out;
}

SaturationPattern pattern(const Frame& f, const Vec& x, double lambda) {
    if (lambda <= 0.0) throw BadLambda("pattern: lambda must be positive");
    const Vec c = analysis(f, x);
    SaturationPattern p;
    p.lambda = lambda;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] > lambda) {
            p.positive.push_back(j);
        } else if (c[j] < -lambda) {
            p.negative.push_back(j);
        } else {
            p.unsaturated.push_back(j);
            if (std::abs(c[j]) < lambda) p.strictly_unsaturated.push_back(j);
        }
    }
    return p;
}

RelativeSaturation relative_pattern(const Frame& f, const Vec& x, const Vec& y, double lambda) {
    const SaturationPattern p = pattern(f, x, lambda);
    if (y.size() != f.dim()) throw BadShape("relative_pattern: iterate dimension mismatch");
    RelativeSaturation r;
    for (std::size_t j : p.positive)
        if (dot(y, f[j]) < lambda) r.pos_active.push_back(j);
    for (std::size_t j : p.negative)
        if (dot(y, f[j]) > -lambda) r.neg_active.push_back(j);
    return r;
}

bool recovers_at(const Frame& f, const Vec& x, double lambda, bool strict) {
    const SaturationPattern p = pattern(f, x, lambda);
    const std::vector<std::size_t>& idx = strict ? p.strictly_unsaturated : p.unsaturated;
    if (idx.size() < f.dim()) return false;
    Mat rows(idx.size(), f.dim());
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < f.dim(); ++c) rows(r, c) = f[idx[r]][c];
    return rank(rows, 1e-10) == f.dim();
}

BallRecoveryVerdict recovers_on_ball(const Frame& f, double lambda, double alpha,
                                     std::size_t samples, Rng& rng) {
    if (lambda <= 0.0) throw BadLambda("recovers_on_ball: lambda must be positive");
    if (alpha <= 0.0) throw BadValue("recovers_on_ball: alpha must be positive");

    BallRecoveryVerdict v;

    // A family that does not span cannot be injective anywhere: every point
    // fails, the zero vector included.
    const SymEig op_eig = sym_eig(f.frame_operator());
    if (op_eig.eigenvalues.back() <= 0.0 ||
        op_eig.eigenvalues.front() <= 1e-12 * op_eig.eigenvalues.back()) {
        v.exact = true;
        v.holds = false;
        v.counterexample = Vec(f.dim());
        return v;
    }

    // lambda at or above alpha * max |x_j|: no coefficient of the ball can
    // exceed the clip level, so the full frame is always unsaturated.
    double max_norm = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) max_norm = std::max(max_norm, norm(f[j]));
    if (lambda >= alpha * max_norm) {
        v.holds = true;
        v.exact = true;
        return v;
    }

    // Scale-invariance: recovery on alpha*B at level lambda <=> recovery on
    // B at level lambda/alpha.
    const double lam = lambda / alpha;

    if (f.dim() == 2 && f.is_unit_norm() && is_full_spark(f).full_spark) {
        const ArcSweepResult sweep = saturation_depth_n2(f, lam);
        v.exact = true;
        v.holds = sweep.max_depth <= f.size() - 2;
        if (!v.holds) {
            Vec w(2);
            w[0] = alpha * std::cos(sweep.witness_theta);
            w[1] = alpha * std::sin(sweep.witness_theta);
            v.counterexample = w;
        }
        return v;
    }

    // Sampled verdict on the sphere of radius alpha (the sphere dominates:
    // shrinking a vector only enlarges its unsaturated set).
    for (std::size_t s = 0; s < samples; ++s) {
        Vec x = alpha * normal_unit_vector(f.dim(), rng);
        ++v.samples_checked;
        if (!recovers_at(f, x, lambda)) {
            v.holds = false;
            v.counterexample = x;
            return v;
        }
    }
    v.holds = true;
    return v;
}

OvershootReport badfa_conditions(const Frame& f, const Vec& x, double lambda) {
    if (lambda <= 0.0) throw BadLambda("badfa_conditions: lambda must be positive");
    if (f.size() < 2) throw BadShape("badfa_conditions: need at least two vectors");
    if (x.size() != f.dim()) throw BadShape("badfa_conditions: dimension mismatch");

    Mat residual = f.frame_operator();
    for (std::size_t i = 0; i < f.dim(); ++i) residual(i, i) -= 1.0;
    if (frobenius_norm(residual) > 1e-8) throw NotParseval("badfa_conditions: frame operator is not I");

    const Vec c = analysis(f, x);
    const double c1 = c[0], c2 = c[1];
    const double n1_sq = f.gram()(0, 0);
    const double g12 = f.gram()(0, 1);

    OvershootReport r;
    r.cond_a = c1 > lambda;
    r.cond_b = std::abs(c2 - lambda) <= 1e-9;
    r.cond_c = true;
    for (std::size_t j = 2; j < f.size(); ++j) {
        if (std::abs(c[j]) + std::abs(c1 - lambda) * std::abs(f.gram()(0, j)) > lambda) {
            r.cond_c = false;
            break;
        }
    }
    r.cond_d = c1 * n1_sq < -g12 * lambda;
    r.all_hold = r.cond_a && r.cond_b && r.cond_c && r.cond_d;

    if (r.all_hold) {
        const RecoveryTrace trace = saturated_frame_algorithm(
            f, saturate(c, lambda), lambda, StepSchedule::constant(1.0, 1.0), 2, x);
        r.y2 = trace.iterates[2];
        r.overshoot = norm(*r.y2) > norm(x);
    }
    return r;
}

}  // namespace declip
