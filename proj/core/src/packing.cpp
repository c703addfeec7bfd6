#include "declip/packing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "declip/saturation.hpp"

namespace declip {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

void require_unit(const Vec& x, const char* what) {
    if (std::abs(norm(x) - 1.0) > 1e-10) throw NotUnitNorm(std::string(what) + ": vector not unit norm");
}

void require_unit_frame(const Frame& f, const char* what) {
    if (!f.is_unit_norm()) throw NotUnitNorm(std::string(what) + ": frame vectors must be unit norm");
}

double line_angle(const Vec& v) {
    double theta = std::atan2(v[1], v[0]);
    if (theta < 0.0) theta += kPi;
    if (theta >= kPi) theta -= kPi;
    return theta;
}

// angle between the lines at theta and theta_j, in [0, pi/2]
double line_distance(double theta, double theta_j) {
    double d = std::abs(theta - theta_j);
    d = std::fmod(d, kPi);
    return std::min(d, kPi - d);
}

std::uint64_t binomial_capped(std::size_t m, std::size_t k, std::uint64_t cap) {
    if (k > m) return 0;
    k = std::min(k, m - k);
    std::uint64_t c = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        if (c > cap) return cap + 1;
        c = c * (m - k + i) / i;
    }
    return std::min<std::uint64_t>(c, cap + 1);
}

}  // namespace

double projective_distance(const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw BadShape("projective_distance: dimension mismatch");
    require_unit(x, "projective_distance");
    require_unit(y, "projective_distance");
    const double c = std::clamp(std::abs(dot(x, y)), 0.0, 1.0);
    return std::acos(c);
}

double welch_bound(std::size_t m, std::size_t n) {
    if (n < 1 || m < n || m < 2) throw BadShape("welch_bound: need m >= n >= 1 and m >= 2");
    const double num = static_cast<double>(m - n);
    const double den = static_cast<double>(n) * static_cast<double>(m - 1);
    return std::sqrt(num / den);
}

ArcSweepResult saturation_depth_n2(const Frame& f, double lambda) {
    if (f.dim() != 2) throw BadShape("saturation_depth_n2: frame must live in R^2");
    require_unit_frame(f, "saturation_depth_n2");

    ArcSweepResult res;
    if (lambda >= 1.0) return res;  // |<u, x_j>| <= 1 can never strictly exceed lambda
    const double eps = std::acos(std::clamp(lambda, 0.0, 1.0));

    const std::size_t m = f.size();
    std::vector<double> centers(m);
    for (std::size_t j = 0; j < m; ++j) centers[j] = line_angle(f[j]);

    std::vector<double> endpoints;
    endpoints.reserve(2 * m);
    for (double c : centers) {
        double s = std::fmod(c - eps + kPi, kPi);
        double e = std::fmod(c + eps, kPi);
        endpoints.push_back(s);
        endpoints.push_back(e);
    }
    std::sort(endpoints.begin(), endpoints.end());

    auto depth_at = [&](double theta, std::size_t& ties) {
        std::size_t d = 0;
        for (double c : centers) {
            const double dist = line_distance(theta, c);
            if (std::abs(dist - eps) <= 1e-12) {
                ++ties;
                continue;  // boundary resolved toward non-violation
            }
            if (dist < eps) ++d;
        }
        return d;
    };

    res.witness_theta = 0.5 * (endpoints.front() + endpoints.back());
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
        double mid;
        if (i + 1 < endpoints.size()) {
            mid = 0.5 * (endpoints[i] + endpoints[i + 1]);
        } else {
            mid = std::fmod(0.5 * (endpoints[i] + endpoints[0] + kPi), kPi);
        }
        const std::size_t d = depth_at(mid, res.boundary_ties);
        if (d > res.max_depth) {
            res.max_depth = d;
            res.witness_theta = mid;
        }
    }
    return res;
}

MultiPackingVerdict is_multipacking_exact_n2(const Frame& f, double epsilon, std::size_t fold) {
    if (!(epsilon > 0.0) || epsilon > kPi / 2.0 + 1e-15)
        throw BadValue("is_multipacking: epsilon must lie in (0, pi/2]");
    if (fold < 1) throw BadValue("is_multipacking: fold must be >= 1");
    const ArcSweepResult sweep = saturation_depth_n2(f, std::cos(epsilon));
    MultiPackingVerdict v;
    v.epsilon = epsilon;
    v.fold = fold;
    v.exact = true;
    v.boundary_ties = sweep.boundary_ties;
    v.is_multipacking = sweep.max_depth <= fold;
    if (!v.is_multipacking) {
        Vec w(2);
        w[0] = std::cos(sweep.witness_theta);
        w[1] = std::sin(sweep.witness_theta);
        v.witness = w;
    }
    return v;
}

MultiPackingVerdict is_multipacking_sampled(const Frame& f, double epsilon, std::size_t fold,
                                            std::size_t samples, Rng& rng) {
    if (!(epsilon > 0.0) || epsilon > kPi / 2.0 + 1e-15)
        throw BadValue("is_multipacking: epsilon must lie in (0, pi/2]");
    if (fold < 1) throw BadValue("is_multipacking: fold must be >= 1");
    require_unit_frame(f, "is_multipacking");

    const double lambda = std::cos(epsilon);
    MultiPackingVerdict v;
    v.epsilon = epsilon;
    v.fold = fold;
    v.exact = false;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vec u = normal_unit_vector(f.dim(), rng);
        ++v.samples_checked;
        std::size_t depth = 0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            const double a = std::abs(dot(u, f[j]));
            if (std::abs(a - lambda) <= 1e-12) {
                ++v.boundary_ties;
                continue;
            }
            if (a > lambda) ++depth;
        }
        if (depth > fold) {
            v.is_multipacking = false;
            v.witness = u;
            return v;
        }
    }
    v.is_multipacking = true;
    return v;
}

MultiPackingVerdict is_multipacking(const Frame& f, double epsilon, std::size_t fold,
                                    std::size_t samples, Rng& rng) {
    if (f.dim() == 2) return is_multipacking_exact_n2(f, epsilon, fold);
    return is_multipacking_sampled(f, epsilon, fold, samples, rng);
}

std::string LambdaCResult::method_name() const {
    switch (method) {
        case Method::Exact: return "exact";
        case Method::Interval: return "bounds";
        case Method::Estimate: return "estimate";
    }
    return "unknown";
}

LambdaCResult lambda_c_exact_simplex_case(const Frame& f) {
    if (f.size() != f.dim() + 1)
        throw BadShape("lambda_c_exact_simplex_case: requires m = n+1");
    require_unit_frame(f, "lambda_c_exact_simplex_case");

    LambdaCResult r;
    r.method = LambdaCResult::Method::Exact;
    const SparkResult spark = is_full_spark(f);  // C(n+1, n) subsets, always exhaustive
    if (!spark.full_spark) {
        r.value = 1.0;
    } else {
        const double alpha = coherence(f);
        r.value = std::sqrt(0.5 * (1.0 + alpha));
    }
    r.lower = r.upper = r.value;
    return r;
}

LambdaCResult lambda_c_bounds(const Frame& f) {
    const std::size_t m = f.size(), n = f.dim();
    if (m <= n)
        throw BadShape("lambda_c_bounds: requires m > n (the subset minimum is vacuous at m = n)");
    require_unit_frame(f, "lambda_c_bounds");
    const SparkResult spark = is_full_spark(f);
    if (!spark.full_spark) throw NotFullSpark("lambda_c_bounds: frame is not full spark");

    const std::size_t s = m - n + 1;  // subset size, >= 2 here
    const Mat& g = f.gram();
    auto subset_value = [&](const std::vector<std::size_t>& idx) {
        double mn = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = a + 1; b < idx.size(); ++b)
                mn = std::min(mn, std::abs(g(idx[a], idx[b])));
        return mn;
    };

    double alpha = 0.0;
    bool exhaustive = binomial_capped(m, s, 1000000) <= 1000000;
    if (exhaustive) {
        std::vector<std::size_t> idx(s);
        std::iota(idx.begin(), idx.end(), 0);
        for (;;) {
            alpha = std::max(alpha, subset_value(idx));
            std::size_t i = s;
            while (i > 0 && idx[i - 1] == m - s + (i - 1)) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t k = i; k < s; ++k) idx[k] = idx[k - 1] + 1;
        }
    } else {
        // Greedy growth from seed pairs plus random restarts; the result is a
        // lower bound on the true alpha, so the interval is not certified.
        Rng rng(0xA1FA5EEDULL);
        auto grow = [&](std::size_t i0, std::size_t j0) {
            std::vector<std::size_t> idx = {i0, j0};
            std::vector<bool> used(m, false);
            used[i0] = used[j0] = true;
            while (idx.size() < s) {
                std::size_t best_k = m;
                double best_val = -1.0;
                for (std::size_t k = 0; k < m; ++k) {
                    if (used[k]) continue;
                    double mn = std::numeric_limits<double>::infinity();
                    for (std::size_t t : idx) mn = std::min(mn, std::abs(g(t, k)));
                    if (mn > best_val) {
                        best_val = mn;
                        best_k = k;
                    }
                }
                idx.push_back(best_k);
                used[best_k] = true;
            }
            return subset_value(idx);
        };
        // top pairs by |gram| as deterministic seeds
        std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> pairs;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) pairs.push_back({std::abs(g(i, j)), {i, j}});
        std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        const std::size_t top = std::min<std::size_t>(pairs.size(), 64);
        for (std::size_t t = 0; t < top; ++t)
            alpha = std::max(alpha, grow(pairs[t].second.first, pairs[t].second.second));
        for (std::size_t t = 0; t < 256; ++t) {
            const std::size_t i = static_cast<std::size_t>(rng.next_u64() % m);
            std::size_t j = static_cast<std::size_t>(rng.next_u64() % (m - 1));
            if (j >= i) ++j;
            alpha = std::max(alpha, grow(std::min(i, j), std::max(i, j)));
        }
    }

    LambdaCResult r;
    r.method = LambdaCResult::Method::Interval;
    r.lower = alpha;
    r.upper = std::sqrt(0.5 * (1.0 + alpha));
    r.value = r.upper;
    r.certified = exhaustive;
    return r;
}

namespace {

// (m-n+1)-th largest |<x, x_j>| and the index attaining it.
struct OrderStat {
    double value;
    std::size_t pivot;
};

OrderStat order_statistic(const Frame& f, const Vec& x, std::size_t s,
                          std::vector<std::pair<double, std::size_t>>& scratch) {
    scratch.clear();
    for (std::size_t j = 0; j < f.size(); ++j) scratch.push_back({std::abs(dot(x, f[j])), j});
    std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(s - 1), scratch.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    return {scratch[s - 1].first, scratch[s - 1].second};
}

}  // namespace

LambdaCResult lambda_c_estimate(const Frame& f, std::size_t restarts, Rng& rng) {
    const std::size_t m = f.size(), n = f.dim();
    if (m < n) throw BadShape("lambda_c_estimate: need m >= n");
    require_unit_frame(f, "lambda_c_estimate");
    const SparkResult spark = is_full_spark(f);
    if (!spark.full_spark) throw NotFullSpark("lambda_c_estimate: frame is not full spark");

    const std::size_t s = m - n + 1;
    std::vector<std::pair<double, std::size_t>> scratch;
    scratch.reserve(m);

    auto eval = [&](const Vec& x) { return order_statistic(f, x, s, scratch).value; };

    auto ascend = [&](Vec x) {
        double t = 0.5;
        double fx = eval(x);
        for (int it = 0; it < 100000 && t >= 1e-10; ++it) {
            const OrderStat os = order_statistic(f, x, s, scratch);
            const double ck = dot(x, f[os.pivot]);
            const double sgn = ck >= 0.0 ? 1.0 : -1.0;
            // tangent component of the pivot coefficient's gradient
            Vec g = sgn * f[os.pivot];
            axpy(g, -sgn * ck, x);
            const double glen = norm(g);
            if (glen < 1e-14) break;
            Vec cand = x;
            axpy(cand, t / glen, g);
            const double clen = norm(cand);
            for (std::size_t i = 0; i < cand.size(); ++i) cand[i] /= clen;
            const double fc = eval(cand);
            if (fc > fx) {
                x = cand;
                fx = fc;
                t = std::min(2.0 * t, 0.5);
            } else {
                t *= 0.5;
            }
        }
        return std::pair<Vec, double>{x, fx};
    };

    // Signed pairwise bisectors among the leading coefficients; at a
    // two-active local maximum the exact maximizer is such a bisector.
    auto polish = [&](const Vec& x, double fx) {
        scratch.clear();
        for (std::size_t j = 0; j < m; ++j) scratch.push_back({std::abs(dot(x, f[j])), j});
        const std::size_t top = std::min(m, s + 1);
        std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(top), scratch.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first; });
        std::vector<std::size_t> lead(top);
        for (std::size_t i = 0; i < top; ++i) lead[i] = scratch[i].second;

        double best = fx;
        for (std::size_t a = 0; a < lead.size(); ++a) {
            for (std::size_t b = a + 1; b < lead.size(); ++b) {
                const std::size_t i = lead[a], j = lead[b];
                const double si = dot(x, f[i]) >= 0.0 ? 1.0 : -1.0;
                const double sj = dot(x, f[j]) >= 0.0 ? 1.0 : -1.0;
                Vec u = si * f[i];
                axpy(u, sj, f[j]);
                const double len = norm(u);
                if (len < 1e-12) continue;
                for (std::size_t k = 0; k < u.size(); ++k) u[k] /= len;
                best = std::max(best, eval(u));
            }
        }
        return best;
    };

    double best = 0.0;
    std::size_t total_starts = 0;
    auto run_from = [&](const Vec& start) {
        ++total_starts;
        auto [x, fx] = ascend(start);
        best = std::max(best, polish(x, fx));
    };

    for (std::size_t j = 0; j < m; ++j) run_from(f[j]);
    for (std::size_t r = 0; r < restarts; ++r) run_from(normal_unit_vector(n, rng));

    LambdaCResult out;
    out.method = LambdaCResult::Method::Estimate;
    out.value = best;
    out.lower = best;
    out.upper = best;
    out.restarts = total_starts;
    return out;
}

double lambda_c_oracle_n2(const Frame& f) {
    if (f.dim() != 2) throw BadShape("lambda_c_oracle_n2: frame must live in R^2");
    require_unit_frame(f, "lambda_c_oracle_n2");
    const std::size_t m = f.size();
    const std::size_t s = m - 1;  // (m-n+1)-th largest with n = 2

    std::vector<double> centers(m);
    for (std::size_t j = 0; j < m; ++j) centers[j] = line_angle(f[j]);

    std::vector<double> scratch(m);
    auto eval = [&](double theta) {
        for (std::size_t j = 0; j < m; ++j) scratch[j] = std::abs(std::cos(theta - centers[j]));
        std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(s - 1), scratch.end(),
                         std::greater<>());
        return scratch[s - 1];
    };

    constexpr std::size_t kGrid = 1000000;
    const double h = kPi / static_cast<double>(kGrid);

    // Values on the grid; local maxima of the sampled sequence (circular)
    // seed golden-section refinement.
    std::vector<double> vals(kGrid);
    for (std::size_t i = 0; i < kGrid; ++i) vals[i] = eval(static_cast<double>(i) * h);

    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto golden = [&](double lo, double hi) {
        double a = lo, b = hi;
        double c = b - gr * (b - a);
        double d = a + gr * (b - a);
        double fc = eval(c), fd = eval(d);
        while (b - a > 1e-12) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = eval(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = eval(d);
            }
        }
        return std::max(fc, fd);
    };

    double best = 0.0;
    for (std::size_t i = 0; i < kGrid; ++i) {
        const double prev = vals[(i + kGrid - 1) % kGrid];
        const double next = vals[(i + 1) % kGrid];
        if (vals[i] >= prev && vals[i] >= next) {
            const double center = static_cast<double>(i) * h;
            best = std::max(best, golden(center - h, center + h));
        }
    }
    return best;
}

StabilityEstimate stability_estimate(const Frame& f, double lambda, double radius,
                                     std::size_t pairs, Rng& rng) {
    if (lambda <= 0.0) throw BadLambda("stability_estimate: lambda must be positive");
    if (radius <= 0.0) throw BadValue("stability_estimate: radius must be positive");
    if (pairs < 1) throw BadValue("stability_estimate: pairs must be >= 1");

    const std::size_t n = f.dim();
    auto uniform_in_ball = [&](double r) {
        Vec u = normal_unit_vector(n, rng);
        const double scale = r * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
        return scale * u;
    };

    // Direction along which the clipped coefficients of x cannot move: a null
    // vector of the unsaturated sub-family's frame operator, when that family
    // is rank deficient.
    auto null_direction = [&](const Vec& x) -> std::optional<Vec> {
        const SaturationPattern p = pattern(f, x, lambda);
        if (p.unsaturated.empty()) return normal_unit_vector(n, rng);
        Mat op(n, n);
        for (std::size_t j : p.unsaturated)
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) op(a, b) += f[j][a] * f[j][b];
        const SymEig eig = sym_eig(op);
        if (eig.eigenvalues.front() > 1e-12 * std::max(1.0, eig.eigenvalues.back()))
            return std::nullopt;  // unsaturated family spans; no null direction
        Vec u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = eig.eigenvectors(i, 0);
        return u;
    };

    StabilityEstimate out;
    for (std::size_t p = 0; p < pairs; ++p) {
        Vec x(n), y(n);
        if (p % 5 == 0) {
            // near-collision pair, delta log-uniform in [1e-6, 1e-2]
            const double delta = std::min(1e-6 * std::pow(1e4, rng.uniform()), 0.5 * radius);
            x = uniform_in_ball(radius - delta);
            Vec u(n);
            if (auto nd = null_direction(x)) {
                u = *nd;
            } else {
                u = normal_unit_vector(n, rng);
            }
            y = x;
            axpy(y, delta, u);
        } else {
            x = uniform_in_ball(radius);
            y = uniform_in_ball(radius);
        }
        const double num = norm(x - y);
        const double den = norm(saturate(analysis(f, x), lambda) - saturate(analysis(f, y), lambda));
        if (num < 1e-14 && den < 1e-14) {
            ++out.pairs_skipped;
            continue;
        }
        ++out.pairs_evaluated;
        if (den < 1e-14) {
            out.value = std::numeric_limits<double>::infinity();
            out.failure_witness = true;
            return out;
        }
        out.value = std::max(out.value, num / den);
    }
    return out;
}

}  // namespace declip
