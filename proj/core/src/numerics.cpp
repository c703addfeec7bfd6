#include "declip/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace declip {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_finite(const std::vector<double>& xs, const char* what) {
    for (double x : xs) {
        if (!std::isfinite(x)) throw NonFinite(std::string(what) + ": non-finite entry");
    }
}

}  // namespace

Vec::Vec(std::initializer_list<double> xs) : data_(xs) {
    require_finite(data_, "Vec");
}

Vec::Vec(std::vector<double> xs) : data_(std::move(xs)) {
    require_finite(data_, "Vec");
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw BadShape("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_sq(const Vec& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * a[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

Vec operator+(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw BadShape("Vec+: size mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vec operator-(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw BadShape("Vec-: size mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vec operator*(double s, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

void axpy(Vec& a, double s, const Vec& b) {
    if (a.size() != b.size()) throw BadShape("axpy: size mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) throw BadShape("Mat: entries length != rows*cols");
    require_finite(data_, "Mat");
}

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat transpose(const Mat& m) {
    Mat t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw BadShape("matmul: inner dimension mismatch");
    Mat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vec matvec(const Mat& m, const Vec& x) {
    if (m.cols() != x.size()) throw BadShape("matvec: dimension mismatch");
    Vec y(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double frobenius_norm(const Mat& m) {
    double s = 0.0;
    for (double x : m.entries()) s += x * x;
    return std::sqrt(s);
}

double det(const Mat& m) {
    if (m.rows() != m.cols()) throw BadShape("det: matrix not square");
    const std::size_t n = m.rows();
    Mat a = m;
    double d = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
            d = -d;
        }
        d *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return d;
}

SymEig sym_eig(const Mat& m) {
    if (m.rows() != m.cols()) throw BadShape("sym_eig: matrix not square");
    const std::size_t n = m.rows();
    require_finite(m.entries(), "sym_eig");

    const double fro = frobenius_norm(m);
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = m(i, j) - m(j, i);
            asym += 2.0 * d * d;
        }
    if (std::sqrt(asym) > 1e-12 * std::max(1.0, fro))
        throw NonSymmetric("sym_eig: input not symmetric within tolerance");

    // Work on the symmetrized copy.
    Mat a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
    Mat v = Mat::identity(n);

    const double target = 1e-12 * fro;
    bool converged = false;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
        if (std::sqrt(off) <= target) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged && n > 1) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
        if (std::sqrt(off) > target) throw ConvergenceFailure("sym_eig: Jacobi did not converge in 100 sweeps");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SymEig out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Mat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
    }
    return out;
}

std::size_t rank(const Mat& m, double tol) {
    if (tol <= 0.0) throw BadValue("rank: tol must be positive");
    require_finite(m.entries(), "rank");
    if (m.rows() == 0 || m.cols() == 0) return 0;

    // Gram matrix on the smaller side so the eigenproblem is as small as possible.
    const bool use_mtm = m.cols() <= m.rows();
    const std::size_t k = use_mtm ? m.cols() : m.rows();
    Mat g(k, k);
    if (use_mtm) {
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i; j < k; ++j) {
                double s = 0.0;
                for (std::size_t r = 0; r < m.rows(); ++r) s += m(r, i) * m(r, j);
                g(i, j) = s;
                g(j, i) = s;
            }
    } else {
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i; j < k; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < m.cols(); ++c) s += m(i, c) * m(j, c);
                g(i, j) = s;
                g(j, i) = s;
            }
    }
    const SymEig eig = sym_eig(g);
    const double lmax = std::max(eig.eigenvalues.back(), 0.0);
    if (lmax == 0.0) return 0;
    // Gram eigenvalues of an exactly singular matrix come out at the
    // eps * lmax noise level, so the user threshold is floored there;
    // otherwise tiny tolerances would count pure rounding noise as rank.
    const double noise_floor =
        static_cast<double>(std::max(m.rows(), m.cols())) * 2.3e-16 * lmax;
    const double thresh = std::max(tol * tol * lmax, noise_floor);
    std::size_t r = 0;
    for (double l : eig.eigenvalues)
        if (l > thresh) ++r;
    return r;
}

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(mix64(master + kGolden) ^ (index + kGolden));
}

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    // splitmix64 expansion of the seed into the xoshiro256** state
    std::uint64_t s = seed;
    for (auto& w : state_) {
        s += kGolden;
        w = mix64(s);
    }
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

std::uint64_t Rng::next_u64() {
    // xoshiro256** by Blackman and Vigna
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    has_spare_ = true;
    return r * std::cos(kTwoPi * u2);
}

Rng Rng::child(std::uint64_t index) const { return Rng(derive_seed(seed_, index)); }

Vec normal_unit_vector(std::size_t n, Rng& rng) {
    if (n < 1) throw BadShape("normal_unit_vector: n must be >= 1");
    Vec v(n);
    for (;;) {
        for (std::size_t i = 0; i < n; ++i) v[i] = rng.normal();
        const double len = norm(v);
        if (len > 1e-154) {
            for (std::size_t i = 0; i < n; ++i) v[i] /= len;
            return v;
        }
    }
}

}  // namespace declip
