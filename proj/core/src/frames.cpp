#include "declip/frames.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace declip {

namespace {

// C(m, k) clamped at `cap` to avoid overflow; used only to pick the
// exhaustive-vs-sampled regime.
std::uint64_t binomial_capped(std::size_t m, std::size_t k, std::uint64_t cap) {
    if (k > m) return 0;
    k = std::min(k, m - k);
    std::uint64_t c = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        // c * (m - k + i) / i, with early clamp
        if (c > cap) return cap + 1;
        c = c * (m - k + i) / i;
    }
    return std::min<std::uint64_t>(c, cap + 1);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

Frame::Frame(std::size_t dim, std::vector<Vec> vectors) : dim_(dim), vectors_(std::move(vectors)) {
    if (dim_ < 1) throw BadShape("Frame: dim must be >= 1");
    if (vectors_.empty()) throw BadShape("Frame: need at least one vector");
    for (const Vec& v : vectors_) {
        if (v.size() != dim_) throw BadShape("Frame: vector length != dim");
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!std::isfinite(v[i])) throw NonFinite("Frame: non-finite entry");
    }
    const std::size_t m = vectors_.size();
    frame_op_ = Mat(dim_, dim_);
    for (const Vec& v : vectors_)
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) frame_op_(i, j) += v[i] * v[j];
    gram_ = Mat(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            const double g = dot(vectors_[i], vectors_[j]);
            gram_(i, j) = g;
            gram_(j, i) = g;
        }
}

Mat Frame::analysis_matrix() const {
    Mat t(size(), dim_);
    for (std::size_t j = 0; j < size(); ++j)
        for (std::size_t i = 0; i < dim_; ++i) t(j, i) = vectors_[j][i];
    return t;
}

bool Frame::is_unit_norm(double tol) const {
    for (std::size_t j = 0; j < size(); ++j)
        if (std::abs(gram_(j, j) - 1.0) > 2.0 * tol) return false;
    return true;
}

Frame random_unit_frame(std::size_t n, std::size_t m, Rng& rng) {
    if (n < 1 || m < n) throw BadShape("random_unit_frame: need m >= n >= 1");
    std::vector<Vec> vs;
    vs.reserve(m);
    for (std::size_t j = 0; j < m; ++j) vs.push_back(normal_unit_vector(n, rng));
    return Frame(n, std::move(vs));
}

Frame orthonormal_basis(std::size_t n) {
    if (n < 1) throw BadShape("orthonormal_basis: n must be >= 1");
    std::vector<Vec> vs;
    vs.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        Vec e(n);
        e[j] = 1.0;
        vs.push_back(std::move(e));
    }
    return Frame(n, std::move(vs));
}

Frame simplex_etf(std::size_t n) {
    if (n < 1) throw BadShape("simplex_etf: n must be >= 1");
    const std::size_t big = n + 1;

    // Projections of the standard basis of R^{n+1} onto the complement of
    // the all-ones vector: y_j = e_j - (1/(n+1)) * ones, |y_j|^2 = n/(n+1).
    auto projected = [&](std::size_t j) {
        std::vector<double> y(big, -1.0 / static_cast<double>(big));
        y[j] += 1.0;
        return y;
    };

    // Fixed orthonormal basis of the complement: Gram-Schmidt on y_0..y_{n-1}.
    std::vector<std::vector<double>> q;
    q.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> u = projected(k);
        for (const auto& b : q) {
            double proj = 0.0;
            for (std::size_t i = 0; i < big; ++i) proj += u[i] * b[i];
            for (std::size_t i = 0; i < big; ++i) u[i] -= proj * b[i];
        }
        double len = 0.0;
        for (double x : u) len += x * x;
        len = std::sqrt(len);
        for (double& x : u) x /= len;
        q.push_back(std::move(u));
    }

    const double scale = std::sqrt(static_cast<double>(big) / static_cast<double>(n));  // 1/|y_j|
    std::vector<Vec> vs;
    vs.reserve(big);
    for (std::size_t j = 0; j < big; ++j) {
        const std::vector<double> y = projected(j);
        Vec x(n);
        for (std::size_t i = 0; i < n; ++i) {
            double c = 0.0;
            for (std::size_t t = 0; t < big; ++t) c += q[i][t] * y[t];
            x[i] = c * scale;
        }
        vs.push_back(std::move(x));
    }
    return Frame(n, std::move(vs));
}

FrameBounds frame_bounds(const Frame& f) {
    const SymEig eig = sym_eig(f.frame_operator());
    const double lo = eig.eigenvalues.front();
    const double hi = eig.eigenvalues.back();
    if (hi <= 0.0 || lo <= 1e-12 * hi) throw NotAFrame("frame_bounds: family does not span");
    return FrameBounds{lo, hi};
}

Vec analysis(const Frame& f, const Vec& x) {
    if (x.size() != f.dim()) throw BadShape("analysis: dimension mismatch");
    Vec c(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) c[j] = dot(x, f[j]);
    return c;
}

Vec synthesis(const Frame& f, const Vec& c) {
    if (c.size() != f.size()) throw BadShape("synthesis: coefficient length mismatch");
    Vec x(f.dim());
    for (std::size_t j = 0; j < f.size(); ++j) axpy(x, c[j], f[j]);
    return x;
}

Frame canonical_parseval(const Frame& f) {
    const SymEig eig = sym_eig(f.frame_operator());
    const double hi = eig.eigenvalues.back();
    if (hi <= 0.0 || eig.eigenvalues.front() <= 1e-12 * hi)
        throw NotAFrame("canonical_parseval: family does not span");
    const std::size_t n = f.dim();
    // S^{-1/2} = V diag(eig^{-1/2}) V^T
    Mat t(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += eig.eigenvectors(i, k) * eig.eigenvectors(j, k) / std::sqrt(eig.eigenvalues[k]);
            t(i, j) = s;
        }
    std::vector<Vec> vs;
    vs.reserve(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) vs.push_back(matvec(t, f[j]));
    return Frame(n, std::move(vs));
}

double coherence(const Frame& f) {
    if (f.size() < 2) throw BadShape("coherence: need at least two vectors");
    if (!f.is_unit_norm()) throw NotUnitNorm("coherence: vectors must be unit norm");
    double best = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = i + 1; j < f.size(); ++j) best = std::max(best, std::abs(f.gram()(i, j)));
    return best;
}

namespace {

bool subset_spans(const Frame& f, const std::vector<std::size_t>& idx) {
    const std::size_t n = f.dim();
    Mat a(n, n);
    double norm_prod = 1.0;
    for (std::size_t r = 0; r < n; ++r) {
        const Vec& v = f[idx[r]];
        for (std::size_t c = 0; c < n; ++c) a(r, c) = v[c];
        norm_prod *= norm(v);
    }
    if (norm_prod == 0.0) return false;
    return std::abs(det(a)) > 1e-10 * norm_prod;
}

}  // namespace

SparkResult is_full_spark(const Frame& f, std::uint64_t sample_seed) {
    const std::size_t m = f.size(), n = f.dim();
    if (m < n) throw BadShape("is_full_spark: need m >= n");

    SparkResult res;
    const std::uint64_t count = binomial_capped(m, n, 1000000);
    if (count <= 1000000) {
        res.exhaustive = true;
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (;;) {
            ++res.subsets_checked;
            if (!subset_spans(f, idx)) {
                res.full_spark = false;
                res.dependent_subset = idx;
                return res;
            }
            // next lexicographic combination
            std::size_t i = n;
            while (i > 0 && idx[i - 1] == m - n + (i - 1)) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t k = i; k < n; ++k) idx[k] = idx[k - 1] + 1;
        }
        res.full_spark = true;
        return res;
    }

    res.exhaustive = false;
    Rng rng(sample_seed);
    std::vector<std::size_t> pool(m);
    for (std::size_t i = 0; i < m; ++i) pool[i] = i;
    for (std::size_t trial = 0; trial < 10000; ++trial) {
        // partial Fisher-Yates for an n-subset
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.next_u64() % (m - i));
            std::swap(pool[i], pool[j]);
        }
        std::vector<std::size_t> idx(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
        std::sort(idx.begin(), idx.end());
        ++res.subsets_checked;
        if (!subset_spans(f, idx)) {
            res.full_spark = false;
            res.dependent_subset = idx;
            return res;
        }
    }
    res.full_spark = true;  // probably; see `exhaustive`
    return res;
}

Frame subframe(const Frame& f, const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw BadShape("subframe: empty index set");
    std::vector<Vec> vs;
    vs.reserve(indices.size());
    for (std::size_t j : indices) {
        if (j >= f.size()) throw BadShape("subframe: index out of range");
        vs.push_back(f[j]);
    }
    return Frame(f.dim(), std::move(vs));
}

void save_frame(const Frame& f, std::ostream& out) {
    out << f.dim() << ' ' << f.size() << '\n';
    for (std::size_t j = 0; j < f.size(); ++j) {
        const Vec& v = f[j];
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out << ' ';
            out << format_double(v[i]);
        }
        out << '\n';
    }
    if (!out) throw IoError("save_frame: write failure");
}

void save_frame(const Frame& f, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_frame: cannot open " + path.string());
    save_frame(f, out);
}

Frame load_frame(std::istream& in) {
    std::size_t n = 0, m = 0;
    if (!(in >> n >> m)) throw IoError("load_frame: malformed header (expected 'n m')");
    if (n < 1 || m < 1) throw BadShape("load_frame: need n >= 1 and m >= 1");
    std::vector<Vec> vs;
    vs.reserve(m);
    std::string tok;
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> row(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!(in >> tok)) throw IoError("load_frame: truncated vector data");
            char* end = nullptr;
            const double x = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0') throw IoError("load_frame: bad number '" + tok + "'");
            if (!std::isfinite(x)) throw NonFinite("load_frame: non-finite entry '" + tok + "'");
            row[i] = x;
        }
        vs.emplace_back(std::move(row));
    }
    return Frame(n, std::move(vs));
}

Frame load_frame(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_frame: cannot open " + path.string());
    return load_frame(in);
}

}  // namespace declip
