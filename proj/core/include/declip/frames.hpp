#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "declip/numerics.hpp"

namespace declip {

// Optimal frame bounds: the extreme eigenvalues of the frame operator.
struct FrameBounds {
    double lower = 0.0;  // A
    double upper = 0.0;  // B
};

// An ordered finite family of vectors in R^n with cached frame operator
// (sum of outer products, n x n) and Gram matrix (pairwise inner products,
// m x m). Immutable after construction.
class Frame {
public:
    Frame(std::size_t dim, std::vector<Vec> vectors);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return vectors_.size(); }
    const Vec& operator[](std::size_t j) const { return vectors_[j]; }
    const std::vector<Vec>& vectors() const { return vectors_; }
    const Mat& frame_operator() const { return frame_op_; }
    const Mat& gram() const { return gram_; }

    // m x n analysis operator matrix (rows are the frame vectors).
    Mat analysis_matrix() const;

    bool is_unit_norm(double tol = 1e-10) const;

private:
    std::size_t dim_;
    std::vector<Vec> vectors_;
    Mat frame_op_;
    Mat gram_;
};

// m i.i.d. uniform unit vectors in R^n; requires m >= n >= 1.
Frame random_unit_frame(std::size_t n, std::size_t m, Rng& rng);

// Standard basis of R^n.
Frame orthonormal_basis(std::size_t n);

// Equiangular tight frame of n+1 unit vectors in R^n: the standard basis of
// R^{n+1} projected onto the complement of the all-ones vector, normalized,
// and expressed in a fixed Gram-Schmidt basis of that complement. Pairwise
// inner products are -1/n; the frame operator is ((n+1)/n) I.
Frame simplex_etf(std::size_t n);

// Optimal bounds (extreme eigenvalues of the frame operator). Throws
// NotAFrame when the family does not span (smallest eigenvalue within
// 1e-12 * largest of zero).
FrameBounds frame_bounds(const Frame& f);

// (<x, x_j>)_j
Vec analysis(const Frame& f, const Vec& x);
// sum_j c_j x_j
Vec synthesis(const Frame& f, const Vec& c);

// S^{-1/2} x_j; the result has frame operator I.
Frame canonical_parseval(const Frame& f);

// max_{i != j} |<x_i, x_j>| over unit-norm vectors (NotUnitNorm otherwise).
double coherence(const Frame& f);

struct SparkResult {
    bool full_spark = false;
    bool exhaustive = false;
    std::uint64_t subsets_checked = 0;
    // An n-subset whose vectors fail to span, when one was found.
    std::optional<std::vector<std::size_t>> dependent_subset;
};

// Every n-subset spans R^n? Exhaustive when C(m, n) <= 10^6; otherwise
// samples 10^4 random subsets (seeded, deterministic) and the result is
// flagged non-exhaustive. Subset test: |det| > 1e-10 * product of row norms.
SparkResult is_full_spark(const Frame& f, std::uint64_t sample_seed = 0x5EEDF001ULL);

// Sub-family at the given indices (order preserved, duplicates allowed).
Frame subframe(const Frame& f, const std::vector<std::size_t>& indices);

// Plain-text serialization: first line "n m", then m lines of n
// space-separated floats at 17 significant digits. The reader rejects
// non-finite values and malformed headers.
void save_frame(const Frame& f, std::ostream& out);
void save_frame(const Frame& f, const std::filesystem::path& path);
Frame load_frame(std::istream& in);
Frame load_frame(const std::filesystem::path& path);

}  // namespace declip
