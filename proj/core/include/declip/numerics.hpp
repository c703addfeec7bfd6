#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "declip/errors.hpp"

namespace declip {

// Dense real vector. Constructors taking data validate that every entry is
// finite; mutation through operator[] is trusted (hot loops).
class Vec {
public:
    Vec() = default;
    explicit Vec(std::size_t n) : data_(n, 0.0) {}
    Vec(std::initializer_list<double> xs);
    explicit Vec(std::vector<double> xs);

    std::size_t size() const { return data_.size(); }
    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }
    const std::vector<double>& entries() const { return data_; }

    bool operator==(const Vec&) const = default;

private:
    std::vector<double> data_;
};

double dot(const Vec& a, const Vec& b);
double norm_sq(const Vec& a);
double norm(const Vec& a);
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);
// a += s*b, in place
void axpy(Vec& a, double s, const Vec& b);

// Dense row-major real matrix.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Mat(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static Mat identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const std::vector<double>& entries() const { return data_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

Mat transpose(const Mat& m);
Mat matmul(const Mat& a, const Mat& b);
Vec matvec(const Mat& m, const Vec& x);
double frobenius_norm(const Mat& m);

// Determinant via Gaussian elimination with partial pivoting (square only).
double det(const Mat& m);

// Symmetric eigendecomposition, M = V diag(eigenvalues) V^T with eigenvalues
// ascending and orthonormal columns in V.
struct SymEig {
    std::vector<double> eigenvalues;
    Mat eigenvectors;
};

// Cyclic Jacobi rotations. Converges when the off-diagonal Frobenius norm
// drops below 1e-12 * ||M||_F; throws ConvergenceFailure after 100 sweeps.
// Throws NonSymmetric when ||M - M^T||_F > 1e-12 * max(1, ||M||_F).
SymEig sym_eig(const Mat& m);

// Numerical rank: count of singular values exceeding tol * (largest singular
// value), computed from the eigenvalues of the smaller Gram matrix.
std::size_t rank(const Mat& m, double tol);

// Deterministic 64-bit generator: xoshiro256** seeded via splitmix64.
// Constants below are the published ones; the stream for a given seed is
// fixed across platforms. normal() draws use the Box-Muller transform
// (u1, u2 uniform; z = sqrt(-2 ln u1) * {cos, sin}(2 pi u2), sine cached).
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    // uniform in [0, 1), 53-bit resolution
    double uniform();
    // standard normal
    double normal();

    std::uint64_t seed() const { return seed_; }
    // Independent child stream keyed by (this generator's seed, index).
    Rng child(std::uint64_t index) const;

private:
    std::array<std::uint64_t, 4> state_{};
    std::uint64_t seed_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// splitmix64 finalizer; used for seed expansion and child-seed derivation.
std::uint64_t mix64(std::uint64_t z);
// Child seed for an independent work unit: mix64(mix64(master + GOLDEN) ^ (index + GOLDEN)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Uniform draw from the unit sphere in R^n: n standard normals, rescaled.
// An (astronomically unlikely) near-zero draw is redrawn internally.
Vec normal_unit_vector(std::size_t n, Rng& rng);

}  // namespace declip
