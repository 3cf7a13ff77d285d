#pragma once

#include <cstdint>
#include <vector>

namespace seqclick {

// All numerics are double precision: the finite-difference gradient checks
// need ~1e-5 relative agreement, which float cannot deliver.
using Vec = std::vector<double>;

// Dense row-major matrix. Convention throughout: affine(x, W, b) = x W^T + b,
// i.e. row r of W holds the weights feeding output unit r.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void fill(double v) { data_.assign(data_.size(), v); }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// splitmix64: state advances by 0x9E3779B97F4A7C15 and is finalized by
// mix64 (multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB with
// xor-shifts 30/27/31). Fully pinned, so streams are identical on every
// platform for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution.
    double next_double();

    // Uniform on [lo, hi).
    double uniform(double lo, double hi);

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t next_below(std::uint64_t n);

    // Standard normal via Box-Muller on two fresh uniforms.
    double next_gaussian();

private:
    std::uint64_t state_;
};

// The stateless finalizer of the generator above; also used as the feature
// hash primitive so hashing stays portable and reproducible.
std::uint64_t mix64(std::uint64_t z);

// Element-wise tanh, computed as (1-e^{-2z})/(1+e^{-2z}). Output is clamped
// to the largest double below 1 so |result| < 1 holds for every finite input.
Vec tanh_map(const Vec& v);
double tanh_scalar(double z);

// Numerically stable logistic function. The exponent argument is clamped to
// +-500 and the output to [exp(-500)/(1+exp(-500)), 1 - 2^-53], so results
// are always strictly inside (0, 1) and monotone in z.
double sigmoid(double z);

// x W^T + b. Throws ContractViolation naming both shapes on a mismatch.
Vec affine(const Vec& x, const Matrix& W, const Vec& b);

// Dot product; sizes must match.
double dot(const Vec& a, const Vec& b);

// i.i.d. uniform on [-scale, +scale]. scale may be zero (all-zero matrix).
Matrix init_weights(std::size_t rows, std::size_t cols, double scale, Rng& rng);
Vec init_vector(std::size_t n, double scale, Rng& rng);

bool all_finite(const Vec& v);
bool all_finite(const Matrix& m);

} // namespace seqclick
