#include "seqclick/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "seqclick/errors.hpp"

namespace seqclick {

namespace {
// Largest double strictly below 1.
const double kBelowOne = std::nextafter(1.0, 0.0);
constexpr double kExpClamp = 500.0;
} // namespace

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
}

std::uint64_t Rng::next_below(std::uint64_t n) {
    if (n == 0) throw ContractViolation("Rng::next_below: n must be positive");
    return next_u64() % n;
}

double Rng::next_gaussian() {
    // Box-Muller; u1 nudged away from 0 so the log stays finite.
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

double tanh_scalar(double z) {
    const double t = std::tanh(z);
    return std::clamp(t, -kBelowOne, kBelowOne);
}

Vec tanh_map(const Vec& v) {
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = tanh_scalar(v[i]);
    return out;
}

double sigmoid(double z) {
    double p;
    if (z >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-std::min(z, kExpClamp)));
    } else {
        const double e = std::exp(std::max(z, -kExpClamp));
        p = e / (1.0 + e);
    }
    return std::min(p, kBelowOne);
}

Vec affine(const Vec& x, const Matrix& W, const Vec& b) {
    if (x.size() != W.cols() || b.size() != W.rows()) {
        throw ContractViolation(
            "affine: shape mismatch, x[" + std::to_string(x.size()) + "], W[" +
            std::to_string(W.rows()) + "x" + std::to_string(W.cols()) + "], b[" +
            std::to_string(b.size()) + "]");
    }
    Vec out(W.rows());
    for (std::size_t r = 0; r < W.rows(); ++r) {
        const double* wr = W.row(r);
        double acc = b[r];
        for (std::size_t c = 0; c < W.cols(); ++c) acc += wr[c] * x[c];
        out[r] = acc;
    }
    return out;
}

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) {
        throw ContractViolation("dot: size mismatch, " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

Matrix init_weights(std::size_t rows, std::size_t cols, double scale, Rng& rng) {
    if (rows == 0 || cols == 0) {
        throw ContractViolation("init_weights: non-positive dimensions " +
                                std::to_string(rows) + "x" + std::to_string(cols));
    }
    if (scale < 0.0) throw ContractViolation("init_weights: negative scale");
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform(-scale, scale);
    return m;
}

Vec init_vector(std::size_t n, double scale, Rng& rng) {
    if (n == 0) throw ContractViolation("init_vector: zero length");
    if (scale < 0.0) throw ContractViolation("init_vector: negative scale");
    Vec v(n);
    for (double& x : v) x = rng.uniform(-scale, scale);
    return v;
}

bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool all_finite(const Matrix& m) {
    return all_finite(m.data());
}

} // namespace seqclick
