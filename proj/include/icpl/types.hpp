#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace icpl {

// All numerics run in 64-bit reals.
using Scalar = double;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

// Class / cluster / classifier-unit ids.
using Labels = std::vector<int>;

// Every random draw in the toolkit goes through this generator and the
// helpers below, so a fixed seed pins the whole run bit-for-bit.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform in [0,1) with 53 bits of resolution.
inline Scalar uniform01(Rng& rng) {
  return static_cast<Scalar>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) via rejection sampling (no modulo bias).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

inline Scalar uniform_in(Rng& rng, Scalar lo, Scalar hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Standard normal via Box-Muller (one value per call).
inline Scalar normal01(Rng& rng) {
  Scalar u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const Scalar u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi_v<Scalar> * u2);
}

/// Gamma(shape, 1) via Marsaglia-Tsang, with the shape<1 boost.
inline Scalar gamma_sample(Rng& rng, Scalar shape) {
  if (shape < 1.0) {
    const Scalar u = uniform01(rng);
    return gamma_sample(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const Scalar d = shape - 1.0 / 3.0;
  const Scalar c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    Scalar x, v;
    do {
      x = normal01(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const Scalar u = uniform01(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

inline Scalar beta_sample(Rng& rng, Scalar a, Scalar b) {
  const Scalar x = gamma_sample(rng, a);
  const Scalar y = gamma_sample(rng, b);
  return x / (x + y);
}

/// Fisher-Yates permutation of 0..n-1.
inline std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
  }
  return idx;
}

}  // namespace icpl
