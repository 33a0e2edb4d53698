#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace grinder {

/// Dense real vector used for actions (length d+1) and feature reports (length d).
using Vector = Eigen::VectorXd;

/// Every random stream in the library is a 64-bit Mersenne twister owned by its caller.
using Rng = std::mt19937_64;

enum class Label : int { Negative = -1, Positive = 1 };

constexpr int sign(Label y) { return static_cast<int>(y); }

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// SplitMix64 finalizer; derives statistically independent child seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Child seed for `stream` under `master`. Distinct streams give distinct seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace grinder
