#pragma once

// Deterministic, portable random generator for synthetic instances and
// RANSAC sampling: the splitmix64 sequence (Steele/Lea/Flood 2014), a 64-bit
// counter-based scheme with a fixed avalanche mix. Identical seeds produce
// identical streams on every platform; no standard-library distributions are
// involved (their outputs are implementation-defined).
//
// Derived samples and their exact constructions:
//   next_double : (x >> 11) * 2^-53, uniform in [0, 1)
//   next_normal : Box-Muller on two uniforms, pairs cached, log(0) excluded
//   next_unit_vec / next_unit_quat4 : normalized Gaussian vectors
//   next_below  : rejection sampling, unbiased for any bound

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

namespace certrot {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  Eigen::Vector3d next_unit_vec() {
    for (;;) {
      const Eigen::Vector3d v(next_normal(), next_normal(), next_normal());
      const double n = v.norm();
      if (n > 1e-8) return v / n;
    }
  }

  Eigen::Vector4d next_unit_quat4() {
    for (;;) {
      const Eigen::Vector4d v(next_normal(), next_normal(), next_normal(), next_normal());
      const double n = v.norm();
      if (n > 1e-8) return v / n;
    }
  }

  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("SplitMix64::next_below: bound must be > 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x < limit) return x % bound;
    }
  }

 private:
  std::uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace certrot
