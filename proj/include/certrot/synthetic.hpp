#pragma once

// Synthetic benchmark instances: unit directions a_i uniform on the sphere, a
// Haar-uniform ground-truth rotation, Gaussian inlier noise, and a planted
// fraction of outliers replaced by fresh random unit vectors.
//
// Draw order is part of the contract (fixed for reproducibility):
//   1. ground-truth quaternion (4 Gaussians, normalized),
//   2. for each i: a_i, then the noise vector for b_i,
//   3. outlier positions: partial Fisher-Yates prefix of a 0..n-1 index list,
//   4. replacement b_i for each outlier position, in ascending index order.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "certrot/problem.hpp"
#include "certrot/quaternion.hpp"
#include "certrot/rng.hpp"

namespace certrot {

struct SyntheticConfig {
  int n = 20;
  double sigma = 0.01;          // inlier noise std-dev; 0 means exact b = R a
  double outlier_ratio = 0.0;   // in [0, 1); outlier count = round(ratio * n)
  std::uint64_t seed = 0;
  double p_quantile = 1.0 - 1e-4;  // cbar_sq = chi2_inv3(p_quantile)
  bool unit_vectors = true;        // a_i on the unit sphere (benchmark protocol)
};

struct SyntheticInstance {
  RobustWahbaProblem problem;
  UnitQuaternion q_true;
  Rotation3 r_true;
  std::vector<int> theta_true;  // +1 inlier / -1 planted outlier
  std::uint64_t seed = 0;
  int outlier_count = 0;
};

inline SyntheticInstance generate_instance(const SyntheticConfig& cfg) {
  if (cfg.n < 2) throw std::invalid_argument("generate_instance: n must be >= 2");
  if (!(cfg.outlier_ratio >= 0.0 && cfg.outlier_ratio < 1.0)) {
    throw std::invalid_argument("generate_instance: outlier_ratio must lie in [0, 1)");
  }
  if (!(cfg.sigma >= 0.0)) {
    throw std::invalid_argument("generate_instance: sigma must be >= 0");
  }

  SplitMix64 rng(cfg.seed);
  const UnitQuaternion q_true(rng.next_unit_quat4());
  const Rotation3 r_true = quat_to_rot(q_true);

  // The correspondence noise scale stays positive even for exact instances:
  // it defines the inlier gate sigma^2 * cbar_sq. 0.01 keeps random unit
  // outliers (residuals ~ O(1)) far outside the gate.
  const double sigma_meas = (cfg.sigma > 0.0) ? cfg.sigma : 0.01;

  std::vector<Vec3> as(static_cast<std::size_t>(cfg.n));
  std::vector<Vec3> bs(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) {
    Vec3 a = rng.next_unit_vec();
    if (!cfg.unit_vectors) a *= 0.5 + 1.5 * rng.next_double();
    const Vec3 noise(rng.next_normal(), rng.next_normal(), rng.next_normal());
    as[static_cast<std::size_t>(i)] = a;
    bs[static_cast<std::size_t>(i)] = r_true.matrix() * a + cfg.sigma * noise;
  }

  const int n_out = static_cast<int>(std::llround(cfg.outlier_ratio * cfg.n));
  std::vector<int> order(static_cast<std::size_t>(cfg.n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < n_out; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.n - i)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  std::vector<int> out_idx(order.begin(), order.begin() + n_out);
  std::sort(out_idx.begin(), out_idx.end());

  std::vector<int> theta(static_cast<std::size_t>(cfg.n), 1);
  for (int idx : out_idx) {
    Vec3 o = rng.next_unit_vec();
    if (!cfg.unit_vectors) o *= 0.5 + 1.5 * rng.next_double();
    bs[static_cast<std::size_t>(idx)] = o;
    theta[static_cast<std::size_t>(idx)] = -1;
  }

  std::vector<Correspondence> corrs;
  corrs.reserve(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) {
    corrs.emplace_back(as[static_cast<std::size_t>(i)], bs[static_cast<std::size_t>(i)],
                       sigma_meas);
  }

  return SyntheticInstance{
      RobustWahbaProblem(std::move(corrs), chi2_inv3(cfg.p_quantile)),
      q_true, r_true, std::move(theta), cfg.seed, n_out};
}

}  // namespace certrot
