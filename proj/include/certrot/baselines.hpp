#pragma once

// Reference estimators the certified pipeline is compared against:
//  - closed-form weighted Wahba (quaternion spectral / Davenport method),
//  - rotation-only RANSAC with 2-point minimal samples,
//  - exact truncated-least-squares optimum by enumerating inlier subsets.

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "certrot/problem.hpp"
#include "certrot/quaternion.hpp"
#include "certrot/rng.hpp"

namespace certrot {

namespace detail {

// Davenport accumulator: K = sum_i w_i Omega1(b^_i)^T Omega2(a^_i); for unit
// q the quadratic form q^T K q equals sum_i w_i b_i . (R a_i), so the maximal
// eigenvector of K minimizes the weighted least-squares alignment cost.
inline Mat4 davenport_matrix(const std::vector<Correspondence>& corrs,
                             const std::vector<double>& weights_sq) {
  Mat4 k = Mat4::Zero();
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const Vec4 ah = homogenize(corrs[i].a);
    const Vec4 bh = homogenize(corrs[i].b);
    k += weights_sq[i] * (omega1(bh).m.transpose() * omega2(ah).m);
  }
  return 0.5 * (k + k.transpose());
}

inline bool directions_degenerate(const std::vector<Correspondence>& corrs) {
  Eigen::MatrixXd dirs(3, static_cast<int>(corrs.size()));
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const double na = corrs[i].a.norm();
    dirs.col(static_cast<int>(i)) = (na > 0.0) ? Vec3(corrs[i].a / na) : Vec3::Zero();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dirs);
  return svd.singularValues()[1] <= 1e-9 * std::max(svd.singularValues()[0], 1e-300);
}

}  // namespace detail

// Global minimizer of sum_i w_i^2 ||b_i - R a_i||^2 over rotations.
// weights_sq are the squared weights w_i^2 multiplying each squared residual.
inline Rotation3 wahba_closed_form(const std::vector<Correspondence>& corrs,
                                   const std::vector<double>& weights_sq) {
  if (corrs.size() < 2) {
    throw std::invalid_argument("wahba_closed_form: need at least 2 correspondences");
  }
  if (corrs.size() != weights_sq.size()) {
    throw std::invalid_argument("wahba_closed_form: weights length mismatch");
  }
  for (double w : weights_sq) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("wahba_closed_form: weights must be finite and >= 0");
    }
  }
  if (detail::directions_degenerate(corrs)) {
    throw std::domain_error(
        "wahba_closed_form: all reference directions are parallel; rotation is not unique");
  }
  const Mat4 k = detail::davenport_matrix(corrs, weights_sq);
  Eigen::SelfAdjointEigenSolver<Mat4> eig(k);
  return quat_to_rot(UnitQuaternion(Vec4(eig.eigenvectors().col(3))));
}

inline std::vector<double> inverse_variance_weights(const RobustWahbaProblem& p) {
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(p.size()));
  for (const Correspondence& c : p.correspondences()) w.push_back(1.0 / (c.sigma * c.sigma));
  return w;
}

struct RansacParams {
  int max_iters = 1000;
  int sample_size = 2;          // minimal sample for a rotation
  double inlier_threshold = 0;  // squared-residual gate; <= 0 means sigma_i^2 * cbar_sq
  std::uint64_t seed = 0;
};

struct RansacResult {
  Rotation3 rotation = Rotation3::identity();
  std::vector<int> inliers;
  bool success = false;  // a consensus of >= 2 was found
  int iterations_used = 0;
};

// 2-point hypotheses, consensus counting under the per-pair threshold, final
// closed-form re-fit on the best consensus set. Deterministic given the seed.
inline RansacResult ransac_rotation(const RobustWahbaProblem& p, const RansacParams& params) {
  if (params.max_iters < 1) {
    throw std::invalid_argument("ransac_rotation: max_iters must be >= 1");
  }
  if (params.sample_size != 2) {
    throw std::invalid_argument("ransac_rotation: only 2-point minimal samples are supported");
  }
  const auto& corrs = p.correspondences();
  const int n = p.size();
  std::vector<double> gate(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    gate[static_cast<std::size_t>(i)] =
        (params.inlier_threshold > 0.0)
            ? params.inlier_threshold
            : corrs[static_cast<std::size_t>(i)].sigma * corrs[static_cast<std::size_t>(i)].sigma *
                  p.cbar_sq();
  }

  SplitMix64 rng(params.seed);
  RansacResult best;
  std::size_t best_count = 0;

  for (int it = 0; it < params.max_iters; ++it) {
    best.iterations_used = it + 1;
    const int i = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
    if (j >= i) ++j;
    const Vec3& ai = corrs[static_cast<std::size_t>(i)].a;
    const Vec3& aj = corrs[static_cast<std::size_t>(j)].a;
    // Degenerate (parallel) minimal samples cannot pin down the rotation.
    if (ai.cross(aj).norm() <= 1e-9 * ai.norm() * aj.norm()) continue;

    const std::vector<Correspondence> sample{corrs[static_cast<std::size_t>(i)],
                                             corrs[static_cast<std::size_t>(j)]};
    const std::vector<double> sample_w{
        1.0 / (sample[0].sigma * sample[0].sigma), 1.0 / (sample[1].sigma * sample[1].sigma)};
    const Mat4 k = detail::davenport_matrix(sample, sample_w);
    Eigen::SelfAdjointEigenSolver<Mat4> eig(k);
    const Rotation3 model = quat_to_rot(UnitQuaternion(Vec4(eig.eigenvectors().col(3))));

    std::vector<int> consensus;
    for (int c = 0; c < n; ++c) {
      const Correspondence& cc = corrs[static_cast<std::size_t>(c)];
      if ((cc.b - model.matrix() * cc.a).squaredNorm() <= gate[static_cast<std::size_t>(c)]) {
        consensus.push_back(c);
      }
    }
    if (consensus.size() > best_count) {
      best_count = consensus.size();
      best.rotation = model;
      best.inliers = std::move(consensus);
    }
  }

  best.success = best_count >= 2;
  if (best.success) {
    std::vector<Correspondence> consensus_corrs;
    std::vector<double> consensus_w;
    for (int idx : best.inliers) {
      consensus_corrs.push_back(corrs[static_cast<std::size_t>(idx)]);
      consensus_w.push_back(1.0 / (corrs[static_cast<std::size_t>(idx)].sigma *
                                   corrs[static_cast<std::size_t>(idx)].sigma));
    }
    if (!detail::directions_degenerate(consensus_corrs)) {
      const Mat4 k = detail::davenport_matrix(consensus_corrs, consensus_w);
      Eigen::SelfAdjointEigenSolver<Mat4> eig(k);
      best.rotation = quat_to_rot(UnitQuaternion(Vec4(eig.eigenvectors().col(3))));
    }
  }
  return best;
}

struct BruteForceResult {
  Rotation3 rotation = Rotation3::identity();
  std::vector<int> theta;
  double f_star = 0.0;
};

// Exact TLS optimum by enumerating all 2^N inlier/outlier assignments; for a
// fixed assignment the inner problem is weighted Wahba on the inlier subset,
// whose optimal value is sum_i w_i (||a_i||^2 + ||b_i||^2) - 2 lambda_max(K).
// This value formula needs no non-degeneracy (lambda_max is always defined),
// so parallel or singleton subsets are scored exactly as well. Ties prefer
// the lexicographically larger assignment (inliers first): masks are visited
// from all-inliers downward and only strict improvements replace the best.
inline BruteForceResult brute_force_tls(const RobustWahbaProblem& p) {
  const int n = p.size();
  if (n > 14) {
    throw std::invalid_argument("brute_force_tls: refusing N > 14 (2^N enumeration)");
  }
  const auto& corrs = p.correspondences();
  std::vector<Mat4> k_terms(static_cast<std::size_t>(n));
  std::vector<double> t_terms(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Correspondence& c = corrs[static_cast<std::size_t>(i)];
    const double w = 1.0 / (c.sigma * c.sigma);
    const Vec4 ah = homogenize(c.a);
    const Vec4 bh = homogenize(c.b);
    Mat4 k = w * (omega1(bh).m.transpose() * omega2(ah).m);
    k_terms[static_cast<std::size_t>(i)] = 0.5 * (k + k.transpose());
    t_terms[static_cast<std::size_t>(i)] = w * (c.a.squaredNorm() + c.b.squaredNorm());
  }

  const std::uint32_t full = (1u << n) - 1u;
  double best_cost = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = full;
  Eigen::SelfAdjointEigenSolver<Mat4> eig;
  for (std::uint32_t mask = full;; --mask) {
    Mat4 k = Mat4::Zero();
    double cost = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        k += k_terms[static_cast<std::size_t>(i)];
        cost += t_terms[static_cast<std::size_t>(i)];
      } else {
        cost += p.cbar_sq();
      }
    }
    if (mask != 0) {
      eig.compute(k, Eigen::EigenvaluesOnly);
      cost -= 2.0 * eig.eigenvalues()[3];
    }
    cost = std::max(cost, 0.0);
    if (cost < best_cost) {
      best_cost = cost;
      best_mask = mask;
    }
    if (mask == 0) break;
  }

  BruteForceResult out;
  out.f_star = best_cost;
  out.theta.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.theta[static_cast<std::size_t>(i)] = (best_mask & (1u << i)) ? 1 : -1;
  }
  if (best_mask != 0) {
    Mat4 k = Mat4::Zero();
    for (int i = 0; i < n; ++i) {
      if (best_mask & (1u << i)) k += k_terms[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Mat4> full_eig(k);
    out.rotation = quat_to_rot(UnitQuaternion(Vec4(full_eig.eigenvectors().col(3))));
  }
  return out;
}

}  // namespace certrot
