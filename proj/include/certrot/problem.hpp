#pragma once

// Robust Wahba instance: vector correspondences with per-pair noise scales, a
// truncation threshold cbar_sq, and assembly of the lifted quadratic cost.
//
// The truncated-least-squares objective over rotations is
//   sum_i min( ||b_i - R a_i||^2 / sigma_i^2 , cbar_sq ).
// Introducing one sign theta_i per correspondence and one quaternion clone
// q_i = theta_i * q turns this into a quadratic form x^T Q x in the stacked
// vector x = [q; q_1; ...; q_N], with per-pair 4x4 blocks Q_0i (coupling q and
// q_i) and Q_ii (diagonal).

#include <utility>
#include <vector>

#include "certrot/chi2.hpp"
#include "certrot/quaternion.hpp"

namespace certrot {

struct Correspondence {
  Vec3 a;        // observation in frame A
  Vec3 b;        // observation in frame B (ideally b = R a + noise)
  double sigma;  // inlier noise std-dev; the inlier gate is sigma^2 * cbar_sq

  Correspondence(const Vec3& a_in, const Vec3& b_in, double sigma_in)
      : a(a_in), b(b_in), sigma(sigma_in) {
    detail::require_finite(a, "Correspondence.a");
    detail::require_finite(b, "Correspondence.b");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw std::invalid_argument("Correspondence: sigma must be positive and finite");
    }
  }
};

class RobustWahbaProblem {
 public:
  RobustWahbaProblem(std::vector<Correspondence> corrs, double cbar_sq)
      : corrs_(std::move(corrs)), cbar_sq_(cbar_sq) {
    if (corrs_.size() < 2) {
      throw std::invalid_argument("RobustWahbaProblem: need at least 2 correspondences");
    }
    if (!(cbar_sq_ > 0.0) || !std::isfinite(cbar_sq_)) {
      throw std::invalid_argument("RobustWahbaProblem: cbar_sq must be positive and finite");
    }
  }

  // Threshold from the noise model: with probability p an inlier residual
  // satisfies r^2/sigma^2 <= chi2_inv3(p).
  static RobustWahbaProblem with_default_threshold(std::vector<Correspondence> corrs,
                                                   double p_quantile = 1.0 - 1e-4) {
    return RobustWahbaProblem(std::move(corrs), chi2_inv3(p_quantile));
  }

  // Set-membership parameterization: each pair carries a hard residual bound
  // beta_i (inlier iff ||b - R a|| <= beta_i). Encoded as sigma_i = beta_i,
  // cbar_sq = 1, so that sigma_i^2 * cbar_sq = beta_i^2.
  static RobustWahbaProblem from_noise_bounds(const std::vector<std::pair<Vec3, Vec3>>& pairs,
                                              const std::vector<double>& betas) {
    if (pairs.size() != betas.size()) {
      throw std::invalid_argument("from_noise_bounds: pairs/betas size mismatch");
    }
    std::vector<Correspondence> corrs;
    corrs.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      corrs.emplace_back(pairs[i].first, pairs[i].second, betas[i]);
    }
    return RobustWahbaProblem(std::move(corrs), 1.0);
  }

  const std::vector<Correspondence>& correspondences() const { return corrs_; }
  int size() const { return static_cast<int>(corrs_.size()); }
  double cbar_sq() const { return cbar_sq_; }

 private:
  std::vector<Correspondence> corrs_;
  double cbar_sq_;
};

struct CostMatrices {
  std::vector<Mat4> q0i;    // coupling blocks Q_0i
  std::vector<Mat4> qii;    // diagonal blocks Q_ii
  Eigen::MatrixXd big_q;    // assembled 4(N+1) x 4(N+1) cost
};

// Per-correspondence 4x4 blocks (returned as {Q_0i, Q_ii}):
//   Q_ii = ((||b||^2+||a||^2) I + 2 Omega1(b^) Omega2(a^)) / (2 sigma^2) + (cbar_sq/2) I
//   Q_0i = ((||b||^2+||a||^2) I + 2 Omega1(b^) Omega2(a^)) / (4 sigma^2) - (cbar_sq/4) I
// so that q_i^T Q_ii q_i + 2 q^T Q_0i q_i with q_i = theta q evaluates to the
// residual term for theta = +1 and to cbar_sq for theta = -1.
inline std::pair<Mat4, Mat4> build_cost_blocks(const Correspondence& c, double cbar_sq) {
  if (!(cbar_sq > 0.0) || !std::isfinite(cbar_sq)) {
    throw std::invalid_argument("build_cost_blocks: cbar_sq must be positive and finite");
  }
  const Vec4 ah = homogenize(c.a);
  const Vec4 bh = homogenize(c.b);
  Mat4 common = (c.b.squaredNorm() + c.a.squaredNorm()) * Mat4::Identity() +
                2.0 * (omega1(bh).m * omega2(ah).m);
  // The sum must be materialized before assignment: reading common.transpose()
  // while overwriting common is an aliasing hazard, and the raw product is only
  // symmetric up to rounding once the compiler contracts it with FMA.
  common = 0.5 * (common + common.transpose()).eval();
  const double inv2s = 1.0 / (2.0 * c.sigma * c.sigma);
  const Mat4 q_ii = common * inv2s + (cbar_sq / 2.0) * Mat4::Identity();
  const Mat4 q_0i = common * (0.5 * inv2s) - (cbar_sq / 4.0) * Mat4::Identity();
  return {q_0i, q_ii};
}

// Lifted cost: zero (0,0) block, Q_0i on the (0,i) border, Q_ii on the
// diagonal, zeros elsewhere.
inline Eigen::MatrixXd assemble_Q(const std::vector<Mat4>& q0i, const std::vector<Mat4>& qii) {
  if (q0i.size() != qii.size()) {
    throw std::invalid_argument("assemble_Q: block list length mismatch");
  }
  const int n_blocks = static_cast<int>(q0i.size());
  const int dim = 4 * (n_blocks + 1);
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < n_blocks; ++i) {
    const int off = 4 * (i + 1);
    big.block<4, 4>(off, off) = qii[static_cast<std::size_t>(i)];
    big.block<4, 4>(0, off) = q0i[static_cast<std::size_t>(i)];
    big.block<4, 4>(off, 0) = q0i[static_cast<std::size_t>(i)].transpose();
  }
  return big;
}

inline CostMatrices build_cost_matrices(const RobustWahbaProblem& p) {
  CostMatrices cm;
  cm.q0i.reserve(static_cast<std::size_t>(p.size()));
  cm.qii.reserve(static_cast<std::size_t>(p.size()));
  for (const Correspondence& c : p.correspondences()) {
    auto [q0i, qii] = build_cost_blocks(c, p.cbar_sq());
    cm.q0i.push_back(q0i);
    cm.qii.push_back(qii);
  }
  cm.big_q = assemble_Q(cm.q0i, cm.qii);
  return cm;
}

// Truncated-least-squares objective at a fixed rotation.
inline double tls_cost(const Rotation3& rot, const RobustWahbaProblem& p) {
  double total = 0.0;
  for (const Correspondence& c : p.correspondences()) {
    const double r2 = (c.b - rot.matrix() * c.a).squaredNorm() / (c.sigma * c.sigma);
    total += std::min(r2, p.cbar_sq());
  }
  return total;
}

// Residual-optimal signs at a fixed rotation; ties classify as inliers (+1).
inline std::vector<int> classify_inliers(const Rotation3& rot, const RobustWahbaProblem& p) {
  std::vector<int> theta(static_cast<std::size_t>(p.size()), 1);
  for (int i = 0; i < p.size(); ++i) {
    const Correspondence& c = p.correspondences()[static_cast<std::size_t>(i)];
    const double r2 = (c.b - rot.matrix() * c.a).squaredNorm() / (c.sigma * c.sigma);
    theta[static_cast<std::size_t>(i)] = (r2 <= p.cbar_sq()) ? 1 : -1;
  }
  return theta;
}

// Quadratic-form cost of the stacked point x = [q; theta_1 q; ...; theta_N q]
// evaluated blockwise; equals x^T Q x for the assembled Q.
inline double qcqp_cost(const CostMatrices& cm, const UnitQuaternion& q,
                        const std::vector<int>& theta) {
  if (theta.size() != cm.q0i.size()) {
    throw std::invalid_argument("qcqp_cost: theta length mismatch");
  }
  const Vec4& qq = q.coeffs();
  double total = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double th = static_cast<double>(theta[i]);
    total += th * th * qq.dot(cm.qii[i] * qq) + 2.0 * th * qq.dot(cm.q0i[i] * qq);
  }
  return total;
}

}  // namespace certrot
