#pragma once

// Certification toolkit: rank-1 rounding of relaxation solutions, tightness
// metrics (relative gap, rank, stable rank), verification of dual optimality
// certificates, and the closed-form dual certificate for noiseless,
// outlier-free instances.
//
// Dual background: the lifted problem's Lagrangian dual is
//   max mu  s.t.  M = Q - mu*J - Lambda  PSD,
// where J selects the leading 4x4 block and Lambda has one free symmetric
// 4x4 block per correspondence, placed as +Lambda_ii in the (0,0) block-sum
// and -Lambda_ii on the i-th diagonal block. M PSD together with M x* = 0 at
// a feasible stacked point x* proves x* globally optimal.

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "certrot/problem.hpp"
#include "certrot/relaxation.hpp"
#include "certrot/sdp_solver.hpp"

namespace certrot {

struct RobustRotationEstimate {
  UnitQuaternion q;
  Rotation3 R;
  std::vector<int> theta;    // +1 inlier / -1 outlier per correspondence
  std::vector<int> inliers;  // indices with theta == +1
  double f_qcqp = 0.0;       // lifted cost at the rounded feasible point
};

// Rank-1 rounding: x = sqrt(lam1) v1, quaternion from block 0, signs from the
// alignment of each clone block with the quaternion block. The reported cost
// is evaluated at the *feasible* point (unit q, exact signs), so it upper
// bounds the relaxation optimum.
inline RobustRotationEstimate round_solution(const Eigen::MatrixXd& z,
                                             const Eigen::MatrixXd& big_q) {
  const int dim = static_cast<int>(z.rows());
  if (dim % 4 != 0 || dim < 8 || z.cols() != dim) {
    throw std::invalid_argument("round_solution: Z must be square with side 4(N+1), N >= 1");
  }
  if (big_q.rows() != dim || big_q.cols() != dim) {
    throw std::invalid_argument("round_solution: cost matrix side must match Z");
  }
  const int n_pairs = dim / 4 - 1;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(z);
  const double lam1 = eig.eigenvalues()[dim - 1];
  if (!(lam1 > 0.0)) {
    throw std::domain_error("round_solution: leading eigenvalue is not positive");
  }
  const Eigen::VectorXd x = std::sqrt(lam1) * eig.eigenvectors().col(dim - 1);

  const Vec4 q_block = x.head<4>();
  if (q_block.norm() <= 1e-14) {
    throw std::domain_error("round_solution: quaternion block of the leading eigenvector is zero");
  }
  UnitQuaternion q(q_block);
  // The signs are relative alignments *within* the eigenvector, so they must
  // be read against the raw quaternion block: canonicalizing q may flip its
  // sign, and computing alignments against the flipped copy would invert
  // every sign together (a different, generally worse, inlier set).
  std::vector<int> theta(static_cast<std::size_t>(n_pairs), 1);
  std::vector<int> inliers;
  for (int i = 0; i < n_pairs; ++i) {
    const Vec4 xi = x.segment<4>(4 * (i + 1));
    const double align = q_block.dot(xi);
    theta[static_cast<std::size_t>(i)] = (align < 0.0) ? -1 : 1;  // sign 0 -> +1
    if (theta[static_cast<std::size_t>(i)] == 1) inliers.push_back(i);
  }

  Eigen::VectorXd x_feas(dim);
  x_feas.head<4>() = q.coeffs();
  for (int i = 0; i < n_pairs; ++i) {
    x_feas.segment<4>(4 * (i + 1)) =
        static_cast<double>(theta[static_cast<std::size_t>(i)]) * q.coeffs();
  }
  const double f = x_feas.dot(big_q * x_feas);

  return RobustRotationEstimate{q, quat_to_rot(q), std::move(theta), std::move(inliers),
                                std::max(f, 0.0)};
}

struct GapValue {
  double value = 0.0;
  bool is_absolute = false;  // true when |f_qcqp| ~ 0 made the ratio undefined
};

// (f_qcqp - f_sdp)/f_qcqp, clipped at 0; absolute |f_qcqp - f_sdp| fallback
// when the rounded cost is numerically zero (noiseless exact fits).
inline GapValue relative_gap(double f_qcqp, double f_sdp) {
  if (std::abs(f_qcqp) < 1e-12) {
    return {std::abs(f_qcqp - f_sdp), true};
  }
  return {std::max((f_qcqp - f_sdp) / f_qcqp, 0.0), false};
}

struct RankMetrics {
  int rank = 0;
  double stable_rank = 1.0;       // ||Z||_F^2 / ||Z||_2^2
  Eigen::VectorXd eigvals;        // descending
};

inline RankMetrics rank_metrics(const Eigen::MatrixXd& z, double tol = 1e-6) {
  if (z.rows() != z.cols() || z.rows() < 1) {
    throw std::invalid_argument("rank_metrics: Z must be square");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(z, Eigen::EigenvaluesOnly);
  RankMetrics rm;
  rm.eigvals = eig.eigenvalues().reverse();
  const double lam1 = rm.eigvals[0];
  if (!(lam1 > 0.0)) {
    throw std::domain_error("rank_metrics: matrix has no positive eigenvalue");
  }
  rm.rank = static_cast<int>((rm.eigvals.array() > tol * lam1).count());
  rm.stable_rank = rm.eigvals.squaredNorm() / (lam1 * lam1);
  return rm;
}

struct Certificate {
  double f_sdp = 0.0;
  double f_qcqp = 0.0;
  double relative_gap = 0.0;
  bool gap_is_absolute = false;
  int rank = 0;
  double stable_rank = 1.0;
  double dual_min_eig = 0.0;  // min eigenvalue of the dual slack S
  bool is_tight = false;      // rank == 1 AND relative_gap <= gap_tol
  std::array<double, 6> eigvals{};  // leading eigenvalues of Z, descending
};

inline Certificate make_certificate(const SdpProblem& sdp, const SdpSolution& sol,
                                    const RobustRotationEstimate& est,
                                    double gap_tol = 1e-6, double rank_tol = 1e-6) {
  Certificate cert;
  cert.f_sdp = sol.primal_obj;
  cert.f_qcqp = est.f_qcqp;
  const GapValue gap = relative_gap(cert.f_qcqp, cert.f_sdp);
  cert.relative_gap = gap.value;
  cert.gap_is_absolute = gap.is_absolute;
  const RankMetrics rm = rank_metrics(sol.Z, rank_tol);
  cert.rank = rm.rank;
  cert.stable_rank = rm.stable_rank;
  for (int i = 0; i < 6; ++i) {
    cert.eigvals[static_cast<std::size_t>(i)] =
        (i < rm.eigvals.size()) ? rm.eigvals[i] : 0.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.S, Eigen::EigenvaluesOnly);
  cert.dual_min_eig = es.eigenvalues()[0];
  cert.is_tight = (cert.rank == 1) && (cert.relative_gap <= gap_tol);
  (void)sdp;
  return cert;
}

inline nlohmann::json certificate_to_json(const Certificate& c) {
  nlohmann::json j;
  j["f_sdp"] = c.f_sdp;
  j["f_qcqp"] = c.f_qcqp;
  j["relative_gap"] = c.relative_gap;
  j["gap_is_absolute"] = c.gap_is_absolute;
  j["rank"] = c.rank;
  j["stable_rank"] = c.stable_rank;
  j["dual_min_eig"] = c.dual_min_eig;
  j["is_tight"] = c.is_tight;
  j["eigvals"] = c.eigvals;
  return j;
}

inline Certificate certificate_from_json(const nlohmann::json& j) {
  Certificate c;
  c.f_sdp = j.at("f_sdp").get<double>();
  c.f_qcqp = j.at("f_qcqp").get<double>();
  c.relative_gap = j.at("relative_gap").get<double>();
  c.gap_is_absolute = j.at("gap_is_absolute").get<bool>();
  c.rank = j.at("rank").get<int>();
  c.stable_rank = j.at("stable_rank").get<double>();
  c.dual_min_eig = j.at("dual_min_eig").get<double>();
  c.is_tight = j.at("is_tight").get<bool>();
  const auto& ev = j.at("eigvals");
  if (ev.size() != 6) throw std::invalid_argument("certificate: eigvals must have 6 entries");
  for (std::size_t i = 0; i < 6; ++i) c.eigvals[i] = ev[i].get<double>();
  return c;
}

// Lambda assembly from per-correspondence blocks: (0,0) block is the sum of
// all Lambda_ii, block (i,i) is -Lambda_ii, all off-diagonal blocks zero.
inline Eigen::MatrixXd assemble_lambda(const std::vector<Mat4>& blocks) {
  const int n_pairs = static_cast<int>(blocks.size());
  const int dim = 4 * (n_pairs + 1);
  Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < n_pairs; ++i) {
    const Mat4& li = blocks[static_cast<std::size_t>(i)];
    lam.topLeftCorner<4, 4>() += li;
    lam.block<4, 4>(4 * (i + 1), 4 * (i + 1)) = -li;
  }
  return lam;
}

struct DualCheck {
  double min_eig = 0.0;
  double stationarity_residual = 0.0;  // ||M x||_2
  int zero_eig_multiplicity = 0;
  bool verdict = false;
};

// Verifies a dual certificate (mu, Lambda) against cost Q at candidate x:
// M = Q - mu J - Lambda must be PSD (min_eig >= -tol ||M||_2) and annihilate
// x (||Mx|| <= tol ||M||_F ||x||). Lambda's block-sparsity is validated
// first. The zero-eigenvalue count is reported for the strict-tightness
// (corank 1) condition.
inline DualCheck check_dual_certificate(const Eigen::MatrixXd& big_q, double mu,
                                        const Eigen::MatrixXd& lambda,
                                        const Eigen::VectorXd& x, double tol = 1e-8,
                                        double mult_tol = 1e-8) {
  const int dim = static_cast<int>(big_q.rows());
  if (dim % 4 != 0 || dim < 8) {
    throw std::invalid_argument("check_dual_certificate: Q side must be 4(N+1)");
  }
  if (lambda.rows() != dim || lambda.cols() != dim || x.size() != dim) {
    throw std::invalid_argument("check_dual_certificate: dimension mismatch");
  }
  const int n_pairs = dim / 4 - 1;
  const double lam_scale = 1.0 + lambda.norm();
  // Pattern validation: off-diagonal blocks (other than within the block
  // diagonal) must vanish, and the (0,0) block must cancel the diagonal sum.
  for (int bi = 0; bi <= n_pairs; ++bi) {
    for (int bj = 0; bj <= n_pairs; ++bj) {
      if (bi == bj) continue;
      if (lambda.block<4, 4>(4 * bi, 4 * bj).cwiseAbs().maxCoeff() > 1e-9 * lam_scale) {
        throw std::invalid_argument(
            "check_dual_certificate: Lambda has entries outside the block-diagonal pattern");
      }
    }
  }
  Mat4 d_sum = Mat4::Zero();
  for (int i = 1; i <= n_pairs; ++i) d_sum += lambda.block<4, 4>(4 * i, 4 * i);
  if ((lambda.topLeftCorner<4, 4>() + d_sum).cwiseAbs().maxCoeff() > 1e-9 * lam_scale) {
    throw std::invalid_argument(
        "check_dual_certificate: Lambda (0,0) block does not cancel the clone blocks");
  }

  Eigen::MatrixXd m_mat = big_q - lambda;
  m_mat.topLeftCorner<4, 4>() -= mu * Mat4::Identity();
  m_mat = 0.5 * (m_mat + m_mat.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m_mat, Eigen::EigenvaluesOnly);
  DualCheck out;
  out.min_eig = eig.eigenvalues()[0];
  const double spec = std::max(std::abs(eig.eigenvalues()[0]),
                               std::abs(eig.eigenvalues()[dim - 1]));
  out.stationarity_residual = (m_mat * x).norm();
  out.zero_eig_multiplicity = static_cast<int>(
      (eig.eigenvalues().array().abs() <= mult_tol * std::max(1.0, spec)).count());
  out.verdict = (out.min_eig >= -tol * std::max(1.0, spec)) &&
                (out.stationarity_residual <= tol * std::max(1.0, m_mat.norm()) *
                                                  std::max(1.0, x.norm()));
  return out;
}

struct NoiselessCertificate {
  double mu = 0.0;
  std::vector<Mat4> lambda_blocks;  // Lambda_ii per correspondence
  Eigen::MatrixXd M;                // Q - mu J - Lambda
  double min_eig = 0.0;
  int zero_eig_multiplicity = 0;
  Eigen::VectorXd x_star;           // [q*; q*; ...; q*]
  bool parallel_directions = false; // all a_i parallel: extra kernel expected
};

// Closed-form dual certificate for a noiseless, outlier-free instance at its
// exact rotation: mu = 0 and, in the frame rotated by Omega1(q*),
//   Lambda_ii = Omega1(q*) diag(E_ii, -cbar_sq/4) Omega1(q*)^T,
//   E_ii      = skew(a_i)^2 / sigma_i^2 - (cbar_sq/4) I_3.
// This makes M x* = 0 exactly and M PSD with a single zero eigenvalue when at
// least two a_i are non-parallel.
inline NoiselessCertificate construct_noiseless_certificate(const RobustWahbaProblem& p,
                                                            const UnitQuaternion& q_star) {
  const Rotation3 rot = quat_to_rot(q_star);
  for (const Correspondence& c : p.correspondences()) {
    const double resid = (c.b - rot.matrix() * c.a).norm();
    if (resid > 1e-9 * (1.0 + c.b.norm())) {
      throw std::domain_error(
          "construct_noiseless_certificate: instance is not noiseless at the supplied rotation");
    }
  }

  const int n_pairs = p.size();
  // Degeneracy probe: second singular value of the direction bundle.
  Eigen::MatrixXd dirs(3, n_pairs);
  for (int i = 0; i < n_pairs; ++i) {
    const Vec3& a = p.correspondences()[static_cast<std::size_t>(i)].a;
    const double na = a.norm();
    dirs.col(i) = (na > 0.0) ? Vec3(a / na) : Vec3::Zero();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dirs);
  const bool parallel = svd.singularValues()[1] <= 1e-9 * svd.singularValues()[0];

  const Mat4 o1 = omega1(q_star.coeffs()).m;
  NoiselessCertificate cert;
  cert.mu = 0.0;
  cert.parallel_directions = parallel;
  cert.lambda_blocks.reserve(static_cast<std::size_t>(n_pairs));
  for (int i = 0; i < n_pairs; ++i) {
    const Correspondence& c = p.correspondences()[static_cast<std::size_t>(i)];
    Mat3 skew;
    skew <<      0, -c.a[2],  c.a[1],
            c.a[2],       0, -c.a[0],
           -c.a[1],  c.a[0],       0;
    const double inv_s2 = 1.0 / (c.sigma * c.sigma);
    Mat4 lam_bar = Mat4::Zero();
    lam_bar.topLeftCorner<3, 3>() =
        (skew * skew) * inv_s2 - (p.cbar_sq() / 4.0) * Mat3::Identity();
    lam_bar(3, 3) = -p.cbar_sq() / 4.0;
    cert.lambda_blocks.push_back(o1 * lam_bar * o1.transpose());
  }

  const CostMatrices cm = build_cost_matrices(p);
  cert.M = cm.big_q - assemble_lambda(cert.lambda_blocks);
  cert.M = 0.5 * (cert.M + cert.M.transpose()).eval();

  cert.x_star.resize(4 * (n_pairs + 1));
  for (int i = 0; i <= n_pairs; ++i) cert.x_star.segment<4>(4 * i) = q_star.coeffs();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cert.M, Eigen::EigenvaluesOnly);
  cert.min_eig = eig.eigenvalues()[0];
  const double spec = std::max(std::abs(eig.eigenvalues()[0]),
                               std::abs(eig.eigenvalues()[4 * n_pairs + 3]));
  cert.zero_eig_multiplicity = static_cast<int>(
      (eig.eigenvalues().array().abs() <= 1e-8 * std::max(1.0, spec)).count());
  return cert;
}

}  // namespace certrot
