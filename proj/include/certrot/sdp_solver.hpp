#pragma once

// First-order solver for standard-form SDPs:
//   minimize tr(C Z)  s.t.  tr(A_k Z) = b_k (k = 1..m),  Z PSD.
//
// Method: ADMM on the dual splitting
//   max b'y  s.t.  C - A'y = S,  S PSD,
// with the primal Z acting as the running multiplier (Wen/Goldfarb/Yin-style
// row-action splitting). Each sweep solves a linear system in y against the
// constant Gram matrix A A' (factorized once, independent of the penalty), a
// PSD projection by symmetric eigendecomposition, and a multiplier step that
// keeps Z PSD by construction. Over-relaxation and a residual-balancing
// penalty update accelerate convergence; everything is deterministic.
//
// Symmetric matrices travel through the solver in scaled upper-triangle
// ("svec") form so that inner products match Frobenius inner products.
//
// A polishing pass after convergence re-solves the dual least-squares problem
// on the span of the rounded primal direction, sharpening the slack S for
// optimality certification (first-order duals are otherwise noisy at the
// 1e-8 scale certificates care about).

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "certrot/relaxation.hpp"

namespace certrot {

enum class SolverStatus { Optimal, MaxIters, Infeasible, NumericalFailure };

inline const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::Optimal: return "Optimal";
    case SolverStatus::MaxIters: return "MaxIters";
    case SolverStatus::Infeasible: return "Infeasible";
    case SolverStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

struct SolverSettings {
  int max_iters = 100000;
  double eps_abs = 1e-9;          // PSD slack floor for returned iterates
  double eps_rel = 1e-8;          // stopping: all three relative KKT residuals
  double over_relaxation = 1.6;   // alpha in [1, 2)
  int verbosity = 0;
  std::ostream* log = nullptr;    // CSV iteration log when verbosity >= 1
  double rho_initial = 1.0;       // penalty start; adapted by residual balance
  int check_interval = 25;        // residual evaluation cadence
  bool polish = true;
};

struct KktResiduals {
  double primal_infeas = 0.0;  // ||A(Z) - b||_2 / (1 + ||b||_2)
  double dual_infeas = 0.0;    // ||C - A'y - S||_F / (1 + ||C||_F)
  double duality_gap = 0.0;    // |tr(CZ) - b'y| / (1 + |tr(CZ)| + |b'y|)
};

struct SdpSolution {
  Eigen::MatrixXd Z;
  Eigen::MatrixXd S;
  Eigen::VectorXd y;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  KktResiduals residuals;
  int iterations = 0;
  SolverStatus status = SolverStatus::NumericalFailure;
};

namespace detail {

inline int svec_size(int n) { return n * (n + 1) / 2; }
inline int svec_index(int i, int j) { return j * (j + 1) / 2 + i; }  // i <= j

inline void svec_into(const Eigen::MatrixXd& m, Eigen::VectorXd& v) {
  const int n = static_cast<int>(m.rows());
  const double rt2 = std::sqrt(2.0);
  int idx = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      v[idx++] = (i == j) ? m(i, j) : rt2 * 0.5 * (m(i, j) + m(j, i));
    }
  }
}

inline void smat_into(const Eigen::VectorXd& v, Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  const double inv_rt2 = 1.0 / std::sqrt(2.0);
  int idx = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double val = v[idx++];
      if (i == j) {
        m(i, j) = val;
      } else {
        m(i, j) = val * inv_rt2;
        m(j, i) = val * inv_rt2;
      }
    }
  }
}

// Sparse m x svec_size(n) operator with rows svec(A_k).
inline Eigen::SparseMatrix<double, Eigen::RowMajor> build_svec_operator(const SdpProblem& p) {
  const double rt2 = std::sqrt(2.0);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(p.constraints.size() * 8);
  for (int k = 0; k < static_cast<int>(p.constraints.size()); ++k) {
    for (const ConstraintEntry& e : p.constraints[static_cast<std::size_t>(k)].entries) {
      if (e.row > e.col) continue;  // mirrored halves are listed explicitly
      const double w = (e.row == e.col) ? e.value : rt2 * e.value;
      trip.emplace_back(k, svec_index(e.row, e.col), w);
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> a(
      static_cast<int>(p.constraints.size()), svec_size(p.dim));
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

// S_out = C - sum_k y_k A_k at full scale, from the constraint entry lists.
inline void dual_slack_into(const SdpProblem& p, const Eigen::VectorXd& y,
                            Eigen::MatrixXd& s_out) {
  s_out = p.cost;
  for (int k = 0; k < static_cast<int>(p.constraints.size()); ++k) {
    const double yk = y[k];
    if (yk == 0.0) continue;
    for (const ConstraintEntry& e : p.constraints[static_cast<std::size_t>(k)].entries) {
      s_out(e.row, e.col) -= yk * e.value;
    }
  }
  s_out = 0.5 * (s_out + s_out.transpose()).eval();
}

}  // namespace detail

// Residuals of a primal-dual pair against the problem data (full scale).
inline KktResiduals kkt_residuals(const SdpProblem& p, const SdpSolution& sol) {
  const int m = static_cast<int>(p.constraints.size());
  Eigen::VectorXd b(m), az(m);
  for (int k = 0; k < m; ++k) {
    b[k] = p.constraints[static_cast<std::size_t>(k)].rhs;
    az[k] = p.constraints[static_cast<std::size_t>(k)].apply(sol.Z);
  }
  Eigen::MatrixXd slack;
  detail::dual_slack_into(p, sol.y, slack);
  const double cz = (p.cost.array() * sol.Z.array()).sum();
  const double by = b.dot(sol.y);
  KktResiduals r;
  r.primal_infeas = (az - b).norm() / (1.0 + b.norm());
  r.dual_infeas = (slack - sol.S).norm() / (1.0 + p.cost.norm());
  r.duality_gap = std::abs(cz - by) / (1.0 + std::abs(cz) + std::abs(by));
  return r;
}

inline SdpSolution solve_sdp(const SdpProblem& p, const SolverSettings& settings = {}) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;

  if (p.dim <= 0 || p.cost.rows() != p.dim || p.cost.cols() != p.dim) {
    throw std::invalid_argument("solve_sdp: inconsistent problem dimensions");
  }
  if (p.constraints.empty()) {
    throw std::invalid_argument("solve_sdp: at least one constraint required");
  }
  if (!(settings.over_relaxation >= 1.0 && settings.over_relaxation < 2.0)) {
    throw std::invalid_argument("solve_sdp: over_relaxation must lie in [1, 2)");
  }
  if (!(settings.eps_rel > 0.0) || !(settings.eps_abs > 0.0) || settings.max_iters < 1) {
    throw std::invalid_argument("solve_sdp: tolerances must be positive, max_iters >= 1");
  }

  const int n = p.dim;
  const int m = static_cast<int>(p.constraints.size());
  const int nsv = detail::svec_size(n);

  // Objective scaling: run on C/sigma_c, map duals back on exit.
  const double sigma_c = std::max(p.cost.norm(), 1e-12);

  VectorXd b(m);
  for (int k = 0; k < m; ++k) b[k] = p.constraints[static_cast<std::size_t>(k)].rhs;
  const double b_norm = b.norm();

  const auto asv = detail::build_svec_operator(p);
  const Eigen::SparseMatrix<double> asvT = asv.transpose();
  Eigen::SparseMatrix<double> gram = (asv * asvT).pruned();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> gram_chol;
  gram_chol.compute(gram);
  if (gram_chol.info() != Eigen::Success) {
    // Constraints from the relaxation builders are linearly independent; a
    // tiny ridge keeps arbitrary user input from aborting the solve.
    Eigen::SparseMatrix<double> ridge(m, m);
    ridge.setIdentity();
    gram = gram + 1e-10 * ridge;
    gram_chol.compute(gram);
    if (gram_chol.info() != Eigen::Success) {
      SdpSolution fail;
      fail.status = SolverStatus::NumericalFailure;
      fail.Z = MatrixXd::Zero(n, n);
      fail.S = MatrixXd::Zero(n, n);
      fail.y = VectorXd::Zero(m);
      return fail;
    }
  }

  MatrixXd c_scaled = p.cost / sigma_c;
  c_scaled = 0.5 * (c_scaled + c_scaled.transpose()).eval();
  VectorXd c(nsv);
  detail::svec_into(c_scaled, c);

  // Z0 = I/4 satisfies the trace and clone-equality constraints exactly.
  MatrixXd z_mat = 0.25 * MatrixXd::Identity(n, n);
  VectorXd z(nsv), s(nsv);
  detail::svec_into(z_mat, z);
  s.setZero();
  VectorXd y = VectorXd::Zero(m);

  double rho = settings.rho_initial;
  const double alpha = settings.over_relaxation;

  MatrixXd v_mat(n, n), s_full(n, n), z_full(n, n);
  VectorXd aty(nsv), v(nsv), rhs(m), az(m);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig;

  auto relative_residuals = [&](double& rp, double& rd, double& rgap) {
    az.noalias() = asv * z;
    rp = (az - b).norm() / (1.0 + b_norm);
    const double dual_abs = (c - aty - s).norm();  // scaled-problem Frobenius norm
    rd = sigma_c * dual_abs / (1.0 + sigma_c);
    const double cz = c.dot(z), by = b.dot(y);
    rgap = sigma_c * std::abs(cz - by) /
           (1.0 + sigma_c * std::abs(cz) + sigma_c * std::abs(by));
  };

  if (settings.verbosity >= 1 && settings.log != nullptr) {
    (*settings.log) << "iter,primal_obj,dual_obj,primal_infeas,dual_infeas,duality_gap,rho\n";
  }

  SolverStatus status = SolverStatus::MaxIters;
  int iters_done = settings.max_iters;

  // Penalty updates run on a much slower clock than residual checks so the
  // iterate always gets long fixed-rho stretches (frequent flips can freeze
  // the iterate in a limit cycle).
  const int adapt_interval = 20 * settings.check_interval;

  for (int it = 1; it <= settings.max_iters; ++it) {
    // y-step: (A A') y = (b - A z)/rho + A (c - s)
    rhs.noalias() = asv * (c - s - z / rho);
    rhs += b / rho;
    y = gram_chol.solve(rhs);
    aty.noalias() = asvT * y;

    // Projection step with over-relaxation on the slack target.
    v = alpha * (c - aty) + (1.0 - alpha) * s - z / rho;
    detail::smat_into(v, v_mat);
    eig.compute(v_mat);
    // S = projection of V onto the PSD cone; Z = rho (S - V) = -rho * V_minus,
    // so both stay PSD by construction on every iterate.
    s_full.noalias() =
        eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).asDiagonal() *
        eig.eigenvectors().transpose();
    z_full = rho * (s_full - v_mat);
    detail::svec_into(s_full, s);
    detail::svec_into(z_full, z);

    if (it % settings.check_interval == 0 || it == settings.max_iters) {
      if (!z.allFinite() || !y.allFinite() || !s.allFinite()) {
        status = SolverStatus::NumericalFailure;
        iters_done = it;
        break;
      }
      double rp, rd, rgap;
      relative_residuals(rp, rd, rgap);
      if (settings.verbosity >= 1 && settings.log != nullptr) {
        (*settings.log) << it << ',' << sigma_c * c.dot(z) << ',' << sigma_c * b.dot(y)
                        << ',' << rp << ',' << rd << ',' << rgap << ',' << rho << '\n';
      }
      if (rp <= settings.eps_rel && rd <= settings.eps_rel && rgap <= settings.eps_rel) {
        status = SolverStatus::Optimal;
        iters_done = it;
        break;
      }
      // Proportional penalty control (the Gram factorization does not depend
      // on rho). rho is the reciprocal of the augmented-Lagrangian penalty on
      // dual feasibility and also scales the primal multiplier step, so the
      // primal residual responds to rho directly while the dual residual
      // responds inversely: steering by sqrt(rd/rp) balances the two. A
      // lagging duality gap additionally wants larger primal steps, so it
      // doubles the factor. Updates use a deadband and run on the slow clock.
      if (it % adapt_interval == 0) {
        double factor = std::sqrt(rd / std::max(rp, 1e-16));
        if (rgap > 10.0 * std::max(rp, rd)) factor *= 2.0;
        factor = std::min(std::max(factor, 0.1), 10.0);
        if (factor > 1.2 || factor < 1.0 / 1.2) {
          rho = std::min(std::max(rho * factor, 1e-6), 1e6);
        }
      }
    }
  }

  SdpSolution sol;
  sol.iterations = iters_done;
  sol.status = status;
  detail::smat_into(z, z_full);
  sol.Z = 0.5 * (z_full + z_full.transpose());
  detail::smat_into(s, s_full);
  sol.S = sigma_c * 0.5 * (s_full + s_full.transpose());
  sol.y = sigma_c * y;

  if (status == SolverStatus::NumericalFailure) {
    sol.primal_obj = std::numeric_limits<double>::quiet_NaN();
    sol.dual_obj = std::numeric_limits<double>::quiet_NaN();
    sol.residuals = {sol.primal_obj, sol.primal_obj, sol.primal_obj};
    return sol;
  }

  sol.residuals = kkt_residuals(p, sol);

  if (settings.polish) {
    // Sharpen the dual at the rounded primal direction: find the minimal
    // change to y making (C - A'y) x = 0 exactly, then keep it only if the
    // certificate quality does not regress.
    eig.compute(sol.Z);
    const int top = n - 1;
    const double lam1 = eig.eigenvalues()[top];
    const double lam2 = (n >= 2) ? eig.eigenvalues()[top - 1] : 0.0;
    if (lam1 > 0.0 && lam2 <= 1e-4 * lam1) {
      const VectorXd x = std::sqrt(lam1) * eig.eigenvectors().col(top);
      MatrixXd g = MatrixXd::Zero(n, m);
      for (int k = 0; k < m; ++k) {
        for (const ConstraintEntry& e : p.constraints[static_cast<std::size_t>(k)].entries) {
          g(e.row, k) += e.value * x[e.col];
        }
      }
      const VectorXd resid = p.cost * x - g * sol.y;
      MatrixXd gram_g = g * g.transpose();
      const double reg = 1e-12 * (1.0 + gram_g.trace() / n);
      gram_g.diagonal().array() += reg;
      const VectorXd d = gram_g.ldlt().solve(resid);
      const VectorXd y_pol = sol.y + g.transpose() * d;

      SdpSolution cand = sol;
      cand.y = y_pol;
      detail::dual_slack_into(p, y_pol, cand.S);
      const KktResiduals r_pol = kkt_residuals(p, cand);
      cand.residuals = r_pol;

      Eigen::SelfAdjointEigenSolver<MatrixXd> es_old(sol.S);
      Eigen::SelfAdjointEigenSolver<MatrixXd> es_new(cand.S);
      const double min_old = es_old.eigenvalues()[0];
      const double min_new = es_new.eigenvalues()[0];

      const auto within = [&](const KktResiduals& r) {
        return r.primal_infeas <= settings.eps_rel && r.dual_infeas <= settings.eps_rel &&
               r.duality_gap <= settings.eps_rel;
      };
      const bool keep =
          within(r_pol) ||
          (!within(sol.residuals) && min_new >= min_old &&
           r_pol.duality_gap <= std::max(2.0 * sol.residuals.duality_gap, settings.eps_rel));
      if (keep) {
        sol.y = cand.y;
        sol.S = cand.S;
        sol.residuals = r_pol;
      }
    }
  }

  // Final status is judged on the returned numbers, so "Optimal" always
  // implies the residual contract regardless of what the loop concluded.
  {
    const KktResiduals& r = sol.residuals;
    const bool ok = r.primal_infeas <= settings.eps_rel && r.dual_infeas <= settings.eps_rel &&
                    r.duality_gap <= settings.eps_rel;
    sol.status = ok ? SolverStatus::Optimal : SolverStatus::MaxIters;
  }

  sol.primal_obj = (p.cost.array() * sol.Z.array()).sum();
  Eigen::VectorXd b_full(m);
  for (int k = 0; k < m; ++k) b_full[k] = p.constraints[static_cast<std::size_t>(k)].rhs;
  sol.dual_obj = b_full.dot(sol.y);
  return sol;
}

}  // namespace certrot
