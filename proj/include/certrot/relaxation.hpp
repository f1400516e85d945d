#pragma once

// Standard-form SDP data for the two relaxations of the lifted problem:
//   minimize tr(C Z)  s.t.  tr(A_k Z) = b_k,  Z >= 0 (PSD),
// over Z of side 4(N+1), block-indexed by the quaternion clones.
//
// Naive relaxation:   tr([Z]_qq) = 1 and [Z]_{q_i q_i} = [Z]_qq.
// Tight relaxation (method name "quasar") adds the redundant off-diagonal
// block-symmetry constraints [Z]_{q q_i} = [Z]_{q q_i}^T and
// [Z]_{q_i q_j} = [Z]_{q_i q_j}^T, which rank-1 feasible points satisfy
// automatically but which bind (and tighten) the relaxation.
//
// Constraint matrices are stored sparsely (entry lists over the full
// symmetric pattern, <= 8 nonzeros each) and scaled to unit Frobenius norm.
// Ordering is deterministic: trace; diagonal-block equalities by block, then
// upper-triangle row-major; q-q_i symmetries by block; q_i-q_j symmetries in
// lexicographic (i, j) order.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace certrot {

struct ConstraintEntry {
  int row;
  int col;
  double value;
};

struct ConstraintMatrix {
  std::vector<ConstraintEntry> entries;  // full symmetric pattern
  double rhs = 0.0;

  double apply(const Eigen::MatrixXd& z) const {
    double acc = 0.0;
    for (const ConstraintEntry& e : entries) acc += e.value * z(e.row, e.col);
    return acc;
  }
};

struct SdpProblem {
  int dim = 0;                               // matrix side n
  Eigen::MatrixXd cost;                      // symmetric C
  std::vector<ConstraintMatrix> constraints; // tr(A_k Z) = b_k
};

namespace detail {

// tr([Z]_qq) = 1, scaled to unit Frobenius norm (4 diagonal entries of 1/2).
inline ConstraintMatrix trace_constraint() {
  ConstraintMatrix c;
  for (int r = 0; r < 4; ++r) c.entries.push_back({r, r, 0.5});
  c.rhs = 0.5;
  return c;
}

// Entry (r,c), r <= c, of block i equals the same entry of block 0.
inline ConstraintMatrix diag_block_equality(int i, int r, int c) {
  const int off = 4 * i;
  ConstraintMatrix cm;
  if (r == c) {
    const double v = 1.0 / std::sqrt(2.0);
    cm.entries.push_back({off + r, off + r, v});
    cm.entries.push_back({r, r, -v});
  } else {
    cm.entries.push_back({off + r, off + c, 0.5});
    cm.entries.push_back({off + c, off + r, 0.5});
    cm.entries.push_back({r, c, -0.5});
    cm.entries.push_back({c, r, -0.5});
  }
  return cm;
}

// Z(bi+r, bj+c) = Z(bi+c, bj+r) for r < c: symmetry of the (bi, bj) 4x4 block.
inline ConstraintMatrix block_symmetry(int bi, int bj, int r, int c) {
  const int oi = 4 * bi, oj = 4 * bj;
  ConstraintMatrix cm;
  cm.entries.push_back({oi + r, oj + c, 0.5});
  cm.entries.push_back({oj + c, oi + r, 0.5});
  cm.entries.push_back({oi + c, oj + r, -0.5});
  cm.entries.push_back({oj + r, oi + c, -0.5});
  return cm;
}

inline void check_dims(const Eigen::MatrixXd& q, int n_pairs, const char* who) {
  const int dim = 4 * (n_pairs + 1);
  if (n_pairs < 1) throw std::invalid_argument(std::string(who) + ": need N >= 1");
  if (q.rows() != dim || q.cols() != dim) {
    throw std::invalid_argument(std::string(who) + ": cost matrix must have side 4(N+1)");
  }
}

}  // namespace detail

// 1 + 10N constraints: trace + the 10 upper-triangle equalities per clone block.
inline SdpProblem build_naive_sdp(const Eigen::MatrixXd& big_q, int n_pairs) {
  detail::check_dims(big_q, n_pairs, "build_naive_sdp");
  SdpProblem p;
  p.dim = static_cast<int>(big_q.rows());
  p.cost = 0.5 * (big_q + big_q.transpose());
  p.constraints.push_back(detail::trace_constraint());
  for (int i = 1; i <= n_pairs; ++i) {
    for (int r = 0; r < 4; ++r) {
      for (int c = r; c < 4; ++c) {
        p.constraints.push_back(detail::diag_block_equality(i, r, c));
      }
    }
  }
  return p;
}

// Naive constraints plus all off-diagonal block symmetries:
// 1 + 10N + 6N + 6 N(N-1)/2 = 1 + 16N + 3N(N-1) constraints.
inline SdpProblem build_quasar_sdp(const Eigen::MatrixXd& big_q, int n_pairs) {
  detail::check_dims(big_q, n_pairs, "build_quasar_sdp");
  SdpProblem p = build_naive_sdp(big_q, n_pairs);
  for (int i = 1; i <= n_pairs; ++i) {
    for (int r = 0; r < 4; ++r) {
      for (int c = r + 1; c < 4; ++c) {
        p.constraints.push_back(detail::block_symmetry(0, i, r, c));
      }
    }
  }
  for (int i = 1; i <= n_pairs; ++i) {
    for (int j = i + 1; j <= n_pairs; ++j) {
      for (int r = 0; r < 4; ++r) {
        for (int c = r + 1; c < 4; ++c) {
          p.constraints.push_back(detail::block_symmetry(i, j, r, c));
        }
      }
    }
  }
  return p;
}

}  // namespace certrot
