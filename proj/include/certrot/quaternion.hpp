#pragma once

// Unit-quaternion algebra: Hamilton products via the linear operators
// Omega1/Omega2, inverses, and conversion to/from rotation matrices.
//
// Storage convention: q = [v; s] with the SCALAR COMPONENT LAST (q[3] = s).
// The identity quaternion is e = [0, 0, 0, 1].

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace certrot {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

namespace detail {

template <typename Derived>
inline void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
  }
}

}  // namespace detail

// Which side of a Hamilton product the generating quaternion acts from:
// omega1(qa) * qb == qa ⊗ qb (Left), omega2(qb) * qa == qa ⊗ qb (Right).
enum class OmegaSide { Left, Right };

struct OmegaMatrix {
  Mat4 m;
  OmegaSide side;
};

// Left-product operator: omega1(q).m * p == q ⊗ p. Defined for any 4-vector
// (unit norm not required; homogenized vectors [a; 0] are common inputs).
inline OmegaMatrix omega1(const Vec4& q) {
  detail::require_finite(q, "omega1");
  const double q1 = q[0], q2 = q[1], q3 = q[2], q4 = q[3];
  Mat4 m;
  m <<  q4, -q3,  q2, q1,
        q3,  q4, -q1, q2,
       -q2,  q1,  q4, q3,
       -q1, -q2, -q3, q4;
  return {m, OmegaSide::Left};
}

// Right-product operator: omega2(p).m * q == q ⊗ p.
inline OmegaMatrix omega2(const Vec4& q) {
  detail::require_finite(q, "omega2");
  const double q1 = q[0], q2 = q[1], q3 = q[2], q4 = q[3];
  Mat4 m;
  m <<  q4,  q3, -q2, q1,
       -q3,  q4,  q1, q2,
        q2, -q1,  q4, q3,
       -q1, -q2, -q3, q4;
  return {m, OmegaSide::Right};
}

// Hamilton product qa ⊗ qb (scalar-last convention).
inline Vec4 qmul(const Vec4& qa, const Vec4& qb) {
  detail::require_finite(qa, "qmul");
  detail::require_finite(qb, "qmul");
  return omega1(qa).m * qb;
}

// Homogenization of a 3-vector: [a; 0].
inline Vec4 homogenize(const Vec3& a) {
  detail::require_finite(a, "homogenize");
  return Vec4(a[0], a[1], a[2], 0.0);
}

// Unit quaternion with deterministic sign: constructors normalize and flip the
// global sign so that s >= 0 (if s == 0, the first nonzero component of v is
// made positive). q and -q encode the same rotation; comparisons that care
// about the rotation only should use rotation_distance or the double cover.
class UnitQuaternion {
 public:
  explicit UnitQuaternion(const Vec4& raw) : q_(raw) {
    detail::require_finite(q_, "UnitQuaternion");
    const double n = q_.norm();
    if (!(n > 1e-15)) {
      throw std::invalid_argument("UnitQuaternion: zero-norm input");
    }
    q_ /= n;
    canonicalize();
  }

  UnitQuaternion(const Vec3& v, double s) : UnitQuaternion(Vec4(v[0], v[1], v[2], s)) {}

  static UnitQuaternion identity() { return UnitQuaternion(Vec4(0, 0, 0, 1)); }

  const Vec4& coeffs() const { return q_; }
  Vec3 vec() const { return q_.head<3>(); }
  double scalar() const { return q_[3]; }

  // Eq-style inverse: negate the vector part.
  UnitQuaternion inverse() const {
    return UnitQuaternion(Vec4(-q_[0], -q_[1], -q_[2], q_[3]));
  }

 private:
  // Sign rule: s >= 0; when s == 0, the first nonzero component is positive.
  void canonicalize() {
    double lead = q_[3];
    if (lead == 0.0) {
      for (int k = 0; k < 3 && lead == 0.0; ++k) lead = q_[k];
    }
    if (lead < 0.0) q_ = -q_;
  }

  Vec4 q_;
};

inline UnitQuaternion qinv(const UnitQuaternion& q) { return q.inverse(); }

// Proper rotation matrix; construction validates orthonormality and det = +1.
class Rotation3 {
 public:
  explicit Rotation3(const Mat3& m) : m_(m) {
    detail::require_finite(m_, "Rotation3");
    if ((m_.transpose() * m_ - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9) {
      throw std::invalid_argument("Rotation3: matrix is not orthonormal");
    }
    if (std::abs(m_.determinant() - 1.0) > 1e-9) {
      throw std::invalid_argument("Rotation3: determinant is not +1");
    }
  }

  static Rotation3 identity() { return Rotation3(Mat3::Identity()); }

  const Mat3& matrix() const { return m_; }

 private:
  Mat3 m_;
};

// R such that [R a; 0] = q ⊗ [a; 0] ⊗ q^-1, extracted as the top-left 3x3
// block of Omega2(q)^T Omega1(q) (which equals diag(R, 1) for unit q).
inline Rotation3 quat_to_rot(const UnitQuaternion& q) {
  const Mat4 prod = omega2(q.coeffs()).m.transpose() * omega1(q.coeffs()).m;
  return Rotation3(prod.topLeftCorner<3, 3>());
}

// Stable rotation-to-quaternion conversion (branch on the largest diagonal
// combination); result carries the canonical sign from UnitQuaternion.
inline UnitQuaternion rot_to_quat(const Rotation3& rot) {
  const Mat3& m = rot.matrix();
  const double tr = m.trace();
  Vec4 q;  // [v; s]
  if (tr > 0.0) {
    double t = std::sqrt(tr + 1.0);
    q[3] = 0.5 * t;
    t = 0.5 / t;
    q[0] = (m(2, 1) - m(1, 2)) * t;
    q[1] = (m(0, 2) - m(2, 0)) * t;
    q[2] = (m(1, 0) - m(0, 1)) * t;
  } else {
    int i = 0;
    if (m(1, 1) > m(0, 0)) i = 1;
    if (m(2, 2) > m(i, i)) i = 2;
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    double t = std::sqrt(m(i, i) - m(j, j) - m(k, k) + 1.0);
    q[i] = 0.5 * t;
    t = 0.5 / t;
    q[3] = (m(k, j) - m(j, k)) * t;
    q[j] = (m(j, i) + m(i, j)) * t;
    q[k] = (m(k, i) + m(i, k)) * t;
  }
  return UnitQuaternion(q);
}

// Geodesic distance on SO(3): the angle of r1^T r2, in [0, pi].
inline double rotation_geodesic_error(const Rotation3& r1, const Rotation3& r2) {
  const double c = ((r1.matrix().transpose() * r2.matrix()).trace() - 1.0) / 2.0;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace certrot
