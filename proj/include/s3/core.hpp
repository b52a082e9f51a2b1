#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

// Quaternion model of the unit 3-sphere and its right-invariant frame.
//
// A point p = (x1, y1, x2, y2) is identified with the quaternion
// x1 + i y1 + j x2 + k y2.  The vertical (Hopf) field is V(p) = i*p and the
// horizontal distribution is spanned by E1(p) = j*p and E2(p) = k*p.

namespace s3 {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

inline constexpr double kUnitTol = 1e-12;
inline constexpr double kTangentTol = 1e-10;

/// Hamilton product; storage order (scalar, i, j, k) = (x1, y1, x2, y2).
inline Vec4 quat_mul(const Vec4& p, const Vec4& q) {
  return Vec4(p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
              p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
              p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
              p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0]);
}

inline Vec4 quat_conj(const Vec4& p) { return Vec4(p[0], -p[1], -p[2], -p[3]); }

/// exp(i t) as a quaternion; left-multiplying by it moves along the Hopf fiber.
inline Vec4 fiber_rotation(double t) { return Vec4(std::cos(t), std::sin(t), 0.0, 0.0); }

inline Vec4 renormalized(const Vec4& p) { return p / p.norm(); }

inline bool is_unit(const Vec4& p, double tol = kUnitTol) {
  return std::abs(p.squaredNorm() - 1.0) <= 2.0 * tol;
}

// Right-invariant frame in coordinates.
inline Vec4 vertical_at(const Vec4& p) { return Vec4(-p[1], p[0], -p[3], p[2]); }   // i*p
inline Vec4 e1_at(const Vec4& p) { return Vec4(-p[2], p[3], p[0], -p[1]); }          // j*p
inline Vec4 e2_at(const Vec4& p) { return Vec4(-p[3], -p[2], p[1], p[0]); }          // k*p

/// Tangent vector remembering its base point on the sphere.
struct TangentVector {
  Vec4 base;
  Vec4 v;

  double dot(const TangentVector& o) const { return v.dot(o.v); }
  double norm() const { return v.norm(); }
};

struct Frame {
  TangentVector e1, e2, vertical;
};

inline Frame frame_at(const Vec4& p) {
  return Frame{{p, e1_at(p)}, {p, e2_at(p)}, {p, vertical_at(p)}};
}

/// J(X) = tangential part of i*X, so that J(E1)=E2, J(E2)=-E1 and J(V)=0.
inline TangentVector apply_J(const TangentVector& x) {
  Vec4 ix = quat_mul(Vec4(0, 1, 0, 0), x.v);
  ix -= ix.dot(x.base) * x.base;
  return {x.base, ix};
}

/// Projection onto the horizontal plane: X - <X,V> V.
inline TangentVector horizontal_part(const TangentVector& x) {
  const Vec4 vv = vertical_at(x.base);
  return {x.base, x.v - x.v.dot(vv) * vv};
}

/// Hopf map onto the unit 2-sphere {x1 = 0}; components in the order (y1, x2, y2).
inline Vec3 hopf(const Vec4& p) {
  return Vec3(p[0] * p[0] + p[1] * p[1] - p[2] * p[2] - p[3] * p[3],
              2.0 * (p[2] * p[1] - p[0] * p[3]),
              2.0 * (p[0] * p[2] + p[1] * p[3]));
}

/// Right translation R_q(p) = p * q; an isometry preserving the horizontal plane.
inline Vec4 right_translate(const Vec4& q, const Vec4& p) { return quat_mul(p, q); }

inline TangentVector right_translate(const Vec4& q, const TangentVector& x) {
  return {quat_mul(x.base, q), quat_mul(x.v, q)};
}

/// Rotation r_theta fixing the (x1,y1)-plane and turning the (x2,y2)-plane.
inline Vec4 rotate_theta(double theta, const Vec4& p) {
  const double c = std::cos(theta), s = std::sin(theta);
  return Vec4(p[0], p[1], c * p[2] - s * p[3], s * p[2] + c * p[3]);
}

inline TangentVector rotate_theta(double theta, const TangentVector& x) {
  return {rotate_theta(theta, x.base), rotate_theta(theta, x.v)};
}

/// Stereographic projection from `pole` onto the hyperplane through the origin
/// orthogonal to it; the equatorial 2-sphere maps to the unit sphere.
/// Coordinates are taken in a fixed orthonormal basis of pole^bot (for the
/// default pole (0,0,0,1) this is just (x1, y1, x2)).
inline Vec3 stereographic(const Vec4& p, const Vec4& pole = Vec4(0, 0, 0, 1)) {
  const double a = p.dot(pole);
  if (std::abs(a - 1.0) < 1e-12)
    throw std::domain_error("stereographic: projection undefined at the pole");
  const Vec4 w = (p - a * pole) / (1.0 - a);
  // Deterministic orthonormal basis of pole^bot.
  int k = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(pole[i]) > std::abs(pole[k])) k = i;
  Eigen::Matrix<double, 4, 3> basis;
  int col = 0;
  for (int i = 0; i < 4; ++i) {
    if (i == k) continue;
    Vec4 e = Vec4::Zero();
    e[i] = 1.0;
    e -= e.dot(pole) * pole;
    for (int j = 0; j < col; ++j) e -= e.dot(basis.col(j)) * basis.col(j);
    basis.col(col++) = e.normalized();
  }
  return basis.transpose() * w;
}

}  // namespace s3
