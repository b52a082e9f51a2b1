#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "s3/core.hpp"
#include "s3/rational.hpp"

// Carnot-Caratheodory geodesics of curvature lambda.  A geodesic is an
// arc-length horizontal curve with D_g' g' + 2 lambda J(g') = 0; in R^4
// coordinates this reads  g'' + g + 2 lambda (i * g') = 0,  and the solution
// through (p, v) is the closed form
//
//   g(s) = A(s) p + B(s) (lambda p - J(v)) + C(s) V(p) + D(s) (lambda V(p) + v)
//
// with A = cos(ls) cos(ms), B = sin(ls) sin(ms)/m, C = -sin(ls) cos(ms),
// D = cos(ls) sin(ms)/m and m = sqrt(1 + l^2).  Everything here differentiates
// that closed form analytically; finite differences are reserved for tests.

namespace s3 {

struct GeodesicSpec {
  Vec4 p;        // base point, unit
  Vec4 v;        // unit horizontal velocity at p
  double lambda; // curvature
};

inline void validate(const GeodesicSpec& spec) {
  if (!std::isfinite(spec.lambda)) throw std::invalid_argument("geodesic: lambda not finite");
  if (!is_unit(spec.p)) throw std::invalid_argument("geodesic: base point not unit");
  if (std::abs(spec.v.norm() - 1.0) > kTangentTol)
    throw std::invalid_argument("geodesic: velocity not unit");
  if (std::abs(spec.v.dot(spec.p)) > kTangentTol ||
      std::abs(spec.v.dot(vertical_at(spec.p))) > kTangentTol)
    throw std::invalid_argument("geodesic: velocity not horizontal");
}

/// Geodesic from p with velocity cos(theta) E1 + sin(theta) E2.
inline GeodesicSpec geodesic_from_angle(const Vec4& p, double theta, double lambda) {
  return {p, std::cos(theta) * e1_at(p) + std::sin(theta) * e2_at(p), lambda};
}

namespace detail {

struct GeodesicCoeffs {
  double a, b, c, d;
};

// Value and the first two derivatives of the four coefficient functions.
inline void geodesic_coeffs(double lambda, double s, GeodesicCoeffs& f, GeodesicCoeffs* df,
                            GeodesicCoeffs* ddf) {
  const double m = std::sqrt(1.0 + lambda * lambda);
  const double cl = std::cos(lambda * s), sl = std::sin(lambda * s);
  const double cm = std::cos(m * s), sm = std::sin(m * s);
  f = {cl * cm, sl * sm / m, -sl * cm, cl * sm / m};
  if (df) {
    *df = {-lambda * sl * cm - m * cl * sm,
           lambda * cl * sm / m + sl * cm,
           -lambda * cl * cm + m * sl * sm,
           -lambda * sl * sm / m + cl * cm};
  }
  if (ddf) {
    const double k = 1.0 + 2.0 * lambda * lambda;  // lambda^2 + m^2
    *ddf = {-k * cl * cm + 2.0 * lambda * m * sl * sm,
            2.0 * lambda * cl * cm - k * sl * sm / m,
            k * sl * cm + 2.0 * lambda * m * cl * sm,
            -k * cl * sm / m - 2.0 * lambda * sl * cm};
  }
}

struct GeodesicBasis {
  Vec4 u0, u1, u2, u3;
};

inline GeodesicBasis geodesic_basis(const GeodesicSpec& spec) {
  const Vec4 jv = quat_mul(Vec4(0, 1, 0, 0), spec.v);
  const Vec4 vp = vertical_at(spec.p);
  return {spec.p, spec.lambda * spec.p - jv, vp, spec.lambda * vp + spec.v};
}

inline Vec4 combine(const GeodesicBasis& basis, const GeodesicCoeffs& c) {
  return c.a * basis.u0 + c.b * basis.u1 + c.c * basis.u2 + c.d * basis.u3;
}

}  // namespace detail

inline Vec4 geodesic_point(const GeodesicSpec& spec, double s) {
  detail::GeodesicCoeffs f;
  detail::geodesic_coeffs(spec.lambda, s, f, nullptr, nullptr);
  return detail::combine(detail::geodesic_basis(spec), f);
}

inline TangentVector geodesic_velocity(const GeodesicSpec& spec, double s) {
  detail::GeodesicCoeffs f, df;
  detail::geodesic_coeffs(spec.lambda, s, f, &df, nullptr);
  const auto basis = detail::geodesic_basis(spec);
  return {detail::combine(basis, f), detail::combine(basis, df)};
}

/// Flat (R^4) second derivative of the closed form.
inline Vec4 geodesic_accel(const GeodesicSpec& spec, double s) {
  detail::GeodesicCoeffs f, df, ddf;
  detail::geodesic_coeffs(spec.lambda, s, f, &df, &ddf);
  return detail::combine(detail::geodesic_basis(spec), ddf);
}

/// |g'' + g + 2 lambda (i * g')| from the analytic derivatives.
inline double geodesic_ode_residual(const GeodesicSpec& spec, double s) {
  detail::GeodesicCoeffs f, df, ddf;
  detail::geodesic_coeffs(spec.lambda, s, f, &df, &ddf);
  const auto basis = detail::geodesic_basis(spec);
  const Vec4 g = detail::combine(basis, f);
  const Vec4 dg = detail::combine(basis, df);
  const Vec4 ddg = detail::combine(basis, ddf);
  return (ddg + g + 2.0 * spec.lambda * quat_mul(Vec4(0, 1, 0, 0), dg)).norm();
}

enum class OrbitKind { closed, dense };

struct GeodesicClass {
  OrbitKind kind = OrbitKind::dense;
  double ratio = 0.0;                  // lambda / sqrt(1 + lambda^2), in (-1, 1)
  double rho = 0.0;                    // Clifford torus radius, 2 rho^2 - 1 = ratio
  double slope = 0.0;                  // slope of the line on the flat torus chart
  std::optional<Rational> approx;      // the accepted fraction when closed
  std::optional<double> period;        // arc-length period when closed
};

inline constexpr double kClosureCap = 512.0 * M_PI;

/// Smallest L > 0 with g(L) = g(0) and g'(L) = g'(0), found by scanning the
/// 2 pi multiples of the slow angular frequency m - lambda and checking the
/// fast one, then confirming against the closed form at tolerance 1e-9.
inline double geodesic_period(double lambda, double length_cap = kClosureCap) {
  if (!std::isfinite(lambda)) throw std::invalid_argument("geodesic_period: lambda not finite");
  const double m = std::sqrt(1.0 + lambda * lambda);
  const double slow = m - lambda;        // > 0
  const double fast = m + lambda;        // > 0
  const GeodesicSpec ref = geodesic_from_angle(Vec4(1, 0, 0, 0), 0.0, lambda);
  const TangentVector v0 = geodesic_velocity(ref, 0.0);
  for (int k = 1;; ++k) {
    const double L = 2.0 * M_PI * k / slow;
    if (L > length_cap) break;
    const double phase = L * fast / (2.0 * M_PI);
    if (std::abs(phase - std::round(phase)) > 1e-6 * (1.0 + phase)) continue;
    const double gap = (geodesic_point(ref, L) - ref.p).norm() +
                       (geodesic_velocity(ref, L).v - v0.v).norm();
    if (gap < 1e-9) return L;
  }
  throw std::domain_error("geodesic_period: no closure below the length cap");
}

inline GeodesicClass classify_geodesic(double lambda, const RationalityPolicy& policy = {}) {
  if (!std::isfinite(lambda)) throw std::invalid_argument("classify_geodesic: lambda not finite");
  GeodesicClass out;
  out.ratio = lambda / std::sqrt(1.0 + lambda * lambda);
  out.rho = std::sqrt(0.5 * (1.0 + out.ratio));
  out.slope = (out.ratio + 1.0) / (out.ratio - 1.0);
  if (auto frac = detect_rational(out.ratio, policy)) {
    out.kind = OrbitKind::closed;
    out.approx = frac;
    out.period = geodesic_period(lambda);
  }
  return out;
}

/// Mean curvature of the Clifford torus T_rho; the geodesic of this curvature
/// launched tangent to the torus stays on |z1| = rho.
inline double torus_curvature(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("torus_curvature: rho outside (0,1)");
  return (2.0 * rho * rho - 1.0) / (2.0 * rho * std::sqrt(1.0 - rho * rho));
}

/// Launch data for the geodesic contained in T_rho through
/// (rho e^{2 pi i x0}, sqrt(1-rho^2) e^{2 pi i y0}).
inline GeodesicSpec torus_geodesic(double rho, double x0 = 0.0, double y0 = 0.0) {
  const double r2 = std::sqrt(1.0 - rho * rho);
  const Vec4 q(rho * std::cos(2 * M_PI * x0), rho * std::sin(2 * M_PI * x0),
               r2 * std::cos(2 * M_PI * y0), r2 * std::sin(2 * M_PI * y0));
  const double alpha = r2 / rho;
  // w = i * (alpha z1, -z2 / alpha)
  const Vec4 w = quat_mul(Vec4(0, 1, 0, 0),
                          Vec4(alpha * q[0], alpha * q[1], -q[2] / alpha, -q[3] / alpha));
  return {q, w, torus_curvature(rho)};
}

struct JacobiSample {
  double s = 0.0;
  TangentVector X;       // variation field at g(s)
  double along = 0.0;    // <X, g'>
  double along_J = 0.0;  // <X, J(g')>
  double vertical = 0.0; // <X, V(g)>
  double conserved = 0.0; // lambda <X,V> + <X, g'>
};

/// Variation field of a one-parameter family of geodesics of equal curvature,
/// by central differencing the closed form over the family parameter.
inline JacobiSample jacobi_field(const std::function<GeodesicSpec(double)>& family, double s,
                                 double step = 1e-5) {
  const GeodesicSpec center = family(0.0);
  const GeodesicSpec plus = family(step), minus = family(-step);
  if (std::abs(plus.lambda - center.lambda) > 1e-12 ||
      std::abs(minus.lambda - center.lambda) > 1e-12)
    throw std::invalid_argument("jacobi_field: family members change curvature");
  JacobiSample out;
  out.s = s;
  const Vec4 x = (geodesic_point(plus, s) - geodesic_point(minus, s)) / (2.0 * step);
  const TangentVector vel = geodesic_velocity(center, s);
  out.X = {vel.base, x};
  out.along = x.dot(vel.v);
  out.along_J = x.dot(apply_J(vel).v);
  out.vertical = x.dot(vertical_at(vel.base));
  out.conserved = center.lambda * out.vertical + out.along;
  return out;
}

struct HopfFit {
  double planarity = 0.0;   // max distance of projected samples to the fitted plane
  double curvature = 0.0;   // signed geodesic curvature of the circle in S^2
  Vec3 normal = Vec3::Zero();
  double offset = 0.0;      // plane offset <c, n>
  bool degenerate = false;  // circle radius too small for a conditioned fit
};

/// Projects the geodesic through the Hopf map and fits a plane; the image must
/// be a geodesic circle of curvature lambda in S^2 with the orientation of the
/// circulation normal.
inline HopfFit hopf_circle_fit(const GeodesicSpec& spec, int n_samples = 256) {
  if (n_samples < 8) throw std::invalid_argument("hopf_circle_fit: too few samples");
  const double m = std::sqrt(1.0 + spec.lambda * spec.lambda);
  const double range = M_PI / m;  // full circle: the image has period pi/m
  std::vector<Vec3> pts(n_samples);
  Vec3 mean = Vec3::Zero();
  for (int i = 0; i < n_samples; ++i) {
    pts[i] = hopf(geodesic_point(spec, range * i / n_samples));
    mean += pts[i];
  }
  mean /= n_samples;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& c : pts) cov += (c - mean) * (c - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  Vec3 normal = eig.eigenvectors().col(0);
  // The output coordinate order (y1,x2,y2) is an odd permutation of the
  // ambient one, so the signed-curvature convention flips the circulation axis.
  Vec3 circulation = Vec3::Zero();
  for (int i = 0; i < n_samples; ++i) circulation += pts[i].cross(pts[(i + 1) % n_samples]);
  if (circulation.dot(normal) > 0.0) normal = -normal;

  HopfFit fit;
  fit.normal = normal;
  fit.offset = mean.dot(normal);
  double planarity = 0.0;
  for (const auto& c : pts) planarity = std::max(planarity, std::abs(c.dot(normal) - fit.offset));
  fit.planarity = planarity;
  const double r2 = 1.0 - fit.offset * fit.offset;
  fit.degenerate = r2 < 1e-8;
  fit.curvature = fit.degenerate ? std::numeric_limits<double>::quiet_NaN()
                                 : fit.offset / std::sqrt(r2);
  return fit;
}

}  // namespace s3
