#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "s3/core.hpp"
#include "s3/geodesic.hpp"
#include "s3/horizontal.hpp"
#include "s3/parallel.hpp"
#include "s3/patch.hpp"

// The constant-mean-curvature surface constructions: Clifford tori, the
// spherical surfaces S_lambda, the ruled surfaces Sigma_lambda(Gamma) over a
// horizontal directrix, and the C_{mu,lambda} family obtained by alternating
// ruled sheets across singular curves.

namespace s3 {

/// Clifford torus |z1| = rho on the flat chart
/// (rho e^{2 pi i u}, sqrt(1-rho^2) e^{2 pi i v}).
inline ParamPatch clifford_patch(double rho, std::size_t n_u, std::size_t n_v) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("clifford_patch: rho outside (0,1)");
  if (n_u < 3 || n_v < 3) throw std::invalid_argument("clifford_patch: grid too small");
  const double r2 = std::sqrt(1.0 - rho * rho);
  const double alpha = r2 / rho;
  ParamPatch patch;
  patch.nu = n_u;
  patch.nv = n_v;
  patch.u.resize(n_u);
  patch.v.resize(n_v);
  patch.grid.resize(n_u * n_v);
  patch.normals.resize(n_u * n_v);
  for (std::size_t i = 0; i < n_u; ++i) patch.u[i] = static_cast<double>(i) / n_u;
  for (std::size_t j = 0; j < n_v; ++j) patch.v[j] = static_cast<double>(j) / n_v;
  parallel_for(n_u, [&](std::size_t i) {
    const double cu = std::cos(2 * M_PI * patch.u[i]), su = std::sin(2 * M_PI * patch.u[i]);
    for (std::size_t j = 0; j < n_v; ++j) {
      const double cv = std::cos(2 * M_PI * patch.v[j]), sv = std::sin(2 * M_PI * patch.v[j]);
      const Vec4 p(rho * cu, rho * su, r2 * cv, r2 * sv);
      patch.grid[i * n_v + j] = p;
      // N(q) = (alpha z1, -z2/alpha): horizontal, <N,V> = 0.
      patch.normals[i * n_v + j] = Vec4(alpha * p[0], alpha * p[1], -p[2] / alpha, -p[3] / alpha);
    }
  });
  patch.meta.tag = "clifford";
  patch.meta.params = {{"rho", rho}};
  patch.meta.periodic_u = true;
  patch.meta.periodic_v = true;
  const SurfaceFrame ref = frame_at_patch(patch, n_u / 2, n_v / 2);
  patch.meta.flip_normal = ref.normal.dot(patch.normals[(n_u / 2) * n_v + n_v / 2]) < 0.0;
  return patch;
}

/// Spherical surface S_lambda: all geodesics of curvature lambda and length
/// pi/sqrt(1+lambda^2) leaving from (1,0,0,0).  Rows j = 0 and j = n_s-1 are
/// the poles p and p_lambda, the only singular points.
inline ParamPatch sphere_patch(double lambda, std::size_t n_theta, std::size_t n_s) {
  if (n_theta < 3 || n_s < 3) throw std::invalid_argument("sphere_patch: grid too small");
  const double m = std::sqrt(1.0 + lambda * lambda);
  const Vec4 p0(1, 0, 0, 0);
  ParamPatch patch;
  patch.nu = n_theta;
  patch.nv = n_s;
  patch.u.resize(n_theta);
  patch.v.resize(n_s);
  patch.grid.resize(n_theta * n_s);
  patch.normals.resize(n_theta * n_s);
  patch.singular_flag.assign(n_theta * n_s, 0);
  for (std::size_t i = 0; i < n_theta; ++i) patch.u[i] = 2 * M_PI * i / n_theta;
  for (std::size_t j = 0; j < n_s; ++j)
    patch.v[j] = (M_PI / m) * static_cast<double>(j) / (n_s - 1);
  parallel_for(n_theta, [&](std::size_t i) {
    const GeodesicSpec spec = geodesic_from_angle(p0, patch.u[i], lambda);
    for (std::size_t j = 0; j < n_s; ++j) {
      const double s = patch.v[j];
      const TangentVector vel = geodesic_velocity(spec, s);
      patch.grid[i * n_s + j] = vel.base;
      const Vec4 vv = vertical_at(vel.base);
      // <X_theta, V> = sin^2(ms)/m^2 and <X_theta, J(g')> = sin(2ms)/(2m).
      const double xv = std::sin(m * s) * std::sin(m * s) / (m * m);
      const double xj = std::sin(2.0 * m * s) / (2.0 * m);
      const Vec4 n = -xv * apply_J(vel).v + xj * vv;
      const double nn = n.norm();
      if (nn < 1e-13) {
        patch.normals[i * n_s + j] = (j == 0) ? vv : (-vv).eval();
        patch.singular_flag[i * n_s + j] = 1;
      } else {
        patch.normals[i * n_s + j] = n / nn;
      }
    }
  });
  patch.meta.tag = "sphere";
  patch.meta.params = {{"lambda", lambda}};
  patch.meta.periodic_u = true;
  const SurfaceFrame ref = frame_at_patch(patch, 0, n_s / 2);
  patch.meta.flip_normal = ref.normal.dot(patch.normals[n_s / 2]) < 0.0;
  return patch;
}

/// Pole p_lambda = gamma_theta(pi/sqrt(1+lambda^2)), independent of theta.
inline Vec4 sphere_pole(double lambda) {
  const double m = std::sqrt(1.0 + lambda * lambda);
  const Vec4 p0(1, 0, 0, 0);
  return -std::cos(lambda * M_PI / m) * p0 + std::sin(lambda * M_PI / m) * vertical_at(p0);
}

/// Radial-graph halves of S_lambda over the x2 y2 plane,
/// r in [0, 1/sqrt(1+lambda^2)]; returns (x1, y1).
inline std::pair<double, double> sphere_radial_graph_lower(double lambda, double r) {
  const double rl = 1.0 / std::sqrt(1.0 + lambda * lambda);
  const double phi = rl * std::asin(std::clamp(r / rl, -1.0, 1.0));
  const double root = std::sqrt(std::max(0.0, 1.0 - (r / rl) * (r / rl)));
  return {root * std::cos(lambda * phi) + lambda * r * std::sin(lambda * phi),
          lambda * r * std::cos(lambda * phi) - root * std::sin(lambda * phi)};
}

inline std::pair<double, double> sphere_radial_graph_upper(double lambda, double r) {
  const double rl = 1.0 / std::sqrt(1.0 + lambda * lambda);
  const double psi = M_PI * rl - rl * std::asin(std::clamp(r / rl, -1.0, 1.0));
  const double root = std::sqrt(std::max(0.0, 1.0 - (r / rl) * (r / rl)));
  return {-root * std::cos(lambda * psi) + lambda * r * std::sin(lambda * psi),
          lambda * r * std::cos(lambda * psi) + root * std::sin(lambda * psi)};
}

/// Cut length: the unique s in (0, pi/sqrt(1+lambda^2)) with
/// h = 2 sqrt(1+lambda^2) cot(sqrt(1+lambda^2) s); strictly decreasing in h.
inline double cut_function(double h, double lambda) {
  const double m = std::sqrt(1.0 + lambda * lambda);
  return (M_PI_2 - std::atan(h / (2.0 * m))) / m;
}

/// Cut length on the -J side: h = -2 m cot(m s); complements cut_function to
/// pi/sqrt(1+lambda^2).
inline double reverse_cut(double h, double lambda) {
  const double m = std::sqrt(1.0 + lambda * lambda);
  return (M_PI_2 + std::atan(h / (2.0 * m))) / m;
}

/// Singular boundary curve of a ruled sheet, with the data the orthogonality
/// and curvature checks need.
struct SingularCurve {
  std::vector<double> eps;
  std::vector<Vec4> point;
  std::vector<Vec4> tangent;   // dGamma1/deps = X(s_eps) + sdot * g'(s_eps)
  std::vector<Vec4> incoming;  // geodesic velocity at the curve
  bool isolated = false;
  double jacobi_residual = 0.0;  // max |X(s_eps) - side * J(g'(s_eps))|
};

/// Max |<incoming geodesic velocity, unit singular-curve tangent>|.
/// Vacuous (0) for isolated singular points.
inline double orthogonality_check(const SingularCurve& curve) {
  if (curve.isolated || curve.point.empty()) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < curve.point.size(); ++i) {
    const double t = curve.tangent[i].norm();
    if (t < 1e-14) continue;
    worst = std::max(worst, std::abs(curve.incoming[i].dot(curve.tangent[i])) / t);
  }
  return worst;
}

struct RuledSheet {
  ParamPatch patch;
  SingularCurve start, end;
  double lambda = 0.0;
  int side = +1;  // +1: leave by J(Gamma'), -1: leave by -J(Gamma')
};

namespace detail {

struct SheetPointData {
  Vec4 point, velocity, X, normal;
};

// One geodesic ray of a ruled sheet in the frame {Gamma, Gamma', J(Gamma'), V}.
// side selects the launch direction +-J(Gamma'); h is <Gamma'', J(Gamma')>.
inline SheetPointData sheet_point(const Vec4& g, const Vec4& dg, double h, double lambda, int side,
                                  double s) {
  GeodesicCoeffs f, df;
  geodesic_coeffs(lambda, s, f, &df, nullptr);
  const Vec4 jdg = quat_mul(Vec4(0, 1, 0, 0), dg);
  const Vec4 vg = vertical_at(g);

  const double al = f.a + lambda * f.b, be = side * f.b, ga = side * f.d,
               de = f.c + lambda * f.d;
  const double dal = df.a + lambda * df.b, dbe = side * df.b, dga = side * df.d,
               dde = df.c + lambda * df.d;

  SheetPointData out;
  out.point = al * g + be * dg + ga * jdg + de * vg;
  out.velocity = dal * g + dbe * dg + dga * jdg + dde * vg;
  // Variation field over eps: uses Gamma'' = -Gamma + h J(Gamma'),
  // d(J Gamma')/d eps = -V - h Gamma', dV/d eps = J(Gamma').
  out.X = -be * g + (al - h * ga) * dg + (be * h + de) * jdg - ga * vg;

  const Vec4 vp = vertical_at(out.point);
  const Vec4 jvel = quat_mul(Vec4(0, 1, 0, 0), out.velocity);
  Vec4 n = side * (out.X.dot(vp) * jvel - out.X.dot(jvel) * vp);
  const double nn = n.norm();
  out.normal = nn < 1e-13 ? (out.X.dot(jvel) < 0 ? vp : (-vp).eval())
                          : (n / nn).eval();
  return out;
}

}  // namespace detail

/// Ruled sheet Sigma_lambda(Gamma): from each Gamma(eps) leave by the geodesic
/// of curvature lambda with velocity side * J(Gamma'), up to the cut length
/// where the next singular curve appears.  Grid parameter v in [0,1] scales
/// the (possibly eps-dependent) cut length.
inline RuledSheet ruled_patch(const HorizontalCurveSample& curve, double lambda, int side,
                              std::size_t n_s) {
  const std::size_t n_eps = curve.eps.size();
  if (n_eps < 3 || n_s < 3) throw std::invalid_argument("ruled_patch: grid too small");
  if (side != +1 && side != -1) throw std::invalid_argument("ruled_patch: side must be +-1");
  const double m = std::sqrt(1.0 + lambda * lambda);

  RuledSheet sheet;
  sheet.lambda = lambda;
  sheet.side = side;
  ParamPatch& patch = sheet.patch;
  patch.nu = n_eps;
  patch.nv = n_s;
  patch.u = curve.eps;
  patch.v.resize(n_s);
  for (std::size_t j = 0; j < n_s; ++j) patch.v[j] = static_cast<double>(j) / (n_s - 1);
  patch.grid.resize(n_eps * n_s);
  patch.normals.resize(n_eps * n_s);
  patch.singular_flag.assign(n_eps * n_s, 0);

  sheet.start.eps = sheet.end.eps = curve.eps;
  sheet.start.point.resize(n_eps);
  sheet.start.tangent.resize(n_eps);
  sheet.start.incoming.resize(n_eps);
  sheet.end.point.resize(n_eps);
  sheet.end.tangent.resize(n_eps);
  sheet.end.incoming.resize(n_eps);

  std::vector<double> jacobi_gap(n_eps, 0.0);
  parallel_for(n_eps, [&](std::size_t i) {
    const Vec4& g = curve.point[i];
    const Vec4& dg = curve.tangent[i];
    const double h = curve.h[i];
    const double s_cut = (side > 0) ? cut_function(h, lambda) : reverse_cut(h, lambda);
    const double sdot =
        curve.h_prime[i] * (-side) * std::sin(m * s_cut) * std::sin(m * s_cut) / (2.0 * m * m);
    for (std::size_t j = 0; j < n_s; ++j) {
      const auto data = detail::sheet_point(g, dg, h, lambda, side, patch.v[j] * s_cut);
      patch.grid[i * n_s + j] = renormalized(data.point);
      patch.normals[i * n_s + j] = data.normal;
      if (j == 0 || j + 1 == n_s) patch.singular_flag[i * n_s + j] = 1;
      if (j + 1 == n_s) {
        sheet.end.point[i] = data.point;
        sheet.end.incoming[i] = data.velocity;
        sheet.end.tangent[i] = data.X + sdot * data.velocity;
        const Vec4 jvel = quat_mul(Vec4(0, 1, 0, 0), data.velocity);
        jacobi_gap[i] = (data.X - side * jvel).norm();
      }
    }
    sheet.start.point[i] = g;
    sheet.start.tangent[i] = dg;
    sheet.start.incoming[i] = detail::sheet_point(g, dg, h, lambda, side, 0.0).velocity;
  });
  sheet.end.jacobi_residual = *std::max_element(jacobi_gap.begin(), jacobi_gap.end());

  patch.meta.tag = "ruled";
  patch.meta.params = {{"lambda", lambda}, {"side", static_cast<double>(side)}};
  const SurfaceFrame ref = frame_at_patch(patch, n_eps / 2, n_s / 2);
  patch.meta.flip_normal = ref.normal.dot(patch.normals[(n_eps / 2) * n_s + n_s / 2]) < 0.0;
  return sheet;
}

}  // namespace s3
