#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "s3/core.hpp"

// Rectangular grids of sphere points carrying every surface construction.
// Frames, mean curvature and areas are estimated from grid stencils; patch
// constructors may additionally store exact normals, which the invariant
// checks and the area integrand prefer when present.

namespace s3 {

struct PatchMeta {
  std::string tag;
  std::map<std::string, double> params;
  bool periodic_u = false;
  bool periodic_v = false;
  bool flip_normal = false;  // orient grid normals to the construction's convention
};

struct ParamPatch {
  std::size_t nu = 0, nv = 0;
  std::vector<double> u, v;        // uniform parameter values per axis
  std::vector<Vec4> grid;          // row-major, [i * nv + j]
  std::vector<Vec4> normals;       // optional exact unit normals
  std::vector<std::uint8_t> singular_flag;  // optional, marks singular grid points
  PatchMeta meta;

  const Vec4& at(std::size_t i, std::size_t j) const { return grid[i * nv + j]; }
  Vec4& at(std::size_t i, std::size_t j) { return grid[i * nv + j]; }
  double step_u() const { return u.size() > 1 ? u[1] - u[0] : 0.0; }
  double step_v() const { return v.size() > 1 ? v[1] - v[0] : 0.0; }
  bool has_normals() const { return !normals.empty(); }
};

inline void validate(const ParamPatch& patch) {
  if (patch.nu < 3 || patch.nv < 3)
    throw std::invalid_argument("patch: grid must be at least 3x3");
  for (const auto& p : patch.grid)
    if (std::abs(p.squaredNorm() - 1.0) > 2e-10)
      throw std::invalid_argument("patch: grid point off the sphere");
}

/// Vector orthogonal to a, b, c in R^4 (cofactor expansion of det[x; a; b; c]).
inline Vec4 cross4(const Vec4& a, const Vec4& b, const Vec4& c) {
  auto minor3 = [](double a0, double a1, double a2, double b0, double b1, double b2, double c0,
                   double c1, double c2) {
    return a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) + a2 * (b0 * c1 - b1 * c0);
  };
  return Vec4(
      minor3(a[1], a[2], a[3], b[1], b[2], b[3], c[1], c[2], c[3]),
      -minor3(a[0], a[2], a[3], b[0], b[2], b[3], c[0], c[2], c[3]),
      minor3(a[0], a[1], a[3], b[0], b[1], b[3], c[0], c[1], c[3]),
      -minor3(a[0], a[1], a[2], b[0], b[1], b[2], c[0], c[1], c[2]));
}

namespace detail {

// Window of 5 indices along one axis with the center offset; the window is
// shifted inward at a clamped boundary and wraps on a periodic one.  Clamped
// axes shorter than 5 fall back to a repeated 3-point window (order 2).
inline void window5(std::ptrdiff_t i, std::ptrdiff_t n, bool periodic, std::ptrdiff_t idx[5],
                    int& center, bool& short_axis) {
  center = 2;
  short_axis = false;
  if (periodic) {
    for (int k = 0; k < 5; ++k) idx[k] = ((i - 2 + k) % n + n) % n;
    return;
  }
  if (n < 5) {
    short_axis = true;
    std::ptrdiff_t base = std::clamp<std::ptrdiff_t>(i - 1, 0, n - 3);
    center = static_cast<int>(i - base);
    for (int k = 0; k < 3; ++k) idx[k] = base + k;
    idx[3] = idx[2];
    idx[4] = idx[2];
    return;
  }
  std::ptrdiff_t base = i - 2;
  if (base < 0) base = 0;
  if (base > n - 5) base = n - 5;
  center = static_cast<int>(i - base);
  for (int k = 0; k < 5; ++k) idx[k] = base + k;
}

// Second-order weights on a 3-point window with the evaluation point at c.
inline void stencil_weights3(int c, double h, double w1[5], double w2[5]) {
  static const double d1[3][3] = {{-3. / 2, 2., -1. / 2}, {-1. / 2, 0., 1. / 2},
                                  {1. / 2, -2., 3. / 2}};
  static const double d2[3] = {1., -2., 1.};
  for (int k = 0; k < 5; ++k) w1[k] = w2[k] = 0.0;
  for (int k = 0; k < 3; ++k) {
    w1[k] = d1[c][k] / h;
    w2[k] = d2[k] / (h * h);
  }
}

// Fourth-order first/second derivative weights on a 5-point window with the
// evaluation point at offset c.
inline void stencil_weights(int c, double h, double w1[5], double w2[5]) {
  static const double d1[5][5] = {
      {-25. / 12, 4., -3., 4. / 3, -1. / 4},
      {-1. / 4, -5. / 6, 3. / 2, -1. / 2, 1. / 12},
      {1. / 12, -2. / 3, 0., 2. / 3, -1. / 12},
      {-1. / 12, 1. / 2, -3. / 2, 5. / 6, 1. / 4},
      {1. / 4, -4. / 3, 3., -4., 25. / 12}};
  static const double d2[5][5] = {
      {35. / 12, -26. / 3, 19. / 2, -14. / 3, 11. / 12},
      {11. / 12, -5. / 3, 1. / 2, 1. / 3, -1. / 12},
      {-1. / 12, 4. / 3, -5. / 2, 4. / 3, -1. / 12},
      {-1. / 12, 1. / 3, 1. / 2, -5. / 3, 11. / 12},
      {11. / 12, -14. / 3, 19. / 2, -26. / 3, 35. / 12}};
  for (int k = 0; k < 5; ++k) {
    w1[k] = d1[c][k] / h;
    w2[k] = d2[c][k] / (h * h);
  }
}

}  // namespace detail

struct PatchDerivs {
  Vec4 fu, fv, fuu, fvv, fuv;
};

inline PatchDerivs patch_derivs(const ParamPatch& patch, std::size_t i, std::size_t j) {
  std::ptrdiff_t ui[5], vj[5];
  int cu, cv;
  bool short_u, short_v;
  detail::window5(static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(patch.nu),
                  patch.meta.periodic_u, ui, cu, short_u);
  detail::window5(static_cast<std::ptrdiff_t>(j), static_cast<std::ptrdiff_t>(patch.nv),
                  patch.meta.periodic_v, vj, cv, short_v);
  double wu1[5], wu2[5], wv1[5], wv2[5];
  if (short_u)
    detail::stencil_weights3(cu, patch.step_u(), wu1, wu2);
  else
    detail::stencil_weights(cu, patch.step_u(), wu1, wu2);
  if (short_v)
    detail::stencil_weights3(cv, patch.step_v(), wv1, wv2);
  else
    detail::stencil_weights(cv, patch.step_v(), wv1, wv2);

  PatchDerivs d{Vec4::Zero(), Vec4::Zero(), Vec4::Zero(), Vec4::Zero(), Vec4::Zero()};
  for (int a = 0; a < 5; ++a) {
    Vec4 dv_row = Vec4::Zero(), ddv_row = Vec4::Zero();
    for (int b = 0; b < 5; ++b) {
      const Vec4& f = patch.at(ui[a], vj[b]);
      dv_row += wv1[b] * f;
      ddv_row += wv2[b] * f;
    }
    const Vec4& fc = patch.at(ui[a], vj[cv]);
    d.fu += wu1[a] * fc;
    d.fuu += wu2[a] * fc;
    d.fuv += wu1[a] * dv_row;
    if (a == cu) {
      d.fv = dv_row;
      d.fvv = ddv_row;
    }
  }
  return d;
}

inline constexpr double kSingularTol = 1e-6;
inline constexpr double kConditioningTol = 1e-3;

struct SurfaceFrame {
  Vec4 fu = Vec4::Zero(), fv = Vec4::Zero();
  Vec4 normal = Vec4::Zero();  // unit normal in (S^3, g)
  double nh_norm = 0.0;        // |N_h|
  double n_dot_v = 0.0;        // <N, V>
  Vec4 nu_h = Vec4::Zero();    // horizontal Gauss map (valid when !singular)
  Vec4 Z = Vec4::Zero();       // characteristic vector J(nu_h)
  Vec4 S = Vec4::Zero();       // <N,V> nu_h - |N_h| V
  bool singular = false;
  bool ill_conditioned = false;
};

inline SurfaceFrame frame_at_patch(const ParamPatch& patch, std::size_t i, std::size_t j,
                                   double singular_tol = kSingularTol) {
  const Vec4 p = patch.at(i, j);
  const PatchDerivs d = patch_derivs(patch, i, j);
  SurfaceFrame f;
  f.fu = d.fu;
  f.fv = d.fv;
  Vec4 n = cross4(p, d.fu, d.fv);
  const double nn = n.norm();
  if (nn < 1e-14) throw std::domain_error("frame_at_patch: degenerate tangent plane");
  n /= nn;
  if (patch.meta.flip_normal) n = -n;
  f.normal = n;

  const Vec4 vv = vertical_at(p);
  f.n_dot_v = n.dot(vv);
  const Vec4 nh = n - f.n_dot_v * vv;
  f.nh_norm = nh.norm();
  f.singular = f.nh_norm < singular_tol;
  f.ill_conditioned = f.nh_norm < kConditioningTol;
  if (!f.singular) {
    f.nu_h = nh / f.nh_norm;
    f.Z = apply_J({p, f.nu_h}).v;
    f.S = f.n_dot_v * f.nu_h - f.nh_norm * vv;
  }
  return f;
}

namespace detail {

// Characteristic direction in (F_u, F_v) coordinates and its flat second
// derivative along the parameter line through the point.
inline Vec4 characteristic_accel(const ParamPatch& patch, std::size_t i, std::size_t j,
                                 const SurfaceFrame& f, const PatchDerivs& d) {
  const double E = d.fu.dot(d.fu), F = d.fu.dot(d.fv), G = d.fv.dot(d.fv);
  const double det = E * G - F * F;
  if (std::abs(det) < 1e-14) throw std::domain_error("patch: singular first fundamental form");
  const double zu = f.Z.dot(d.fu), zv = f.Z.dot(d.fv);
  const double a = (G * zu - F * zv) / det;
  const double b = (E * zv - F * zu) / det;
  Vec4 acc = a * a * d.fuu + 2.0 * a * b * d.fuv + b * b * d.fvv;
  const Vec4 p = patch.at(i, j);
  return acc - acc.dot(p) * p;  // tangential (S^3) part
}

}  // namespace detail

struct CurvatureEstimate {
  double H = 0.0;
  bool singular = false;
  bool ill_conditioned = false;
};

/// Mean curvature 2H = II(Z,Z)/|N_h| at a grid point, via the second
/// derivative of the characteristic-direction parameter line.
inline CurvatureEstimate mean_curvature_estimate(const ParamPatch& patch, std::size_t i,
                                                 std::size_t j,
                                                 double singular_tol = kSingularTol) {
  const SurfaceFrame f = frame_at_patch(patch, i, j, singular_tol);
  CurvatureEstimate est;
  est.singular = f.singular;
  est.ill_conditioned = f.ill_conditioned;
  if (f.singular) {
    est.H = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  const PatchDerivs d = patch_derivs(patch, i, j);
  const Vec4 dzz = detail::characteristic_accel(patch, i, j, f, d);
  est.H = f.normal.dot(dzz) / (2.0 * f.nh_norm);
  return est;
}

/// |D_Z Z + 2 H J(Z)|; characteristic curves of a CMC surface are geodesics of
/// curvature H, so this vanishes on exact data.
inline double characteristic_residual(const ParamPatch& patch, std::size_t i, std::size_t j,
                                      double H) {
  const SurfaceFrame f = frame_at_patch(patch, i, j);
  if (f.singular) return 0.0;
  const PatchDerivs d = patch_derivs(patch, i, j);
  const Vec4 dzz = detail::characteristic_accel(patch, i, j, f, d);
  const Vec4 jz = apply_J({patch.at(i, j), f.Z}).v;
  return (dzz + 2.0 * H * jz).norm();
}

/// Integral of |N_h| over the patch with the Riemannian area element,
/// rectangle rule on periodic axes and trapezoid weights on clamped ones.
inline double area_estimate(const ParamPatch& patch) {
  validate(patch);
  const double hu = patch.step_u(), hv = patch.step_v();
  double total = 0.0;
  for (std::size_t i = 0; i < patch.nu; ++i) {
    const double wi = (!patch.meta.periodic_u && (i == 0 || i + 1 == patch.nu)) ? 0.5 : 1.0;
    for (std::size_t j = 0; j < patch.nv; ++j) {
      const double wj = (!patch.meta.periodic_v && (j == 0 || j + 1 == patch.nv)) ? 0.5 : 1.0;
      const PatchDerivs d = patch_derivs(patch, i, j);
      const double E = d.fu.dot(d.fu), F = d.fu.dot(d.fv), G = d.fv.dot(d.fv);
      const double darea = std::sqrt(std::max(0.0, E * G - F * F));
      const Vec4 p = patch.at(i, j);
      const Vec4 vv = vertical_at(p);
      double nh;
      if (patch.has_normals()) {
        const Vec4& n = patch.normals[i * patch.nv + j];
        nh = (n - n.dot(vv) * vv).norm();
      } else {
        Vec4 n = cross4(p, d.fu, d.fv);
        const double nn = n.norm();
        if (nn < 1e-14) {
          nh = 0.0;
        } else {
          n /= nn;
          nh = (n - n.dot(vv) * vv).norm();
        }
      }
      total += wi * wj * nh * darea;
    }
  }
  return total * hu * hv;
}

}  // namespace s3
