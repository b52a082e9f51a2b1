#pragma once

#include <random>
#include <string>
#include <vector>

#include "s3/cmc_torus.hpp"
#include "s3/geodesic.hpp"
#include "s3/profile.hpp"
#include "s3/surfaces.hpp"

// Module invariant suites behind `s3 verify`.  Each check records the worst
// observed value against its tolerance; a suite passes when every check does.

namespace s3 {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

namespace detail {

inline void record(std::vector<CheckResult>& out, const std::string& name, double value,
                   double tol) {
  out.push_back({name, value, tol, value <= tol});
}

inline Vec4 verify_random_unit(std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  Vec4 p(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  while (p.norm() < 1e-3) p = Vec4(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  return p.normalized();
}

}  // namespace detail

inline std::vector<CheckResult> verify_frames() {
  std::vector<CheckResult> out;
  std::mt19937 rng(331);
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);

  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const Vec4 p = detail::verify_random_unit(rng), q = detail::verify_random_unit(rng);
    worst = std::max(worst, std::abs(quat_mul(p, q).norm() - 1.0));
  }
  detail::record(out, "quaternion norm multiplicativity", worst, 1e-12);

  worst = 0.0;
  const double t = 1e-5;
  auto brackets = [&](const Vec4& p) {
    auto lie = [&](auto&& X, auto&& Y) {
      const Vec4 xp = X(p), yp = Y(p);
      return ((Y((p + t * xp).eval()) - Y((p - t * xp).eval())) / (2 * t) -
              (X((p + t * yp).eval()) - X((p - t * yp).eval())) / (2 * t))
          .eval();
    };
    auto E1 = [](const Vec4& q) { return e1_at(q); };
    auto E2 = [](const Vec4& q) { return e2_at(q); };
    auto V = [](const Vec4& q) { return vertical_at(q); };
    double w = (lie(E1, E2) + 2 * vertical_at(p)).norm();
    w = std::max(w, (lie(E1, V) - 2 * e2_at(p)).norm());
    w = std::max(w, (lie(E2, V) + 2 * e1_at(p)).norm());
    return w;
  };
  for (int k = 0; k < 100; ++k) worst = std::max(worst, brackets(detail::verify_random_unit(rng)));
  detail::record(out, "frame bracket relations (finite differences)", worst, 1e-5);

  worst = 0.0;
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 300; ++k) {
    const Vec4 p = detail::verify_random_unit(rng);
    Vec4 x(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
    Vec4 y(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
    x -= x.dot(p) * p;
    y -= y.dot(p) * p;
    worst = std::max(worst, std::abs(apply_J({p, x}).v.dot(y) + x.dot(apply_J({p, y}).v)));
  }
  detail::record(out, "J antisymmetry", worst, 1e-12);

  worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Vec4 p = detail::verify_random_unit(rng);
    worst = std::max(worst, (hopf(quat_mul(fiber_rotation(angle(rng)), p)) - hopf(p)).norm());
    worst = std::max(worst, std::abs(hopf(p).norm() - 1.0));
  }
  detail::record(out, "Hopf fiber invariance and unit image", worst, 1e-12);

  worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Vec4 p = detail::verify_random_unit(rng);
    const Vec4 q = detail::verify_random_unit(rng);
    const double a = angle(rng);
    const TangentVector h{p, std::cos(a) * e1_at(p) + std::sin(a) * e2_at(p)};
    const TangentVector th = right_translate(q, h);
    const TangentVector rh = rotate_theta(angle(rng), h);
    worst = std::max(worst, std::abs(th.v.dot(vertical_at(th.base))));
    worst = std::max(worst, std::abs(rh.v.dot(vertical_at(rh.base))));
  }
  detail::record(out, "isometries preserve the horizontal plane", worst, 1e-10);
  return out;
}

inline std::vector<CheckResult> verify_geodesics() {
  std::vector<CheckResult> out;
  std::mt19937 rng(353);
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI), lam(-3.0, 3.0), arc(-8.0, 8.0);
  auto random_spec = [&](double lambda) {
    const Vec4 p = detail::verify_random_unit(rng);
    const double a = angle(rng);
    return GeodesicSpec{p, std::cos(a) * e1_at(p) + std::sin(a) * e2_at(p), lambda};
  };

  double res = 0.0, horiz = 0.0, unit = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const GeodesicSpec spec = random_spec(lam(rng));
    const double s = arc(rng);
    res = std::max(res, geodesic_ode_residual(spec, s));
    const TangentVector vel = geodesic_velocity(spec, s);
    horiz = std::max(horiz, std::abs(vel.v.dot(vertical_at(vel.base))));
    unit = std::max(unit, std::abs(vel.v.norm() - 1.0));
  }
  detail::record(out, "geodesic equation residual", res, 1e-9);
  detail::record(out, "geodesic horizontality", horiz, 1e-10);
  detail::record(out, "geodesic unit speed", unit, 1e-10);

  double pairing = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double lambda = lam(rng);
    const GeodesicSpec spec = random_spec(lambda);
    const double s = arc(rng);
    pairing = std::max(pairing, std::abs(geodesic_accel(spec, s).dot(
                                             apply_J(geodesic_velocity(spec, s)).v) +
                                         2.0 * lambda));
  }
  detail::record(out, "characteristic pairing <g'', J(g')> = -2 lambda", pairing, 1e-8);

  double equiv = 0.0;
  for (int k = 0; k < 50; ++k) {
    const GeodesicSpec spec = random_spec(lam(rng));
    const Vec4 q = detail::verify_random_unit(rng);
    const GeodesicSpec moved{quat_mul(spec.p, q), quat_mul(spec.v, q), spec.lambda};
    const double s = arc(rng);
    equiv = std::max(equiv,
                     (quat_mul(geodesic_point(spec, s), q) - geodesic_point(moved, s)).norm());
  }
  detail::record(out, "right-translation equivariance", equiv, 1e-10);

  double confine = 0.0;
  for (double rho : {0.3, 0.5, std::sqrt(0.5), 0.9}) {
    const GeodesicSpec spec = torus_geodesic(rho, 0.2, 0.6);
    for (int k = 0; k <= 1000; ++k) {
      const Vec4 g = geodesic_point(spec, 100.0 * k / 1000.0);
      confine = std::max(confine, std::abs(std::hypot(g[0], g[1]) - rho));
    }
  }
  detail::record(out, "Clifford torus confinement", confine, 1e-12);

  detail::record(out, "horizontal great circle period |T - 2 pi|",
                 std::abs(geodesic_period(0.0) - 2 * M_PI), 1e-9);

  double planar = 0.0, curv = 0.0;
  for (double lambda : {-2.0, -0.7, 0.0, 0.5, 3.0}) {
    const HopfFit fit = hopf_circle_fit(geodesic_from_angle(Vec4(1, 0, 0, 0), 0.3, lambda));
    planar = std::max(planar, fit.planarity);
    curv = std::max(curv, std::abs(fit.curvature - lambda));
  }
  detail::record(out, "Hopf image planarity", planar, 1e-8);
  detail::record(out, "Hopf image geodesic curvature error", curv, 1e-6);

  double jac = 0.0;
  for (double lambda : {0.0, 1.0, -1.5}) {
    const double m2 = 1.0 + lambda * lambda;
    auto family = [&](double eps) {
      return geodesic_from_angle(Vec4(1, 0, 0, 0), 0.9 + eps, lambda);
    };
    for (double s : {0.2, 0.7, 1.3}) {
      const JacobiSample sample = jacobi_field(family, s);
      const double expected = std::sin(std::sqrt(m2) * s) * std::sin(std::sqrt(m2) * s) / m2;
      jac = std::max(jac, std::abs(sample.vertical - expected));
      jac = std::max(jac, std::abs(sample.along + lambda * expected));
      jac = std::max(jac, std::abs(sample.conserved));
    }
  }
  detail::record(out, "rotational Jacobi components", jac, 1e-6);

  double reversal = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double lambda = lam(rng);
    const GeodesicSpec spec = random_spec(lambda);
    const double s = arc(rng);
    const Vec4 r = geodesic_point(spec, -s);
    const Vec4 dr = -geodesic_velocity(spec, -s).v;
    const Vec4 ddr = geodesic_accel(spec, -s);
    reversal = std::max(
        reversal, (ddr + r + 2.0 * (-lambda) * quat_mul(Vec4(0, 1, 0, 0), dr)).norm());
  }
  detail::record(out, "reversed curve has curvature -lambda", reversal, 1e-9);

  // statistical density probe: a curvature-1 orbit approaches random points
  // of its Clifford torus
  {
    const double rho = std::sqrt(0.5 * (1.0 + 1.0 / std::sqrt(2.0)));
    const GeodesicSpec orbit = torus_geodesic(rho, 0.0, 0.0);
    const double r2 = std::sqrt(1.0 - rho * rho);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const double a = 2 * M_PI * unif(rng), b = 2 * M_PI * unif(rng);
      const Vec4 target(rho * std::cos(a), rho * std::sin(a), r2 * std::cos(b),
                        r2 * std::sin(b));
      double best = 1e9;
      for (double s = 0.0; s < 2000.0 && best > 0.05; s += 0.01)
        best = std::min(best, (geodesic_point(orbit, s) - target).norm());
      worst = std::max(worst, best);
    }
    detail::record(out, "dense orbit approaches its Clifford torus (statistical)", worst, 0.08);
  }
  return out;
}

inline std::vector<CheckResult> verify_surfaces() {
  std::vector<CheckResult> out;

  double clifford_err = 0.0;
  for (double rho : {0.4, std::sqrt(0.5), 0.8}) {
    const ParamPatch patch = clifford_patch(rho, 128, 128);
    const double expected = torus_curvature(rho);
    for (std::size_t i = 0; i < patch.nu; i += 17)
      for (std::size_t j = 0; j < patch.nv; j += 19)
        clifford_err =
            std::max(clifford_err, std::abs(mean_curvature_estimate(patch, i, j).H - expected));
  }
  detail::record(out, "Clifford torus mean curvature", clifford_err, 1e-4);

  double sphere_err = 0.0;
  for (double lambda : {0.0, 1.0, 2.0}) {
    const ParamPatch patch = sphere_patch(lambda, 128, 129);
    for (std::size_t i = 0; i < patch.nu; i += 21)
      for (std::size_t j = 20; j + 20 < patch.nv; j += 13)
        sphere_err =
            std::max(sphere_err, std::abs(mean_curvature_estimate(patch, i, j).H - lambda));
  }
  detail::record(out, "spherical surface mean curvature", sphere_err, 1e-3);

  double ortho = 0.0, flip = 0.0, charres = 0.0;
  const Vec4 p0(1, 0, 0, 0);
  for (double lambda : {0.0, 1.0}) {
    const auto samples =
        sample_curve(geodesic_directrix({p0, e1_at(p0), 0.0}), 0.0, 2 * M_PI, 256, true);
    RuledSheet sheet = ruled_patch(samples, lambda, +1, 33);
    sheet.patch.meta.periodic_u = true;
    ortho = std::max(ortho, orthogonality_check(sheet.start));
    ortho = std::max(ortho, orthogonality_check(sheet.end));
    for (std::size_t i = 0; i < 256; i += 37) {
      flip = std::max(flip, (sheet.patch.normals[i * 33] -
                             vertical_at(sheet.patch.at(i, 0))).norm());
      flip = std::max(flip, (sheet.patch.normals[i * 33 + 32] +
                             vertical_at(sheet.patch.at(i, 32))).norm());
    }
    for (std::size_t i = 0; i < 256; i += 31)
      for (std::size_t j = 10; j + 10 < 33; j += 5)
        charres = std::max(charres, characteristic_residual(sheet.patch, i, j, lambda));
  }
  detail::record(out, "ruled patch orthogonality at singular curves", ortho, 1e-5);
  detail::record(out, "normal flip N = +-V across singular curves", flip, 1e-6);
  detail::record(out, "characteristic curve residual", charres, 1e-4);

  {
    const SteeredCurve steered(
        p0, [](double e) { return 0.3 * std::sin(2 * e); },
        [](double e) { return 0.6 * std::cos(2 * e); },
        [](double e) { return -1.2 * std::sin(2 * e); }, -0.1, 2 * M_PI + 0.1);
    const auto samples = sample_curve(steered.as_curve(), 0.0, 2 * M_PI, 192);
    const RuledSheet sheet = ruled_patch(samples, 1.0, +1, 17);
    // negative control: non-geodesic directrix must fail orthogonality
    const double control = orthogonality_check(sheet.end);
    out.push_back({"non-geodesic directrix breaks orthogonality (control)", control, 1e-2,
                   control > 1e-2});
  }

  double cutsum = 0.0;
  for (double lambda : {0.0, 0.7, -2.0})
    for (double h = -10.0; h <= 10.0; h += 0.5)
      cutsum = std::max(cutsum, std::abs(cut_function(h, lambda) + reverse_cut(h, lambda) -
                                         M_PI / std::sqrt(1 + lambda * lambda)));
  detail::record(out, "cut function complement", cutsum, 1e-12);

  double area_err = 0.0;
  for (double rho : {0.35, 0.7}) {
    const double expected = 4 * M_PI * M_PI * rho * std::sqrt(1 - rho * rho);
    area_err = std::max(area_err,
                        std::abs(area_estimate(clifford_patch(rho, 256, 256)) - expected) /
                            expected);
  }
  detail::record(out, "Clifford area vs flat chart (relative)", area_err, 1e-3);

  double theta_err = 0.0;
  for (double lambda : {0.5, 2.0}) {
    const CmcTorusResult result = cmc_torus_patch(0.0, lambda, 1, 96, 17);
    const double expected = 1.5 * M_PI - lambda * M_PI / (2 * std::sqrt(1 + lambda * lambda));
    theta_err = std::max(
        theta_err, std::abs(detail::wrap_angle(result.layout.theta1_scanned - expected)));
  }
  detail::record(out, "C_{0,lambda} singular angle theta_1", theta_err, 1e-10);
  return out;
}

inline std::vector<CheckResult> verify_rotational() {
  std::vector<CheckResult> out;
  std::mt19937 rng(401);
  std::uniform_real_distribution<double> wdist(0.15, 1.4), sdist(0.0, 2 * M_PI),
      hdist(-2.0, 2.0);

  ProfileOptions opts;
  opts.tol = 1e-11;
  double drift = 0.0, cota = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const ProfileSolution sol =
        integrate_profile({wdist(rng), 0.0, sdist(rng)}, hdist(rng), 20.0, opts);
    drift = std::max(drift, sol.energy_drift_max);
    cota = std::max(cota, sol.cota_violation_max);
  }
  detail::record(out, "first integral drift over length 20", drift, 1e-8);
  detail::record(out, "band inequality violation", cota, 1e-10);

  double agree = 0.0;
  std::uniform_real_distribution<double> hpos(0.0, 3.0);
  int checked = 0;
  while (checked < 500) {
    const double w = wdist(rng), s = sdist(rng), H = hpos(rng);
    double E;
    try {
      E = profile_energy(w, s, H);
    } catch (const std::domain_error&) {
      continue;
    }
    const double sw = std::sin(w), K = E + H * sw * sw;
    if (sw * sw - K * K < 1e-4) continue;
    if (std::abs(sin_sigma_of_omega(w, E, H) - std::sin(s)) > 1e-7) continue;
    agree = std::max(agree, std::abs(sigma_dot_reduced(w, E, H) - profile_rhs({w, 0.0, s}, H)[2]));
    ++checked;
  }
  detail::record(out, "reduced sigma' equals the full system", agree, 1e-9);

  double period_err = 0.0;
  for (double H : {0.0, 1.0 / std::sqrt(3.0), 1.0, 3.0}) {
    const double m = std::sqrt(1 + H * H);
    const double E = 0.5 * (m - H) * 0.6;
    period_err = std::max(period_err,
                          std::abs(period_by_quadrature(E, H) - (1.0 - H / m) * M_PI));
  }
  detail::record(out, "unduloid period quadrature vs closed form", period_err, 1e-6);

  double nodoid_err = 0.0;
  for (double H : {1.0, 2.0}) {
    const double m = std::sqrt(1 + H * H);
    nodoid_err = std::max(nodoid_err, std::abs(std::abs(tau_half_by_quadrature(-0.3, H)) -
                                               0.5 * M_PI * (1.0 - H / m)));
  }
  detail::record(out, "nodoid half advance tau_2", nodoid_err, 1e-6);

  double petal_err = 0.0;
  for (double H : {1.0 / std::sqrt(3.0), 1.0, 3.0}) {
    petal_err = std::max(petal_err, std::abs(petal_tau0_by_integration(H) +
                                             0.5 * M_PI * H / std::sqrt(1 + H * H)));
  }
  detail::record(out, "petal axis offset tau_0", petal_err, 1e-6);

  {
    const double H = 1.0;
    const double m = std::sqrt(1 + H * H);
    ProfileOptions sopts;
    sopts.tol = 1e-11;
    const ProfileSolution sol =
        integrate_profile({std::atan(1.0 / H), 0.0, M_PI_2}, H, 10.0, sopts);
    const GeodesicSpec ray = geodesic_from_angle(Vec4(1, 0, 0, 0), 0.0, H);
    const Vec4 at_max = geodesic_point(ray, M_PI / (2 * m));
    const double delta = std::atan2(at_max[1], at_max[0]);
    double worst = 0.0;
    for (double s = 0.0; s <= sol.length(); s += 0.05) {
      const ProfileState st = sol.at(s);
      if (st.omega < 0.02) continue;
      const double arc = (M_PI - std::asin(std::min(1.0, m * std::sin(st.omega)))) / m;
      const Vec4 g = geodesic_point(ray, arc);
      const Vec4 a(std::cos(st.omega) * std::cos(st.tau + delta),
                   std::cos(st.omega) * std::sin(st.tau + delta), std::sin(st.omega), 0.0);
      const Vec4 b(g[0], g[1], std::hypot(g[2], g[3]), 0.0);
      worst = std::max(worst, (a - b).norm());
    }
    detail::record(out, "revolved E=0 profile matches the spherical surface", worst, 1e-6);
  }

  bool table_ok = classify_profile(0.0, 0.0).kind == DelaunayKind::meridian_two_sphere &&
                  classify_profile(0.5, 0.0).kind == DelaunayKind::clifford_torus &&
                  classify_profile(0.0, 1.5).kind == DelaunayKind::sphere_sh &&
                  classify_profile(0.3, 0.0).kind == DelaunayKind::unduloid &&
                  classify_profile(-0.3, 1.0).kind == DelaunayKind::nodoid &&
                  classify_profile(-1.0, 1.0).kind == DelaunayKind::petal;
  out.push_back({"Delaunay case table spot checks", table_ok ? 0.0 : 1.0, 0.5, table_ok});
  return out;
}

inline std::vector<CheckResult> verify_suite(const std::string& suite) {
  std::vector<CheckResult> out;
  const bool all = suite == "all";
  if (all || suite == "frames") {
    auto r = verify_frames();
    out.insert(out.end(), r.begin(), r.end());
  }
  if (all || suite == "geodesics") {
    auto r = verify_geodesics();
    out.insert(out.end(), r.begin(), r.end());
  }
  if (all || suite == "surfaces") {
    auto r = verify_surfaces();
    out.insert(out.end(), r.begin(), r.end());
  }
  if (all || suite == "rotational") {
    auto r = verify_rotational();
    out.insert(out.end(), r.begin(), r.end());
  }
  if (out.empty()) throw std::invalid_argument("verify_suite: unknown suite " + suite);
  return out;
}

}  // namespace s3
