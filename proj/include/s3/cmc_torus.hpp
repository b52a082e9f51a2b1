#pragma once

#include <vector>

#include "s3/surfaces.hpp"

// The surfaces C_{mu,lambda}: start from the geodesic Gamma of curvature mu
// through (1,0,0,0) with velocity E1, leave orthogonally by ruled sheets of
// curvature lambda on both sides, and keep extending across the singular
// curves with sheets of alternating curvature (-1)^k lambda.  All singular
// curves are geodesics of curvature mu lying over the same Hopf circle; each
// is exp(i theta_{jk}) * Gamma up to a parameter shift, with the angles given
// by an explicit recursion.

namespace s3 {

struct CmcTorusLayout {
  double mu = 0.0, lambda = 0.0;
  double s_plus = 0.0, s_minus = 0.0;      // cut lengths of the two sides
  double eps_mu = 0.0, eps_mu_tilde = 0.0; // fiber-crossing shifts along Gamma
  double theta1 = 0.0, theta2 = 0.0;       // first-step angles per branch
  double theta1_tilde = 0.0, theta2_tilde = 0.0;
  double theta1_scanned = 0.0, eps_mu_scanned = 0.0;  // from the numeric scan
  std::vector<double> theta_branch1, theta_branch2;   // theta_{jk}, k = 1..n
  bool closes = false;
  int closing_step = -1;
};

struct CmcTorusResult {
  std::vector<RuledSheet> sheets;
  CmcTorusLayout layout;
};

namespace detail {

inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

// Minimum of a smooth scalar function over [lo, hi]: coarse scan followed by
// parabolic refinement.  Returns (argmin, min).
template <typename Fn>
inline std::pair<double, double> refine_min(const Fn& f, double lo, double hi,
                                            int coarse = 2048) {
  double best_e = lo, best_f = f(lo);
  for (int k = 1; k <= coarse; ++k) {
    const double e = lo + (hi - lo) * k / coarse;
    const double fe = f(e);
    if (fe < best_f) {
      best_f = fe;
      best_e = e;
    }
  }
  double delta = (hi - lo) / coarse;
  for (int it = 0; it < 60 && delta > 1e-14; ++it) {
    const double fm = f(best_e - delta), f0 = f(best_e), fp = f(best_e + delta);
    const double denom = fm - 2.0 * f0 + fp;
    if (denom > 0.0) {
      double shift = 0.5 * (fm - fp) / denom * delta;
      shift = std::clamp(shift, -delta, delta);
      if (f(best_e + shift) <= f0) best_e += shift;
    }
    delta *= 0.5;
    best_f = f(best_e);
  }
  return {best_e, best_f};
}

// Locate the crossing of a geodesic with the great circle {x2 = y2 = 0} and
// report the fiber angle atan2(y1, x1) there.  The angle is first-order
// insensitive to the location error.
inline std::pair<double, double> fiber_crossing(const GeodesicSpec& spec, double eps_lo,
                                                double eps_hi) {
  const auto [e_star, f_star] = refine_min(
      [&](double e) {
        const Vec4 p = geodesic_point(spec, e);
        return p[2] * p[2] + p[3] * p[3];
      },
      eps_lo, eps_hi, 4096);
  (void)f_star;
  const Vec4 p = geodesic_point(spec, e_star);
  return {e_star, std::atan2(p[1], p[0])};
}

// Hausdorff-style distance from sample points of curve A to curve B as a
// continuum (B evaluated through `point_b` over [0, window]).
template <typename PointB>
inline double curve_to_curve_distance(const std::vector<Vec4>& samples_a, const PointB& point_b,
                                      double window, int coarse = 1024) {
  double worst = 0.0;
  for (const auto& pa : samples_a) {
    const auto [e, d2] = refine_min(
        [&](double e) { return (point_b(e) - pa).squaredNorm(); }, 0.0, window, coarse);
    (void)e;
    worst = std::max(worst, std::sqrt(std::max(0.0, d2)));
  }
  return worst;
}

}  // namespace detail

/// Build C_{mu,lambda} as a list of ruled sheets plus the angle layout.
/// n_steps counts extension rounds: round 0 produces the two sheets leaving
/// Gamma, each later round extends both branches across their latest singular
/// curves.  Every singular curve is checked to be a geodesic of curvature mu
/// whose Hopf image coincides with that of Gamma.
inline CmcTorusResult cmc_torus_patch(double mu, double lambda, int n_steps, std::size_t n_eps,
                                      std::size_t n_s) {
  if (n_steps < 1) throw std::invalid_argument("cmc_torus_patch: n_steps must be >= 1");
  const double nu_mu = std::sqrt(1.0 + mu * mu);

  CmcTorusResult out;
  CmcTorusLayout& layout = out.layout;
  layout.mu = mu;
  layout.lambda = lambda;
  layout.s_plus = cut_function(-2.0 * mu, lambda);
  layout.s_minus = reverse_cut(-2.0 * mu, lambda);
  layout.eps_mu = cut_function(-2.0 * lambda, mu);  // cot(nu_mu e) = -lambda/nu_mu
  layout.eps_mu_tilde = M_PI / nu_mu - layout.eps_mu;
  layout.theta1 = 1.5 * M_PI - lambda * layout.s_plus - mu * layout.eps_mu;
  layout.theta2 = 0.5 * M_PI - lambda * layout.s_minus - mu * layout.eps_mu_tilde;
  layout.theta1_tilde = 0.5 * M_PI + lambda * layout.s_minus - mu * layout.eps_mu;
  layout.theta2_tilde = 1.5 * M_PI + lambda * layout.s_plus - mu * layout.eps_mu_tilde;

  auto theta_jk = [](double th, double th_tilde, int k) {
    const int m = k / 2;
    if (k % 2 == 0) return m * (th + th_tilde);
    return (m + 1) * th + m * th_tilde;
  };
  layout.theta_branch1.resize(n_steps);
  layout.theta_branch2.resize(n_steps);
  for (int k = 1; k <= n_steps; ++k) {
    layout.theta_branch1[k - 1] = theta_jk(layout.theta1, layout.theta1_tilde, k);
    layout.theta_branch2[k - 1] = theta_jk(layout.theta2, layout.theta2_tilde, k);
  }

  // Directrix Gamma and its sampling window: one full period when closed.
  const GeodesicSpec gamma0{Vec4(1, 0, 0, 0), e1_at(Vec4(1, 0, 0, 0)), mu};
  double window = 4.0 * M_PI / nu_mu;
  bool periodic = false;
  try {
    window = geodesic_period(mu);
    periodic = true;
  } catch (const std::domain_error&) {
    // dense directrix: keep a finite window
  }

  // Singular curves met so far, kept as geodesic specs for continuum distances.
  std::vector<GeodesicSpec> known_curves = {gamma0};
  auto meets_known_curve = [&](const GeodesicSpec& cand) {
    std::vector<Vec4> probes(24);
    for (std::size_t i = 0; i < probes.size(); ++i)
      probes[i] = geodesic_point(cand, window * i / probes.size());
    for (int c = 0; c < static_cast<int>(known_curves.size()); ++c) {
      const GeodesicSpec& k = known_curves[c];
      const double d = detail::curve_to_curve_distance(
          probes, [&](double e) { return geodesic_point(k, e); }, window);
      if (d < 1e-6) return c;
    }
    return -1;
  };

  std::vector<Vec3> gamma_hopf(24);
  for (std::size_t i = 0; i < gamma_hopf.size(); ++i)
    gamma_hopf[i] = hopf(geodesic_point(gamma0, window * i / gamma_hopf.size()));

  auto verify_singular_curve = [&](const GeodesicSpec& spec) {
    // Geodesic of curvature mu: finite-difference h against -2 mu.
    const double delta = 1e-4;
    for (double e : {0.1 * window, 0.37 * window, 0.71 * window}) {
      const Vec4 ddg =
          (geodesic_velocity(spec, e + delta).v - geodesic_velocity(spec, e - delta).v) /
          (2.0 * delta);
      const Vec4 jdg = quat_mul(Vec4(0, 1, 0, 0), geodesic_velocity(spec, e).v);
      if (std::abs(ddg.dot(jdg) + 2.0 * mu) > 1e-5)
        throw std::runtime_error(
            "cmc_torus_patch: singular curve is not a geodesic of curvature mu");
    }
    // Hopf image coincides with the image of Gamma, checked as a set.
    for (const Vec3& target : gamma_hopf) {
      const auto [e, d2] = detail::refine_min(
          [&](double e) { return (hopf(geodesic_point(spec, e)) - target).squaredNorm(); }, 0.0,
          window, 1024);
      (void)e;
      if (std::sqrt(std::max(0.0, d2)) > 1e-6)
        throw std::runtime_error("cmc_torus_patch: singular curve leaves the Hopf circle of Gamma");
    }
  };

  struct Branch {
    GeodesicSpec spec;
    int side;
    double lambda_next;
  };
  std::vector<Branch> branches = {{gamma0, +1, lambda}, {gamma0, -1, lambda}};

  for (int step = 0; step < n_steps && !layout.closes; ++step) {
    for (std::size_t b = 0; b < branches.size() && !layout.closes; ++b) {
      Branch& br = branches[b];
      const HorizontalCurveSample samples =
          sample_curve(geodesic_directrix(br.spec), 0.0, window, n_eps, periodic);
      RuledSheet sheet = ruled_patch(samples, br.lambda_next, br.side, n_s);
      sheet.patch.meta.tag = "cmc-torus";
      sheet.patch.meta.params = {{"mu", mu},
                                 {"lambda", lambda},
                                 {"sheet_lambda", br.lambda_next},
                                 {"branch", static_cast<double>(b)},
                                 {"step", static_cast<double>(step)}};
      sheet.patch.meta.periodic_u = periodic;
      if (sheet.end.jacobi_residual > 1e-6)
        throw std::runtime_error("cmc_torus_patch: Jacobi boundary condition failed");

      // Next singular curve as an exact geodesic spec (sdot = 0 on geodesic
      // directrices, so the stored boundary tangent is the unit X field).
      GeodesicSpec next{renormalized(sheet.end.point[0]), renormalized(sheet.end.tangent[0]), mu};
      validate(next);
      verify_singular_curve(next);
      for (std::size_t i = 0; i < n_eps; i += n_eps / 8 + 1)
        if ((geodesic_point(next, samples.eps[i]) - sheet.end.point[i]).norm() > 1e-8)
          throw std::runtime_error("cmc_torus_patch: singular curve drifted from a geodesic");

      if (b == 0 && step == 0) {
        const auto [e_star, th] =
            detail::fiber_crossing(next, 1e-6, M_PI / nu_mu - 1e-6);
        layout.eps_mu_scanned = e_star;
        layout.theta1_scanned = th;
      }

      const Vec4 incoming0 = sheet.end.incoming[0];
      out.sheets.push_back(std::move(sheet));
      if (meets_known_curve(next) >= 0) {
        layout.closes = true;
        layout.closing_step = step;
        break;
      }
      known_curves.push_back(next);

      // Continue across: the new sheet leaves along the incoming velocity with
      // opposite curvature; the side is the sign of <incoming, J(Gamma_new')>.
      const double orientation = incoming0.dot(quat_mul(Vec4(0, 1, 0, 0), next.v));
      if (std::abs(std::abs(orientation) - 1.0) > 1e-6)
        throw std::runtime_error("cmc_torus_patch: ambiguous continuation side");
      br.spec = next;
      br.side = orientation > 0 ? +1 : -1;
      br.lambda_next = -br.lambda_next;
    }
  }
  return out;
}

/// Crude reporter of self-intersection candidates between distinct sheets:
/// pairs of grid points closer than dist_tol whose parameters keep them away
/// from the shared singular boundaries.  No embeddedness claim is made.
inline std::size_t self_intersection_candidates(const std::vector<RuledSheet>& sheets,
                                                double dist_tol = 1e-3,
                                                std::size_t stride = 4) {
  std::size_t count = 0;
  for (std::size_t a = 0; a < sheets.size(); ++a) {
    for (std::size_t b = a + 1; b < sheets.size(); ++b) {
      const ParamPatch& pa = sheets[a].patch;
      const ParamPatch& pb = sheets[b].patch;
      for (std::size_t i = 1; i + 1 < pa.nu; i += stride) {
        for (std::size_t j = 2; j + 2 < pa.nv; j += stride) {
          const Vec4& p = pa.at(i, j);
          for (std::size_t k = 1; k + 1 < pb.nu; k += stride) {
            for (std::size_t l = 2; l + 2 < pb.nv; l += stride) {
              if ((p - pb.at(k, l)).norm() < dist_tol) ++count;
            }
          }
        }
      }
    }
  }
  return count;
}

}  // namespace s3
