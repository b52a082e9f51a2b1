#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "s3/core.hpp"
#include "s3/patch.hpp"
#include "s3/rational.hpp"

// Rotationally invariant CMC surfaces.  The generating curve in spherical
// coordinates (omega, tau) with steering angle sigma solves
//
//   omega' = cos sigma
//   tau'   = sin sigma / cos omega
//   sigma' = tan(omega) sin(sigma) - cot^3(omega) sin^3(sigma)
//            + 2H (sin^2 w cos^2 s + sin^2 s)^{3/2} / sin^2 w
//
// with the first integral
//
//   E = sin w cos w sin s / sqrt(sin^2 w cos^2 s + sin^2 s) - H sin^2 w.
//
// Solutions live in the band where sin w cos w >= |E + H sin^2 w| and fall
// into Delaunay-type classes depending on (E, H).

namespace s3 {

struct ProfileState {
  double omega = 0.0;
  double tau = 0.0;
  double sigma = 0.0;
};

inline constexpr double kOmegaMin = 1e-8;

inline Eigen::Vector3d profile_rhs(const ProfileState& st, double H,
                                   double omega_min = kOmegaMin) {
  if (st.omega <= omega_min || st.omega >= M_PI_2 - omega_min)
    throw std::domain_error("profile_rhs: omega at a chart singularity");
  const double sw = std::sin(st.omega), cw = std::cos(st.omega);
  const double ss = std::sin(st.sigma), cs = std::cos(st.sigma);
  const double q = sw * sw * cs * cs + ss * ss;
  const double cot = cw / sw;
  return {cs, ss / cw,
          (sw / cw) * ss - cot * cot * cot * ss * ss * ss +
              2.0 * H * std::pow(q, 1.5) / (sw * sw)};
}

inline double profile_energy(double omega, double sigma, double H) {
  const double sw = std::sin(omega), cw = std::cos(omega);
  const double ss = std::sin(sigma), cs = std::cos(sigma);
  const double denom = std::sqrt(sw * sw * cs * cs + ss * ss);
  if (denom < 1e-300) throw std::domain_error("profile_energy: undefined at omega in {0, pi/2} with sigma = 0");
  return sw * cw * ss / denom - H * sw * sw;
}

/// A profile problem: curvature, energy and the turning bounds of the band
/// sin w cos w >= |E + H sin^2 w| where solutions live.
struct ProfileProblem {
  double H = 0.0;
  double E = 0.0;
  double omega1 = 0.0;  // turning bounds; equal for the Clifford equilibria
  double omega2 = 0.0;
  bool admissible = false;
};

/// Border of the admissible band: sin w1, sin w2 are the positive roots of
/// (1+H^2) x^4 - (1-2EH) x^2 + E^2.  Empty when the discriminant is negative.
inline std::optional<std::pair<double, double>> omega_bounds(double E, double H) {
  const double A = 1.0 + H * H;
  const double B = 1.0 - 2.0 * E * H;
  const double disc = B * B - 4.0 * E * E * A;
  if (disc < 0.0) return std::nullopt;
  const double r = std::sqrt(disc);
  const double x2_hi = (B + r) / (2.0 * A);  // sin^2 w2
  const double x2_lo = (B - r) / (2.0 * A);  // sin^2 w1
  if (x2_hi < 0.0) return std::nullopt;
  const double lo = std::clamp(x2_lo, 0.0, 1.0);
  const double hi = std::clamp(x2_hi, 0.0, 1.0);
  return std::make_pair(std::asin(std::sqrt(lo)), std::asin(std::sqrt(hi)));
}

inline ProfileProblem make_profile_problem(double E, double H) {
  ProfileProblem prob;
  prob.E = E;
  prob.H = H;
  if (const auto bounds = omega_bounds(E, H)) {
    prob.omega1 = bounds->first;
    prob.omega2 = bounds->second;
    prob.admissible = true;
  }
  return prob;
}

/// sin(sigma) as a function of omega on a solution of energy E:
/// (E + H sin^2 w) sin w / (cos w sqrt(sin^2 w - (E + H sin^2 w)^2)).
inline double sin_sigma_of_omega(double omega, double E, double H) {
  const double sw = std::sin(omega), cw = std::cos(omega);
  const double K = E + H * sw * sw;
  const double rad = sw * sw - K * K;
  if (rad <= 0.0) throw std::domain_error("sin_sigma_of_omega: at or beyond a turning point");
  return K * sw / (cw * std::sqrt(rad));
}

/// sigma' reduced through the first integral:
/// p(sin^2 w) / (cos^2 w (sin^2 w - (E+H sin^2 w)^2)^{3/2}),
/// p(x) = -(E+Hx)^3 - Hx^3 + (E+2H) x^2.
inline double sigma_dot_reduced(double omega, double E, double H) {
  const double sw = std::sin(omega), cw = std::cos(omega);
  const double x = sw * sw;
  const double K = E + H * x;
  const double rad = x - K * K;
  if (rad <= 0.0) throw std::domain_error("sigma_dot_reduced: at or beyond a turning point");
  const double p = -K * K * K - H * x * x * x + (E + 2.0 * H) * x * x;
  return p / (cw * cw * std::pow(rad, 1.5));
}

/// d omega / d tau and d^2 omega / d tau^2 along a graph piece.
inline double omega_graph_slope(const ProfileState& st) {
  return std::cos(st.omega) * std::cos(st.sigma) / std::sin(st.sigma);
}

inline double omega_graph_curvature(const ProfileState& st, double H) {
  const double sw = std::sin(st.omega), cw = std::cos(st.omega);
  const double ss = std::sin(st.sigma), cs = std::cos(st.sigma);
  const double sd = profile_rhs(st, H)[2];
  return -(sw * cw * ss * cs * cs + sd * cw * cw) / (ss * ss * ss);
}

/// Same second derivative from the first integral (valid off turning points).
inline double omega_graph_curvature_reduced(double omega, double E, double H) {
  const double sw = std::sin(omega), cw = std::cos(omega);
  const double x = sw * sw;
  const double K = E + H * x;
  return cw / (sw * sw * sw * K * K * K) * (K * K * K - 2.0 * (E + H) * x * x * cw * cw);
}

enum class ProfileEvent { turning, axis_contact, pole_contact, step_underflow };

struct ProfileEventRecord {
  ProfileEvent kind;
  double s = 0.0;
  ProfileState state;
  double tau_extrapolated = 0.0;  // pole events: tau continued to omega = pi/2
};

struct ProfileNode {
  double s;
  ProfileState y;
  Eigen::Vector3d dy;
};

struct ProfileOptions {
  double tol = 1e-10;        // embedded error and per-step energy-drift budget
  double axis_eps = 1e-6;    // omega threshold for tau-axis contact
  double pole_eps = 1e-4;    // pi/2 - omega threshold for pole contact
  double max_step = 0.05;
  bool pole_continuation = true;  // continue across the pole by the branch rule
};

struct ProfileSolution {
  double H = 0.0;
  double E = 0.0;
  std::vector<ProfileNode> nodes;
  std::vector<ProfileEventRecord> events;
  double energy_drift_max = 0.0;
  double cota_violation_max = 0.0;  // max of |E + H sin^2 w| - sin w cos w

  double length() const { return nodes.empty() ? 0.0 : nodes.back().s - nodes.front().s; }

  /// Dense output by cubic Hermite interpolation between accepted steps.
  ProfileState at(double s) const {
    if (nodes.size() < 2) return nodes.empty() ? ProfileState{} : nodes.front().y;
    std::size_t lo = 0, hi = nodes.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (nodes[mid].s <= s ? lo : hi) = mid;
    }
    const ProfileNode& a = nodes[lo];
    const ProfileNode& b = nodes[lo + 1];
    const double h = b.s - a.s;
    if (h <= 0.0) return b.y;  // zero-length interval at a continuation jump
    const double t = std::clamp((s - a.s) / h, 0.0, 1.0);
    const double t2 = t * t, t3 = t2 * t;
    auto hermite = [&](double ya, double yb, double da, double db) {
      return (2 * t3 - 3 * t2 + 1) * ya + (t3 - 2 * t2 + t) * h * da +
             (-2 * t3 + 3 * t2) * yb + (t3 - t2) * h * db;
    };
    return {hermite(a.y.omega, b.y.omega, a.dy[0], b.dy[0]),
            hermite(a.y.tau, b.y.tau, a.dy[1], b.dy[1]),
            hermite(a.y.sigma, b.y.sigma, a.dy[2], b.dy[2])};
  }
};

namespace detail {

inline Eigen::Vector3d to_vec(const ProfileState& st) { return {st.omega, st.tau, st.sigma}; }
inline ProfileState to_state(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

// Dormand-Prince 5(4) tableau.
struct Dopri5Step {
  Eigen::Vector3d y_new, dy_new;
  Eigen::Vector3d err;  // y5 - y4, componentwise embedded error
};

template <typename Rhs>
inline Dopri5Step dopri5(const Rhs& f, const Eigen::Vector3d& y, const Eigen::Vector3d& k1,
                         double h) {
  const Eigen::Vector3d k2 = f(y + h * (k1 / 5.0));
  const Eigen::Vector3d k3 = f(y + h * (3.0 / 40 * k1 + 9.0 / 40 * k2));
  const Eigen::Vector3d k4 = f(y + h * (44.0 / 45 * k1 - 56.0 / 15 * k2 + 32.0 / 9 * k3));
  const Eigen::Vector3d k5 = f(y + h * (19372.0 / 6561 * k1 - 25360.0 / 2187 * k2 +
                                        64448.0 / 6561 * k3 - 212.0 / 729 * k4));
  const Eigen::Vector3d k6 = f(y + h * (9017.0 / 3168 * k1 - 355.0 / 33 * k2 +
                                        46732.0 / 5247 * k3 + 49.0 / 176 * k4 -
                                        5103.0 / 18656 * k5));
  const Eigen::Vector3d y5 = y + h * (35.0 / 384 * k1 + 500.0 / 1113 * k3 + 125.0 / 192 * k4 -
                                      2187.0 / 6784 * k5 + 11.0 / 84 * k6);
  const Eigen::Vector3d k7 = f(y5);
  const Eigen::Vector3d y4 = y + h * (5179.0 / 57600 * k1 + 7571.0 / 16695 * k3 +
                                      393.0 / 640 * k4 - 92097.0 / 339200 * k5 +
                                      187.0 / 2100 * k6 + 1.0 / 40 * k7);
  return {y5, k7, y5 - y4};
}

}  // namespace detail

/// Adaptive integration of the profile system with the energy monitor and
/// event handling.
/// Steps whose energy drift exceeds tol * h are rejected alongside the
/// embedded error test.  Pole contact applies the continuation rule
/// tau += pi, sigma -> pi - sigma; axis contact stops the trajectory.
inline ProfileSolution integrate_profile(const ProfileState& init, double H, double arc_length,
                                         const ProfileOptions& opts = {}) {
  if (!(arc_length > 0.0)) throw std::invalid_argument("integrate_profile: arc_length <= 0");
  const auto f = [H](const Eigen::Vector3d& y) {
    return profile_rhs({y[0], y[1], y[2]}, H);
  };

  ProfileSolution sol;
  sol.H = H;
  sol.E = profile_energy(init.omega, init.sigma, H);

  Eigen::Vector3d y = detail::to_vec(init);
  Eigen::Vector3d k1 = f(y);
  double s = 0.0;
  double h = std::min(opts.max_step, 1e-3);
  sol.nodes.push_back({s, init, k1});

  auto note_state = [&](const Eigen::Vector3d& st) {
    const double drift = std::abs(profile_energy(st[0], st[2], H) - sol.E);
    sol.energy_drift_max = std::max(sol.energy_drift_max, drift);
    const double sw = std::sin(st[0]), cw = std::cos(st[0]);
    sol.cota_violation_max =
        std::max(sol.cota_violation_max, std::abs(sol.E + H * sw * sw) - sw * cw);
  };

  int rejected_in_row = 0;
  while (s < arc_length) {
    h = std::min(h, arc_length - s);
    if (h < 1e-13) {
      sol.events.push_back({ProfileEvent::step_underflow, s, detail::to_state(y), 0.0});
      break;
    }
    detail::Dopri5Step step;
    try {
      step = detail::dopri5(f, y, k1, h);
    } catch (const std::domain_error&) {
      h *= 0.5;  // stage left the chart; retry smaller
      if (++rejected_in_row > 200) {
        sol.events.push_back({ProfileEvent::step_underflow, s, detail::to_state(y), 0.0});
        break;
      }
      continue;
    }
    // Componentwise error ratio: tau may grow without bound along a
    // trajectory, so it only loosens its own component.
    double err_ratio = 0.0;
    for (int c = 0; c < 3; ++c)
      err_ratio =
          std::max(err_ratio, std::abs(step.err[c]) / (opts.tol * (1.0 + std::abs(y[c]))));
    const double step_drift = std::abs(profile_energy(step.y_new[0], step.y_new[2], H) -
                                       profile_energy(y[0], y[2], H));
    const double energy_budget = std::max(opts.tol * h, 50.0 * 1e-16 * (1.0 + std::abs(sol.E)));
    if (err_ratio > 1.0 || step_drift > energy_budget) {
      const double shrink =
          (err_ratio > 1.0)
              ? std::clamp(0.9 * std::pow(1.0 / (err_ratio + 1e-300), 0.2), 0.2, 0.7)
              : 0.5;
      h *= shrink;
      if (++rejected_in_row > 200) {
        sol.events.push_back({ProfileEvent::step_underflow, s, detail::to_state(y), 0.0});
        break;
      }
      continue;
    }
    rejected_in_row = 0;

    // Event scan on the accepted interval via Hermite interpolation.
    const double s_new = s + h;
    auto interp = [&](double t) -> Eigen::Vector3d {
      const double t2 = t * t, t3 = t2 * t;
      return (2 * t3 - 3 * t2 + 1) * y + (t3 - 2 * t2 + t) * h * k1 +
             (-2 * t3 + 3 * t2) * step.y_new + (t3 - t2) * h * step.dy_new;
    };
    auto bisect = [&](auto&& g) {  // g changes sign on [0, 1]
      double lo = 0.0, hi = 1.0, glo = g(interp(0.0));
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(interp(mid));
        if ((gm >= 0) == (glo >= 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    };

    // Turning points: cos sigma changes sign.
    if ((std::cos(y[2]) >= 0) != (std::cos(step.y_new[2]) >= 0)) {
      const double t = bisect([](const Eigen::Vector3d& v) { return std::cos(v[2]); });
      sol.events.push_back(
          {ProfileEvent::turning, s + t * h, detail::to_state(interp(t)), 0.0});
    }
    // Axis contact: omega falls to the axis threshold.
    if (step.y_new[0] <= opts.axis_eps) {
      const double t = y[0] > opts.axis_eps
                           ? bisect([&](const Eigen::Vector3d& v) { return v[0] - opts.axis_eps; })
                           : 0.0;
      const Eigen::Vector3d yc = interp(t);
      sol.nodes.push_back({s + t * h, detail::to_state(yc), f(yc)});
      sol.events.push_back({ProfileEvent::axis_contact, s + t * h, detail::to_state(yc), 0.0});
      note_state(yc);
      return sol;
    }
    // Pole contact: omega reaches pi/2 - pole_eps.  Only trajectories with
    // E = -H can touch the pole, so the remaining tau advance follows the
    // closed dtau/domega integral of that case, which stays regular there.
    if (step.y_new[0] >= M_PI_2 - opts.pole_eps) {
      const double t =
          y[0] < M_PI_2 - opts.pole_eps
              ? bisect([&](const Eigen::Vector3d& v) { return (M_PI_2 - opts.pole_eps) - v[0]; })
              : 0.0;
      Eigen::Vector3d yc = interp(t);
      const double sc = s + t * h;
      double tail = 0.0;
      {
        const int n = 64;  // Simpson for -H sin(w)/sqrt(1-(1+H^2)cos^2 w) dw
        const double lo = yc[0], hi = M_PI_2;
        for (int k2 = 0; k2 <= n; ++k2) {
          const double w = lo + (hi - lo) * k2 / n;
          const double wgt = (k2 == 0 || k2 == n) ? 1.0 : (k2 % 2 ? 4.0 : 2.0);
          const double cw = std::cos(w);
          tail += wgt * -H * std::sin(w) /
                  std::sqrt(std::max(1e-30, 1.0 - (1.0 + H * H) * cw * cw));
        }
        tail *= (hi - lo) / n / 3.0;
      }
      const double tau_pole = yc[1] + tail;
      sol.nodes.push_back({sc, detail::to_state(yc), f(yc)});
      sol.events.push_back({ProfileEvent::pole_contact, sc, detail::to_state(yc), tau_pole});
      note_state(yc);
      if (!opts.pole_continuation) return sol;
      // Branch rule: the continuation passes the pole onto the branch with
      // tau -> pi + tau_0 and sigma -> pi, realized at the event threshold by
      // reflecting across the meridian through the pole.
      yc[1] = 2.0 * tau_pole + M_PI - yc[1];
      yc[2] = 3.0 * M_PI - yc[2];
      if (yc[2] > 2.0 * M_PI) yc[2] -= 2.0 * M_PI;
      y = yc;
      k1 = f(y);
      s = sc;
      h = std::min(opts.max_step, 1e-4);
      sol.nodes.push_back({s, detail::to_state(y), k1});
      continue;
    }

    s = s_new;
    y = step.y_new;
    k1 = step.dy_new;
    note_state(y);
    sol.nodes.push_back({s, detail::to_state(y), k1});
    h = std::min(opts.max_step,
                 h * std::min(5.0, 0.9 * std::pow(1.0 / (err_ratio + 1e-300), 0.2)));
  }
  return sol;
}

enum class DelaunayKind {
  meridian_two_sphere,
  clifford_torus,
  sphere_sh,
  unduloid,
  nodoid,
  petal
};

struct DelaunayClass {
  DelaunayKind kind;
  bool compact = true;
  std::optional<double> period;  // tau-translation period of the profile
};

struct ClosedFormPeriods {
  double unduloid = 0.0;       // (1 - H/sqrt(1+H^2)) pi, positive-energy branch
  double unduloid_neg = 0.0;   // (1 + H/sqrt(1+H^2)) pi, negative-energy branch
  double nodoid_half = 0.0;    // tau_2 = (pi/2)(1 - H/sqrt(1+H^2))
  double petal_tau0 = 0.0;     // -(pi/2) H/sqrt(1+H^2)
};

inline ClosedFormPeriods closed_form_periods(double H) {
  if (H < 0.0) throw std::invalid_argument("closed_form_periods: H must be >= 0");
  const double r = H / std::sqrt(1.0 + H * H);
  return {(1.0 - r) * M_PI, (1.0 + r) * M_PI, 0.5 * M_PI * (1.0 - r), -0.5 * M_PI * r};
}

/// Case table of the Delaunay-type classification.  H < 0 inputs are
/// normalized through the symmetry (E, H) -> (-E, -H).
inline DelaunayClass classify_profile(double E, double H, const RationalityPolicy& policy = {}) {
  if (!std::isfinite(E) || !std::isfinite(H))
    throw std::invalid_argument("classify_profile: non-finite input");
  if (H < 0.0 || (H == 0.0 && E < 0.0)) {
    E = -E;
    H = -H;
  }
  const double m = std::sqrt(1.0 + H * H);
  const double ratio = H / m;
  const bool ratio_rational = detect_rational(ratio, policy).has_value();
  const double eps = 1e-12;

  if (H == 0.0 && std::abs(E) < eps) return {DelaunayKind::meridian_two_sphere, true, {}};
  if (std::abs(E) < eps) return {DelaunayKind::sphere_sh, true, {}};

  const double disc = (1.0 - 2.0 * E * H) * (1.0 - 2.0 * E * H) - 4.0 * E * E * (1.0 + H * H);
  if (disc < -1e-12) throw std::domain_error("classify_profile: no admissible band for (E, H)");
  if (std::abs(disc) <= 1e-12) return {DelaunayKind::clifford_torus, true, {}};
  if (std::abs(E + H) < eps)
    return {DelaunayKind::petal, ratio_rational, (1.0 - ratio) * M_PI};
  if (E > 0.0) return {DelaunayKind::unduloid, ratio_rational, (1.0 - ratio) * M_PI};
  if (H < -E) return {DelaunayKind::unduloid, ratio_rational, (1.0 + ratio) * M_PI};
  return {DelaunayKind::nodoid, ratio_rational, (1.0 - ratio) * M_PI};
}

namespace detail {

inline double sinc(double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; }

// Signed half-period integral int_{w1}^{w2} K sin w /(cos w sqrt(...)) dw with
// the turning-point singularities removed by the substitution
// w = mid - hw cos(u): the radicand factors through sin(w - w1) sin(w2 - w).
inline double tau_half_integral(double E, double H, int n) {
  const auto bounds = omega_bounds(E, H);
  if (!bounds) throw std::domain_error("tau_half_integral: empty band");
  const double w1 = bounds->first, w2 = bounds->second;
  const double mid = 0.5 * (w1 + w2), hw = 0.5 * (w2 - w1);
  const double A = std::sqrt(1.0 + H * H);
  auto integrand = [&](double u) {
    const double w = mid - hw * std::cos(u);
    const double sw = std::sin(w), cw = std::cos(w);
    const double K = E + H * sw * sw;
    const double smooth = std::sin(w + w1) * std::sin(w2 + w) * sinc(w - w1) * sinc(w2 - w);
    return K * sw / (cw * A * std::sqrt(smooth));
  };
  // Composite Simpson on [0, pi].
  double total = integrand(0.0) + integrand(M_PI);
  for (int k = 1; k < n; ++k) total += integrand(M_PI * k / n) * (k % 2 ? 4.0 : 2.0);
  return total * (M_PI / n) / 3.0;
}

}  // namespace detail

/// Period of the unduloid/nodoid profile by adaptive quadrature of the
/// dtau/domega integral; must agree with the closed forms.
inline double period_by_quadrature(double E, double H) {
  const DelaunayClass cls = classify_profile(E, H);
  if (cls.kind != DelaunayKind::unduloid && cls.kind != DelaunayKind::nodoid)
    throw std::invalid_argument("period_by_quadrature: unduloid or nodoid regime required");
  if (H < 0.0 || (H == 0.0 && E < 0.0)) {
    E = -E;
    H = -H;
  }
  double prev = detail::tau_half_integral(E, H, 512);
  for (int n = 1024; n <= 1 << 17; n *= 2) {
    const double cur = detail::tau_half_integral(E, H, n);
    if (std::abs(cur - prev) < 5e-10) return 2.0 * std::abs(cur);
    prev = cur;
  }
  throw std::runtime_error("period_by_quadrature: quadrature did not converge");
}

/// Signed half advance tau_2 (nodoid) / T/2 (unduloid).
inline double tau_half_by_quadrature(double E, double H) {
  return detail::tau_half_integral(E, H, 1 << 14);
}

/// Petal axis offset tau_0: direct integration from the lower turning point
/// (omega_1, 0, 3 pi/2) to the pole, reported from the pole-contact event.
inline double petal_tau0_by_integration(double H, double tol = 1e-10) {
  if (!(H > 0.0)) throw std::invalid_argument("petal_tau0: H must be positive");
  const double sin_w1 = H / std::sqrt(1.0 + H * H);
  ProfileOptions opts;
  opts.tol = tol;
  opts.pole_continuation = false;
  const ProfileSolution sol =
      integrate_profile({std::asin(sin_w1), 0.0, 1.5 * M_PI}, H, 20.0, opts);
  for (const auto& ev : sol.events)
    if (ev.kind == ProfileEvent::pole_contact) return ev.tau_extrapolated;
  throw std::runtime_error("petal_tau0: trajectory did not reach the pole");
}

/// Revolve the profile: (omega, tau) lifts to
/// (cos w cos t, cos w sin t, sin w cos theta, sin w sin theta).
inline ParamPatch revolve(const ProfileSolution& profile, std::size_t n_theta,
                          std::size_t n_s = 0) {
  if (profile.nodes.size() < 2) throw std::invalid_argument("revolve: profile too short");
  if (n_theta < 3) throw std::invalid_argument("revolve: n_theta too small");
  if (n_s == 0) n_s = std::max<std::size_t>(64, profile.nodes.size());
  const double s0 = profile.nodes.front().s, s1 = profile.nodes.back().s;

  ParamPatch patch;
  patch.nu = n_theta;
  patch.nv = n_s;
  patch.u.resize(n_theta);
  patch.v.resize(n_s);
  patch.grid.resize(n_theta * n_s);
  patch.normals.resize(n_theta * n_s);
  for (std::size_t i = 0; i < n_theta; ++i) patch.u[i] = 2 * M_PI * i / n_theta;
  for (std::size_t j = 0; j < n_s; ++j)
    patch.v[j] = s0 + (s1 - s0) * static_cast<double>(j) / (n_s - 1);

  for (std::size_t j = 0; j < n_s; ++j) {
    const ProfileState st = profile.at(patch.v[j]);
    const double cw = std::cos(st.omega), sw = std::sin(st.omega);
    const double ct = std::cos(st.tau), stau = std::sin(st.tau);
    const double cs = std::cos(st.sigma), ss = std::sin(st.sigma);
    // Generating-curve derivatives in Euclidean coordinates {y2 = 0}.
    const double x1 = cw * ct, y1 = cw * stau, x2 = sw;
    const double dx1 = -sw * cs * ct - stau * ss;  // cos w tau' = ss / 1
    const double dy1 = -sw * cs * stau + ct * ss;
    const double dx2 = cw * cs;
    const double n1 = x2 * dy1 - dx2 * y1;
    const double n2 = x1 * dx2 - dx1 * x2;
    const double n3 = dx1 * y1 - x1 * dy1;
    for (std::size_t i = 0; i < n_theta; ++i) {
      const double cth = std::cos(patch.u[i]), sth = std::sin(patch.u[i]);
      patch.grid[i * n_s + j] = Vec4(x1, y1, x2 * cth, x2 * sth);
      Vec4 n(n1, n2, n3 * cth, n3 * sth);
      const double nn = n.norm();
      patch.normals[i * n_s + j] = nn < 1e-13 ? Vec4(0, 0, 0, 0) : Vec4(n / nn);
    }
  }
  patch.meta.tag = "rotational";
  patch.meta.params = {{"H", profile.H}, {"E", profile.E}};
  patch.meta.periodic_u = true;
  const SurfaceFrame ref = frame_at_patch(patch, 0, n_s / 2);
  patch.meta.flip_normal = ref.normal.dot(patch.normals[n_s / 2]) < 0.0;
  return patch;
}

}  // namespace s3
