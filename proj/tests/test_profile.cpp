#include <gtest/gtest.h>

#include <random>

#include "s3/profile.hpp"
#include "s3/surfaces.hpp"

using namespace s3;

TEST(ProfileRhs, ReferenceValues) {
  // minimal Clifford equilibrium
  const auto eq = profile_rhs({M_PI_4, 0.0, M_PI_2}, 0.0);
  EXPECT_NEAR(eq[0], 0.0, 1e-15);
  EXPECT_NEAR(eq[1], std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(eq[2], 0.0, 1e-12);
  // meridian
  const auto mer = profile_rhs({0.6, 0.0, 0.0}, 0.0);
  EXPECT_NEAR(mer[0], 1.0, 1e-15);
  EXPECT_NEAR(mer[1], 0.0, 1e-15);
  EXPECT_NEAR(mer[2], 0.0, 1e-15);
  // H = 1 Clifford: sin^2 w = 1/2 - 1/(2 sqrt(2))
  const double w = std::asin(std::sqrt(0.5 - 0.5 / std::sqrt(2.0)));
  EXPECT_NEAR(profile_rhs({w, 0.0, M_PI_2}, 1.0)[2], 0.0, 1e-12);
  EXPECT_THROW(profile_rhs({1e-12, 0.0, 0.3}, 0.0), std::domain_error);
}

TEST(ProfileEnergy, ReferenceValues) {
  EXPECT_NEAR(profile_energy(M_PI_4, M_PI_2, 0.0), 0.5, 1e-15);
  EXPECT_NEAR(profile_energy(0.9, 0.0, 0.0), 0.0, 1e-15);
  // Clifford energies E = (sqrt(1+H^2) -+ H)/2 at sin^2 w = (1 -+ H/m)/2
  for (double H : {0.5, 1.0, 2.0}) {
    const double m = std::sqrt(1 + H * H);
    const double w = std::asin(std::sqrt(0.5 * (1.0 - H / m)));
    EXPECT_NEAR(profile_energy(w, M_PI_2, H), 0.5 * (m - H), 1e-13);
  }
}

TEST(OmegaBounds, RootsOfTheBiquadratic) {
  const auto clifford = omega_bounds(0.5, 0.0);
  ASSERT_TRUE(clifford.has_value());
  EXPECT_NEAR(clifford->first, M_PI_4, 1e-7);
  EXPECT_NEAR(clifford->second, M_PI_4, 1e-7);

  const auto meridian = omega_bounds(0.0, 0.0);
  ASSERT_TRUE(meridian.has_value());
  EXPECT_NEAR(meridian->first, 0.0, 1e-15);
  EXPECT_NEAR(meridian->second, M_PI_2, 1e-12);

  for (double H : {0.5, 1.0, 3.0}) {
    const auto petal = omega_bounds(-H, H);
    ASSERT_TRUE(petal.has_value());
    EXPECT_NEAR(std::sin(petal->first), H / std::sqrt(1 + H * H), 1e-12);
    EXPECT_NEAR(petal->second, M_PI_2, 1e-7);
  }
  EXPECT_FALSE(omega_bounds(0.6, 0.0).has_value());
}

TEST(ProfileProblem, CarriesTheBand) {
  const ProfileProblem clifford = make_profile_problem(0.5, 0.0);
  ASSERT_TRUE(clifford.admissible);
  EXPECT_NEAR(clifford.omega1, clifford.omega2, 1e-6);
  const ProfileProblem none = make_profile_problem(0.9, 0.0);
  EXPECT_FALSE(none.admissible);
  // the band inequality holds along an integrated solution of the problem
  const ProfileProblem petal = make_profile_problem(-1.0, 1.0);
  ASSERT_TRUE(petal.admissible);
  const ProfileSolution sol =
      integrate_profile({petal.omega1 + 1e-10, 0.0, 1.5 * M_PI}, petal.H, 3.0);
  EXPECT_LT(sol.cota_violation_max, 1e-9);
}

TEST(SinSigma, SignsAndTurningCoincidence) {
  EXPECT_NEAR(sin_sigma_of_omega(M_PI_4, 0.5, 0.0), 1.0, 1e-12);
  // sphere case E = 0, H > 0: sin sigma > 0 on the admissible range
  for (double w : {0.2, 0.5, std::atan(1.0) - 0.05}) {
    EXPECT_GT(sin_sigma_of_omega(w, 0.0, 1.0), 0.0);
  }
  // E < 0, H < -E: sin sigma < 0
  EXPECT_LT(sin_sigma_of_omega(0.8, -0.3, 0.1), 0.0);
  EXPECT_THROW(sin_sigma_of_omega(0.05, 0.5, 0.0), std::domain_error);
}

// Substituting the first integral into the sigma equation must reproduce the
// polynomial form at every admissible state.
TEST(SigmaDotReduced, AgreesWithTheFullSystem) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> wdist(0.05, M_PI_2 - 0.05);
  std::uniform_real_distribution<double> sdist(0.0, 2 * M_PI);
  std::uniform_real_distribution<double> hdist(0.0, 3.0);
  int checked = 0;
  while (checked < 1000) {
    const double w = wdist(rng), s = sdist(rng), H = hdist(rng);
    double E;
    try {
      E = profile_energy(w, s, H);
    } catch (const std::domain_error&) {
      continue;
    }
    const double sw = std::sin(w);
    const double K = E + H * sw * sw;
    if (sw * sw - K * K < 1e-4) continue;  // too close to the turning set
    const double expected = profile_rhs({w, 0.0, s}, H)[2];
    const double reduced = sigma_dot_reduced(w, E, H);
    // the reduced form carries the sign of the trajectory with sin(sigma)
    // from the first integral; compare against the matching branch
    const double sin_branch = sin_sigma_of_omega(w, E, H);
    if (std::abs(sin_branch - std::sin(s)) > 1e-7) continue;  // other branch of sigma
    EXPECT_NEAR(reduced, expected, 1e-9 * std::max(1.0, std::abs(expected)));
    ++checked;
  }
}

TEST(SigmaDotReduced, SignPatterns) {
  // unduloid E = 0.45, H = 0: p(x) = E(x^2 - E^2) changes sign at x = E
  const double E = 0.45;
  const auto bounds = omega_bounds(E, 0.0);
  ASSERT_TRUE(bounds.has_value());
  const double w_lo = bounds->first + 1e-3, w_hi = bounds->second - 1e-3;
  EXPECT_LT(sigma_dot_reduced(w_lo, E, 0.0), 0.0);
  EXPECT_GT(sigma_dot_reduced(w_hi, E, 0.0), 0.0);
  // petal: sigma' > 0 away from the pole
  for (double H : {0.5, 1.5}) {
    const auto pb = omega_bounds(-H, H);
    for (double f : {0.15, 0.5, 0.85}) {
      const double w = pb->first + f * (pb->second - pb->first - 1e-3);
      EXPECT_GT(sigma_dot_reduced(w, -H, H), 0.0);
    }
  }
}

TEST(Integrate, CliffordEquilibriumStaysPut) {
  const ProfileSolution sol = integrate_profile({M_PI_4, 0.0, M_PI_2}, 0.0, 50.0);
  ASSERT_GT(sol.nodes.size(), 10u);
  EXPECT_GT(sol.length(), 49.9);
  for (const auto& node : sol.nodes) EXPECT_NEAR(node.y.omega, M_PI_4, 1e-9);
  EXPECT_LT(sol.energy_drift_max, 1e-12);
}

TEST(Integrate, MeridianThroughThePole) {
  const ProfileSolution sol = integrate_profile({0.3, 1.0, 0.0}, 0.0, 2.0);
  // tau constant and omega linear until the pole jump
  bool saw_pole = false;
  for (const auto& node : sol.nodes) {
    if (!saw_pole && node.y.sigma < 0.5) {
      EXPECT_NEAR(node.y.tau, 1.0, 1e-9);
      EXPECT_NEAR(node.y.omega, 0.3 + node.s, 1e-9);
    }
    if (node.y.sigma > 2.0) saw_pole = true;  // sigma jumped to ~pi
  }
  ASSERT_TRUE(saw_pole);
  // after the pole: tau shifted by pi, omega descending
  const ProfileState last = sol.nodes.back().y;
  EXPECT_NEAR(last.tau, 1.0 + M_PI, 1e-7);
  EXPECT_LT(last.omega, M_PI_2);
}

TEST(Integrate, SphereProfileMeetsAxisOrthogonally) {
  const ProfileSolution sol = integrate_profile({std::atan(1.0), 0.0, M_PI_2}, 1.0, 10.0);
  ASSERT_FALSE(sol.events.empty());
  bool axis = false;
  for (const auto& ev : sol.events) {
    if (ev.kind == ProfileEvent::axis_contact) {
      axis = true;
      EXPECT_LT(std::abs(std::sin(ev.state.sigma)), 1e-4);
      EXPECT_LT(ev.state.omega, 2e-6);
    }
  }
  EXPECT_TRUE(axis);
  EXPECT_LT(sol.energy_drift_max, 1e-10);
}

TEST(Integrate, EnergyConservationAndCotaOnRandomTrajectories) {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> wdist(0.15, 1.4);
  std::uniform_real_distribution<double> sdist(0.0, 2 * M_PI);
  std::uniform_real_distribution<double> hdist(-2.0, 2.0);
  ProfileOptions opts;
  opts.tol = 1e-11;  // band overshoot at turning contacts scales with tol
  for (int trial = 0; trial < 20; ++trial) {
    const ProfileState init{wdist(rng), 0.0, sdist(rng)};
    const double H = hdist(rng);
    const ProfileSolution sol = integrate_profile(init, H, 20.0, opts);
    EXPECT_LT(sol.energy_drift_max, 1e-8);
    EXPECT_LT(sol.cota_violation_max, 1e-10);
  }
}

TEST(Integrate, TurningEventsAndMirrorSymmetry) {
  const double E = 0.45, H = 0.0;
  const auto bounds = omega_bounds(E, H);
  const ProfileState init{bounds->first + 1e-9, 0.0, M_PI_2};
  ProfileOptions opts;
  opts.max_step = 0.01;
  const ProfileSolution sol = integrate_profile(init, H, 6.0, opts);
  ASSERT_FALSE(sol.events.empty());
  const auto turning =
      std::find_if(sol.events.begin(), sol.events.end(),
                   [](const ProfileEventRecord& e) { return e.kind == ProfileEvent::turning; });
  ASSERT_NE(turning, sol.events.end());
  EXPECT_NEAR(std::cos(turning->state.sigma), 0.0, 1e-7);
  // equality in the band inequality at the turning point
  const double sw = std::sin(turning->state.omega), cw = std::cos(turning->state.omega);
  EXPECT_NEAR(sw * cw, std::abs(sol.E + sol.H * sw * sw), 1e-7);
  // reflection symmetry of omega across the turning meridian
  for (double d : {0.1, 0.3, 0.7}) {
    if (turning->s + d > sol.length() || turning->s - d < 0) continue;
    EXPECT_NEAR(sol.at(turning->s + d).omega, sol.at(turning->s - d).omega, 1e-6);
    EXPECT_NEAR(sol.at(turning->s + d).tau - turning->state.tau,
                turning->state.tau - sol.at(turning->s - d).tau, 1e-6);
  }
}

TEST(Symmetries, TauTranslationAndReversal) {
  const ProfileState init{0.6, 0.4, 1.1};
  const double H = 0.7;
  ProfileOptions opts;
  opts.max_step = 0.01;  // dense nodes keep the Hermite evaluation tight
  const ProfileSolution a = integrate_profile(init, H, 3.0, opts);
  const ProfileSolution b = integrate_profile({0.6, 0.4 + 1.23, 1.1}, H, 3.0, opts);
  for (double s : {0.5, 1.5, 2.5}) {
    EXPECT_NEAR(a.at(s).omega, b.at(s).omega, 1e-6);
    EXPECT_NEAR(a.at(s).sigma, b.at(s).sigma, 1e-6);
    EXPECT_NEAR(a.at(s).tau + 1.23, b.at(s).tau, 1e-6);
  }
  // (w(s0-s), tau(s0-s), pi + sigma(s0-s)) solves (*)_{-H}: check the vector
  // field identity rhs_{-H}(T(y)) = T'(rhs_H(y)) at sampled states.
  for (double s : {0.2, 1.0, 2.2}) {
    const ProfileState y = a.at(s);
    const auto f = profile_rhs(y, H);
    const auto g = profile_rhs({y.omega, y.tau, M_PI + y.sigma}, -H);
    EXPECT_NEAR(g[0], -f[0], 1e-9);
    EXPECT_NEAR(g[1], -f[1], 1e-9);
    EXPECT_NEAR(g[2], -f[2], 1e-9);
  }
}

// d^2 omega / d tau^2: the chart formula and the first-integral reduction must
// agree with finite differences of the integrated graph.
TEST(GraphCurvature, AgainstFiniteDifferences) {
  const double E = 0.45, H = 0.0;
  const auto bounds = omega_bounds(E, H);
  const ProfileState init{bounds->first + 1e-8, 0.0, M_PI_2};
  ProfileOptions opts;
  opts.max_step = 0.005;
  const ProfileSolution sol = integrate_profile(init, H, 2.0, opts);
  // sample states strictly inside a graph piece
  int checked = 0;
  for (double s : {0.3, 0.6, 0.9}) {
    const ProfileState st = sol.at(s);
    if (std::abs(std::sin(st.sigma)) < 0.3) continue;
    const double slope = omega_graph_slope(st);
    const double curv = omega_graph_curvature(st, H);
    const double curv_reduced = omega_graph_curvature_reduced(st.omega, E, H);
    EXPECT_NEAR(curv, curv_reduced, 1e-6 * std::max(1.0, std::abs(curv)));
    // finite differences over the integrated graph omega(tau)
    const double ds = 5e-3;
    const ProfileState before = sol.at(s - ds), after = sol.at(s + ds);
    const double slope_fd = (after.omega - before.omega) / (after.tau - before.tau);
    EXPECT_NEAR(slope, slope_fd, 1e-3 * std::max(1.0, std::abs(slope)));
    const double mid_fd =
        ((after.omega - st.omega) / (after.tau - st.tau) -
         (st.omega - before.omega) / (st.tau - before.tau)) /
        (0.5 * (after.tau - before.tau));
    EXPECT_NEAR(curv, mid_fd, 1e-4 * std::max(1.0, std::abs(curv)));
    ++checked;
  }
  EXPECT_GE(checked, 2);
}

TEST(Classify, CaseTable) {
  EXPECT_EQ(classify_profile(0.0, 0.0).kind, DelaunayKind::meridian_two_sphere);
  EXPECT_EQ(classify_profile(0.5, 0.0).kind, DelaunayKind::clifford_torus);
  EXPECT_EQ(classify_profile(0.0, 1.0).kind, DelaunayKind::sphere_sh);
  EXPECT_EQ(classify_profile(0.3, 0.0).kind, DelaunayKind::unduloid);
  ASSERT_TRUE(classify_profile(0.3, 0.0).period.has_value());
  EXPECT_NEAR(*classify_profile(0.3, 0.0).period, M_PI, 1e-14);

  const DelaunayClass petal = classify_profile(-1.0, 1.0);
  EXPECT_EQ(petal.kind, DelaunayKind::petal);
  EXPECT_FALSE(petal.compact);  // 1/sqrt(2) irrational

  const DelaunayClass nodoid = classify_profile(-0.3, 1.0);
  EXPECT_EQ(nodoid.kind, DelaunayKind::nodoid);
  // negative-energy unduloids exist for H < -E < (H + sqrt(1+H^2))/2
  const DelaunayClass und_neg = classify_profile(-1.1, 1.0);
  EXPECT_EQ(und_neg.kind, DelaunayKind::unduloid);

  // degenerate Clifford branch for H > 0
  const double H = 1.0;
  const double Ec = 0.5 * (std::sqrt(2.0) - 1.0);
  EXPECT_EQ(classify_profile(Ec, H).kind, DelaunayKind::clifford_torus);

  // H < 0 normalization via (E, H) -> (-E, -H)
  EXPECT_EQ(classify_profile(0.3, -1.0).kind, classify_profile(-0.3, 1.0).kind);
  EXPECT_THROW(classify_profile(0.9, 0.0), std::domain_error);

  // compact iff H/sqrt(1+H^2) rational: H = 1/sqrt(3) gives ratio 1/2
  EXPECT_TRUE(classify_profile(0.2, 1.0 / std::sqrt(3.0)).compact);
  EXPECT_FALSE(classify_profile(0.2, 1.0).compact);
}

TEST(Periods, ClosedFormsAndLimits) {
  const ClosedFormPeriods p0 = closed_form_periods(0.0);
  EXPECT_NEAR(p0.unduloid, M_PI, 1e-15);
  EXPECT_NEAR(p0.nodoid_half, M_PI_2, 1e-15);
  EXPECT_NEAR(p0.petal_tau0, 0.0, 1e-15);
  EXPECT_NEAR(closed_form_periods(1.0 / std::sqrt(3.0)).unduloid, M_PI_2, 1e-14);
  double prev = closed_form_periods(0.0).unduloid;
  for (double H : {0.5, 1.0, 2.0, 5.0, 20.0}) {
    const double T = closed_form_periods(H).unduloid;
    EXPECT_LT(T, prev);
    EXPECT_GT(T, 0.0);
    prev = T;
  }
}

TEST(Periods, QuadratureMatchesClosedForms) {
  for (double H : {0.0, 1.0 / std::sqrt(3.0), 1.0, 3.0}) {
    const double m = std::sqrt(1 + H * H);
    const double e_max = 0.5 * (m - H);
    for (double f : {0.35, 0.8}) {
      const double E = f * e_max;
      EXPECT_NEAR(period_by_quadrature(E, H), (1.0 - H / m) * M_PI, 1e-6)
          << "H=" << H << " E=" << E;
    }
  }
  // nodoid half-advance
  for (double H : {1.0, 2.0}) {
    const double m = std::sqrt(1 + H * H);
    const double E = -0.3;
    EXPECT_NEAR(std::abs(tau_half_by_quadrature(E, H)), 0.5 * M_PI * (1.0 - H / m), 1e-6);
  }
  // negative-energy unduloid branch
  {
    const double H = 1.0, E = -1.1;
    const double m = std::sqrt(1 + H * H);
    EXPECT_NEAR(period_by_quadrature(E, H), (1.0 + H / m) * M_PI, 1e-6);
  }
  EXPECT_THROW(period_by_quadrature(0.0, 1.0), std::invalid_argument);
}

TEST(Periods, PetalAxisOffsetByIntegration) {
  for (double H : {1.0 / std::sqrt(3.0), 1.0, 3.0}) {
    const double expected = -0.5 * M_PI * H / std::sqrt(1 + H * H);
    EXPECT_NEAR(petal_tau0_by_integration(H), expected, 1e-6) << "H=" << H;
  }
}

TEST(Revolve, CliffordEquilibriumGivesTheTorus) {
  const ProfileSolution sol = integrate_profile({M_PI_4, 0.0, M_PI_2}, 0.0, 2 * M_PI);
  const ParamPatch patch = revolve(sol, 64);
  for (const Vec4& p : patch.grid) {
    EXPECT_NEAR(std::hypot(p[0], p[1]), std::sqrt(0.5), 1e-9);
  }
  for (std::size_t i = 2; i < patch.nu; i += 13)
    for (std::size_t j = 8; j + 8 < patch.nv; j += 11)
      EXPECT_NEAR(mean_curvature_estimate(patch, i, j).H, 0.0, 1e-3);
}

TEST(Revolve, MeridianGivesTotallyGeodesicSphere) {
  ProfileOptions opts;
  const ProfileSolution sol = integrate_profile({0.05, 0.8, 0.0}, 0.0, 1.4, opts);
  const ParamPatch patch = revolve(sol, 48);
  // the revolved meridian lies on the totally geodesic 2-sphere
  // {sin(0.8) x1 = cos(0.8) y1}
  for (const Vec4& p : patch.grid)
    EXPECT_NEAR(std::sin(0.8) * p[0] - std::cos(0.8) * p[1], 0.0, 1e-9);
}

// The E = 0, H = 1 profile is congruent to the spherical surface S_1 up to a
// tau translation; compare pointwise through the closed-form parameterization.
TEST(Revolve, SphereProfileMatchesSpherePatch) {
  const double H = 1.0;
  const double m = std::sqrt(1 + H * H);
  ProfileOptions opts;
  opts.tol = 1e-11;
  const ProfileSolution sol = integrate_profile({std::atan(1.0 / H), 0.0, M_PI_2}, H, 10.0, opts);

  // sphere-side profile: x1(s), y1(s) from the closed form; omega max at
  // s* = pi/(2m) where sin(m s*) = 1
  const GeodesicSpec ray = geodesic_from_angle(Vec4(1, 0, 0, 0), 0.0, H);
  const double s_star = M_PI / (2 * m);
  const Vec4 at_max = geodesic_point(ray, s_star);
  const double delta = std::atan2(at_max[1], at_max[0]);  // tau shift

  double worst = 0.0;
  for (double s = 0.0; s <= sol.length(); s += 0.05) {
    const ProfileState st = sol.at(s);
    if (st.omega < 0.02) continue;  // pole rows carry no tau information
    // arc parameter of the sphere profile with the same omega, descending leg
    const double arc = (M_PI - std::asin(std::min(1.0, m * std::sin(st.omega)))) / m;
    const Vec4 g = geodesic_point(ray, arc);
    const Vec4 profile_pt(std::cos(st.omega) * std::cos(st.tau + delta),
                          std::cos(st.omega) * std::sin(st.tau + delta),
                          std::sin(st.omega), 0.0);
    const Vec4 sphere_pt(g[0], g[1], std::hypot(g[2], g[3]), 0.0);
    worst = std::max(worst, (profile_pt - sphere_pt).norm());
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Revolve, EstimatorRecoversH) {
  const double H = 1.0;
  ProfileOptions opts;
  const ProfileSolution sol = integrate_profile({std::atan(1.0 / H), 0.0, M_PI_2}, H, 10.0, opts);
  const ParamPatch patch = revolve(sol, 96);
  int checked = 0;
  for (std::size_t i = 2; i < patch.nu; i += 17) {
    for (std::size_t j = 6; j + 6 < patch.nv; j += 9) {
      const SurfaceFrame f = frame_at_patch(patch, i, j);
      if (f.singular || f.ill_conditioned) continue;
      EXPECT_NEAR(mean_curvature_estimate(patch, i, j).H, H, 1e-3);
      ++checked;
    }
  }
  EXPECT_GT(checked, 10);
}
