#include <gtest/gtest.h>

#include "s3/geodesic.hpp"
#include "test_util.hpp"

using namespace s3;
using s3::testing::random_horizontal;
using s3::testing::random_unit4;

namespace {

GeodesicSpec random_spec(std::mt19937& rng, double lambda) {
  const Vec4 p = random_unit4(rng);
  return {p, random_horizontal(rng, p), lambda};
}

}  // namespace

TEST(GeodesicPoint, GreatCircleAndStart) {
  std::mt19937 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const GeodesicSpec spec = random_spec(rng, 0.0);
    EXPECT_LT((geodesic_point(spec, 0.0) - spec.p).norm(), 1e-14);
    for (double s : {0.3, 1.0, 2.9}) {
      const Vec4 expected = std::cos(s) * spec.p + std::sin(s) * spec.v;
      EXPECT_LT((geodesic_point(spec, s) - expected).norm(), 1e-13);
      EXPECT_NEAR(geodesic_point(spec, s).norm(), 1.0, 1e-12);
    }
  }
}

// gamma_theta(pi/sqrt(1+l^2)) = -cos(l pi / m) p + sin(l pi / m) V(p): the far
// pole does not depend on the initial horizontal direction.
TEST(GeodesicPoint, FarPoleIndependentOfDirection) {
  const Vec4 p(1, 0, 0, 0);
  for (double lambda : {0.0, 0.7, -1.3, 3.0}) {
    const double m = std::sqrt(1.0 + lambda * lambda);
    const Vec4 pole = -std::cos(lambda * M_PI / m) * p + std::sin(lambda * M_PI / m) * vertical_at(p);
    for (double theta : {0.0, 1.1, 2.2, 4.4}) {
      const GeodesicSpec spec = geodesic_from_angle(p, theta, lambda);
      EXPECT_LT((geodesic_point(spec, M_PI / m) - pole).norm(), 1e-12);
    }
  }
}

TEST(GeodesicVelocity, GreatCircleForm) {
  std::mt19937 rng(211);
  const GeodesicSpec spec = random_spec(rng, 0.0);
  for (double s : {0.2, 1.1, 2.8}) {
    const Vec4 expected = -std::sin(s) * spec.p + std::cos(s) * spec.v;
    EXPECT_LT((geodesic_velocity(spec, s).v - expected).norm(), 1e-13);
  }
}

TEST(GeodesicVelocity, MatchesFiniteDifferences) {
  std::mt19937 rng(103);
  const double h = 1e-5;
  for (double lambda : {0.0, 0.5, -1.7, 2.2}) {
    const GeodesicSpec spec = random_spec(rng, lambda);
    EXPECT_LT((geodesic_velocity(spec, 0.0).v - spec.v).norm(), 1e-13);
    for (double s : {0.2, 0.9, 2.5}) {
      const Vec4 fd = (geodesic_point(spec, s + h) - geodesic_point(spec, s - h)) / (2 * h);
      EXPECT_LT((geodesic_velocity(spec, s).v - fd).norm(), 1e-8);
      const Vec4 fd2 = (geodesic_velocity(spec, s + h).v - geodesic_velocity(spec, s - h).v) / (2 * h);
      EXPECT_LT((geodesic_accel(spec, s) - fd2).norm(), 1e-8);
    }
  }
}

TEST(GeodesicVelocity, UnitAndHorizontal) {
  std::mt19937 rng(107);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_real_distribution<double> lam(-3.0, 3.0), arc(-8.0, 8.0);
    const GeodesicSpec spec = random_spec(rng, lam(rng));
    const double s = arc(rng);
    const TangentVector vel = geodesic_velocity(spec, s);
    EXPECT_NEAR(vel.v.norm(), 1.0, 1e-10);
    EXPECT_NEAR(vel.v.dot(vertical_at(vel.base)), 0.0, 1e-10);
  }
}

TEST(GeodesicResidual, ClosedFormSatisfiesTheEquation) {
  std::mt19937 rng(109);
  EXPECT_LT(geodesic_ode_residual(random_spec(rng, 0.0), 1.3), 1e-12);
  EXPECT_LT(geodesic_ode_residual(random_spec(rng, 1.0), 0.3), 1e-9);
  EXPECT_LT(geodesic_ode_residual(random_spec(rng, -2.5), 1.1), 1e-9);
}

// <g'', J(g')> = -2 lambda, both analytically and by finite differences.
TEST(GeodesicResidual, SecondDerivativePairing) {
  std::mt19937 rng(113);
  std::uniform_real_distribution<double> lam(-3.0, 3.0), arc(-6.0, 6.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double lambda = lam(rng);
    const GeodesicSpec spec = random_spec(rng, lambda);
    const double s = arc(rng);
    const TangentVector vel = geodesic_velocity(spec, s);
    const Vec4 acc = geodesic_accel(spec, s);
    EXPECT_NEAR(acc.dot(apply_J(vel).v), -2.0 * lambda, 1e-8);
    const double h = 1e-5;
    const Vec4 acc_fd =
        (geodesic_point(spec, s + h) - 2 * geodesic_point(spec, s) + geodesic_point(spec, s - h)) /
        (h * h);
    EXPECT_NEAR(acc_fd.dot(apply_J(vel).v), -2.0 * lambda, 1e-5);
  }
}

TEST(GeodesicResidual, ReversedCurveHasOppositeCurvature) {
  std::mt19937 rng(127);
  const double lambda = 0.9;
  const GeodesicSpec spec = random_spec(rng, lambda);
  for (double s : {0.4, 1.7}) {
    // r(t) = g(-t) solves r'' + r + 2(-lambda)(i r') = 0.
    const Vec4 r = geodesic_point(spec, -s);
    const Vec4 dr = -geodesic_velocity(spec, -s).v;
    const Vec4 ddr = geodesic_accel(spec, -s);
    EXPECT_LT((ddr + r + 2.0 * (-lambda) * quat_mul(Vec4(0, 1, 0, 0), dr)).norm(), 1e-9);
  }
}

TEST(GeodesicEquivariance, RightTranslation) {
  std::mt19937 rng(131);
  for (int trial = 0; trial < 20; ++trial) {
    const GeodesicSpec spec = random_spec(rng, 1.4);
    const Vec4 q = random_unit4(rng);
    const GeodesicSpec moved{quat_mul(spec.p, q), quat_mul(spec.v, q), spec.lambda};
    for (double s : {0.5, 2.0}) {
      EXPECT_LT((quat_mul(geodesic_point(spec, s), q) - geodesic_point(moved, s)).norm(), 1e-10);
    }
  }
}

TEST(Classification, ClosedAndDenseCases) {
  const GeodesicClass zero = classify_geodesic(0.0);
  EXPECT_EQ(zero.kind, OrbitKind::closed);
  EXPECT_NEAR(zero.ratio, 0.0, 1e-15);
  EXPECT_NEAR(zero.rho, std::sqrt(0.5), 1e-15);
  ASSERT_TRUE(zero.period.has_value());
  EXPECT_NEAR(*zero.period, 2.0 * M_PI, 1e-9);
  EXPECT_NEAR(zero.slope, -1.0, 1e-15);

  const GeodesicClass third = classify_geodesic(1.0 / std::sqrt(3.0));
  EXPECT_EQ(third.kind, OrbitKind::closed);
  EXPECT_NEAR(third.ratio, 0.5, 1e-14);
  ASSERT_TRUE(third.approx.has_value());
  EXPECT_EQ(third.approx->num, 1);
  EXPECT_EQ(third.approx->den, 2);

  const GeodesicClass one = classify_geodesic(1.0);
  EXPECT_EQ(one.kind, OrbitKind::dense);
  EXPECT_NEAR(one.ratio, 1.0 / std::sqrt(2.0), 1e-14);
  EXPECT_FALSE(one.period.has_value());

  EXPECT_THROW(classify_geodesic(std::numeric_limits<double>::quiet_NaN()),
               std::invalid_argument);
}

namespace {

// Brute-force closure oracle: scan |g(s)-g(0)| + |g'(s)-g'(0)| with a small
// step, then refine the first zero by golden-section on the gap.
double brute_force_period(double lambda) {
  const GeodesicSpec spec = geodesic_from_angle(Vec4(1, 0, 0, 0), 0.0, lambda);
  const Vec4 v0 = geodesic_velocity(spec, 0.0).v;
  auto gap = [&](double s) {
    return (geodesic_point(spec, s) - spec.p).norm() + (geodesic_velocity(spec, s).v - v0).norm();
  };
  const double step = 1e-4;
  for (double s = 0.5; s < 600.0; s += step) {
    if (gap(s) < 5e-4) {
      double lo = s - 2 * step, hi = s + 2 * step;
      for (int it = 0; it < 200; ++it) {
        const double m1 = lo + 0.382 * (hi - lo), m2 = lo + 0.618 * (hi - lo);
        (gap(m1) < gap(m2) ? hi : lo) = (gap(m1) < gap(m2)) ? m2 : m1;
      }
      return 0.5 * (lo + hi);
    }
  }
  return -1.0;
}

}  // namespace

TEST(Classification, PeriodAgainstBruteForce) {
  const double lambda = 1.0 / std::sqrt(3.0);
  const double fast = geodesic_period(lambda);
  const double brute = brute_force_period(lambda);
  ASSERT_GT(brute, 0.0);
  EXPECT_NEAR(fast, brute, 1e-6);
  EXPECT_NEAR(fast, 2.0 * M_PI * std::sqrt(3.0), 1e-9);  // 2 pi sqrt(q^2-p^2)/gcd for 1/2
  EXPECT_NEAR(geodesic_period(0.0), 2.0 * M_PI, 1e-12);
  EXPECT_THROW(geodesic_period(std::sqrt(3.0)), std::domain_error);
}

TEST(TorusCurvature, ValuesAndInverse) {
  EXPECT_NEAR(torus_curvature(std::sqrt(0.5)), 0.0, 1e-14);
  EXPECT_NEAR(torus_curvature(0.8), 0.28 / 0.96, 1e-14);
  for (double rho : {0.3, 0.5, 0.77, 0.9}) {
    EXPECT_NEAR(classify_geodesic(torus_curvature(rho)).rho, rho, 1e-12);
  }
  EXPECT_THROW(torus_curvature(0.0), std::invalid_argument);
  EXPECT_THROW(torus_curvature(1.0), std::invalid_argument);
}

// The geodesic launched tangent to T_rho with the torus curvature stays on
// |z1| = rho for all arc length.
TEST(TorusConfinement, StaysOnTheTorus) {
  for (double rho : {0.3, 0.5, std::sqrt(0.5), 0.9}) {
    const GeodesicSpec spec = torus_geodesic(rho, 0.13, 0.71);
    for (int k = 0; k <= 2000; ++k) {
      const double s = 100.0 * k / 2000.0;
      const Vec4 g = geodesic_point(spec, s);
      EXPECT_NEAR(std::hypot(g[0], g[1]), rho, 1e-12);
    }
  }
}

// On the flat chart (x, y) -> (rho e^{2 pi i x}, sqrt(1-rho^2) e^{2 pi i y})
// the confined geodesic is the straight line
// (x0 + (m - lambda) s / 2 pi, y0 - (m + lambda) s / 2 pi).
TEST(TorusConfinement, FlatChartLine) {
  const double rho = 0.7, x0 = 0.2, y0 = 0.3;
  const double r2 = std::sqrt(1.0 - rho * rho);
  const GeodesicSpec spec = torus_geodesic(rho, x0, y0);
  const double m = std::sqrt(1.0 + spec.lambda * spec.lambda);
  for (double s : {0.0, 0.4, 1.7, 6.3, 20.1}) {
    const double x = x0 + (m - spec.lambda) * s / (2 * M_PI);
    const double y = y0 - (m + spec.lambda) * s / (2 * M_PI);
    const Vec4 chart(rho * std::cos(2 * M_PI * x), rho * std::sin(2 * M_PI * x),
                     r2 * std::cos(2 * M_PI * y), r2 * std::sin(2 * M_PI * y));
    EXPECT_LT((geodesic_point(spec, s) - chart).norm(), 1e-12) << "s=" << s;
  }
  // the classifier's reported slope is the slope of this chart line
  const GeodesicClass cls = classify_geodesic(spec.lambda);
  EXPECT_NEAR(cls.slope, -(m + spec.lambda) / (m - spec.lambda), 1e-12);
}

TEST(GeodesicSpecValidation, RejectsBadInputs) {
  const Vec4 p(1, 0, 0, 0);
  EXPECT_NO_THROW(validate(GeodesicSpec{p, e1_at(p), 0.5}));
  EXPECT_THROW(validate(GeodesicSpec{p, (2.0 * e1_at(p)).eval(), 0.5}), std::invalid_argument);
  EXPECT_THROW(validate(GeodesicSpec{p, vertical_at(p), 0.5}), std::invalid_argument);
  EXPECT_THROW(validate(GeodesicSpec{(2.0 * p).eval(), e1_at(p), 0.5}), std::invalid_argument);
  EXPECT_THROW(validate(GeodesicSpec{p, e1_at(p), std::nan("")}), std::invalid_argument);
}

TEST(Jacobi, RotationalFamilyComponents) {
  const Vec4 p(1, 0, 0, 0);
  for (double lambda : {0.0, 1.0, -1.5}) {
    const double m2 = 1.0 + lambda * lambda;
    auto family = [&](double eps) { return geodesic_from_angle(p, 0.9 + eps, lambda); };
    for (double s : {0.1, 0.5, 1.2}) {
      const JacobiSample sample = jacobi_field(family, s);
      const double expected_v = std::sin(std::sqrt(m2) * s) * std::sin(std::sqrt(m2) * s) / m2;
      EXPECT_NEAR(sample.vertical, expected_v, 1e-6);
      EXPECT_NEAR(sample.along, -lambda * expected_v, 1e-6);
      EXPECT_NEAR(sample.conserved, 0.0, 1e-6);
    }
  }
}

TEST(Jacobi, ConstantFamilyAndCurvatureMismatch) {
  std::mt19937 rng(137);
  const GeodesicSpec spec = random_spec(rng, 0.8);
  auto constant = [&](double) { return spec; };
  EXPECT_LT(jacobi_field(constant, 1.0).X.v.norm(), 1e-9);
  auto bad = [&](double eps) {
    GeodesicSpec s2 = spec;
    s2.lambda += eps;
    return s2;
  };
  EXPECT_THROW(jacobi_field(bad, 1.0), std::invalid_argument);
}

// lambda <X, V> + <X, g'> is a first integral of the variation flow for any
// admissible family, not just the rotational one.
TEST(Jacobi, ConservedCombination) {
  const Vec4 p(1, 0, 0, 0);
  const double lambda = 0.6;
  auto family = [&](double eps) {
    // rotate the launch point along a horizontal circle and the direction with it
    const Vec4 base = geodesic_point(geodesic_from_angle(p, 0.4, 0.0), eps);
    return geodesic_from_angle(base, 1.1, lambda);
  };
  const JacobiSample first = jacobi_field(family, 0.05);
  for (double s : {0.3, 0.8, 1.6, 2.4}) {
    const JacobiSample sample = jacobi_field(family, s);
    EXPECT_NEAR(sample.conserved, first.conserved, 1e-6);
  }
}

namespace {

// Jacobi equation residual |D^2 X + R(X, g') g' + 2 lambda (J(DX) - <X,g'> V)|
// along a geodesic, with the constant-curvature tensor
// R(X, Y) Z = <Y, Z> X - <X, Z> Y.  The field and its flat derivatives are
// supplied analytically; covariant derivatives are tangential projections.
double jacobi_ode_residual(const GeodesicSpec& spec, double s, const Vec4& X, const Vec4& dX,
                           const Vec4& ddX) {
  const Vec4 g = geodesic_point(spec, s);
  const Vec4 dg = geodesic_velocity(spec, s).v;
  const Vec4 DX = dX - dX.dot(g) * g;
  // d/ds of DX = ddX - (<ddX,g> + <dX,dg>) g - <dX,g> dg, projected again
  Vec4 dDX = ddX - (ddX.dot(g) + dX.dot(dg)) * g - dX.dot(g) * dg;
  const Vec4 DDX = dDX - dDX.dot(g) * g;
  const Vec4 curvature_term = X - X.dot(dg) * dg;  // R(X, g') g' with |g'| = 1
  const TangentVector jdx{g, DX};
  const Vec4 vert = vertical_at(g);
  return (DDX + curvature_term + 2.0 * spec.lambda * (apply_J(jdx).v - X.dot(dg) * vert))
      .norm();
}

}  // namespace

// Variation fields of isometry families satisfy the Jacobi equation; both the
// right-translation and the rotation generators give analytic fields.
TEST(Jacobi, OdeResidualForIsometryFields) {
  std::mt19937 rng(151);
  std::normal_distribution<double> gauss;
  for (double lambda : {0.0, 0.8, -1.9}) {
    const GeodesicSpec spec = random_spec(rng, lambda);
    // right translation by exp(eps w): X(s) = g(s) * w, w imaginary
    Vec4 w(0.0, gauss(rng), gauss(rng), gauss(rng));
    w.normalize();
    for (double s : {0.3, 1.4, 3.1}) {
      const Vec4 g = geodesic_point(spec, s);
      const Vec4 dg = geodesic_velocity(spec, s).v;
      const Vec4 ddg = geodesic_accel(spec, s);
      const Vec4 X = quat_mul(g, w) - quat_mul(g, w).dot(g) * g;
      // X is already tangent: <g w, g> = Re(w) = 0
      EXPECT_LT(std::abs(quat_mul(g, w).dot(g)), 1e-13);
      EXPECT_LT(jacobi_ode_residual(spec, s, X, quat_mul(dg, w), quat_mul(ddg, w)), 1e-9);
    }
    // rotation family r_theta: X(s) = (0, 0, -y2, x2)
    for (double s : {0.5, 2.2}) {
      const Vec4 g = geodesic_point(spec, s);
      const Vec4 dg = geodesic_velocity(spec, s).v;
      const Vec4 ddg = geodesic_accel(spec, s);
      const Vec4 X(0, 0, -g[3], g[2]);
      const Vec4 dX(0, 0, -dg[3], dg[2]);
      const Vec4 ddX(0, 0, -ddg[3], ddg[2]);
      EXPECT_LT(jacobi_ode_residual(spec, s, X, dX, ddX), 1e-9);
    }
  }
}

TEST(HopfFit, PlanarityAndCurvature) {
  const Vec4 p(1, 0, 0, 0);
  for (double lambda : {-2.0, -0.7, 0.0, 0.5, 3.0}) {
    const HopfFit fit = hopf_circle_fit(geodesic_from_angle(p, 0.0, lambda));
    EXPECT_LT(fit.planarity, 1e-8);
    EXPECT_NEAR(fit.curvature, lambda, 1e-6);
  }
  // binormal direction for lambda = 1, theta = 0: (lambda, cos 0, sin 0)/sqrt(1+l^2)
  const HopfFit fit = hopf_circle_fit(geodesic_from_angle(p, 0.0, 1.0));
  const Vec3 expected = Vec3(1.0, 1.0, 0.0).normalized();
  EXPECT_LT((fit.normal - expected).norm(), 1e-8);

  std::mt19937 rng(139);
  const HopfFit generic = hopf_circle_fit(random_spec(rng, -0.7));
  EXPECT_NEAR(generic.curvature, -0.7, 1e-6);

  // an extreme curvature shrinks the circle below fit conditioning
  const HopfFit tiny = hopf_circle_fit(geodesic_from_angle(p, 0.0, 1e8));
  EXPECT_TRUE(tiny.degenerate);
}

// Statistical density probe: a curvature-1 geodesic on its Clifford torus
// approaches random torus points (light version of the full acceptance run).
TEST(Density, OrbitApproachesTorusPoints) {
  const double ratio = 1.0 / std::sqrt(2.0);
  const double rho = std::sqrt(0.5 * (1 + ratio));
  const GeodesicSpec spec = torus_geodesic(rho, 0.0, 0.0);
  std::mt19937 rng(149);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r2 = std::sqrt(1.0 - rho * rho);
  int hits = 0;
  const int targets = 20;
  for (int t = 0; t < targets; ++t) {
    const double a = 2 * M_PI * unit(rng), b = 2 * M_PI * unit(rng);
    const Vec4 target(rho * std::cos(a), rho * std::sin(a), r2 * std::cos(b), r2 * std::sin(b));
    double best = 1e9;
    for (double s = 0.0; s < 1500.0; s += 0.01) {
      best = std::min(best, (geodesic_point(spec, s) - target).norm());
      if (best < 0.08) break;
    }
    if (best < 0.08) ++hits;
  }
  EXPECT_EQ(hits, targets);
}
