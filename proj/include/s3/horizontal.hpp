#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "s3/core.hpp"
#include "s3/geodesic.hpp"

// Arc-length horizontal curves used as directrices of ruled surfaces.  A curve
// carries callables for position, unit tangent and the function
// h = <Gamma'', J(Gamma')> together with its derivative; ruled-patch cut
// lengths and boundary tangents are computed from these.

namespace s3 {

struct HorizontalCurve {
  std::function<Vec4(double)> point;
  std::function<Vec4(double)> tangent;
  std::function<double(double)> h;        // <Gamma'', J(Gamma')>
  std::function<double(double)> h_prime;  // dh / d eps
};

/// A geodesic of curvature mu as a horizontal curve; h = -2 mu identically.
inline HorizontalCurve geodesic_directrix(const GeodesicSpec& spec) {
  validate(spec);
  const double mu = spec.lambda;
  return {[spec](double e) { return geodesic_point(spec, e); },
          [spec](double e) { return geodesic_velocity(spec, e).v; },
          [mu](double) { return -2.0 * mu; },
          [](double) { return 0.0; }};
}

/// Horizontal curve steered by an angle function phi: the tangent is
/// cos(phi) E1 + sin(phi) E2 along the curve, which makes the curve
/// automatically horizontal and arc-length with h = phi'.  Integrated once
/// with RK4 on a fine table and evaluated by cubic Hermite interpolation.
class SteeredCurve {
 public:
  SteeredCurve(Vec4 start, std::function<double(double)> phi, std::function<double(double)> phi_d,
               std::function<double(double)> phi_dd, double eps_min, double eps_max,
               double step = 1e-3)
      : phi_(std::move(phi)), phi_d_(std::move(phi_d)), phi_dd_(std::move(phi_dd)),
        eps0_(eps_min) {
    const auto rhs = [this](double e, const Vec4& g) {
      const double a = phi_(e);
      return (std::cos(a) * e1_at(g) + std::sin(a) * e2_at(g)).eval();
    };
    const std::size_t n = static_cast<std::size_t>(std::ceil((eps_max - eps_min) / step)) + 1;
    h_ = (eps_max - eps_min) / static_cast<double>(n - 1);
    table_.resize(n);
    table_[0] = renormalized(start);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double e = eps_min + k * h_;
      const Vec4& g = table_[k];
      const Vec4 k1 = rhs(e, g);
      const Vec4 k2 = rhs(e + 0.5 * h_, g + 0.5 * h_ * k1);
      const Vec4 k3 = rhs(e + 0.5 * h_, g + 0.5 * h_ * k2);
      const Vec4 k4 = rhs(e + h_, g + h_ * k3);
      table_[k + 1] = renormalized(g + (h_ / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
  }

  Vec4 point(double e) const {
    const double t = (e - eps0_) / h_;
    auto k = static_cast<std::ptrdiff_t>(std::floor(t));
    k = std::max<std::ptrdiff_t>(0, std::min<std::ptrdiff_t>(k, table_.size() - 2));
    const double x = t - k;
    const Vec4& p0 = table_[k];
    const Vec4& p1 = table_[k + 1];
    const Vec4 m0 = h_ * tangent_at(eps0_ + k * h_, p0);
    const Vec4 m1 = h_ * tangent_at(eps0_ + (k + 1) * h_, p1);
    const double x2 = x * x, x3 = x2 * x;
    Vec4 g = (2 * x3 - 3 * x2 + 1) * p0 + (x3 - 2 * x2 + x) * m0 + (-2 * x3 + 3 * x2) * p1 +
             (x3 - x2) * m1;
    return renormalized(g);
  }

  Vec4 tangent(double e) const { return tangent_at(e, point(e)); }

  HorizontalCurve as_curve() const {
    auto self = std::make_shared<SteeredCurve>(*this);
    return {[self](double e) { return self->point(e); },
            [self](double e) { return self->tangent(e); },
            [self](double e) { return self->phi_d_(e); },
            [self](double e) { return self->phi_dd_(e); }};
  }

 private:
  Vec4 tangent_at(double e, const Vec4& g) const {
    const double a = phi_(e);
    return std::cos(a) * e1_at(g) + std::sin(a) * e2_at(g);
  }

  std::function<double(double)> phi_, phi_d_, phi_dd_;
  double eps0_, h_ = 0.0;
  std::vector<Vec4> table_;
};

/// Sampled form: (Gamma, Gamma', h) on an eps grid, validated horizontal and
/// arc-length.
struct HorizontalCurveSample {
  std::vector<double> eps;
  std::vector<Vec4> point, tangent;
  std::vector<double> h, h_prime;
};

inline HorizontalCurveSample sample_curve(const HorizontalCurve& curve, double eps_min,
                                          double eps_max, std::size_t n, bool half_open = false,
                                          double tol = 1e-6) {
  if (n < 2) throw std::invalid_argument("sample_curve: need at least two samples");
  HorizontalCurveSample out;
  out.eps.resize(n);
  out.point.resize(n);
  out.tangent.resize(n);
  out.h.resize(n);
  out.h_prime.resize(n);
  const double denom = half_open ? static_cast<double>(n) : static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = eps_min + (eps_max - eps_min) * static_cast<double>(i) / denom;
    out.eps[i] = e;
    out.point[i] = curve.point(e);
    out.tangent[i] = curve.tangent(e);
    out.h[i] = curve.h(e);
    out.h_prime[i] = curve.h_prime(e);
    if (std::abs(out.tangent[i].norm() - 1.0) > tol ||
        std::abs(out.tangent[i].dot(vertical_at(out.point[i]))) > tol)
      throw std::invalid_argument("sample_curve: directrix not horizontal arc-length");
  }
  return out;
}

}  // namespace s3
