#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

namespace s3 {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Shared policy deciding when a floating-point ratio counts as rational.
/// A float is never exactly rational, so closure decisions are made against a
/// best rational approximation with bounded denominator.
struct RationalityPolicy {
  double tol = 1e-9;
  std::int64_t max_denominator = 64;
};

/// Best rational approximation of x with denominator <= max_den, via the
/// continued-fraction convergents of x.
inline Rational best_rational(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("best_rational: non-finite input");
  if (max_den < 1) throw std::invalid_argument("best_rational: max_den must be >= 1");

  const bool neg = x < 0;
  double y = std::abs(x);
  std::int64_t p_prev = 1, q_prev = 0;  // h_{-1}/k_{-1}
  std::int64_t p = static_cast<std::int64_t>(std::floor(y));
  std::int64_t q = 1;
  double frac = y - std::floor(y);

  Rational best{p, q};
  double best_err = std::abs(y - best.value());

  while (frac > 1e-15) {
    y = 1.0 / frac;
    const std::int64_t a = static_cast<std::int64_t>(std::floor(y));
    frac = y - std::floor(y);
    const std::int64_t p_next = a * p + p_prev;
    const std::int64_t q_next = a * q + q_prev;
    if (q_next > max_den || p_next < 0 || q_next < 0) {
      // Semiconvergent with the largest admissible partial quotient.
      const std::int64_t a_cap = (max_den - q_prev) / q;
      if (a_cap >= 1) {
        const Rational semi{a_cap * p + p_prev, a_cap * q + q_prev};
        const double err = std::abs(std::abs(x) - semi.value());
        if (err < best_err) {
          best = semi;
          best_err = err;
        }
      }
      break;
    }
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    const double err = std::abs(std::abs(x) - Rational{p, q}.value());
    if (err < best_err) {
      best = Rational{p, q};
      best_err = err;
    }
    if (err == 0.0) break;
  }
  if (neg) best.num = -best.num;
  return best;
}

/// Returns the approximating fraction when x is rational under the policy.
inline std::optional<Rational> detect_rational(double x, const RationalityPolicy& policy = {}) {
  const Rational r = best_rational(x, policy.max_denominator);
  if (std::abs(x - r.value()) <= policy.tol) return r;
  return std::nullopt;
}

}  // namespace s3
