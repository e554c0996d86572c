#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "jdsv/errors.hpp"

namespace jdsv::special {

namespace detail {

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr int kMaxIterations = 2000;

// Γ(s, x) by the Legendre continued fraction (modified Lentz). Valid for any
// real s; used for x >= 1.5 where it converges quickly.
inline double upper_gamma_continued_fraction(double s, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) return std::exp(-x + s * std::log(x)) * h;
  }
  throw NumericalError("special_functions", "incomplete gamma continued fraction did not converge");
}

// γ(s, x) = x^s e^{-x} Σ x^n / (s (s+1) ... (s+n)), s > 0.
inline double lower_gamma_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (s + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-17) return sum * std::exp(-x + s * std::log(x));
  }
  throw NumericalError("special_functions", "incomplete gamma series did not converge");
}

// E_1(x) = Γ(0, x) for small x.
inline double exponential_integral_series(double x) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < kMaxIterations; ++k) {
    term *= -x / k;
    const double add = term / k;
    sum += add;
    if (std::fabs(add) < 1e-17 * std::fabs(sum)) break;
  }
  return -kEulerGamma - std::log(x) - sum;
}

}  // namespace detail

/// Upper incomplete gamma Γ(s, x) = ∫_x^∞ t^{s-1} e^{-t} dt for x > 0 and any
/// real s. Negative s is reached from Γ(s+1, x) through
/// Γ(s, x) = (Γ(s+1, x) - x^s e^{-x}) / s.
inline double upper_incomplete_gamma(double s, double x) {
  if (!(x > 0.0)) throw std::domain_error("upper_incomplete_gamma: x must be > 0");
  if (x >= 1.5) return detail::upper_gamma_continued_fraction(s, x);
  if (s == 0.0) return detail::exponential_integral_series(x);
  if (s > 0.0) return std::tgamma(s) - detail::lower_gamma_series(s, x);
  return (upper_incomplete_gamma(s + 1.0, x) - std::exp(s * std::log(x) - x)) / s;
}

}  // namespace jdsv::special
