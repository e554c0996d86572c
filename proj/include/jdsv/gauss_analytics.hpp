#pragma once

// Closed-form Bachelier (normal model) analytics with zero rates.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "jdsv/errors.hpp"

namespace jdsv::gauss {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;  // 1/sqrt(2π)
inline constexpr double kSqrt2Pi = 2.50662827463100050241576528481;

inline double norm_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double norm_cdf(double x) noexcept { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

/// Inputs of the Bachelier call formula. `vol` is a normal volatility in
/// price units per sqrt(year).
struct BachelierInputs {
  double tau;
  double spot;
  double strike;
  double vol;
};

struct Greeks {
  double delta;
  double vega;
  double gamma;
  double speed;  // d(gamma)/d(spot)
};

namespace detail {

inline void validate(const BachelierInputs& in) {
  if (!(in.tau > 0.0) || !std::isfinite(in.tau)) throw std::domain_error("bachelier: tau must be > 0");
  if (!(in.vol > 0.0) || !std::isfinite(in.vol)) throw std::domain_error("bachelier: vol must be > 0");
  if (!std::isfinite(in.spot) || !std::isfinite(in.strike))
    throw std::domain_error("bachelier: spot and strike must be finite");
}

// Time value of a call (or equivalently of the put) with moneyness
// m = |spot - strike| >= 0 and total deviation s = vol*sqrt(tau):
//   s*phi(m/s) - m*Phi(-m/s).
inline double time_value(double m, double s) noexcept {
  const double d = m / s;
  return s * norm_pdf(d) - m * norm_cdf(-d);
}

}  // namespace detail

/// Call price (x-k)Φ(d) + φ(d)σ√τ, d = (x-k)/(σ√τ).
inline double bac_price(const BachelierInputs& in) {
  detail::validate(in);
  const double s = in.vol * std::sqrt(in.tau);
  const double m = in.spot - in.strike;
  // intrinsic + time value; the time value form keeps full relative precision
  // on both wings.
  return std::max(m, 0.0) + detail::time_value(std::fabs(m), s);
}

inline Greeks greeks(const BachelierInputs& in) {
  detail::validate(in);
  const double sqrt_tau = std::sqrt(in.tau);
  const double s = in.vol * sqrt_tau;
  const double d = (in.spot - in.strike) / s;
  const double pdf = norm_pdf(d);
  return Greeks{
      .delta = norm_cdf(d),
      .vega = pdf * sqrt_tau,
      .gamma = pdf / s,
      .speed = -d * pdf / (s * s),
  };
}

/// Normal implied volatility of a call price.
///
/// ATM prices are inverted in closed form (price·√(2π)/√τ). Elsewhere a
/// safeguarded Newton iteration on the time value is used: plain Newton near
/// the money, Newton on log(time value) on the wings where the map is close to
/// exponential, and bisection whenever a step leaves the current bracket.
inline double implied_vol(double price, double tau, double spot, double strike) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::domain_error("implied_vol: tau must be > 0");
  if (!std::isfinite(price) || !std::isfinite(spot) || !std::isfinite(strike))
    throw std::domain_error("implied_vol: non-finite input");
  const double intrinsic = std::max(spot - strike, 0.0);
  const double target = price - intrinsic;
  if (!(target > 0.0))
    throw std::domain_error("implied_vol: price " + std::to_string(price) + " is not above intrinsic " +
                            std::to_string(intrinsic));
  const double sqrt_tau = std::sqrt(tau);
  const double m = std::fabs(spot - strike);
  if (m == 0.0) return price * kSqrt2Pi / sqrt_tau;

  // Time value is bounded by the ATM value, which is linear in vol, so this
  // bracket always contains the root.
  double lo = 1e-12;
  double hi = 10.0 * (target + 1.0) * kSqrt2Pi / sqrt_tau;
  while (detail::time_value(m, hi * sqrt_tau) < target) hi *= 2.0;

  double vol = std::clamp(target * kSqrt2Pi / sqrt_tau, lo, hi);  // ATM seed
  const double eps = 8.0 * std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < 200; ++iter) {
    const double s = vol * sqrt_tau;
    const double tv = detail::time_value(m, s);
    const double vega = norm_pdf(m / s) * sqrt_tau;
    const double diff = tv - target;
    if (diff == 0.0) return vol;
    if (diff > 0.0)
      hi = vol;
    else
      lo = vol;

    double next;
    if (tv > 0.0 && vega > 0.0 && target < 0.25 * s * kInvSqrt2Pi) {
      next = vol - (std::log(tv) - std::log(target)) * tv / vega;
    } else if (vega > 0.0) {
      next = vol - diff / vega;
    } else {
      next = std::numeric_limits<double>::quiet_NaN();
    }
    if (!(next > lo && next < hi)) next = (hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);

    if (std::fabs(next - vol) <= eps * vol || (hi - lo) <= eps * hi) {
      vol = next;
      const double residual = std::fabs(detail::time_value(m, vol * sqrt_tau) - target);
      if (residual > 1e-12 * std::max(1.0, price))
        throw NumericalError("gauss_analytics", "implied_vol converged to a point with residual " +
                                                    std::to_string(residual));
      return vol;
    }
    vol = next;
  }
  throw NumericalError("gauss_analytics", "implied_vol did not converge");
}

/// ATM implied-volatility skew from the probability that the terminal price
/// ends at or above spot: (1/2 - p) / sqrt(τ/2π).
inline double atm_skew_from_digital(double digital_prob, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("atm_skew_from_digital: tau must be > 0");
  if (!(digital_prob >= 0.0 && digital_prob <= 1.0))
    throw std::domain_error("atm_skew_from_digital: probability outside [0, 1]");
  return (0.5 - digital_prob) / std::sqrt(tau / (2.0 * std::numbers::pi));
}

}  // namespace jdsv::gauss
