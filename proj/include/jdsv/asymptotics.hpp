#pragma once

// Short-maturity limits of the ATM implied-volatility level and skew.
//
// Level:  I_0(k*) -> σ_0 for every Lévy part.
// Skew:   H >= 1/2:  ∂_k I_0(k*) -> c₁/σ_0 + κ
//         H <  1/2:  T^{1/2-H} ∂_k I_0(k*) -> κ
// where κ = lim ρ/(σ_0 T^{min(2, 3/2+H)}) ∫_0^T ∫_s^T E[D_s σ_u] du ds.
// For fractional Bergomi E[D_s σ_u] ≈ (α σ_0 / 2) K_H(u, s) near t = 0, giving
// κ = 0 (H > 1/2), ρα/4 (H = 1/2) and 2ρα sqrt(2H) / (3 + 4H(2+H)) (H < 1/2).

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "jdsv/errors.hpp"
#include "jdsv/levy.hpp"
#include "jdsv/vol_models.hpp"

namespace jdsv {

enum class Regime { H_gt_half, H_eq_half, H_lt_half };

inline const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::H_gt_half: return "H_gt_half";
    case Regime::H_eq_half: return "H_eq_half";
    case Regime::H_lt_half: return "H_lt_half";
  }
  return "?";
}

enum class SkewKind {
  raw_skew,        // limit of ∂_k I
  scaled_skew,     // limit of T^{1/2-H} ∂_k I (raw skew diverges)
  no_finite_skew,  // c₁ diverges; ATM skew is not defined in the limit
};

inline const char* to_string(SkewKind k) noexcept {
  switch (k) {
    case SkewKind::raw_skew: return "raw_skew";
    case SkewKind::scaled_skew: return "scaled_skew";
    case SkewKind::no_finite_skew: return "no_finite_skew";
  }
  return "?";
}

struct AsymptoteReport {
  double level = 0.0;
  Regime regime = Regime::H_eq_half;
  SkewKind kind = SkewKind::raw_skew;
  double skew_or_scaled_skew = 0.0;  // NaN when kind == no_finite_skew
  int raw_skew_divergence = 0;       // sign of the raw-skew blow-up for H < 1/2
  C1Value c1;
};

inline Regime regime_of(const VolModelSpec& vol) noexcept {
  const double h = vol.effective_hurst();
  if (h > 0.5) return Regime::H_gt_half;
  if (h < 0.5) return Regime::H_lt_half;
  return Regime::H_eq_half;
}

inline double theoretical_level(const VolModelSpec& vol) {
  vol.validate();
  return vol.sigma0;
}

/// Quadrature evaluation of ρ/(σ_0 T^{min(2, 3/2+H)}) ∫_0^T ∫_s^T E[D_s σ_u] du ds
/// with E[D_s σ_u] = (α σ_0 / 2) K_H(u, s) (fractional Bergomi) or α̂ σ_0
/// (SABR-exponential). The exponent of the leftover power of T is measured
/// by halving T; a vanishing limit is returned as exactly 0.
inline double skew_integral_oracle(const VolModelSpec& vol, double rho, double t_end) {
  vol.validate();
  if (!(t_end > 0.0)) throw std::domain_error("skew_integral_oracle: t_end must be > 0");
  if (vol.kind == VolKind::constant || vol.alpha == 0.0 || rho == 0.0) return 0.0;

  const double h = vol.effective_hurst();
  const double power = std::min(2.0, 1.5 + h);
  double prefactor;
  double exponent;  // D_s σ_u ∝ (u - s)^exponent
  double kernel_scale;
  if (vol.kind == VolKind::fractional_bergomi) {
    prefactor = 0.5 * vol.alpha * vol.sigma0;
    exponent = h - 0.5;
    kernel_scale = std::sqrt(2.0 * h);
  } else {
    prefactor = vol.alpha * vol.sigma0;
    exponent = 0.0;
    kernel_scale = 1.0;
  }

  // Both integrands have power-law endpoint behaviour, which tanh-sinh handles.
  // The inner and outer rules must be distinct objects: a rule grows its node
  // tables lazily and cannot be re-entered.
  boost::math::quadrature::tanh_sinh<double> outer_rule;
  boost::math::quadrature::tanh_sinh<double> inner_rule;
  // Both integrals are mapped affinely onto [0, 1]; tanh-sinh on very short
  // raw intervals trips an internal assertion in some Boost releases.
  auto normalized = [&](double T) {
    auto outer = [&](double w) {
      const double s = T * w;
      const double span = T - s;
      if (span <= 0.0) return 0.0;
      auto kernel = [&](double v) {
        const double r = (s + span * v) - s;
        return r > 0.0 ? kernel_scale * std::pow(r, exponent) : (exponent == 0.0 ? kernel_scale : 0.0);
      };
      return span * inner_rule.integrate(kernel, 0.0, 1.0, 1e-12);
    };
    const double integral = T * outer_rule.integrate(outer, 0.0, 1.0, 1e-12);
    return rho / (vol.sigma0 * std::pow(T, power)) * prefactor * integral;
  };

  const double at_t = normalized(t_end);
  const double at_half = normalized(0.5 * t_end);
  if (at_t == 0.0) return 0.0;
  const double leftover = std::log2(at_t / at_half);
  if (!std::isfinite(leftover))
    throw NumericalError("asymptotics", "skew integral quadrature returned a non-finite ratio");
  if (leftover > 1e-6) return 0.0;
  if (leftover < -1e-6) return std::copysign(std::numeric_limits<double>::infinity(), at_t);
  return at_t;
}

/// Closed-form volatility contribution κ for fractional Bergomi.
inline double fractional_bergomi_skew_constant(double alpha, double hurst, double rho) {
  if (hurst > 0.5) return 0.0;
  if (hurst == 0.5) return rho * alpha / 4.0;
  return 2.0 * rho * alpha * std::sqrt(2.0 * hurst) / (3.0 + 4.0 * hurst * (2.0 + hurst));
}

inline AsymptoteReport theoretical_skew(const VolModelSpec& vol, const LevySpec& levy, double rho) {
  vol.validate();
  if (!(rho > -1.0 && rho < 1.0)) throw std::domain_error("theoretical_skew: rho must lie in (-1, 1)");
  AsymptoteReport report;
  report.level = vol.sigma0;
  report.regime = regime_of(vol);
  report.c1 = c1_of(levy);

  double kappa = 0.0;
  switch (vol.kind) {
    case VolKind::fractional_bergomi:
      kappa = fractional_bergomi_skew_constant(vol.alpha, vol.hurst, rho);
      break;
    case VolKind::sabr_exp:
      kappa = skew_integral_oracle(vol, rho, 1.0);
      break;
    case VolKind::constant:
      break;
  }

  if (!report.c1.finite()) {
    report.kind = SkewKind::no_finite_skew;
    report.skew_or_scaled_skew = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  if (report.regime == Regime::H_lt_half) {
    report.kind = SkewKind::scaled_skew;
    report.skew_or_scaled_skew = kappa;
    report.raw_skew_divergence = rho > 0.0 ? 1 : (rho < 0.0 ? -1 : 0);
    return report;
  }
  report.kind = SkewKind::raw_skew;
  report.skew_or_scaled_skew = report.c1.value / vol.sigma0 + kappa;
  return report;
}

}  // namespace jdsv
