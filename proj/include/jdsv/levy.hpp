#pragma once

// Pure-jump Lévy martingales: compound Poisson (Gaussian / Laplace jumps),
// ε-truncated CGMY and NIG. Every sampler returns increments that already
// include the drift compensation, so E[ΔL] = 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "jdsv/errors.hpp"
#include "jdsv/grid.hpp"
#include "jdsv/random.hpp"
#include "jdsv/special_functions.hpp"

namespace jdsv {

struct GaussianJumps {
  double mean;
  double sd;
};

/// Laplace law with density exp(-|x - mean| / scale) / (2 scale).
struct LaplaceJumps {
  double mean;
  double scale;
};

using JumpLaw = std::variant<GaussianJumps, LaplaceJumps>;

struct NoJumps {};

struct CompoundPoisson {
  double intensity;
  JumpLaw jump_law;
};

/// CGMY measure C e^{-G|y|}/|y|^{1+Y} (y < 0), C e^{-My}/y^{1+Y} (y > 0),
/// simulated through its ε-truncation.
struct Cgmy {
  double C;
  double G;
  double M;
  double Y;
  std::optional<double> truncation_eps;
  bool small_jump_gaussian = false;  // add N(0, ∫_{|y|<ε} y² ν(dy) Δt) per step
};

/// NIG(alpha, beta, delta) Lévy process, zero location.
struct Nig {
  double alpha;
  double beta;
  double delta;
};

using LevySpec = std::variant<NoJumps, CompoundPoisson, Cgmy, Nig>;

inline constexpr double kDefaultCgmyTruncation = 1e-4;

inline const char* levy_kind_name(const LevySpec& spec) {
  return std::visit(
      [](const auto& s) -> const char* {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NoJumps>) return "none";
        if constexpr (std::is_same_v<T, CompoundPoisson>) return "compound_poisson";
        if constexpr (std::is_same_v<T, Cgmy>) return "cgmy";
        if constexpr (std::is_same_v<T, Nig>) return "nig";
      },
      spec);
}

inline double jump_mean(const JumpLaw& law) {
  return std::visit([](const auto& l) { return l.mean; }, law);
}

inline void validate(const LevySpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CompoundPoisson>) {
          if (!(s.intensity > 0.0)) throw ConfigError("levy.intensity", "must be > 0");
          std::visit(
              [](const auto& law) {
                using L = std::decay_t<decltype(law)>;
                if (!std::isfinite(law.mean)) throw ConfigError("levy.jump_mean", "must be finite");
                if constexpr (std::is_same_v<L, GaussianJumps>) {
                  if (!(law.sd > 0.0)) throw ConfigError("levy.jump_scale", "Gaussian jump sd must be > 0");
                } else {
                  if (!(law.scale > 0.0)) throw ConfigError("levy.jump_scale", "Laplace scale must be > 0");
                }
              },
              s.jump_law);
        } else if constexpr (std::is_same_v<T, Cgmy>) {
          if (!(s.C > 0.0)) throw ConfigError("levy.C", "must be > 0");
          if (!(s.G > 0.0)) throw ConfigError("levy.G", "must be > 0");
          if (!(s.M > 0.0)) throw ConfigError("levy.M", "must be > 0");
          if (!(s.Y > 0.0 && s.Y < 2.0)) throw ConfigError("levy.Y", "must lie in (0, 2)");
          if (s.Y == 1.0 && s.G != s.M) throw ConfigError("levy.Y", "Y = 1 requires G = M for a finite first moment");
          if (s.truncation_eps && !(*s.truncation_eps > 0.0))
            throw ConfigError("levy.truncation_eps", "must be > 0");
        } else if constexpr (std::is_same_v<T, Nig>) {
          if (!(s.alpha > 0.0)) throw ConfigError("levy.alpha", "must be > 0");
          if (!(std::fabs(s.beta) < s.alpha)) throw ConfigError("levy.beta", "|beta| must be < alpha");
          if (!(s.delta > 0.0)) throw ConfigError("levy.delta", "must be > 0");
        }
      },
      spec);
}

// ---------------------------------------------------------------------------
// First-moment constants

enum class C1Provenance { closed_form, divergent, zero_by_symmetry };

inline const char* to_string(C1Provenance p) noexcept {
  switch (p) {
    case C1Provenance::closed_form: return "closed_form";
    case C1Provenance::divergent: return "divergent";
    case C1Provenance::zero_by_symmetry: return "zero_by_symmetry";
  }
  return "?";
}

/// c₁ = ∫ y ν(dy) on the extended real line, with where the value came from.
struct C1Value {
  double value = 0.0;  // ±inf when divergent
  C1Provenance provenance = C1Provenance::closed_form;

  bool finite() const noexcept { return std::isfinite(value); }
};

inline C1Value c1_of(const LevySpec& spec) {
  return std::visit(
      [](const auto& s) -> C1Value {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NoJumps>) {
          return {0.0, C1Provenance::closed_form};
        } else if constexpr (std::is_same_v<T, CompoundPoisson>) {
          const double mean = jump_mean(s.jump_law);
          if (mean == 0.0) return {0.0, C1Provenance::zero_by_symmetry};
          return {s.intensity * mean, C1Provenance::closed_form};
        } else if constexpr (std::is_same_v<T, Cgmy>) {
          if (s.G == s.M) return {0.0, C1Provenance::zero_by_symmetry};
          if (s.Y == 1.0) throw std::domain_error("c1_of: CGMY with Y = 1 and G != M has no finite first moment");
          return {s.C * (std::pow(s.M, s.Y - 1.0) - std::pow(s.G, s.Y - 1.0)) * std::tgamma(1.0 - s.Y),
                  C1Provenance::closed_form};
        } else {
          // K_1(α|y|) ~ 1/(α|y|) near 0 makes ∫ y ν(dy) diverge unless β = 0.
          if (s.beta == 0.0) return {0.0, C1Provenance::zero_by_symmetry};
          const double inf = std::numeric_limits<double>::infinity();
          return {s.beta > 0.0 ? inf : -inf, C1Provenance::divergent};
        }
      },
      spec);
}

/// c₁ᵉ = ∫_{|y|>ε} y ν(dy) = C (M^{Y-1} Γ(1-Y, Mε) - G^{Y-1} Γ(1-Y, Gε)).
inline double c1_eps(const Cgmy& s, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("c1_eps: eps must be > 0");
  if (s.G == s.M) return 0.0;
  const double a = 1.0 - s.Y;
  return s.C * (std::pow(s.M, s.Y - 1.0) * special::upper_incomplete_gamma(a, s.M * eps) -
                std::pow(s.G, s.Y - 1.0) * special::upper_incomplete_gamma(a, s.G * eps));
}

/// ∫_{|y|<ε} y² ν(dy), the variance rate of the jumps dropped by truncation.
inline double small_jump_variance(const Cgmy& s, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("small_jump_variance: eps must be > 0");
  // y = ε w^{1/(2-Y)} turns y^{1-Y} dy into a constant times dw.
  const double p = 1.0 / (2.0 - s.Y);
  auto f = [&](double w) {
    const double y = eps * std::pow(w, p);
    return std::exp(-s.M * y) + std::exp(-s.G * y);
  };
  double err = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 15, 1e-12, &err);
  return s.C * std::pow(eps, 2.0 - s.Y) / (2.0 - s.Y) * integral;
}

/// Mass of one CGMY tail beyond ε: C ∫_ε^∞ y^{-1-Y} e^{-rate·y} dy.
inline double cgmy_tail_intensity(double C, double rate, double Y, double eps) {
  // y = ε e^u
  auto f = [&](double u) { return std::exp(-Y * u - rate * eps * std::exp(u)); };
  boost::math::quadrature::exp_sinh<double> integrator;
  return C * std::pow(eps, -Y) * integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
}

// ---------------------------------------------------------------------------
// Tabulated CGMY jump law

/// Inverse-CDF table for the jumps of one side of a truncated CGMY measure.
/// The density is tabulated on a log-spaced grid from ε to far in the
/// exponentially tempered tail; inside a cell the CDF is linear in log|y|.
class CgmyTailTable {
 public:
  static constexpr std::size_t kNodes = 4096;

  CgmyTailTable(double C, double rate, double Y, double eps) {
    const double y_max = std::max(60.0 / rate, 10.0 * eps);
    log_lo_ = std::log(eps);
    step_ = (std::log(y_max) - log_lo_) / static_cast<double>(kNodes - 1);
    cumulative_.assign(kNodes, 0.0);
    auto density = [&](double u) { return C * std::exp(-Y * u - rate * std::exp(u)); };  // in u = log y
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < kNodes; ++k) {
      const double a = log_lo_ + step_ * static_cast<double>(k);
      acc += boost::math::quadrature::gauss<double, 8>::integrate(density, a, a + step_);
      cumulative_[k + 1] = acc;
    }
  }

  double total() const noexcept { return cumulative_.back(); }

  /// Mean jump size of the tabulated law, times its mass.
  double first_moment() const noexcept {
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < kNodes; ++k) {
      const double a = log_lo_ + step_ * static_cast<double>(k);
      m += (cumulative_[k + 1] - cumulative_[k]) * (std::exp(a + step_) - std::exp(a)) / step_;
    }
    return m;
  }

  /// Jump magnitude for a uniform u in (0, 1).
  double sample(double u) const noexcept {
    const double target = u * total();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    std::size_t k = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
    k = std::clamp<std::size_t>(k, 1, kNodes - 1) - 1;
    const double mass = cumulative_[k + 1] - cumulative_[k];
    const double frac = mass > 0.0 ? std::clamp((target - cumulative_[k]) / mass, 0.0, 1.0) : 0.5;
    return std::exp(log_lo_ + step_ * (static_cast<double>(k) + frac));
  }

 private:
  double log_lo_ = 0.0;
  double step_ = 0.0;
  std::vector<double> cumulative_;
};

/// Both tails of an ε-truncated CGMY measure.
class CgmyJumpTable {
 public:
  CgmyJumpTable(const Cgmy& s, double eps)
      : positive_(s.C, s.M, s.Y, eps), negative_(s.C, s.G, s.Y, eps) {}

  double intensity() const noexcept { return positive_.total() + negative_.total(); }
  double positive_probability() const noexcept { return positive_.total() / intensity(); }
  double first_moment() const noexcept { return positive_.first_moment() - negative_.first_moment(); }

  double sample(RandomStream& rng) const noexcept {
    const double side = rng.uniform();
    const double u = rng.uniform();
    return side < positive_probability() ? positive_.sample(u) : -negative_.sample(u);
  }

  const CgmyTailTable& positive() const noexcept { return positive_; }
  const CgmyTailTable& negative() const noexcept { return negative_; }

 private:
  CgmyTailTable positive_;
  CgmyTailTable negative_;
};

// ---------------------------------------------------------------------------
// Samplers

/// Inverse Gaussian variate with mean `mu` and shape `lambda`
/// (Michael, Schucany & Haas), written to stay accurate when mu/lambda is huge.
inline double sample_inverse_gaussian(RandomStream& rng, double mu, double lambda) noexcept {
  const double z = rng.normal();
  const double r = mu * z * z / (2.0 * lambda);
  const double x = mu / (1.0 + r + std::sqrt(r * r + 2.0 * r));
  return rng.uniform() <= mu / (mu + x) ? x : mu * mu / x;
}

/// Draws compensated per-step increments of one Lévy spec on a fixed step.
/// Immutable after construction; share freely across threads.
class LevySampler {
 public:
  LevySampler(const LevySpec& spec, double dt) : spec_(spec), dt_(dt) {
    validate(spec);
    if (!(dt > 0.0)) throw ConfigError("t_end", "time step must be > 0");
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, CompoundPoisson>) {
            step_intensity_ = s.intensity * dt;
            drift_ = -s.intensity * jump_mean(s.jump_law) * dt;
          } else if constexpr (std::is_same_v<T, Cgmy>) {
            if (!s.truncation_eps)
              throw ConfigError("levy.truncation_eps", "CGMY sampling needs a truncation level");
            const double eps = *s.truncation_eps;
            table_ = std::make_shared<const CgmyJumpTable>(s, eps);
            step_intensity_ = table_->intensity() * dt;
            drift_ = -c1_eps(s, eps) * dt;
            if (s.small_jump_gaussian) small_jump_sd_ = std::sqrt(small_jump_variance(s, eps) * dt);
          } else if constexpr (std::is_same_v<T, Nig>) {
            const double gamma = std::sqrt(s.alpha * s.alpha - s.beta * s.beta);
            ig_mean_ = s.delta * dt / gamma;
            ig_shape_ = (s.delta * dt) * (s.delta * dt);
            drift_ = -s.delta * s.beta / gamma * dt;
          }
        },
        spec_);
  }

  double dt() const noexcept { return dt_; }
  /// Deterministic drift added to every step (minus the jump mean rate times dt).
  double step_drift() const noexcept { return drift_; }
  const CgmyJumpTable* cgmy_table() const noexcept { return table_.get(); }

  double increment(RandomStream& rng) const noexcept {
    return std::visit(
        [&](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, NoJumps>) {
            return 0.0;
          } else if constexpr (std::is_same_v<T, CompoundPoisson>) {
            const std::uint64_t n = rng.poisson(step_intensity_);
            double sum = drift_;
            for (std::uint64_t i = 0; i < n; ++i) sum += sample_jump(s.jump_law, rng);
            return sum;
          } else if constexpr (std::is_same_v<T, Cgmy>) {
            const std::uint64_t n = rng.poisson(step_intensity_);
            double sum = drift_;
            for (std::uint64_t i = 0; i < n; ++i) sum += table_->sample(rng);
            if (small_jump_sd_ > 0.0) sum += small_jump_sd_ * rng.normal();
            return sum;
          } else {
            const double tau = sample_inverse_gaussian(rng, ig_mean_, ig_shape_);
            return s.beta * tau + std::sqrt(tau) * rng.normal() + drift_;
          }
        },
        spec_);
  }

  /// Sum of `n_steps` increments.
  double path_total(RandomStream& rng, std::size_t n_steps) const noexcept {
    if (std::holds_alternative<NoJumps>(spec_)) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n_steps; ++i) total += increment(rng);
    return total;
  }

 private:
  static double sample_jump(const JumpLaw& law, RandomStream& rng) noexcept {
    if (const auto* g = std::get_if<GaussianJumps>(&law)) return g->mean + g->sd * rng.normal();
    const auto& l = std::get<LaplaceJumps>(law);
    const double u = rng.uniform() - 0.5;
    return l.mean - l.scale * std::copysign(std::log1p(-2.0 * std::fabs(u)), u);
  }

  LevySpec spec_;
  double dt_;
  double step_intensity_ = 0.0;
  double drift_ = 0.0;
  double small_jump_sd_ = 0.0;
  double ig_mean_ = 0.0;
  double ig_shape_ = 0.0;
  std::shared_ptr<const CgmyJumpTable> table_;
};

/// Per-path, per-step compensated jump increments.
struct LevyIncrements {
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  std::vector<double> values;  // row-major [path][step]

  double at(std::size_t path, std::size_t step) const { return values[path * n_steps + step]; }
  double path_total(std::size_t path) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_steps; ++i) s += at(path, i);
    return s;
  }
};

/// Path p draws from stream (seed, jumps, p), matching the pricing engine.
inline LevyIncrements sample_increments(const LevySpec& spec, const PathGrid& grid, std::size_t n_paths,
                                        std::uint64_t seed) {
  const LevySampler sampler(spec, grid.dt());
  LevyIncrements out{n_paths, grid.n_steps(), std::vector<double>(n_paths * grid.n_steps(), 0.0)};
  for (std::size_t p = 0; p < n_paths; ++p) {
    RandomStream rng(seed, StreamComponent::jumps, p);
    for (std::size_t i = 0; i < grid.n_steps(); ++i) out.values[p * grid.n_steps() + i] = sampler.increment(rng);
  }
  return out;
}

}  // namespace jdsv
