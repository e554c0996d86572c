#pragma once

// Monte Carlo engine for
//   S_T = S_0 + Σ σ_{t_i} (ρ ΔW_i + sqrt(1-ρ²) ΔB_i) + L_T
// with antithetic pairs, and the ATM implied-volatility level / skew
// estimators built on top of it.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "jdsv/errors.hpp"
#include "jdsv/gauss_analytics.hpp"
#include "jdsv/grid.hpp"
#include "jdsv/levy.hpp"
#include "jdsv/random.hpp"
#include "jdsv/vol_models.hpp"

namespace jdsv {

/// How the two members of an antithetic pair get their jumps.
enum class JumpCoupling { shared, independent };

struct ModelConfig {
  double s0 = 100.0;
  double rho = 0.0;
  VolModelSpec vol = VolModelSpec::constant(0.2);
  LevySpec levy = NoJumps{};
  double t_end = 1e-3;
  std::size_t n_steps = 0;  // 0 picks 64 for t_end <= 1e-3, 256 otherwise
  std::size_t n_paths = 2'000'000;
  std::uint64_t seed = 1;
  bool antithetic = true;
  JumpCoupling jump_coupling = JumpCoupling::shared;

  std::size_t resolved_steps() const noexcept {
    if (n_steps != 0) return n_steps;
    return t_end <= 1e-3 ? 64 : 256;
  }

  void validate() const {
    if (!std::isfinite(s0)) throw ConfigError("s0", "must be finite");
    if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("rho", "correlation must lie in (-1, 1)");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end", "maturity must be > 0");
    if (n_paths < 2) throw ConfigError("n_paths", "need at least two paths");
    if (antithetic && n_paths % 2 != 0) throw ConfigError("n_paths", "must be even with antithetic pairs");
    vol.validate();
    jdsv::validate(levy);
  }
};

/// Sample mean with its standard error over `n_samples` independent units
/// (antithetic pairs count as one unit).
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

struct IvPoint {
  McEstimate level;
  McEstimate skew;
  McEstimate scaled_skew;  // T^{max(1/2-H, 0)} * skew
  bool skew_hypothesis_violated = false;  // c₁ diverges, ATM skew need not exist
};

/// Welford accumulator, mergeable with Chan's formula.
struct RunningStats {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  void merge(const RunningStats& o) noexcept {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.n) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }

  McEstimate estimate(double scale = 1.0) const noexcept {
    const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    return {scale * mean, std::fabs(scale) * std::sqrt(var / static_cast<double>(n)), n};
  }
};

/// Worker count from JDSV_THREADS, else the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("JDSV_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Simulates terminal values one unit (a path, or an antithetic pair) at a time.
class PathSimulator {
 public:
  static constexpr std::size_t kChunkUnits = 2048;

  explicit PathSimulator(const ModelConfig& config)
      : config_(checked(config)),
        grid_(config.t_end, config.resolved_steps()),
        vol_(config.vol, grid_),
        levy_(config.levy, grid_.dt()) {
    rho_bar_ = std::sqrt(1.0 - config.rho * config.rho);
    sqrt_dt_ = std::sqrt(grid_.dt());
  }

  const ModelConfig& config() const noexcept { return config_; }
  const PathGrid& grid() const noexcept { return grid_; }
  std::size_t paths_per_unit() const noexcept { return config_.antithetic ? 2 : 1; }
  std::size_t n_units() const noexcept { return config_.n_paths / paths_per_unit(); }
  std::size_t n_chunks() const noexcept { return (n_units() + kChunkUnits - 1) / kChunkUnits; }

  struct Workspace {
    std::vector<double> normals, state, dw, sigma, orthogonal;
  };

  Workspace make_workspace() const {
    const std::size_t n = grid_.n_steps();
    return {std::vector<double>(vol_.normals_per_path()), std::vector<double>(vol_.state_size()),
            std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  }

  /// Writes paths_per_unit() terminal values for `unit` into `out`.
  void simulate_unit(std::size_t unit, Workspace& ws, std::span<double> out) const noexcept {
    const std::uint64_t seed = config_.seed;
    const std::size_t n = grid_.n_steps();
    RandomStream vol_rng(seed, StreamComponent::volatility, unit);
    for (double& z : ws.normals) z = vol_rng.normal();
    vol_.correlate(ws.normals, ws.state);
    RandomStream b_rng(seed, StreamComponent::orthogonal_brownian, unit);
    for (double& z : ws.orthogonal) z = sqrt_dt_ * b_rng.normal();
    RandomStream jump_rng(seed, StreamComponent::jumps, unit);
    const double jumps = levy_.path_total(jump_rng, n);

    out[0] = config_.s0 + diffusion(ws, 1.0) + jumps;
    if (!config_.antithetic) return;
    double jumps_minus = jumps;
    if (config_.jump_coupling == JumpCoupling::independent) {
      RandomStream other(seed, StreamComponent::jumps_independent, unit);
      jumps_minus = levy_.path_total(other, n);
    }
    out[1] = config_.s0 + diffusion(ws, -1.0) + jumps_minus;
  }

  /// Runs `observe(acc, unit, terminal_values)` over all units. Chunks are
  /// processed by a worker pool and merged in chunk order, so the result is
  /// independent of the worker count.
  template <class Acc, class Observe>
  Acc reduce(const Acc& prototype, Observe observe) const {
    const std::size_t chunks = n_chunks();
    std::vector<Acc> partial(chunks, prototype);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
      try {
        Workspace ws = make_workspace();
        std::vector<double> terminal(paths_per_unit());
        for (std::size_t c = next++; c < chunks; c = next++) {
          const std::size_t begin = c * kChunkUnits;
          const std::size_t end = std::min(n_units(), begin + kChunkUnits);
          for (std::size_t u = begin; u < end; ++u) {
            simulate_unit(u, ws, terminal);
            observe(partial[c], u, std::span<const double>(terminal));
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    };
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), chunks));
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    Acc result = prototype;
    for (const Acc& p : partial) result.merge(p);
    return result;
  }

 private:
  static const ModelConfig& checked(const ModelConfig& c) {
    c.validate();
    return c;
  }

  double diffusion(Workspace& ws, double sign) const noexcept {
    vol_.realize(ws.state, sign, ws.dw, ws.sigma);
    const double rho = config_.rho;
    double x = 0.0;
    for (std::size_t i = 0; i < ws.dw.size(); ++i)
      x += ws.sigma[i] * (rho * ws.dw[i] + rho_bar_ * sign * ws.orthogonal[i]);
    return x;
  }

  ModelConfig config_;
  PathGrid grid_;
  VolPathSampler vol_;
  LevySampler levy_;
  double rho_bar_ = 1.0;
  double sqrt_dt_ = 0.0;
};

/// Terminal prices of all paths; antithetic partners are adjacent.
inline std::vector<double> simulate_terminal(const ModelConfig& config) {
  const PathSimulator sim(config);
  std::vector<double> out(config.n_paths);
  struct NoAcc {
    void merge(const NoAcc&) noexcept {}
  };
  const std::size_t per = sim.paths_per_unit();
  sim.reduce(NoAcc{}, [&](NoAcc&, std::size_t unit, std::span<const double> values) {
    std::copy(values.begin(), values.end(), out.begin() + static_cast<std::ptrdiff_t>(unit * per));
  });
  return out;
}

/// Undiscounted call prices at `strikes` plus the ATM call and the ATM digital
/// P(S_T >= S_0), all from one set of paths.
struct PayoffEstimates {
  std::vector<McEstimate> calls;
  McEstimate atm_call;
  McEstimate atm_digital;
};

inline PayoffEstimates estimate_payoffs(const ModelConfig& config, std::span<const double> strikes = {}) {
  const PathSimulator sim(config);
  struct Acc {
    std::vector<RunningStats> calls;
    RunningStats atm_call;
    RunningStats digital;
    void merge(const Acc& o) noexcept {
      for (std::size_t i = 0; i < calls.size(); ++i) calls[i].merge(o.calls[i]);
      atm_call.merge(o.atm_call);
      digital.merge(o.digital);
    }
  };
  const double s0 = config.s0;
  const std::vector<double> ks(strikes.begin(), strikes.end());
  Acc proto{std::vector<RunningStats>(ks.size()), {}, {}};
  const Acc acc = sim.reduce(proto, [&](Acc& a, std::size_t, std::span<const double> values) {
    const double w = 1.0 / static_cast<double>(values.size());
    double call = 0.0;
    double digital = 0.0;
    for (double s : values) {
      call += std::max(s - s0, 0.0);
      digital += s >= s0 ? 1.0 : 0.0;
    }
    a.atm_call.add(w * call);
    a.digital.add(w * digital);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      double c = 0.0;
      for (double s : values) c += std::max(s - ks[i], 0.0);
      a.calls[i].add(w * c);
    }
  });
  PayoffEstimates out;
  for (const auto& c : acc.calls) out.calls.push_back(c.estimate());
  out.atm_call = acc.atm_call.estimate();
  out.atm_digital = acc.digital.estimate();
  return out;
}

inline McEstimate level_from_atm_call(const McEstimate& atm_call, double t_end) {
  const double scale = std::sqrt(2.0 * std::numbers::pi / t_end);
  return {atm_call.mean * scale, atm_call.std_error * scale, atm_call.n_samples};
}

inline McEstimate skew_from_digital(const McEstimate& digital, double t_end) {
  const double scale = 1.0 / std::sqrt(t_end / (2.0 * std::numbers::pi));
  return {gauss::atm_skew_from_digital(std::clamp(digital.mean, 0.0, 1.0), t_end), digital.std_error * scale,
          digital.n_samples};
}

/// I_0(k*) = E[(S_T - S_0)_+] sqrt(2π/T).
inline McEstimate estimate_atm_level(const ModelConfig& config) {
  return level_from_atm_call(estimate_payoffs(config).atm_call, config.t_end);
}

/// ∂_k I_0(k*) = (1/2 - P(S_T >= S_0)) / sqrt(T/2π).
inline McEstimate estimate_atm_skew(const ModelConfig& config) {
  return skew_from_digital(estimate_payoffs(config).atm_digital, config.t_end);
}

inline double skew_scaling_factor(const ModelConfig& config) {
  return std::pow(config.t_end, std::max(0.5 - config.vol.effective_hurst(), 0.0));
}

inline IvPoint iv_point_from(const PayoffEstimates& p, const ModelConfig& config) {
  IvPoint point;
  point.level = level_from_atm_call(p.atm_call, config.t_end);
  point.skew = skew_from_digital(p.atm_digital, config.t_end);
  const double f = skew_scaling_factor(config);
  point.scaled_skew = {point.skew.mean * f, point.skew.std_error * f, point.skew.n_samples};
  point.skew_hypothesis_violated = !c1_of(config.levy).finite();
  return point;
}

inline IvPoint estimate_iv_point(const ModelConfig& config) {
  return iv_point_from(estimate_payoffs(config), config);
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { sigma0, maturity, strike };

inline const char* to_string(SweepAxis axis) noexcept {
  switch (axis) {
    case SweepAxis::sigma0: return "sigma0";
    case SweepAxis::maturity: return "maturity";
    case SweepAxis::strike: return "strike";
  }
  return "?";
}

/// One sweep value. For the strike axis `point.level` holds the implied
/// volatility at that strike (delta-method standard error) while the skew
/// fields carry the ATM digital estimate of the same paths.
struct SweepRow {
  double value = 0.0;
  IvPoint point;
  McEstimate price;    // call price at the strike (strike axis only)
  std::string error;   // non-empty when this point failed
  std::string error_module;  // set when the failure was numerical
};

inline ModelConfig with_axis_value(ModelConfig config, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::sigma0: config.vol.sigma0 = value; break;
    case SweepAxis::maturity: config.t_end = value; break;
    case SweepAxis::strike: break;
  }
  return config;
}

inline std::vector<SweepRow> sweep(const ModelConfig& base, SweepAxis axis, std::span<const double> values) {
  if (values.empty()) throw ConfigError("sweep.values", "sweep needs at least one value");
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  if (axis == SweepAxis::strike) {
    const PayoffEstimates p = estimate_payoffs(base, values);
    const IvPoint atm = iv_point_from(p, base);
    for (std::size_t i = 0; i < values.size(); ++i) {
      SweepRow row{values[i], atm, p.calls[i], {}, {}};
      const double nan = std::numeric_limits<double>::quiet_NaN();
      try {
        const double iv = gauss::implied_vol(p.calls[i].mean, base.t_end, base.s0, values[i]);
        const double vega = gauss::greeks({base.t_end, base.s0, values[i], iv}).vega;
        row.point.level = {iv, vega > 0.0 ? p.calls[i].std_error / vega : nan, p.calls[i].n_samples};
      } catch (const NumericalError& e) {
        row.point.level = {nan, nan, p.calls[i].n_samples};
        row.error = e.what();
        row.error_module = e.module();
      } catch (const std::exception& e) {
        row.point.level = {nan, nan, p.calls[i].n_samples};
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
    return rows;
  }
  for (double v : values) {
    SweepRow row{v, {}, {}, {}, {}};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
      row.point = estimate_iv_point(with_axis_value(base, axis, v));
    } catch (const ConfigError&) {
      throw;
    } catch (const NumericalError& e) {
      row.point.level = row.point.skew = row.point.scaled_skew = {nan, nan, 0};
      row.error = e.what();
      row.error_module = e.module();
    } catch (const std::exception& e) {
      row.point.level = row.point.skew = row.point.scaled_skew = {nan, nan, 0};
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace jdsv
