#pragma once

// Volatility paths for the fractional Bergomi and SABR-exponential models.
//
// Fractional Bergomi uses the Riemann-Liouville representation
//   W^H_t = ∫_0^t K_H(t,s) dW_s,  K_H(t,s) = sqrt(2H) (t-s)^{H-1/2},
// so Var(W^H_t) = t^{2H}, and the pair (ΔW, W^H) on the grid is sampled
// exactly from its joint Gaussian law.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "jdsv/errors.hpp"
#include "jdsv/grid.hpp"
#include "jdsv/random.hpp"

namespace jdsv {

enum class VolKind { fractional_bergomi, sabr_exp, constant };

inline const char* to_string(VolKind kind) noexcept {
  switch (kind) {
    case VolKind::fractional_bergomi: return "fractional_bergomi";
    case VolKind::sabr_exp: return "sabr_exp";
    case VolKind::constant: return "constant";
  }
  return "?";
}

struct VolModelSpec {
  VolKind kind = VolKind::constant;
  double sigma0 = 0.0;
  double alpha = 0.0;  // vol-of-vol; the SABR-exponential α̂ when kind == sabr_exp
  double hurst = 0.5;  // only meaningful for fractional_bergomi

  static VolModelSpec fractional_bergomi(double sigma0, double alpha, double hurst) {
    return {VolKind::fractional_bergomi, sigma0, alpha, hurst};
  }
  static VolModelSpec sabr_exp(double sigma0, double alpha) { return {VolKind::sabr_exp, sigma0, alpha, 0.5}; }
  static VolModelSpec constant(double sigma0) { return {VolKind::constant, sigma0, 0.0, 0.5}; }

  /// Hurst index that governs the short-time regime (1/2 for Markovian models).
  double effective_hurst() const noexcept { return kind == VolKind::fractional_bergomi ? hurst : 0.5; }

  void validate() const {
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw ConfigError("vol.sigma0", "must be > 0");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("vol.alpha", "must be >= 0");
    if (kind == VolKind::fractional_bergomi && !(hurst > 0.0 && hurst < 1.0))
      throw ConfigError("vol.hurst", "hurst index must lie in (0, 1), got " + std::to_string(hurst));
  }
};

inline constexpr std::size_t kMaxKernelSteps = 1024;

/// Cov(W_t, W^H_u) = sqrt(2H)/(H+1/2) [u^{H+1/2} - (u - min(t,u))^{H+1/2}].
inline double rl_cross_covariance(double t, double u, double hurst) {
  const double p = hurst + 0.5;
  const double m = std::min(t, u);
  return std::sqrt(2.0 * hurst) / p * (std::pow(u, p) - std::pow(u - m, p));
}

/// Cov(W^H_t, W^H_u) = 2H ∫_0^{min(t,u)} (t-s)^{H-1/2} (u-s)^{H-1/2} ds.
inline double rl_covariance(double t, double u, double hurst) {
  if (t > u) std::swap(t, u);
  if (t <= 0.0) return 0.0;
  if (t == u) return std::pow(t, 2.0 * hurst);
  const double a = hurst - 0.5;
  const double gap = u - t;
  // v = t - s; tanh-sinh absorbs the v^a endpoint singularity. The integrand
  // changes shape at v ~ gap, so the range is split there.
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  auto f = [=](double v) { return std::pow(v, a) * std::pow(gap + v, a); };
  const double split = std::min(gap, t);
  double integral = rule.integrate(f, 0.0, split, 1e-13);
  if (split < t) integral += rule.integrate(f, split, t, 1e-13);
  return 2.0 * hurst * integral;
}

/// Lower Cholesky factor of the joint covariance of
/// (ΔW_1, ..., ΔW_n, W^H_{t_1}, ..., W^H_{t_n}), stored dense row-major.
class KernelCholesky {
 public:
  KernelCholesky() = default;
  KernelCholesky(std::size_t n_steps, std::vector<double> lower)
      : n_(n_steps), lower_(std::move(lower)) {}

  std::size_t n_steps() const noexcept { return n_; }
  std::size_t dimension() const noexcept { return 2 * n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return lower_[i * 2 * n_ + j]; }

  /// out = L * normals. The ΔW block of L is diagonal, which is exploited.
  void apply(std::span<const double> normals, std::span<double> out) const noexcept {
    const std::size_t dim = 2 * n_;
    for (std::size_t i = 0; i < n_; ++i) out[i] = lower_[i * dim + i] * normals[i];
    for (std::size_t i = n_; i < dim; ++i) {
      const double* row = &lower_[i * dim];
      double acc = 0.0;
      for (std::size_t j = 0; j <= i; ++j) acc += row[j] * normals[j];
      out[i] = acc;
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> lower_;
};

/// Joint covariance matrix used by build_kernel_cholesky (exposed for tests).
inline std::vector<double> kernel_covariance(const PathGrid& grid, double hurst) {
  const std::size_t n = grid.n_steps();
  const std::size_t dim = 2 * n;
  std::vector<double> cov(dim * dim, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return cov[i * dim + j]; };
  for (std::size_t i = 0; i < n; ++i) at(i, i) = grid.time(i + 1) - grid.time(i);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double u = grid.time(j + 1);
      const double c = rl_cross_covariance(grid.time(i + 1), u, hurst) - rl_cross_covariance(grid.time(i), u, hurst);
      at(i, n + j) = c;
      at(n + j, i) = c;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double c = rl_covariance(grid.time(i + 1), grid.time(j + 1), hurst);
      at(n + i, n + j) = c;
      at(n + j, n + i) = c;
    }
  }
  return cov;
}

namespace detail {

inline bool cholesky_in_place(std::vector<double>& a, std::size_t dim) {
  for (std::size_t j = 0; j < dim; ++j) {
    double d = a[j * dim + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * dim + k] * a[j * dim + k];
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    a[j * dim + j] = ljj;
    for (std::size_t i = j + 1; i < dim; ++i) {
      double s = a[i * dim + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * dim + k] * a[j * dim + k];
      a[i * dim + j] = s / ljj;
    }
    for (std::size_t k = j + 1; k < dim; ++k) a[j * dim + k] = 0.0;
  }
  return true;
}

}  // namespace detail

/// Cholesky factor of the (ΔW, W^H) joint covariance on `grid`. At H = 1/2
/// the matrix is singular (W^H = W) and the 1e-12 relative jitter makes it
/// factorable.
inline KernelCholesky build_kernel_cholesky(const PathGrid& grid, double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("vol.hurst", "hurst index must lie in (0, 1)");
  if (grid.n_steps() > kMaxKernelSteps)
    throw ConfigError("n_steps", "exact fractional scheme is capped at " + std::to_string(kMaxKernelSteps) + " steps");
  const std::size_t dim = 2 * grid.n_steps();
  const std::vector<double> cov = kernel_covariance(grid, hurst);
  std::vector<double> work = cov;
  if (detail::cholesky_in_place(work, dim)) return KernelCholesky(grid.n_steps(), std::move(work));

  double max_diag = 0.0;
  for (std::size_t i = 0; i < dim; ++i) max_diag = std::max(max_diag, cov[i * dim + i]);
  work = cov;
  for (std::size_t i = 0; i < dim; ++i) work[i * dim + i] += 1e-12 * max_diag;
  if (detail::cholesky_in_place(work, dim)) return KernelCholesky(grid.n_steps(), std::move(work));
  throw NumericalError("vol_models", "kernel covariance is not positive definite (grid too fine for double precision)");
}

/// Per-path volatility generator. Construction does the expensive work
/// (kernel factorisation); `correlate` and `realize` are cheap and const.
class VolPathSampler {
 public:
  VolPathSampler(const VolModelSpec& spec, const PathGrid& grid) : spec_(spec), grid_(grid) {
    spec_.validate();
    const std::size_t n = grid.n_steps();
    dt_sqrt_ = std::sqrt(grid.dt());
    drift_.assign(n, 0.0);
    if (uses_kernel()) factor_ = build_kernel_cholesky(grid, spec.hurst);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = grid.time(i);
      switch (spec.kind) {
        case VolKind::fractional_bergomi:
          drift_[i] = -0.25 * spec.alpha * spec.alpha * std::pow(t, 2.0 * spec.hurst);
          break;
        case VolKind::sabr_exp:
          drift_[i] = -0.5 * spec.alpha * spec.alpha * t;
          break;
        case VolKind::constant:
          break;
      }
    }
  }

  const VolModelSpec& spec() const noexcept { return spec_; }
  const PathGrid& grid() const noexcept { return grid_; }

  /// Standard normals consumed per path.
  std::size_t normals_per_path() const noexcept { return uses_kernel() ? 2 * grid_.n_steps() : grid_.n_steps(); }
  /// Size of the correlated Gaussian state produced by `correlate`.
  std::size_t state_size() const noexcept { return normals_per_path(); }

  void correlate(std::span<const double> normals, std::span<double> state) const noexcept {
    if (uses_kernel()) {
      factor_.apply(normals, state);
    } else {
      for (std::size_t i = 0; i < grid_.n_steps(); ++i) state[i] = dt_sqrt_ * normals[i];
    }
  }

  /// Builds ΔW and left-endpoint σ from a correlated state; sign = -1 gives
  /// the antithetic path.
  void realize(std::span<const double> state, double sign, std::span<double> dw,
               std::span<double> sigma) const noexcept {
    const std::size_t n = grid_.n_steps();
    for (std::size_t i = 0; i < n; ++i) dw[i] = sign * state[i];
    const double s0 = spec_.sigma0;
    switch (spec_.kind) {
      case VolKind::constant:
        std::fill(sigma.begin(), sigma.begin() + static_cast<std::ptrdiff_t>(n), s0);
        return;
      case VolKind::sabr_exp: {
        double w = 0.0;
        sigma[0] = s0;
        for (std::size_t i = 1; i < n; ++i) {
          w += dw[i - 1];
          sigma[i] = s0 * std::exp(spec_.alpha * w + drift_[i]);
        }
        return;
      }
      case VolKind::fractional_bergomi: {
        sigma[0] = s0;
        const double half_alpha = 0.5 * spec_.alpha;
        if (!uses_kernel()) {
          double w = 0.0;
          for (std::size_t i = 1; i < n; ++i) {
            w += dw[i - 1];
            sigma[i] = s0 * std::exp(half_alpha * w + drift_[i]);
          }
        } else {
          // state[n + i - 1] holds W^H_{t_i}
          for (std::size_t i = 1; i < n; ++i)
            sigma[i] = s0 * std::exp(half_alpha * sign * state[n + i - 1] + drift_[i]);
        }
        return;
      }
    }
  }

 private:
  // H = 1/2 collapses W^H to W; no factorisation needed.
  bool uses_kernel() const noexcept { return spec_.kind == VolKind::fractional_bergomi && spec_.hurst != 0.5; }

  VolModelSpec spec_;
  PathGrid grid_;
  KernelCholesky factor_;
  std::vector<double> drift_;
  double dt_sqrt_ = 0.0;
};

/// Left-endpoint volatilities and the W increments that drive them.
struct VolPathBatch {
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  std::vector<double> w_increments;  // row-major [path][step]
  std::vector<double> sigma;         // row-major [path][step], value at t_step

  double dw(std::size_t path, std::size_t step) const { return w_increments[path * n_steps + step]; }
  double vol(std::size_t path, std::size_t step) const { return sigma[path * n_steps + step]; }
};

/// Simulates `n_paths` volatility paths; path p uses stream (seed, volatility, p),
/// the same stream the pricing engine uses for its p-th path.
inline VolPathBatch simulate_vol(const VolModelSpec& spec, const PathGrid& grid, std::size_t n_paths,
                                 std::uint64_t seed) {
  const VolPathSampler sampler(spec, grid);
  const std::size_t n = grid.n_steps();
  VolPathBatch batch{n_paths, n, std::vector<double>(n_paths * n), std::vector<double>(n_paths * n)};
  std::vector<double> normals(sampler.normals_per_path());
  std::vector<double> state(sampler.state_size());
  for (std::size_t p = 0; p < n_paths; ++p) {
    RandomStream rng(seed, StreamComponent::volatility, p);
    for (double& z : normals) z = rng.normal();
    sampler.correlate(normals, state);
    sampler.realize(state, 1.0, std::span<double>(batch.w_increments).subspan(p * n, n),
                    std::span<double>(batch.sigma).subspan(p * n, n));
  }
  return batch;
}

}  // namespace jdsv
