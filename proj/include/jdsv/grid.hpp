#pragma once

#include <cstddef>
#include <vector>

#include "jdsv/errors.hpp"

namespace jdsv {

/// Uniform time grid 0 = t_0 < ... < t_n = t_end.
class PathGrid {
 public:
  PathGrid(double t_end, std::size_t n_steps) : t_end_(t_end), n_steps_(n_steps) {
    if (!(t_end > 0.0)) throw ConfigError("t_end", "maturity must be > 0");
    if (n_steps < 1) throw ConfigError("n_steps", "need at least one step");
  }

  double t_end() const noexcept { return t_end_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  double dt() const noexcept { return t_end_ / static_cast<double>(n_steps_); }

  /// t_i; exact at i == n_steps.
  double time(std::size_t i) const noexcept {
    return i == n_steps_ ? t_end_ : t_end_ * static_cast<double>(i) / static_cast<double>(n_steps_);
  }

  std::vector<double> times() const {
    std::vector<double> out(n_steps_ + 1);
    for (std::size_t i = 0; i <= n_steps_; ++i) out[i] = time(i);
    return out;
  }

 private:
  double t_end_;
  std::size_t n_steps_;
};

}  // namespace jdsv
