// Minimal library usage: price one configuration and compare with the limits.

#include <cstdio>

#include "jdsv/jdsv.hpp"

int main() {
  jdsv::ModelConfig cfg;
  cfg.s0 = 100.0;
  cfg.rho = -0.3;
  cfg.t_end = 1e-3;
  cfg.vol = jdsv::VolModelSpec::fractional_bergomi(0.5, 0.5, 0.7);
  cfg.levy = jdsv::Cgmy{0.05, 2.0, 4.0, 1.5, jdsv::kDefaultCgmyTruncation};
  cfg.n_paths = 200'000;

  const jdsv::IvPoint mc = jdsv::estimate_iv_point(cfg);
  const jdsv::AsymptoteReport theory = jdsv::theoretical_skew(cfg.vol, cfg.levy, cfg.rho);

  std::printf("level  mc %.5f +- %.5f   limit %.5f\n", mc.level.mean, mc.level.std_error, theory.level);
  std::printf("skew   mc %.5f +- %.5f   limit %.5f (%s)\n", mc.skew.mean, mc.skew.std_error,
              theory.skew_or_scaled_skew, jdsv::to_string(theory.kind));
}
