#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "jdsv/errors.hpp"
#include "jdsv/levy.hpp"
#include "support.hpp"

namespace {

using jdsv::Cgmy;
using jdsv::CompoundPoisson;
using jdsv::GaussianJumps;
using jdsv::LaplaceJumps;
using jdsv::LevySpec;
using jdsv::Nig;
using jdsv::NoJumps;

const Cgmy kAsym{0.05, 2.0, 4.0, 1.5, jdsv::kDefaultCgmyTruncation};
const Cgmy kSymLevel{1.0, 5.0, 5.0, 1.0, jdsv::kDefaultCgmyTruncation};
const Cgmy kSymSkew{0.005, 5.0, 5.0, 1.0, jdsv::kDefaultCgmyTruncation};

// ∫_{|y|>ε} y ν(dy) = C ∫_ε^∞ y^{-Y} (e^{-My} - e^{-Gy}) dy, by quadrature.
double c1_eps_quadrature(const Cgmy& s, double eps) {
  boost::math::quadrature::exp_sinh<double> integrator;
  // y = ε e^u
  auto f = [&](double u) {
    const double y = eps * std::exp(u);
    if (!std::isfinite(y)) return 0.0;
    return y * std::pow(y, -s.Y) * (std::exp(-s.M * y) - std::exp(-s.G * y));
  };
  return s.C * integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
}

TEST(C1, ClosedForms) {
  const auto cp = jdsv::c1_of(CompoundPoisson{5.0, GaussianJumps{0.01, 0.2}});
  EXPECT_NEAR(cp.value, 0.05, 1e-16);
  EXPECT_EQ(cp.provenance, jdsv::C1Provenance::closed_form);
  EXPECT_NEAR(jdsv::c1_of(CompoundPoisson{5.0, LaplaceJumps{0.01, 1.0}}).value, 0.05, 1e-16);
  EXPECT_NEAR(jdsv::c1_of(CompoundPoisson{5.0, LaplaceJumps{0.1, 0.1}}).value, 0.5, 1e-15);

  EXPECT_NEAR(jdsv::c1_of(kAsym).value, -0.10382794271800314, 1e-10);
  EXPECT_EQ(jdsv::c1_of(kSymLevel).value, 0.0);
  EXPECT_EQ(jdsv::c1_of(kSymLevel).provenance, jdsv::C1Provenance::zero_by_symmetry);
  EXPECT_EQ(jdsv::c1_of(NoJumps{}).value, 0.0);
}

TEST(C1, NigDivergesWithSkewedJumps) {
  const auto pos = jdsv::c1_of(Nig{1.5, 0.5, 1.0});
  EXPECT_EQ(pos.provenance, jdsv::C1Provenance::divergent);
  EXPECT_EQ(pos.value, std::numeric_limits<double>::infinity());
  EXPECT_FALSE(pos.finite());
  EXPECT_EQ(jdsv::c1_of(Nig{1.5, -0.5, 1.0}).value, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(jdsv::c1_of(Nig{1.5, 0.0, 1.0}).value, 0.0);
}

TEST(C1, CgmyUnitIndexNeedsSymmetry) {
  EXPECT_THROW(jdsv::c1_of(Cgmy{1.0, 2.0, 5.0, 1.0, 1e-4}), std::domain_error);
  EXPECT_THROW(jdsv::validate(Cgmy{1.0, 2.0, 5.0, 1.0, 1e-4}), jdsv::ConfigError);
}

TEST(C1Eps, AgreesWithQuadrature) {
  for (double eps : {1e-1, 1e-3, 1e-6}) {
    const double q = c1_eps_quadrature(kAsym, eps);
    EXPECT_NEAR(jdsv::c1_eps(kAsym, eps) / q, 1.0, 1e-6) << eps;
  }
}

TEST(C1Eps, ReferenceValues) {
  // 30-digit quadrature.
  EXPECT_NEAR(jdsv::c1_eps(kAsym, 1e-1), -0.0463590772608411816, 1e-12);
  EXPECT_NEAR(jdsv::c1_eps(kAsym, 1e-3), -0.0975097060545830708, 1e-12);
  EXPECT_NEAR(jdsv::c1_eps(kAsym, 1e-6), -0.103627942918002969, 1e-12);
  EXPECT_NEAR(jdsv::c1_eps(kAsym, 1e-8), -0.103807942718203155, 1e-12);
}

TEST(C1Eps, ConvergesMonotonically) {
  const double c1 = jdsv::c1_of(kAsym).value;
  double prev = 0.0;
  for (double eps = 0.5; eps >= 1e-8; eps /= 4.0) {
    const double v = jdsv::c1_eps(kAsym, eps);
    EXPECT_LT(v, prev) << eps;  // G < M: the truncated moment decreases to c₁
    EXPECT_GT(v, c1) << eps;
    prev = v;
  }
  EXPECT_NEAR(jdsv::c1_eps(kAsym, 1e-8), c1, 2.1e-5);
  // The mirrored measure converges from below.
  const Cgmy mirrored{0.05, 4.0, 2.0, 1.5, 1e-4};
  prev = 0.0;
  for (double eps = 0.5; eps >= 1e-8; eps /= 4.0) {
    const double v = jdsv::c1_eps(mirrored, eps);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

// c₁ - c₁ᵉ = C ∫_0^ε y^{-Y}(e^{-My} - e^{-Gy}) dy; the unsigned bound ∫|y|ν is
// infinite for Y >= 1, so the signed small-jump moment is checked instead.
TEST(C1Eps, GapEqualsSmallJumpMoment) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (double eps : {1e-1, 1e-2, 1e-4}) {
    // (e^{-My} - e^{-Gy}) / y stays finite as y -> 0.
    auto f = [&](double y) {
      return std::pow(y, 1.0 - kAsym.Y) * ((std::expm1(-kAsym.M * y) - std::expm1(-kAsym.G * y)) / y);
    };
    const double gap = kAsym.C * integrator.integrate(f, 0.0, eps, 1e-13);
    EXPECT_NEAR((jdsv::c1_of(kAsym).value - jdsv::c1_eps(kAsym, eps)) / gap, 1.0, 1e-6) << eps;
  }
}

TEST(C1Eps, SymmetricIsZero) {
  for (double eps : {0.3, 1e-3, 1e-9}) EXPECT_EQ(jdsv::c1_eps(kSymSkew, eps), 0.0);
  EXPECT_THROW(jdsv::c1_eps(kAsym, 0.0), std::domain_error);
}

TEST(SmallJumpVariance, ReferenceAndEnvelope) {
  const double v = jdsv::small_jump_variance(kAsym, 0.01);
  EXPECT_NEAR(v / 0.0198019829822732056, 1.0, 1e-8);
  EXPECT_GT(v, 0.0);
  // 2 C ε^{2-Y} / (2-Y) with exp <= 1
  EXPECT_LE(v, 2.0 * kAsym.C * std::pow(0.01, 2.0 - kAsym.Y) / (2.0 - kAsym.Y));
  EXPECT_NEAR(jdsv::small_jump_variance(kAsym, 0.005) / v, std::pow(2.0, kAsym.Y - 2.0), 0.05 * std::pow(2.0, kAsym.Y - 2.0));
  // For ε -> 0 the exponential factors tend to 1 and the envelope is attained.
  EXPECT_NEAR(jdsv::small_jump_variance(kAsym, 1e-12) / (2.0 * kAsym.C * std::pow(1e-12, 0.5) / 0.5), 1.0, 1e-9);
}

TEST(CgmyTable, IntensityMatchesQuadrature) {
  const jdsv::CgmyJumpTable table(kAsym, 1e-4);
  // 30-digit references for each tail.
  EXPECT_NEAR(table.positive().total() / 33294.2706424093505, 1.0, 1e-8);
  EXPECT_NEAR(table.negative().total() / 33313.6655504810606, 1.0, 1e-8);
  EXPECT_NEAR(table.positive().total() / jdsv::cgmy_tail_intensity(kAsym.C, kAsym.M, kAsym.Y, 1e-4), 1.0, 1e-8);
  EXPECT_NEAR(table.first_moment() / jdsv::c1_eps(kAsym, 1e-4), 1.0, 1e-4);
}

TEST(CgmyTable, SamplesStayInTheTruncatedSupport) {
  const jdsv::CgmyJumpTable table(kAsym, 1e-3);
  jdsv::RandomStream rng(1, jdsv::StreamComponent::jumps, 0);
  for (int i = 0; i < 100000; ++i) ASSERT_GE(std::fabs(table.sample(rng)), 1e-3 * (1.0 - 1e-12));
  EXPECT_NEAR(table.positive().sample(1e-300), 1e-3, 1e-12);
}

TEST(LevySampler, RequiresTruncationForCgmy) {
  try {
    jdsv::LevySampler(Cgmy{0.05, 2.0, 4.0, 1.5, std::nullopt}, 1e-3);
    FAIL();
  } catch (const jdsv::ConfigError& e) {
    EXPECT_EQ(e.field(), "levy.truncation_eps");
  }
}

TEST(LevySampler, NigCompensationDrift) {
  const jdsv::LevySampler s(Nig{1.5, 0.5, 1.0}, 1.0);
  EXPECT_NEAR(-s.step_drift(), 0.35355339, 1e-8);
}

TEST(LevySampler, Validation) {
  EXPECT_THROW(jdsv::validate(CompoundPoisson{0.0, GaussianJumps{0.0, 1.0}}), jdsv::ConfigError);
  EXPECT_THROW(jdsv::validate(CompoundPoisson{1.0, LaplaceJumps{0.0, -1.0}}), jdsv::ConfigError);
  EXPECT_THROW(jdsv::validate(Nig{1.0, 1.0, 1.0}), jdsv::ConfigError);
  EXPECT_THROW(jdsv::validate(Cgmy{0.05, 2.0, 4.0, 2.0, 1e-4}), jdsv::ConfigError);
}

TEST(SampleIncrements, NoJumpsIsExactlyZero) {
  const auto inc = jdsv::sample_increments(NoJumps{}, jdsv::PathGrid(1.0, 4), 100, 1);
  for (double v : inc.values) ASSERT_EQ(v, 0.0);
}

std::vector<double> path_totals(const LevySpec& spec, double t, std::size_t steps, std::size_t n, std::uint64_t seed) {
  const auto inc = jdsv::sample_increments(spec, jdsv::PathGrid(t, steps), n, seed);
  std::vector<double> out(n);
  for (std::size_t p = 0; p < n; ++p) out[p] = inc.path_total(p);
  return out;
}

TEST(SampleIncrements, CompoundPoissonMoments) {
  const auto x = path_totals(CompoundPoisson{5.0, GaussianJumps{0.01, 0.2}}, 1.0, 16, 200000, 31);
  const auto m = jdsv::testing::moments(x);
  EXPECT_NEAR(m.mean, 0.0, 3.0 * m.mean_se);
  EXPECT_NEAR(m.variance, 0.2005, 3.0 * m.variance_se);
}

TEST(SampleIncrements, LaplaceJumpMoments) {
  // Var L_1 = λ (δ² + 2b²)
  const auto x = path_totals(CompoundPoisson{5.0, LaplaceJumps{0.1, 0.1}}, 1.0, 16, 200000, 32);
  const auto m = jdsv::testing::moments(x);
  EXPECT_NEAR(m.mean, 0.0, 3.0 * m.mean_se);
  EXPECT_NEAR(m.variance, 5.0 * (0.01 + 0.02), 3.0 * m.variance_se);
}

struct MartingaleCase {
  const char* label;
  LevySpec spec;
  double t;
};

class Martingale : public ::testing::TestWithParam<MartingaleCase> {};

TEST_P(Martingale, MeanIsZero) {
  const auto& c = GetParam();
  const auto x = path_totals(c.spec, c.t, 16, 100000, 33);
  const auto m = jdsv::testing::moments(x);
  EXPECT_NEAR(m.mean, 0.0, 3.0 * m.mean_se) << c.label;
}

INSTANTIATE_TEST_SUITE_P(
    EveryFamily, Martingale,
    ::testing::Values(
        MartingaleCase{"cp_gauss", CompoundPoisson{5.0, GaussianJumps{0.01, 0.2}}, 1.0},
        MartingaleCase{"cp_gauss_neg", CompoundPoisson{5.0, GaussianJumps{-0.01, 0.2}}, 1.0},
        MartingaleCase{"cp_laplace", CompoundPoisson{5.0, LaplaceJumps{0.01, 1.0}}, 1.0},
        MartingaleCase{"cp_laplace_narrow", CompoundPoisson{5.0, LaplaceJumps{0.1, 0.1}}, 1.0},
        MartingaleCase{"cp_dense", CompoundPoisson{2000.0, GaussianJumps{0.02, 0.01}}, 1.0},
        MartingaleCase{"cgmy_asym", Cgmy{0.05, 2.0, 4.0, 1.5, 1e-4}, 1e-3},
        MartingaleCase{"cgmy_asym_coarse", Cgmy{0.05, 2.0, 4.0, 1.5, 1e-2}, 1.0},
        MartingaleCase{"cgmy_sym_level", Cgmy{1.0, 5.0, 5.0, 1.0, 1e-4}, 1e-3},
        MartingaleCase{"cgmy_sym_skew", Cgmy{0.005, 5.0, 5.0, 1.0, 1e-4}, 1e-2},
        MartingaleCase{"cgmy_small_jump_gaussian", Cgmy{0.05, 2.0, 4.0, 1.5, 1e-3, true}, 1e-2},
        MartingaleCase{"nig", Nig{1.5, 0.5, 1.0}, 1.0},
        MartingaleCase{"nig_short", Nig{1.5, 0.5, 1.0}, 1e-5},
        MartingaleCase{"nig_sym", Nig{1.5, 0.0, 1.0}, 1.0}),
    [](const auto& info) { return std::string(info.param.label); });

TEST(SampleIncrements, SmallJumpGaussianAddsTheDroppedVariance) {
  const Cgmy off{0.05, 2.0, 4.0, 1.5, 1e-2, false};
  Cgmy on = off;
  on.small_jump_gaussian = true;
  const double t = 0.1;
  const auto a = jdsv::testing::moments(path_totals(off, t, 8, 200000, 34));
  const auto b = jdsv::testing::moments(path_totals(on, t, 8, 200000, 35));
  const double added = jdsv::small_jump_variance(off, 1e-2) * t;
  EXPECT_NEAR(b.variance - a.variance, added,
              3.0 * std::sqrt(a.variance_se * a.variance_se + b.variance_se * b.variance_se));
}

TEST(SampleIncrements, SymmetricNigHasNoSkewness) {
  const auto x = path_totals(Nig{1.5, 0.0, 1.0}, 1.0, 8, 200000, 36);
  const auto m = jdsv::testing::moments(x);
  const double sd = std::sqrt(m.variance);
  std::vector<double> cubes(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) cubes[i] = std::pow((x[i] - m.mean) / sd, 3.0);
  const auto s = jdsv::testing::moments(cubes);
  EXPECT_NEAR(s.mean, 0.0, 3.0 * s.mean_se);
  // NIG variance δα²/γ³ at β = 0 is δ/α.
  EXPECT_NEAR(m.variance, 1.0 / 1.5, 3.0 * m.variance_se);
}

TEST(SampleIncrements, Reproducible) {
  const auto a = jdsv::sample_increments(kAsym, jdsv::PathGrid(1e-3, 8), 100, 3);
  const auto b = jdsv::sample_increments(kAsym, jdsv::PathGrid(1e-3, 8), 100, 3);
  EXPECT_EQ(a.values, b.values);
}

TEST(InverseGaussian, MeanAndVariance) {
  jdsv::RandomStream rng(2, jdsv::StreamComponent::jumps, 7);
  for (auto [mu, lambda] : {std::pair{1.0, 2.0}, std::pair{0.01, 0.001}, std::pair{3.0, 0.5}}) {
    std::vector<double> x(200000);
    for (double& v : x) v = jdsv::sample_inverse_gaussian(rng, mu, lambda);
    const auto m = jdsv::testing::moments(x);
    EXPECT_NEAR(m.mean, mu, 3.0 * m.mean_se) << mu << " " << lambda;
    for (double v : x) ASSERT_GT(v, 0.0);
  }
}

}  // namespace
