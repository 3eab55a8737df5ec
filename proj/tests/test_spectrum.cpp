#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lcs/spectrum.hpp"

using namespace lcs;

TEST(Energy, Examples) {
  EXPECT_DOUBLE_EQ(energy({1, 1, 1, 1}, 0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(energy({1, 1, 0, 1}, 2, 123.0), 2.5);
  EXPECT_DOUBLE_EQ(energy({1, 1, 1, 1}, 1, 0.5), 0.5);
}

TEST(ShiftedEnergy, Examples) {
  EXPECT_EQ(shifted_energy({1, 1, 1}, 0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(shifted_energy({1, 1, 1}, 3, 0.25), 2.75);
  EXPECT_DOUBLE_EQ(shifted_energy({2, 0, 0}, 5, 7.0), 10.0);
}

TEST(ShiftedEnergy, DiffersFromFullEnergyByConstant) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const PhysicalParams p{u(rng), u(rng), u(rng), u(rng)};
    const auto s = SpectralScales::from(p);
    const double alpha = u(rng) - 1.5;
    for (std::size_t n = 0; n <= 30; ++n) {
      const double expect = energy(p, n, alpha) + p.lambda * p.lambda / (2 * p.m) - p.hbar * p.omega_c / 2;
      EXPECT_NEAR(shifted_energy(s, n, alpha), expect, 1e-12 * (1 + std::abs(expect)));
    }
  }
}

TEST(Scales, RatioIsXiOverKappa) {
  const auto s = SpectralScales::from({2.0, 3.0, 5.0, 0.7});
  EXPECT_NEAR(s.ratio, s.xi / s.kappa, 1e-15);
  EXPECT_DOUBLE_EQ(s.kappa, 0.7 * 3.0);
  EXPECT_DOUBLE_EQ(s.xi, 0.7 * 5.0 / 2.0);
}

TEST(GammaParam, ExamplesAndDegeneracy) {
  const SpectralScales s{1, 1, 1};
  EXPECT_EQ(gamma_param(s, 0.0), 1.0);
  EXPECT_EQ(gamma_param(s, 0.5), 0.5);
  EXPECT_THROW(gamma_param(s, 1.0), DegenerateSpectrum);
  EXPECT_THROW(rho(s, 1.0, 2), DegenerateSpectrum);
}

TEST(Rho, Examples) {
  const SpectralScales s{1, 1, 1};
  EXPECT_EQ(rho(s, 0.5, 0), 1.0);
  EXPECT_DOUBLE_EQ(rho(s, 0.5, 2), 0.75);
  EXPECT_DOUBLE_EQ(rho(s, 0.0, 4), 24.0);
}

TEST(Rho, ProductOfShiftedEnergies) {
  const SpectralScales s{1.3, 0.4, 0.4 / 1.3};
  for (double alpha : {-2.0, 0.0, 1.5}) {
    for (std::size_t n = 1; n <= 40; ++n) {
      EXPECT_NEAR(rho(s, alpha, n) / rho(s, alpha, n - 1), shifted_energy(s, n, alpha),
                  1e-12 * shifted_energy(s, n, alpha));
      EXPECT_NEAR(ln_rho(s, alpha, n), std::log(rho(s, alpha, n)), 1e-12 * n);
    }
  }
}

TEST(Rho, GammaOneIsRho1) {
  const SpectralScales s{0.8, 1.0, 1.25};
  for (std::size_t n = 0; n <= 30; ++n) EXPECT_NEAR(rho(s, 0.0, n) / rho1(s, n), 1.0, 1e-14);
}

TEST(Rho1, Examples) {
  EXPECT_EQ(rho1({1, 1, 1}, 0), 1.0);
  EXPECT_EQ(rho1({1, 1, 1}, 3), 6.0);
  EXPECT_DOUBLE_EQ(rho1({0.5, 1, 2}, 4), 1.5);
}

TEST(RhoBar, Examples) {
  const auto ints = AlphaSequence::from_values({0, -1, -2, -3}, Regime::NonPositive);
  const EpsilonSequence e1(ints, 1.0);
  EXPECT_EQ(rho_bar({1, 1, 1}, e1, 0), 1.0);
  EXPECT_EQ(rho_bar({1, 1, 1}, e1, 3), 6.0);
  const auto halves = AlphaSequence::from_values({0, -0.5, -1.5}, Regime::NonPositive);
  const EpsilonSequence e2(halves, 1.0);
  EXPECT_DOUBLE_EQ(rho_bar({1, 2, 2}, e2, 2), 3.0);
}

TEST(RhoBar, StepIsXiEps) {
  const auto a = AlphaSequence::linear(Regime::NonPositive, -0.5, 0.75);
  const SpectralScales s{1, 1.7, 1.7};
  const EpsilonSequence e(a, 1 / s.ratio);
  for (std::size_t k = 1; k < 40; ++k) EXPECT_NEAR(rho_bar(s, e, k) / rho_bar(s, e, k - 1), s.xi * e[k], 1e-12 * k);
}

TEST(Validate, BoundedAccepted) {
  const auto r = validate({1, 1, 1, 1}, AlphaSequence::from_values({0.5, 0.25, 0.1}, Regime::ShiftedBounded, 1));
  ASSERT_TRUE(r.ok());
  EXPECT_DOUBLE_EQ(r.bundle->eps[0], 0.5);
  EXPECT_DOUBLE_EQ(r.bundle->eps[1], 0.75);
  EXPECT_DOUBLE_EQ(r.bundle->eps[2], 0.9);
}

TEST(Validate, BoundedRejectedAboveUpperBound) {
  const auto r = validate({1, 1, 1, 1}, AlphaSequence::from_values({1.5, 0.5}, Regime::ShiftedBounded, 1));
  ASSERT_FALSE(r.ok());
  ASSERT_FALSE(r.violations.empty());
  EXPECT_EQ(r.violations[0].field, "alpha");
  EXPECT_EQ(r.violations[0].index, std::size_t{0});
  EXPECT_THROW(validated({1, 1, 1, 1}, AlphaSequence::from_values({1.5}, Regime::ShiftedBounded)), DomainError);
}

TEST(Validate, NonPositiveAccepted) {
  const auto r = validate({1, 1, 1, 1}, AlphaSequence::from_values({0, -1, -2}, Regime::NonPositive));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.bundle->eps[1], 1.0);
  EXPECT_EQ(r.bundle->eps[2], 2.0);
}

TEST(Validate, ReportsEveryViolation) {
  const auto r = validate({1, -1, 0, 1}, AlphaSequence::from_values({0}, Regime::NonPositive));
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.violations.size(), 2u);
  const auto s = validate({1, 1, 1, 1}, AlphaSequence::from_values({0.1, 0.5, 2.0}, Regime::ShiftedBounded));
  EXPECT_FALSE(s.ok());
  EXPECT_GE(s.violations.size(), 2u);  // not decreasing, and above the bound
  const auto t = validate({1, 1, 1, 1}, AlphaSequence::from_values({0, 1, -1}, Regime::NonPositive));
  EXPECT_FALSE(t.ok());
}

TEST(Validate, UnboundedGeneratorsCheckedOnWindow) {
  EXPECT_TRUE(validate({1, 1, 1, 1}, AlphaSequence::linear(Regime::NonPositive, 0.0, 0.5)).ok());
  EXPECT_TRUE(validate({1, 1, 1, 1}, AlphaSequence::geometric(0.9, 0.2, 0.5)).ok());
  EXPECT_FALSE(validate({1, 1, 1, 1}, AlphaSequence::geometric(0.9, -0.2, 0.5)).ok());
}

TEST(AlphaSequence, LinearBoundedIsFinite) {
  const auto a = AlphaSequence::linear(Regime::ShiftedBounded, 0.9, 0.2);
  ASSERT_TRUE(a.size().has_value());
  EXPECT_EQ(*a.size(), 5u);  // 0.9 0.7 0.5 0.3 0.1
  EXPECT_THROW(a[5], std::out_of_range);
  const EpsilonSequence e(a, 1.0);
  ASSERT_TRUE(e.limit().has_value());
  EXPECT_NEAR(*e.limit(), 0.9, 1e-15);
}

TEST(EpsilonSequence, GeometricLimit) {
  const auto a = AlphaSequence::geometric(0.8, 0.3, 0.5, 2);
  const EpsilonSequence e(a, 1.5);
  EXPECT_NEAR(*e.limit(), 3.0 - 0.3, 1e-15);
  EXPECT_NEAR(e[0], 3.0 - 0.8, 1e-15);
  EXPECT_NEAR(e.factorial(2), e[1] * e[2], 1e-15);
}
