#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "lcs/states.hpp"

using namespace lcs;

namespace {

SpectrumBundle nonpositive(double a0 = -0.5, double step = 1.0) {
  return validated({}, AlphaSequence::linear(Regime::NonPositive, a0, step));
}

SpectrumBundle bounded() { return validated({}, AlphaSequence::geometric(0.5, 0.1, 0.6)); }

double norm_of(const BuiltState& b) { return std::sqrt(norm_squared(b.state)); }

}  // namespace

TEST(Radius, RatioTestAndStrictFlag) {
  const auto b = bounded();  // eps -> 1 - 0.1
  EXPECT_NEAR(convergence_radius(b), 0.9, 1e-15);
  // sqrt(0.9) > 0.9: the strict rule never widens the ratio-test domain
  EXPECT_NEAR(convergence_radius(b, RadiusRule::SqrtLimit), 0.9, 1e-15);
  EXPECT_TRUE(std::isinf(convergence_radius(nonpositive())));
  EXPECT_THROW(build_one_dof(b, OneDof{0.95, 0, 0, 0}), ConvergenceDomainError);
  EXPECT_NO_THROW(build_one_dof(b, OneDof{0.85, 0, 0, 0}, {.tail_threshold = 1e-12}));

  const auto wide = validated({}, AlphaSequence::geometric(0.5, 0.1, 0.6, 2));  // eps -> 1.9
  EXPECT_NEAR(convergence_radius(wide), 1.9, 1e-15);
  EXPECT_NEAR(convergence_radius(wide, RadiusRule::SqrtLimit), std::sqrt(1.9), 1e-15);
  EXPECT_NO_THROW(build_one_dof(wide, OneDof{1.5, 0, 0, 0}));
  BuildOptions strict;
  strict.radius = RadiusRule::SqrtLimit;
  EXPECT_THROW(build_one_dof(wide, OneDof{1.5, 0, 0, 0}, strict), ConvergenceDomainError);
}

TEST(OneDof, ZeroLabelIsBasisState) {
  const auto s = build_one_dof(bounded(), OneDof{0.0, 1.3, 2, 1}).state;
  EXPECT_EQ(s.cutoffs(), (BasisCutoffs{2, 1, 0}));
  EXPECT_NEAR(std::abs(s(2, 1, 0)), 1.0, 1e-15);
}

TEST(OneDof, TermRatioAndPhase) {
  // eps_1 = 0.5 with xi = 1: alpha = (0, -0.5, -1.5, ...)
  const auto b = validated({}, AlphaSequence::from_values({0.0, -0.5, -1.5, -2.5, -3.5, -4.5, -5.5, -6.5, -7.5, -8.5,
                                                            -9.5, -10.5, -11.5, -12.5, -13.5, -14.5},
                                                           Regime::NonPositive));
  const auto s = build_one_dof(b, OneDof{0.3, 0.0, 0, 0}).state;
  EXPECT_NEAR(std::abs(s(0, 0, 1)) / std::abs(s(0, 0, 0)), std::sqrt(0.6), 1e-14);
  EXPECT_NEAR(std::sqrt(0.6), 0.7745966692, 1e-10);
  const double d = 0.7;
  const auto t = build_one_dof(b, OneDof{0.3, d, 1, 0}).state;
  const double dphi = std::arg(t(1, 0, 1) / t(1, 0, 0));
  const double expect = -(b.shifted(1, 1) - b.shifted(1, 0)) * d;
  EXPECT_NEAR(std::remainder(dphi - expect, 2 * std::numbers::pi), 0.0, 1e-14);
}

TEST(OneDof, ZeroDeltaGivesNonNegativeRealCoefficients) {
  const auto s = build_one_dof(nonpositive(), OneDof{2.5, 0.0, 3, 0}).state;
  for (auto c : s.coefficients()) {
    EXPECT_GE(c.real(), 0.0);
    EXPECT_EQ(c.imag(), 0.0);
  }
}

TEST(OneDof, NormalizationConstantClosedForm) {
  // eps_k = k, xi = 1: N(K) = e^K
  const auto b = nonpositive(0.0, 1.0);
  const auto r = build_one_dof(b, OneDof{1.7, 0.2, 0, 0});
  EXPECT_NEAR(r.constants[0].value, 1.7, 1e-13);
  EXPECT_NEAR(norm_of(r), 1.0, 1e-10);
  EXPECT_LE(r.state.tail_bound(), 1e-12);
}

TEST(OneDof, TailThresholdEnforced) {
  BuildOptions o;
  o.cutoffs = BasisCutoffs{0, 0, 3};
  EXPECT_THROW(build_one_dof(nonpositive(), OneDof{5.0, 0, 0, 0}, o), TailBoundError);
  o.enforce_tail = false;
  const auto r = build_one_dof(nonpositive(), OneDof{5.0, 0, 0, 0}, o);
  EXPECT_NEAR(norm_squared(r.state) + r.state.tail_bound(), 1.0, 1e-9);
  EXPECT_GT(r.state.tail_bound(), 1e-3);
}

TEST(TwoDof, ZeroActionAndTermRatio) {
  const SpectralScales sc{1, 1, 1};
  const auto s0 = build_two_dof(sc, 0.5, TwoDof{0.0, 0.3, 1.0, 0.2, 0, 0}).state;
  EXPECT_EQ(s0.cutoffs().n_max, 0u);
  EXPECT_NEAR(std::abs(s0(0, 0, 0)), 1.0, 1e-15);
  // gamma = 0.5: |c1|^2/|c0|^2 = J/(kappa gamma)
  const auto s = build_two_dof(sc, 0.5, TwoDof{1.0, 0.0, 0.0, 0.0, 0, 0}).state;
  EXPECT_NEAR(std::norm(s(1, 0, 0)) / std::norm(s(0, 0, 0)), 2.0, 1e-14);
}

TEST(TwoDof, NormAndFiberWeight) {
  const SpectralScales sc{1, 1, 1};
  const auto r = build_two_dof(sc, 0.5, TwoDof{2.0, 0.4, 1.0, 1.1, 3, 0});
  EXPECT_NEAR(norm_of(r), 1.0, 1e-10);
  // J'^l / (rho(l) 1F1(1; gamma; J'))
  const double w = std::pow(1.0, 3) / (0.5 * 1.5 * 2.5) / specfun::kummer_1f1_unit(0.5, 1.0);
  EXPECT_NEAR(r.state.paper_norm2() / w, 1.0, 1e-13);
}

TEST(TwoDof, GammaOneIsPoissonLikeBicoherentMarginal) {
  const SpectralScales sc{1, 1, 1};
  BuildOptions o;
  o.cutoffs = BasisCutoffs{40, 0, 0};
  const auto s = build_two_dof(sc, 0.0, TwoDof{2.3, 0.0, 0.0, 0.0, 0, 0}, o).state;
  BuildOptions ob;
  ob.cutoffs = BasisCutoffs{40, 0, 0};
  const auto bc = build_bicoherent(BiCoherentAngles{2.3, 0.0, 0.0, 0.0, 0}, ob).state;
  for (std::size_t n = 0; n <= 40; ++n) {
    const double poisson = std::exp(-2.3 + n * std::log(2.3) - std::lgamma(n + 1.0));
    EXPECT_NEAR(std::norm(s(n, 0, 0)), poisson, 1e-15);
    EXPECT_NEAR(std::norm(s(n, 0, 0)), std::norm(bc(n, 0, 0)), 1e-15);
  }
}

TEST(TwoDof, DegenerateGamma) {
  EXPECT_THROW(build_two_dof(SpectralScales{1, 1, 1}, 1.0, TwoDof{1, 0, 1, 0, 0, 0}), DegenerateSpectrum);
}

TEST(TwoDof, OverlapAtOppositeAngleAgainstDoubleSum) {
  const SpectralScales sc{1, 1, 1};
  const double g = 0.7, alpha = 0.3, J = 1.4;
  BuildOptions o;
  o.cutoffs = BasisCutoffs{60, 0, 0};
  const auto a = build_two_dof(sc, alpha, TwoDof{J, 0.0, 0.0, 0.0, 0, 0}, o).state;
  const auto b = build_two_dof(sc, alpha, TwoDof{J, std::numbers::pi, 0.0, 0.0, 0, 0}, o).state;
  // sum_n J^n e^{-i (n - ratio alpha) pi} / (gamma)_n / 1F1, term by term
  std::complex<long double> acc = 0;
  long double t = 1;
  for (int n = 0; n <= 60; ++n) {
    if (n > 0) t *= J / (g + n - 1);
    acc += t * std::polar(1.0L, -(long double)(n - alpha) * std::numbers::pi_v<long double>);
  }
  const double ref = static_cast<double>(std::abs(acc)) / specfun::kummer_1f1_unit(g, J);
  EXPECT_NEAR(std::abs(inner_product(a, b)), ref, 1e-13);
}

TEST(ThreeDofIndependent, ZeroLabels) {
  const auto b = nonpositive(0.0, 1.0);
  const auto s = build_three_dof_independent(b, ThreeDofIndependentL{0, 0, 1.0, 0.4, 0, 0, 2}).state;
  EXPECT_EQ(s.cutoffs(), (BasisCutoffs{0, 2, 0}));
  EXPECT_NEAR(std::abs(s(0, 2, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::arg(s(0, 2, 0)), 2 * 0.4, 1e-15);  // e^{i kappa l theta'}
}

TEST(ThreeDofIndependent, NormWithExponentialNormalizations) {
  const auto b = nonpositive(0.0, 1.0);
  const auto r = build_three_dof_independent(b, ThreeDofIndependentL{1, 0.3, 1, 0.1, 0.5, 0.9, 1});
  EXPECT_NEAR(norm_of(r), 1.0, 1e-10);
  EXPECT_NEAR(r.constants[2].value, 0.5, 1e-14);  // ln N(K) = K for eps_k = k
}

TEST(ThreeDofIndependent, VariantsRelatedByRelabeling) {
  const auto b = nonpositive(0.0, 1.0);
  BuildOptions o;
  o.cutoffs = BasisCutoffs{30, 30, 20};
  o.enforce_tail = false;
  const double J = 1.2, th = 0.4, Jp = 0.7, thp = 1.9, K = 0.6, d = 0.3;
  const auto L = build_three_dof_independent(b, ThreeDofIndependentL{J, th, Jp, thp, K, d, 2}, o).state;
  const auto N = build_three_dof_independent(b, ThreeDofIndependentN{Jp, -thp, J, -th, K, d, 2}, o).state;
  for (std::size_t p = 0; p <= 30; ++p)
    for (std::size_t k = 0; k <= 20; ++k) EXPECT_NEAR(std::abs(L(p, 2, k) - N(2, p, k)), 0.0, 1e-15);
}

TEST(ThreeDofIndependent, ZeroKFactorizes) {
  const auto b = nonpositive(0.0, 1.0);
  const auto s = build_three_dof_independent(b, ThreeDofIndependentL{1.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0}).state;
  EXPECT_EQ(s.cutoffs().k_max, 0u);
  for (std::size_t n = 0; n <= s.cutoffs().n_max; ++n)
    EXPECT_NEAR(std::norm(s(n, 0, 0)), std::exp(-1.5 + n * std::log(1.5) - std::lgamma(n + 1.0)), 1e-15);
}

TEST(ThreeDofIndependent, RequiresNonPositiveRegime) {
  EXPECT_THROW(build_three_dof_independent(bounded(), ThreeDofIndependentL{1, 0, 1, 0, 0.1, 0, 0}), DomainError);
}

TEST(ThreeDofDependent, ZeroLabelsAndNorm) {
  const auto b = nonpositive();
  const auto s = build_three_dof_dependent(b, ThreeDofDependent{0, 0, 0, 0, 0, 0, 0}).state;
  EXPECT_EQ(s.cutoffs(), (BasisCutoffs{0, 0, 0}));
  EXPECT_NEAR(std::abs(s(0, 0, 0)), 1.0, 1e-15);
  const auto r = build_three_dof_dependent(b, ThreeDofDependent{1, 0.2, 1, 0.5, 0.5, 0.1, 0});
  EXPECT_NEAR(norm_of(r), 1.0, 1e-10);
}

TEST(ThreeDofDependent, NormalizationBound) {
  const auto b = nonpositive();
  for (double J : {0.0, 0.5, 3.0})
    for (double Jp : {0.0, 1.0, 4.0})
      for (double K : {0.1, 1.0, 5.0}) {
        const auto n = dependent_normalization(b, J, Jp, K);
        // term-by-term oracle for N(K)
        long double nk = 0, t = 1;
        for (int k = 0; k < 200; ++k) {
          if (k > 0) t *= K / b.eps[k];
          nk += t;
        }
        EXPECT_NEAR(n.N_K / static_cast<double>(nk), 1.0, 1e-13);
        EXPECT_LE(n.N_KJ, n.N_K * (1 + 1e-15));
        EXPECT_GT(n.N_KJ, 0.0);
      }
}

TEST(ThreeDofDependent, KBlockProfilesFollowGammaK) {
  const auto b = nonpositive();
  BuildOptions o;
  o.cutoffs = BasisCutoffs{40, 0, 3};
  o.enforce_tail = false;
  const auto s = build_three_dof_dependent(b, ThreeDofDependent{1.0, 0, 0, 0, 0.8, 0, 0}, o).state;
  for (std::size_t k = 0; k <= 3; ++k) {
    const double g = gamma_param(b.scales, b.alpha[k]);
    EXPECT_NEAR(std::norm(s(1, 0, k)) / std::norm(s(0, 0, k)), 1.0 / g, 1e-13);
  }
}

TEST(BiCoherent, VacuumAndPoissonRatio) {
  const auto v = build_bicoherent(BiCoherentComplex{0.0, 0.0, 3}).state;
  EXPECT_NEAR(std::abs(v(0, 0, 3)), 1.0, 1e-15);
  const auto s = build_bicoherent(BiCoherentComplex{std::sqrt(2.0), 0.0, 0}).state;
  EXPECT_NEAR(std::norm(s(2, 0, 0)) / std::norm(s(0, 0, 0)), 2.0, 1e-14);
}

TEST(BiCoherent, ComplexAndAngleFormsAgree) {
  const complex z = std::polar(1.3, 0.4), zp = std::polar(0.6, -1.1);
  const auto c = build_bicoherent(BiCoherentComplex{z, zp, 0});
  const auto a = build_bicoherent(BiCoherentAngles{1.69, -0.4, 0.36, 1.1, 0});
  EXPECT_NEAR(std::abs(inner_product(c.state, a.state)), 1.0, 1e-12);
  // c_{nl} = e^{-(|z|^2+|z'|^2)/2} z^n conj(z')^l / sqrt(n! l!)
  const double pref = std::exp(-(std::norm(z) + std::norm(zp)) / 2);
  const complex expect = pref * std::pow(z, 3) * std::pow(std::conj(zp), 2) / std::sqrt(6.0 * 2.0);
  EXPECT_NEAR(std::abs(c.state(3, 2, 0) - expect), 0.0, 1e-15);
}

TEST(BiCoherent, GaussianOverlapLaw) {
  const FamilyLabel a = BiCoherentComplex{1.0, 0.0, 0};
  const FamilyLabel b = BiCoherentComplex{0.5, 0.0, 0};
  const auto bundle = nonpositive();
  EXPECT_NEAR(std::abs(overlap(bundle, a, b)), std::exp(-0.125), 1e-12);
  EXPECT_NEAR(std::exp(-0.125), 0.8824969, 1e-7);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.4, 1.4);
  for (int t = 0; t < 10; ++t) {
    const complex z{u(rng), u(rng)}, zp{u(rng), u(rng)}, w{u(rng), u(rng)}, wp{u(rng), u(rng)};
    const double law = std::exp(-(std::norm(z - w) + std::norm(zp - wp)) / 2);
    EXPECT_NEAR(std::abs(overlap(bundle, BiCoherentComplex{z, zp, 0}, BiCoherentComplex{w, wp, 0})), law, 1e-10);
  }
}

TEST(BiCoherent, SummedKNeedsCutoffs) {
  EXPECT_THROW(build_bicoherent(BiCoherentAngles{1, 0, 1, 0, std::nullopt}), DomainError);
  BuildOptions o;
  o.cutoffs = BasisCutoffs{30, 30, 3};
  const auto s = build_bicoherent(BiCoherentAngles{1, 0, 1, 0, std::nullopt}, o);
  EXPECT_NEAR(norm_of(s), 1.0, 1e-10);
  EXPECT_NEAR(std::norm(s.state(0, 0, 2)), std::exp(-2.0) / 4, 1e-15);
}

TEST(Overlap, SelfAndZeroK) {
  const auto b = nonpositive();
  const FamilyLabel x = ThreeDofDependent{0.7, 0.1, 1.3, 0.2, 0.9, 0.3, 1};
  EXPECT_NEAR(std::abs(overlap(b, x, x) - 1.0), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(overlap(b, OneDof{0, 0.1, 0, 0}, OneDof{0, 2.9, 0, 0})), 1.0, 1e-15);
}

TEST(AllFamilies, UnitNormAtDefaultThreshold) {
  const auto b = nonpositive();
  const auto bb = bounded();
  const std::vector<std::pair<const SpectrumBundle*, FamilyLabel>> cases = {
      {&bb, OneDof{0.6, 0.2, 1, 0}},
      {&b, TwoDof{2.0, 0.1, 1.0, 0.2, 1, 0}},
      {&b, ThreeDofIndependentL{1, 0.1, 1, 0.2, 0.5, 0.3, 1}},
      {&b, ThreeDofIndependentN{1, 0.1, 1, 0.2, 0.5, 0.3, 1}},
      {&b, ThreeDofDependent{1, 0.1, 1, 0.2, 0.5, 0.3, 1}},
      {&b, BiCoherentAngles{1, 0.1, 2, 0.2, 0}},
      {&b, BiCoherentComplex{{1, 1}, {0.5, -0.2}, 1}},
  };
  for (const auto& [bundle, label] : cases) {
    const auto r = build(*bundle, label);
    EXPECT_LE(r.state.tail_bound(), 1e-12) << family_name(label);
    EXPECT_NEAR(norm_of(r), 1.0, 1e-10) << family_name(label);
  }
}
