#pragma once

// Builders for every discrete-spectrum coherent-state family. Each returns a
// TruncatedState normalized to unit length (up to the recorded tail bound)
// plus the normalization constants used.
//
// Fixed-index families (one fixed n or l) are stored as their fiber. The
// squared norm the analytic expansion assigns to that fiber (e.g. the
// J'^l / rho(l) N(J') prefactor) is kept in paper_norm2() so that frame
// operators can be assembled from the un-normalized vectors.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lcs/detail/series.hpp"
#include "lcs/errors.hpp"
#include "lcs/fockspace.hpp"
#include "lcs/specfun.hpp"
#include "lcs/spectrum.hpp"

namespace lcs {

// Labels --------------------------------------------------------------------

struct OneDof {
  double K = 0.0;
  double delta = 0.0;
  std::size_t n = 0;
  std::size_t l = 0;
};

struct TwoDof {
  double J = 0.0;
  double theta = 0.0;
  double Jp = 0.0;
  double theta_p = 0.0;
  std::size_t l = 0;
  std::size_t k = 0;
};

/// Tensor-product family with a fixed l fiber, sums over (n, k).
struct ThreeDofIndependentL {
  double J = 0.0, theta = 0.0, Jp = 0.0, theta_p = 0.0, K = 0.0, delta = 0.0;
  std::size_t l = 0;
};

/// Tensor-product family with a fixed n fiber, sums over (l, k).
struct ThreeDofIndependentN {
  double J = 0.0, theta = 0.0, Jp = 0.0, theta_p = 0.0, K = 0.0, delta = 0.0;
  std::size_t n = 0;
};

/// Family whose n-sum depends on the k index through gamma(alpha_k).
struct ThreeDofDependent {
  double J = 0.0, theta = 0.0, Jp = 0.0, theta_p = 0.0, K = 0.0, delta = 0.0;
  std::size_t l = 0;
};

/// Bi-coherent state labelled by actions and angles. k unset means the
/// uniform superposition over k <= k_max.
struct BiCoherentAngles {
  double J = 0.0, theta = 0.0, Jp = 0.0, theta_p = 0.0;
  std::optional<std::size_t> k = std::size_t{0};
};

struct BiCoherentComplex {
  complex z{};
  complex zp{};
  std::optional<std::size_t> k = std::size_t{0};

  /// z = sqrt(J) e^{-i theta}, z' = sqrt(J') e^{-i theta'}.
  BiCoherentAngles to_angles() const {
    return {std::norm(z), -std::arg(z), std::norm(zp), -std::arg(zp), k};
  }
};

using FamilyLabel = std::variant<OneDof, TwoDof, ThreeDofIndependentL, ThreeDofIndependentN, ThreeDofDependent,
                                 BiCoherentAngles, BiCoherentComplex>;

inline const char* family_name(const FamilyLabel& label) {
  constexpr const char* names[] = {"one_dof",           "two_dof",           "three_dof_independent_l",
                                   "three_dof_independent_n", "three_dof_dependent", "bicoherent_angles",
                                   "bicoherent_complex"};
  return names[label.index()];
}

// Options and results --------------------------------------------------------

/// How the convergence radius L of sum K^k / (eps_k! xi^k) is chosen.
enum class RadiusRule {
  RatioTest,  ///< L = xi lim eps_k, the radius forced by the ratio test
  SqrtLimit   ///< L = sqrt(lim eps_k), capped by the ratio-test radius
};

struct BuildOptions {
  /// Fixed cutoffs; chosen from the tail threshold when absent.
  std::optional<BasisCutoffs> cutoffs;
  double tail_threshold = 1e-12;
  /// Fail when the neglected mass exceeds tail_threshold.
  bool enforce_tail = true;
  RadiusRule radius = RadiusRule::RatioTest;
  std::size_t dimension_cap = BasisCutoffs::default_cap;
};

struct NamedConstant {
  std::string name;
  double value = 0.0;
};

struct BuiltState {
  TruncatedState state;
  /// Normalization constants (natural logs where the name says so).
  std::vector<NamedConstant> constants;
};

/// Upper end of the K domain; +infinity when eps_k is unbounded or finite.
inline double convergence_radius(const SpectrumBundle& b, RadiusRule rule = RadiusRule::RatioTest) {
  if (b.eps.size()) return std::numeric_limits<double>::infinity();  // finite sum
  const auto lim = b.eps.limit();
  if (!lim) return std::numeric_limits<double>::infinity();
  const double ratio = b.scales.xi * *lim;
  return rule == RadiusRule::RatioTest ? ratio : std::min(ratio, std::sqrt(*lim));
}

namespace detail {

inline void check_action(const char* name, double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be finite and >= 0");
  }
}

inline void check_K(const SpectrumBundle& b, double K, RadiusRule rule) {
  check_action("K", K);
  const double L = convergence_radius(b, rule);
  if (!(K < L)) {
    std::ostringstream os;
    os << "K = " << K << " outside the convergence domain [0, " << L << ")";
    throw ConvergenceDomainError(os.str());
  }
}

/// sum_k K^k / (eps_k! xi^k).
inline PositiveSeries k_series(const SpectrumBundle& b, double K) {
  const double lnK = K > 0.0 ? std::log(K) : -std::numeric_limits<double>::infinity();
  const double lnxi = std::log(b.scales.xi);
  return PositiveSeries([&](std::size_t j) { return lnK - lnxi - std::log(b.eps[j + 1]); }, b.eps.size());
}

/// sum_n x^n / (gamma)_n with x = J / kappa.
inline PositiveSeries kummer_series(double gamma, double x) {
  const double lnx = x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
  return PositiveSeries([&](std::size_t j) { return lnx - std::log(gamma + static_cast<double>(j)); },
                        std::nullopt);
}

inline double ln_power(double base, std::size_t e) {
  if (e == 0) return 0.0;
  return base > 0.0 ? static_cast<double>(e) * std::log(base) : -std::numeric_limits<double>::infinity();
}

/// Split a tail budget between independent summation indices.
inline double combined_tail(std::initializer_list<double> tails) {
  double keep = 1.0;
  for (double t : tails) keep *= 1.0 - std::min(1.0, t);
  return 1.0 - keep;
}

inline void finalize(TruncatedState& s, double tail, const BuildOptions& opt, const char* family) {
  s.set_tail_bound(tail);
  if (opt.enforce_tail && tail > opt.tail_threshold) {
    std::ostringstream os;
    os << family << ": tail bound " << tail << " exceeds threshold " << opt.tail_threshold
       << " for the requested cutoffs";
    throw TailBoundError(os.str());
  }
}

inline void require_contains(const BasisCutoffs& c, std::size_t n, std::size_t l, std::size_t k,
                             const char* family) {
  if (!c.contains({n, l, k})) {
    throw CutoffMismatch(std::string(family) + ": cutoffs do not contain the fixed fiber");
  }
}

inline complex phase(double angle) { return std::polar(1.0, angle); }

}  // namespace detail

// One degree of freedom --------------------------------------------------------

/// |K, delta; l> = N(K)^{-1/2} sum_k K^{k/2} e^{-i E'_{n,alpha_k} delta} / sqrt(rho_bar(k)) |Psi_nl> (x) |eps_k>,
/// N(K) = sum_k K^k / (eps_k! xi^k).
inline BuiltState build_one_dof(const SpectrumBundle& b, const OneDof& label, const BuildOptions& opt = {}) {
  detail::check_K(b, label.K, opt.radius);
  const auto ks = detail::k_series(b, label.K);
  const std::size_t k_cut =
      opt.cutoffs ? opt.cutoffs->k_max : ks.cutoff_for(opt.tail_threshold);
  const BasisCutoffs c = opt.cutoffs.value_or(BasisCutoffs{label.n, label.l, k_cut});
  detail::require_contains(c, label.n, label.l, 0, "one_dof");

  TruncatedState s(c, opt.dimension_cap);
  const std::size_t k_top = b.eps.size() ? std::min(c.k_max, *b.eps.size() - 1) : c.k_max;
  for (std::size_t k = 0; k <= k_top; ++k) {
    const double modulus = std::exp(0.5 * (ks.ln_term(k) - ks.ln_sum()));
    s(label.n, label.l, k) = modulus * detail::phase(-b.shifted(label.n, k) * label.delta);
  }
  detail::finalize(s, ks.tail_after(c.k_max), opt, "one_dof");
  return {std::move(s), {{"ln_N_K", ks.ln_sum()}}};
}

/// E'_{n,alpha_k} on the delta angle.
inline PhaseMap one_dof_phases(const SpectrumBundle& b) {
  return [b](const BasisIndex& i) { return PhaseSignature{{b.shifted(i.n, i.k), 0.0, 0.0}}; };
}

// Two degrees of freedom -------------------------------------------------------

/// Vector coherent state on the fixed (l, k) fiber:
/// N(J)^{-1/2} N(J')^{-1/2} J'^{l/2} e^{i E'_l theta'} sum_n J^{n/2} e^{-i E'_n theta} / sqrt(rho(n) rho(l)),
/// N(x) = 1F1(1; gamma; x / kappa).
inline BuiltState build_two_dof(const SpectralScales& sc, double alpha, const TwoDof& label,
                                const BuildOptions& opt = {}) {
  detail::check_action("J", label.J);
  detail::check_action("J'", label.Jp);
  const double g = gamma_param(sc, alpha);
  const auto ns = detail::kummer_series(g, label.J / sc.kappa);
  const std::size_t n_cut = opt.cutoffs ? opt.cutoffs->n_max : ns.cutoff_for(opt.tail_threshold);
  const BasisCutoffs c = opt.cutoffs.value_or(BasisCutoffs{n_cut, label.l, label.k});
  detail::require_contains(c, 0, label.l, label.k, "two_dof");

  const double ln_NJp = specfun::ln_kummer_1f1_unit(g, label.Jp / sc.kappa);
  const double ln_fiber = detail::ln_power(label.Jp, label.l) - ln_rho(sc, alpha, label.l) - ln_NJp;

  TruncatedState s(c, opt.dimension_cap);
  const complex global = detail::phase(shifted_energy(sc, label.l, alpha) * label.theta_p);
  for (std::size_t n = 0; n <= c.n_max; ++n) {
    const double modulus = std::exp(0.5 * (ns.ln_term(n) - ns.ln_sum()));
    s(n, label.l, label.k) = global * modulus * detail::phase(-shifted_energy(sc, n, alpha) * label.theta);
  }
  s.set_paper_norm2(std::exp(ln_fiber));
  detail::finalize(s, ns.tail_after(c.n_max), opt, "two_dof");
  return {std::move(s), {{"gamma", g}, {"ln_N_J", ns.ln_sum()}, {"ln_N_Jp", ln_NJp}, {"ln_fiber_weight", ln_fiber}}};
}

inline BuiltState build_two_dof(const SpectrumBundle& b, const TwoDof& label, const BuildOptions& opt = {}) {
  return build_two_dof(b.scales, b.alpha[label.k], label, opt);
}

/// theta carries E'_{n,alpha}; theta' carries -E'_{l,alpha} (constant on the fiber).
inline PhaseMap two_dof_phases(const SpectralScales& sc, double alpha) {
  return [sc, alpha](const BasisIndex& i) {
    return PhaseSignature{{shifted_energy(sc, i.n, alpha), -shifted_energy(sc, i.l, alpha), 0.0}};
  };
}

// Three degrees of freedom, independent sums ---------------------------------

namespace detail {

inline void require_nonpositive(const SpectrumBundle& b, const char* family) {
  if (b.alpha.regime() != Regime::NonPositive) {
    throw DomainError(std::string(family) + " requires the alpha_k <= 0 regime");
  }
}

/// Shared body of the two tensor-product variants. `summed` is the Poisson
/// index (n for variant L, l for variant N); `fixed` the fiber index.
template <bool FixedL>
BuiltState build_three_independent(const SpectrumBundle& b, double J, double theta, double Jp, double theta_p,
                                   double K, double delta, std::size_t fixed, const BuildOptions& opt) {
  const char* family = FixedL ? "three_dof_independent_l" : "three_dof_independent_n";
  require_nonpositive(b, family);
  check_action("J", J);
  check_action("J'", Jp);
  check_K(b, K, opt.radius);
  const auto& sc = b.scales;
  const double summed_action = FixedL ? J : Jp;
  const double fixed_action = FixedL ? Jp : J;
  const auto ps = kummer_series(1.0, summed_action / sc.kappa);  // e^{J/kappa}
  const auto ks = k_series(b, K);

  std::size_t p_cut = 0, k_cut = 0;
  if (opt.cutoffs) {
    p_cut = FixedL ? opt.cutoffs->n_max : opt.cutoffs->l_max;
    k_cut = opt.cutoffs->k_max;
  } else {
    p_cut = ps.cutoff_for(0.5 * opt.tail_threshold);
    k_cut = ks.cutoff_for(0.5 * opt.tail_threshold);
  }
  const BasisCutoffs c = opt.cutoffs.value_or(FixedL ? BasisCutoffs{p_cut, fixed, k_cut}
                                                     : BasisCutoffs{fixed, p_cut, k_cut});
  require_contains(c, FixedL ? 0 : fixed, FixedL ? fixed : 0, 0, family);

  const double ln_fiber =
      ln_power(fixed_action, fixed) - ln_rho1(sc, fixed) - fixed_action / sc.kappa;
  // E_n = kappa n with phase -theta, E_l = kappa l with phase +theta'.
  const complex global = FixedL ? phase(sc.kappa * static_cast<double>(fixed) * theta_p)
                                : phase(-sc.kappa * static_cast<double>(fixed) * theta);

  TruncatedState s(c, opt.dimension_cap);
  const std::size_t k_top = b.eps.size() ? std::min(k_cut, *b.eps.size() - 1) : k_cut;
  for (std::size_t p = 0; p <= p_cut; ++p) {
    const double mp = std::exp(0.5 * (ps.ln_term(p) - ps.ln_sum()));
    const complex pp = FixedL ? phase(-sc.kappa * static_cast<double>(p) * theta)
                              : phase(sc.kappa * static_cast<double>(p) * theta_p);
    for (std::size_t k = 0; k <= k_top; ++k) {
      const double mk = std::exp(0.5 * (ks.ln_term(k) - ks.ln_sum()));
      const complex v = global * pp * mp * mk * phase(-sc.xi * b.eps[k] * delta);
      if (FixedL) {
        s(p, fixed, k) = v;
      } else {
        s(fixed, p, k) = v;
      }
    }
  }
  s.set_paper_norm2(std::exp(ln_fiber));
  finalize(s, combined_tail({ps.tail_after(p_cut), ks.tail_after(k_cut)}), opt, family);
  return {std::move(s),
          {{"ln_N_J", J / sc.kappa}, {"ln_N_Jp", Jp / sc.kappa}, {"ln_N_K", ks.ln_sum()}, {"ln_fiber_weight", ln_fiber}}};
}

}  // namespace detail

/// [N(J) N(J')]^{-1/2} N(K)^{-1/2} J'^{l/2} e^{i E_l theta'} sum_{n,k} J^{n/2} e^{-i E_n theta}
/// K^{k/2} e^{-i E'_k delta} / sqrt(rho_1(l) rho_1(n) rho_bar(k)), N(J) = e^{J/kappa}.
inline BuiltState build_three_dof_independent(const SpectrumBundle& b, const ThreeDofIndependentL& x,
                                              const BuildOptions& opt = {}) {
  return detail::build_three_independent<true>(b, x.J, x.theta, x.Jp, x.theta_p, x.K, x.delta, x.l, opt);
}

inline BuiltState build_three_dof_independent(const SpectrumBundle& b, const ThreeDofIndependentN& x,
                                              const BuildOptions& opt = {}) {
  return detail::build_three_independent<false>(b, x.J, x.theta, x.Jp, x.theta_p, x.K, x.delta, x.n, opt);
}

/// theta: E_n = kappa n; theta': -E_l = -kappa l; delta: E'_k = xi eps_k.
inline PhaseMap three_dof_independent_phases(const SpectrumBundle& b) {
  return [b](const BasisIndex& i) {
    return PhaseSignature{{b.scales.kappa * static_cast<double>(i.n), -b.scales.kappa * static_cast<double>(i.l),
                           b.scales.xi * b.eps[i.k]}};
  };
}

// Three degrees of freedom, dependent sums -----------------------------------

/// The two normalization candidates for the dependent family.
struct DependentNormalization {
  /// sum_k K^k / (rho_bar(k) N(J') N(J, alpha_k)), N(J') = e^{J'/kappa}.
  double N_KJ = 0.0;
  /// sum_k K^k / rho_bar(k): the constant that actually makes the k-sum unit.
  double N_K = 0.0;
};

inline DependentNormalization dependent_normalization(const SpectrumBundle& b, double J, double Jp, double K) {
  const auto ks = detail::k_series(b, K);
  const double x = J / b.scales.kappa;
  detail::CompensatedSum<double> s;
  for (std::size_t k = 0; k < ks.tabulated(); ++k) {
    const double g = gamma_param(b.scales, b.alpha[k]);
    s += std::exp(ks.ln_term(k) - specfun::ln_kummer_1f1_unit(g, x));
  }
  return {s.value() * std::exp(-Jp / b.scales.kappa), std::exp(ks.ln_sum())};
}

/// N(J')^{-1/2} N(J,alpha_k)^{-1/2} J'^{l/2} e^{i E'_{l,alpha_k} theta'} sum_n J^{n/2} e^{-i E'_{n,alpha_k} theta}
/// / sqrt(rho_1(l) rho(n, alpha_k)) x N(K,J)^{-1/2} sum_k K^{k/2} e^{-i E'_k delta} / sqrt(rho_bar(k)).
/// Stored with unit norm; paper_norm2 holds the squared norm of the expansion
/// as written with N(K,J).
inline BuiltState build_three_dof_dependent(const SpectrumBundle& b, const ThreeDofDependent& x,
                                            const BuildOptions& opt = {}) {
  detail::require_nonpositive(b, "three_dof_dependent");
  detail::check_action("J", x.J);
  detail::check_action("J'", x.Jp);
  detail::check_K(b, x.K, opt.radius);
  const auto& sc = b.scales;
  const auto ks = detail::k_series(b, x.K);
  const std::size_t k_cut = opt.cutoffs ? opt.cutoffs->k_max : ks.cutoff_for(0.5 * opt.tail_threshold);
  const std::size_t k_top = b.eps.size() ? std::min(k_cut, *b.eps.size() - 1) : k_cut;

  // gamma_k >= gamma_0, so the alpha_0 profile has the heaviest n tail.
  std::vector<detail::PositiveSeries> nser;
  nser.reserve(k_top + 1);
  for (std::size_t k = 0; k <= k_top; ++k) nser.push_back(detail::kummer_series(gamma_param(sc, b.alpha[k]), x.J / sc.kappa));
  std::size_t n_cut = 0;
  if (opt.cutoffs) {
    n_cut = opt.cutoffs->n_max;
  } else {
    for (const auto& ns : nser) n_cut = std::max(n_cut, ns.cutoff_for(0.5 * opt.tail_threshold));
  }
  const BasisCutoffs c = opt.cutoffs.value_or(BasisCutoffs{n_cut, x.l, k_cut});
  detail::require_contains(c, 0, x.l, 0, "three_dof_dependent");

  TruncatedState s(c, opt.dimension_cap);
  detail::CompensatedSum<double> missing;  // mass of k <= k_cut lost to the n cut
  for (std::size_t k = 0; k <= k_top; ++k) {
    const double alpha = b.alpha[k];
    const double mk = std::exp(0.5 * (ks.ln_term(k) - ks.ln_sum()));
    const complex pk = detail::phase(shifted_energy(sc, x.l, alpha) * x.theta_p) *
                       detail::phase(-sc.xi * b.eps[k] * x.delta);
    for (std::size_t n = 0; n <= c.n_max; ++n) {
      const double mn = std::exp(0.5 * (nser[k].ln_term(n) - nser[k].ln_sum()));
      s(n, x.l, k) = pk * mk * mn * detail::phase(-shifted_energy(sc, n, alpha) * x.theta);
    }
    missing += std::exp(ks.ln_term(k) - ks.ln_sum()) * nser[k].tail_after(c.n_max);
  }

  const auto norms = dependent_normalization(b, x.J, x.Jp, x.K);
  const double ln_fiber = detail::ln_power(x.Jp, x.l) - ln_rho1(sc, x.l) - x.Jp / sc.kappa;
  s.set_paper_norm2(std::exp(ln_fiber) * norms.N_K / norms.N_KJ);
  detail::finalize(s, missing.value() + ks.tail_after(k_cut), opt, "three_dof_dependent");
  return {std::move(s),
          {{"N_KJ", norms.N_KJ}, {"N_K", norms.N_K}, {"ln_N_Jp", x.Jp / sc.kappa}, {"ln_fiber_weight", ln_fiber}}};
}

/// theta: E'_{n,alpha_k}; theta': -E'_{l,alpha_k}; delta: E'_k = xi eps_k.
inline PhaseMap three_dof_dependent_phases(const SpectrumBundle& b) {
  return [b](const BasisIndex& i) {
    const double a = b.alpha[i.k];
    return PhaseSignature{
        {shifted_energy(b.scales, i.n, a), -shifted_energy(b.scales, i.l, a), b.scales.xi * b.eps[i.k]}};
  };
}

// Bi-coherent states ---------------------------------------------------------

/// [N(J) N(J')]^{-1/2} sum_{n,l} J^{n/2} J'^{l/2} e^{-i(n theta - l theta')} / sqrt(n! l!) |Psi_nl> (x) |alpha_k>,
/// N(J) = e^J.
inline BuiltState build_bicoherent(const BiCoherentAngles& x, const BuildOptions& opt = {}) {
  detail::check_action("J", x.J);
  detail::check_action("J'", x.Jp);
  const auto ns = detail::kummer_series(1.0, x.J);
  const auto ls = detail::kummer_series(1.0, x.Jp);
  std::size_t n_cut = 0, l_cut = 0, k_cut = x.k.value_or(0);
  if (opt.cutoffs) {
    n_cut = opt.cutoffs->n_max;
    l_cut = opt.cutoffs->l_max;
    k_cut = opt.cutoffs->k_max;
  } else {
    if (!x.k) throw DomainError("bicoherent: the k-summed variant needs explicit cutoffs");
    n_cut = ns.cutoff_for(0.5 * opt.tail_threshold);
    l_cut = ls.cutoff_for(0.5 * opt.tail_threshold);
  }
  const BasisCutoffs c{n_cut, l_cut, k_cut};
  if (x.k) detail::require_contains(c, 0, 0, *x.k, "bicoherent");

  TruncatedState s(c, opt.dimension_cap);
  const std::size_t k0 = x.k.value_or(0);
  const std::size_t k1 = x.k.value_or(k_cut);
  const double k_amp = 1.0 / std::sqrt(static_cast<double>(k1 - k0 + 1));
  for (std::size_t n = 0; n <= n_cut; ++n) {
    const double mn = std::exp(0.5 * (ns.ln_term(n) - ns.ln_sum()));
    for (std::size_t l = 0; l <= l_cut; ++l) {
      const double ml = std::exp(0.5 * (ls.ln_term(l) - ls.ln_sum()));
      const complex v = mn * ml * detail::phase(-(static_cast<double>(n) * x.theta - static_cast<double>(l) * x.theta_p));
      for (std::size_t k = k0; k <= k1; ++k) s(n, l, k) = k_amp * v;
    }
  }
  detail::finalize(s, detail::combined_tail({ns.tail_after(n_cut), ls.tail_after(l_cut)}), opt, "bicoherent");
  return {std::move(s), {{"ln_N_J", x.J}, {"ln_N_Jp", x.Jp}}};
}

/// e^{-(|z|^2 + |z'|^2)/2} sum_{n,l} z^n conj(z')^l / sqrt(n! l!) |Psi_nl> (x) |alpha_k>.
inline BuiltState build_bicoherent(const BiCoherentComplex& x, const BuildOptions& opt = {}) {
  return build_bicoherent(x.to_angles(), opt);
}

/// theta: n; theta': -l (omega_c units).
inline PhaseMap bicoherent_phases() {
  return [](const BasisIndex& i) {
    return PhaseSignature{{static_cast<double>(i.n), -static_cast<double>(i.l), 0.0}};
  };
}

// Dispatch -------------------------------------------------------------------

inline BuiltState build(const SpectrumBundle& b, const FamilyLabel& label, const BuildOptions& opt = {}) {
  return std::visit(
      [&](const auto& x) -> BuiltState {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, OneDof>) {
          return build_one_dof(b, x, opt);
        } else if constexpr (std::is_same_v<T, TwoDof>) {
          return build_two_dof(b, x, opt);
        } else if constexpr (std::is_same_v<T, ThreeDofIndependentL> || std::is_same_v<T, ThreeDofIndependentN>) {
          return build_three_dof_independent(b, x, opt);
        } else if constexpr (std::is_same_v<T, ThreeDofDependent>) {
          return build_three_dof_dependent(b, x, opt);
        } else {
          return build_bicoherent(x, opt);
        }
      },
      label);
}

/// <a|b> for two labels built over a common basis: each is built with its
/// own automatic cutoffs, then both are rebuilt on the merged cutoffs.
inline complex overlap(const SpectrumBundle& b, const FamilyLabel& x, const FamilyLabel& y,
                       const BuildOptions& opt = {}) {
  BuildOptions o = opt;
  if (!o.cutoffs) {
    const auto cx = build(b, x, opt).state.cutoffs();
    const auto cy = build(b, y, opt).state.cutoffs();
    o.cutoffs = BasisCutoffs::merge(cx, cy);
    o.enforce_tail = false;
  }
  return inner_product(build(b, x, o).state, build(b, y, o).state);
}

}  // namespace lcs
