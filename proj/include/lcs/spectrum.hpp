#pragma once

// Physical constants, derived energy scales, the alpha_k discretization and
// the products of eigenvalues (rho-type moments) that every coherent-state
// normalization is built from.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lcs/detail/summation.hpp"
#include "lcs/errors.hpp"
#include "lcs/specfun.hpp"

namespace lcs {

/// Mass, cyclotron frequency, field coupling lambda = mcE/B and hbar.
struct PhysicalParams {
  double m = 1.0;
  double omega_c = 1.0;
  double lambda = 1.0;
  double hbar = 1.0;
};

/// kappa = hbar omega_c, xi = hbar lambda / m, ratio = lambda / (m omega_c) = xi / kappa.
struct SpectralScales {
  double kappa = 1.0;
  double xi = 1.0;
  double ratio = 1.0;

  static SpectralScales from(const PhysicalParams& p) {
    return {p.hbar * p.omega_c, p.hbar * p.lambda / p.m, p.lambda / (p.m * p.omega_c)};
  }
};

/// Full Landau-level energy E_{n,alpha} including the zero-point and field offsets.
inline double energy(const PhysicalParams& p, std::size_t n, double alpha) noexcept {
  const double nn = static_cast<double>(n);
  return 0.5 * p.hbar * p.omega_c * (2.0 * nn + 1.0) - p.hbar * p.lambda / p.m * alpha -
         p.lambda * p.lambda / (2.0 * p.m);
}

/// E'_{n,alpha} = kappa n - xi alpha: the energy with the constant shift removed.
inline double shifted_energy(const SpectralScales& s, std::size_t n, double alpha) noexcept {
  return s.kappa * static_cast<double>(n) - s.xi * alpha;
}

/// gamma = 1 - ratio alpha; must be strictly positive.
inline double gamma_param(const SpectralScales& s, double alpha) {
  const double g = 1.0 - s.ratio * alpha;
  if (!(g > 0.0)) {
    std::ostringstream os;
    os << "gamma = 1 - ratio*alpha = " << g << " <= 0 for alpha = " << alpha;
    throw DegenerateSpectrum(os.str());
  }
  return g;
}

/// rho(n) = E'_1 ... E'_n = kappa^n (gamma)_n at fixed alpha.
inline double rho(const SpectralScales& s, double alpha, std::size_t n) {
  const double g = gamma_param(s, alpha);
  return std::pow(s.kappa, static_cast<double>(n)) * specfun::pochhammer(g, n);
}

inline double ln_rho(const SpectralScales& s, double alpha, std::size_t n) {
  const double g = gamma_param(s, alpha);
  return static_cast<double>(n) * std::log(s.kappa) + specfun::ln_pochhammer(g, n);
}

/// rho_1(n) = n! kappa^n.
inline double rho1(const SpectralScales& s, std::size_t n) {
  return std::pow(s.kappa, static_cast<double>(n)) * specfun::pochhammer(1.0, n);
}

inline double ln_rho1(const SpectralScales& s, std::size_t n) {
  return static_cast<double>(n) * std::log(s.kappa) + specfun::ln_gamma(static_cast<double>(n) + 1.0);
}

enum class Regime { ShiftedBounded, NonPositive };

inline const char* to_string(Regime r) noexcept {
  return r == Regime::ShiftedBounded ? "shifted_bounded" : "nonpositive";
}

/// The discretization alpha_0, alpha_1, ... Either a finite list or an
/// unbounded generator; in both cases indexed from 0.
class AlphaSequence {
 public:
  using Generator = std::function<double(std::size_t)>;

  AlphaSequence(Generator gen, std::optional<std::size_t> size, std::optional<double> limit, Regime regime,
                std::size_t n_ref, std::string description)
      : gen_(std::move(gen)),
        size_(size),
        limit_(limit),
        regime_(regime),
        n_ref_(n_ref),
        description_(std::move(description)) {}

  static AlphaSequence from_values(std::vector<double> values, Regime regime, std::size_t n_ref = 1) {
    auto shared = std::make_shared<const std::vector<double>>(std::move(values));
    const std::size_t n = shared->size();
    return {[shared](std::size_t k) { return (*shared)[k]; }, n, std::nullopt, regime, n_ref, "values"};
  }

  /// alpha_k = alpha0 - k step. In the bounded regime the list stops at the
  /// last non-negative entry unless a shorter count is given.
  static AlphaSequence linear(Regime regime, double alpha0, double step, std::size_t n_ref = 1,
                              std::optional<std::size_t> count = std::nullopt) {
    std::optional<std::size_t> size = count;
    if (regime == Regime::ShiftedBounded && step > 0.0 && alpha0 >= 0.0) {
      const auto natural = static_cast<std::size_t>(std::floor(alpha0 / step * (1.0 + 1e-14))) + 1;
      size = count ? std::min(*count, natural) : natural;
    }
    std::ostringstream os;
    os << "linear(alpha0=" << alpha0 << ", step=" << step << ")";
    return {[alpha0, step](std::size_t k) { return alpha0 - static_cast<double>(k) * step; },
            size,
            std::nullopt,
            regime,
            n_ref,
            os.str()};
  }

  /// alpha_k = alpha_inf + (alpha0 - alpha_inf) q^k: an unbounded list that
  /// stays inside [alpha_inf, alpha0].
  static AlphaSequence geometric(double alpha0, double alpha_inf, double q, std::size_t n_ref = 1) {
    std::ostringstream os;
    os << "geometric(alpha0=" << alpha0 << ", alpha_inf=" << alpha_inf << ", q=" << q << ")";
    return {[=](std::size_t k) { return alpha_inf + (alpha0 - alpha_inf) * std::pow(q, static_cast<double>(k)); },
            std::nullopt,
            alpha_inf,
            Regime::ShiftedBounded,
            n_ref,
            os.str()};
  }

  /// alpha_k = alpha_inf + (alpha0 - alpha_inf) / (k + 1). Unlike the
  /// geometric list, eps_k! / (lim eps)^k -> 0, so the K moment measure has no
  /// point mass at the convergence radius.
  static AlphaSequence harmonic(double alpha0, double alpha_inf, std::size_t n_ref = 1) {
    std::ostringstream os;
    os << "harmonic(alpha0=" << alpha0 << ", alpha_inf=" << alpha_inf << ")";
    return {[=](std::size_t k) { return alpha_inf + (alpha0 - alpha_inf) / static_cast<double>(k + 1); },
            std::nullopt,
            alpha_inf,
            Regime::ShiftedBounded,
            n_ref,
            os.str()};
  }

  double operator[](std::size_t k) const {
    if (size_ && k >= *size_) throw std::out_of_range("AlphaSequence: index past the end of a finite list");
    return gen_(k);
  }

  /// Number of entries; nullopt for an unbounded sequence.
  std::optional<std::size_t> size() const noexcept { return size_; }
  /// lim alpha_k when known in closed form.
  std::optional<double> limit() const noexcept { return limit_; }
  Regime regime() const noexcept { return regime_; }
  std::size_t n_ref() const noexcept { return n_ref_; }
  const std::string& description() const noexcept { return description_; }

 private:
  Generator gen_;
  std::optional<std::size_t> size_;
  std::optional<double> limit_;
  Regime regime_;
  std::size_t n_ref_;
  std::string description_;
};

/// eps_k derived from alpha_k: (m omega_c / lambda) n_ref - alpha_k in the
/// bounded regime, -alpha_k otherwise. eps_0 exists but never enters a product.
class EpsilonSequence {
 public:
  EpsilonSequence(AlphaSequence alpha, double inverse_ratio)
      : alpha_(std::move(alpha)),
        offset_(alpha_.regime() == Regime::ShiftedBounded ? inverse_ratio * static_cast<double>(alpha_.n_ref())
                                                            : 0.0) {}

  double operator[](std::size_t k) const { return offset_ - alpha_[k]; }
  std::optional<std::size_t> size() const noexcept { return alpha_.size(); }

  /// sup_k eps_k; nullopt when the sequence is unbounded. A finite list
  /// reports its last entry.
  std::optional<double> limit() const {
    if (alpha_.limit()) return offset_ - *alpha_.limit();
    if (alpha_.size() && *alpha_.size() > 0) return (*this)[*alpha_.size() - 1];
    return std::nullopt;
  }

  /// ln(eps_k!) = sum_{j=1..k} ln eps_j.
  double ln_factorial(std::size_t k) const {
    detail::CompensatedSum<double> s;
    for (std::size_t j = 1; j <= k; ++j) {
      const double e = (*this)[j];
      if (!(e > 0.0)) throw DomainError("eps_" + std::to_string(j) + " is not positive");
      s += std::log(e);
    }
    return s.value();
  }

  double factorial(std::size_t k) const {
    double p = 1.0;
    for (std::size_t j = 1; j <= k; ++j) {
      const double e = (*this)[j];
      if (!(e > 0.0)) throw DomainError("eps_" + std::to_string(j) + " is not positive");
      p *= e;
    }
    return p;
  }

  const AlphaSequence& alpha() const noexcept { return alpha_; }

 private:
  AlphaSequence alpha_;
  double offset_;
};

/// rho_bar(k) = eps_k! xi^k.
inline double rho_bar(const SpectralScales& s, const EpsilonSequence& eps, std::size_t k) {
  return eps.factorial(k) * std::pow(s.xi, static_cast<double>(k));
}

inline double ln_rho_bar(const SpectralScales& s, const EpsilonSequence& eps, std::size_t k) {
  return eps.ln_factorial(k) + static_cast<double>(k) * std::log(s.xi);
}

/// Validated parameters, scales and alpha/eps sequences, consumed by every builder.
struct SpectrumBundle {
  PhysicalParams params;
  SpectralScales scales;
  AlphaSequence alpha;
  EpsilonSequence eps;

  /// E'_{n, alpha_k}.
  double shifted(std::size_t n, std::size_t k) const { return shifted_energy(scales, n, alpha[k]); }
};

struct ConstraintViolation {
  std::string field;
  std::optional<std::size_t> index;
  double value = 0.0;
  std::string bound;

  std::string message() const {
    std::ostringstream os;
    os << field;
    if (index) os << "[" << *index << "]";
    os << " = " << value << " violates " << bound;
    return os.str();
  }
};

struct ValidationResult {
  std::optional<SpectrumBundle> bundle;
  std::vector<ConstraintViolation> violations;

  bool ok() const noexcept { return bundle.has_value(); }
};

/// Entries of an unbounded alpha sequence inspected by validate().
inline constexpr std::size_t validation_window = 512;

/// Check positivity of the constants and the regime constraints on alpha:
/// 0 <= alpha_k <= m omega_c / lambda with eps strictly increasing and
/// positive (bounded regime), or alpha_k <= 0 with eps_k = -alpha_k strictly
/// increasing and positive for k >= 1.
inline ValidationResult validate(const PhysicalParams& p, const AlphaSequence& a,
                                 std::size_t window = validation_window) {
  ValidationResult out;
  auto& v = out.violations;
  auto positive = [&](const char* name, double x) {
    if (!(x > 0.0) || !std::isfinite(x)) v.push_back({name, std::nullopt, x, "> 0"});
  };
  positive("m", p.m);
  positive("omega_c", p.omega_c);
  positive("lambda", p.lambda);
  positive("hbar", p.hbar);
  if (!v.empty()) return out;

  const SpectralScales s = SpectralScales::from(p);
  const double upper = p.m * p.omega_c / p.lambda;
  const std::size_t count = a.size() ? *a.size() : window;
  if (count == 0) {
    v.push_back({"alpha", std::nullopt, 0.0, "non-empty sequence"});
    return out;
  }
  EpsilonSequence eps(a, upper);
  const auto eps_lim = a.limit() ? std::optional<double>(eps.limit()) : std::nullopt;

  std::ostringstream ub;
  ub << "0 <= alpha_k <= m*omega_c/lambda = " << upper;
  for (std::size_t k = 0; k < count; ++k) {
    const double ak = a[k];
    if (!std::isfinite(ak)) {
      v.push_back({"alpha", k, ak, "finite"});
      continue;
    }
    if (a.regime() == Regime::ShiftedBounded) {
      if (ak < 0.0 || ak > upper) v.push_back({"alpha", k, ak, ub.str()});
    } else if (ak > 0.0) {
      v.push_back({"alpha", k, ak, "alpha_k <= 0"});
    }
    if (k >= 1) {
      const double ek = eps[k];
      if (!(ek > 0.0)) v.push_back({"eps", k, ek, "eps_k > 0"});
      // A convergent generator reaches its limit in double precision; equal
      // neighbours at the limit are rounding, not a violation.
      const bool saturated = eps_lim && ek == eps[k - 1] &&
                             std::abs(ek - *eps_lim) <= 8 * std::numeric_limits<double>::epsilon() * std::abs(*eps_lim);
      if (!(ek > eps[k - 1]) && !saturated) v.push_back({"eps", k, ek, "eps strictly increasing"});
    } else if (a.regime() == Regime::ShiftedBounded && !(eps[0] > 0.0)) {
      v.push_back({"eps", std::size_t{0}, eps[0], "eps_k > 0"});
    }
  }
  if (a.regime() == Regime::ShiftedBounded && a.limit()) {
    const double lim = *a.limit();
    if (lim < 0.0 || lim > upper) v.push_back({"alpha_limit", std::nullopt, lim, ub.str()});
  }
  if (!v.empty()) return out;
  out.bundle = SpectrumBundle{p, s, a, eps};
  return out;
}

/// validate() that throws DomainError listing every violated constraint.
inline SpectrumBundle validated(const PhysicalParams& p, const AlphaSequence& a) {
  auto r = validate(p, a);
  if (r.ok()) return std::move(*r.bundle);
  std::ostringstream os;
  os << "invalid spectrum parameters:";
  for (const auto& c : r.violations) os << "\n  " << c.message();
  throw DomainError(os.str());
}

}  // namespace lcs
