#pragma once

// Scalar special functions behind every normalization constant: ln Gamma,
// rising factorials, 1F1(1; gamma; x) and generalized factorials of an
// eigenvalue sequence. Everything here is pure and reentrant.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "lcs/detail/summation.hpp"
#include "lcs/errors.hpp"

namespace lcs::specfun {

/// ln Gamma(x) for x > 0.
inline double ln_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("ln_gamma: argument must be finite and > 0, got " + std::to_string(x));
  }
  return boost::math::lgamma(x);
}

/// Rising factorial (gamma)_n = gamma (gamma+1) ... (gamma+n-1), (gamma)_0 = 1.
inline double pochhammer(double gamma, std::size_t n) noexcept {
  double p = 1.0;
  for (std::size_t j = 0; j < n; ++j) p *= gamma + static_cast<double>(j);
  return p;
}

/// ln (gamma)_n for gamma > 0. Summed term by term for moderate n so that
/// small gammas keep full relative accuracy.
inline double ln_pochhammer(double gamma, std::size_t n) {
  if (!(gamma > 0.0)) throw DomainError("ln_pochhammer: gamma must be > 0");
  if (n <= 256) {
    detail::CompensatedSum<double> s;
    for (std::size_t j = 0; j < n; ++j) s += std::log(gamma + static_cast<double>(j));
    return s.value();
  }
  return ln_gamma(gamma + static_cast<double>(n)) - ln_gamma(gamma);
}

inline constexpr double kummer_rel_threshold = 1e-16;
inline constexpr std::size_t kummer_max_terms = 10'000;

/// 1F1(1; gamma; x) = sum_n x^n / (gamma)_n by direct term summation.
/// Stops once the next term drops below 1e-16 of the partial sum.
inline double kummer_1f1_unit(double gamma, double x) {
  if (!(gamma > 0.0)) throw DomainError("kummer_1f1_unit: gamma must be > 0");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("kummer_1f1_unit: x must be finite and >= 0");
  detail::CompensatedSum<double> s;
  double term = 1.0;
  s += term;
  for (std::size_t n = 0; n < kummer_max_terms; ++n) {
    term *= x / (gamma + static_cast<double>(n));
    if (term < kummer_rel_threshold * s.value()) return s.value();
    s += term;
    if (!std::isfinite(s.value())) throw DomainError("kummer_1f1_unit: overflow, use ln_kummer_1f1_unit");
  }
  throw DomainError("kummer_1f1_unit: series did not converge within the term cap");
}

/// ln 1F1(1; gamma; x), usable far beyond the range where the sum itself
/// overflows. Terms are accumulated relative to the running maximum.
inline double ln_kummer_1f1_unit(double gamma, double x) {
  if (!(gamma > 0.0)) throw DomainError("ln_kummer_1f1_unit: gamma must be > 0");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("ln_kummer_1f1_unit: x must be finite and >= 0");
  if (x == 0.0) return 0.0;
  const double lnx = std::log(x);
  // Terms rise until n ~ x - gamma, then fall; the cap scales with x.
  const std::size_t cap = kummer_max_terms + static_cast<std::size_t>(2.0 * x);
  double ln_term = 0.0;
  double ln_scale = 0.0;  // current reference magnitude
  detail::CompensatedSum<double> s;
  s += 1.0;
  for (std::size_t n = 0; n < cap; ++n) {
    ln_term += lnx - std::log(gamma + static_cast<double>(n));
    if (ln_term > ln_scale) {
      const double r = std::exp(ln_scale - ln_term);
      const double rescaled = s.value() * r;
      s = detail::CompensatedSum<double>{};
      s += rescaled;
      ln_scale = ln_term;
    }
    const double rel = std::exp(ln_term - ln_scale);
    if (rel < kummer_rel_threshold * s.value()) return ln_scale + std::log(s.value());
    s += rel;
  }
  throw DomainError("ln_kummer_1f1_unit: series did not converge within the term cap");
}

/// eps_k! = eps_k eps_{k-1} ... eps_1 with eps[j-1] holding eps_j; eps_0! = 1.
inline double generalized_factorial(std::span<const double> eps, std::size_t k) {
  if (eps.size() < k) throw DomainError("generalized_factorial: sequence shorter than k");
  double p = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (!(eps[j] > 0.0)) {
      throw DomainError("generalized_factorial: eps_" + std::to_string(j + 1) + " is not positive");
    }
    p *= eps[j];
  }
  return p;
}

inline double ln_generalized_factorial(std::span<const double> eps, std::size_t k) {
  if (eps.size() < k) throw DomainError("ln_generalized_factorial: sequence shorter than k");
  detail::CompensatedSum<double> s;
  for (std::size_t j = 0; j < k; ++j) {
    if (!(eps[j] > 0.0)) {
      throw DomainError("ln_generalized_factorial: eps_" + std::to_string(j + 1) + " is not positive");
    }
    s += std::log(eps[j]);
  }
  return s.value();
}

}  // namespace lcs::specfun
