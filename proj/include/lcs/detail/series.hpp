#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lcs/detail/summation.hpp"
#include "lcs/errors.hpp"

namespace lcs::detail {

/// Tabulated positive series sum_j t_j with t_0 = 1, built from the log term
/// ratios ln(t_{j+1}/t_j). The ratios must be non-increasing in j, which holds
/// for every series used here (Poisson, 1F1(1; gamma; x), K^k / eps_k! xi^k);
/// the geometric majorant of the untabulated remainder relies on it.
class PositiveSeries {
 public:
  static constexpr std::size_t default_max_terms = 2'000'000;

  template <typename LnRatio>
  PositiveSeries(LnRatio&& ln_ratio, std::optional<std::size_t> size,
                 std::size_t max_terms = default_max_terms) {
    ln_terms_.push_back(0.0);
    double ln_scale = 0.0;
    CompensatedSum<double> s;  // sum relative to exp(ln_scale)
    s += 1.0;
    const std::size_t limit = size ? *size : max_terms;
    double residual_rel = 0.0;
    for (std::size_t j = 0; j + 1 < limit; ++j) {
      const double lr = ln_ratio(j);
      if (lr == -std::numeric_limits<double>::infinity()) break;  // all later terms vanish
      const double next = ln_terms_.back() + lr;
      ln_terms_.push_back(next);
      if (next > ln_scale) {
        const double rescaled = s.value() * std::exp(ln_scale - next);
        s = CompensatedSum<double>{};
        s += rescaled;
        ln_scale = next;
      }
      const double rel = std::exp(next - ln_scale);
      s += rel;
      if (!size && lr < 0.0) {
        const double r = std::exp(lr);
        const double majorant = rel * r / (1.0 - r);
        if (majorant < 1e-18 * s.value()) {
          residual_rel = majorant / s.value();
          break;
        }
      }
      if (!size && j + 2 == limit) {
        throw ConvergenceDomainError("series did not converge within " + std::to_string(max_terms) +
                                     " terms; label too close to the convergence radius");
      }
    }
    ln_sum_ = ln_scale + std::log(s.value());
    residual_ = residual_rel;
    // Normalized suffix masses, accumulated from the far end.
    suffix_.assign(ln_terms_.size() + 1, 0.0);
    CompensatedSum<double> acc;
    for (std::size_t j = ln_terms_.size(); j-- > 0;) {
      acc += std::exp(ln_terms_[j] - ln_sum_);
      suffix_[j] = acc.value();
    }
  }

  double ln_sum() const noexcept { return ln_sum_; }
  double ln_term(std::size_t j) const noexcept {
    return j < ln_terms_.size() ? ln_terms_[j] : -std::numeric_limits<double>::infinity();
  }
  /// Normalized probability t_j / sum.
  double probability(std::size_t j) const noexcept { return std::exp(ln_term(j) - ln_sum_); }
  std::size_t tabulated() const noexcept { return ln_terms_.size(); }

  /// sum_{j > cut} t_j / sum: the tabulated suffix plus the geometric
  /// majorant of everything past the table, so an upper bound that is tight
  /// to ~1e-18.
  double tail_after(std::size_t cut) const noexcept {
    if (cut + 1 >= ln_terms_.size()) return residual_;
    return suffix_[cut + 1] + residual_;
  }

  /// Smallest cut whose tail bound is <= threshold.
  std::size_t cutoff_for(double threshold) const noexcept {
    for (std::size_t c = 0; c < ln_terms_.size(); ++c)
      if (tail_after(c) <= threshold) return c;
    return ln_terms_.size() - 1;
  }

 private:
  std::vector<double> ln_terms_;
  std::vector<double> suffix_;
  double ln_sum_ = 0.0;
  double residual_ = 0.0;
};

}  // namespace lcs::detail
