#pragma once

#include <cmath>
#include <complex>

namespace lcs::detail {

// Neumaier's variant of Kahan summation. Order of add() calls fixes the
// result bit-for-bit.
template <typename T>
class CompensatedSum {
 public:
  void add(T x) noexcept {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(T x) noexcept {
    add(x);
    return *this;
  }
  T value() const noexcept { return sum_ + comp_; }

 private:
  T sum_{};
  T comp_{};
};

template <typename T>
class CompensatedSum<std::complex<T>> {
 public:
  void add(std::complex<T> x) noexcept {
    re_.add(x.real());
    im_.add(x.imag());
  }
  CompensatedSum& operator+=(std::complex<T> x) noexcept {
    add(x);
    return *this;
  }
  std::complex<T> value() const noexcept { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<T> re_;
  CompensatedSum<T> im_;
};

/// ln(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) noexcept {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

}  // namespace lcs::detail
