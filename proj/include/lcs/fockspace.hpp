#pragma once

// Truncated product basis |Psi_nl> (x) |.k>, dense coefficient storage and
// the weighted outer-product accumulator used to assemble frame operators.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lcs/detail/summation.hpp"
#include "lcs/errors.hpp"

namespace lcs {

using complex = std::complex<double>;

struct BasisIndex {
  std::size_t n = 0;
  std::size_t l = 0;
  std::size_t k = 0;

  auto operator<=>(const BasisIndex&) const = default;
};

struct BasisCutoffs {
  static constexpr std::size_t default_cap = 2'000'000;

  std::size_t n_max = 0;
  std::size_t l_max = 0;
  std::size_t k_max = 0;

  std::size_t dimension() const noexcept { return (n_max + 1) * (l_max + 1) * (k_max + 1); }
  bool contains(const BasisIndex& i) const noexcept { return i.n <= n_max && i.l <= l_max && i.k <= k_max; }

  void check(std::size_t cap = default_cap) const {
    if (dimension() > cap) {
      std::ostringstream os;
      os << "basis dimension " << dimension() << " exceeds cap " << cap;
      throw CutoffMismatch(os.str());
    }
  }

  static BasisCutoffs merge(const BasisCutoffs& a, const BasisCutoffs& b) noexcept {
    return {std::max(a.n_max, b.n_max), std::max(a.l_max, b.l_max), std::max(a.k_max, b.k_max)};
  }

  bool operator==(const BasisCutoffs&) const = default;
};

/// Complex coefficients over (n, l, k), row-major with k fastest.
class TruncatedState {
 public:
  TruncatedState() = default;
  explicit TruncatedState(BasisCutoffs cutoffs, std::size_t cap = BasisCutoffs::default_cap)
      : cutoffs_(cutoffs) {
    cutoffs_.check(cap);
    coeffs_.assign(cutoffs_.dimension(), complex{});
  }

  const BasisCutoffs& cutoffs() const noexcept { return cutoffs_; }

  std::size_t offset(std::size_t n, std::size_t l, std::size_t k) const noexcept {
    return (n * (cutoffs_.l_max + 1) + l) * (cutoffs_.k_max + 1) + k;
  }
  std::size_t offset(const BasisIndex& i) const noexcept { return offset(i.n, i.l, i.k); }

  BasisIndex index_of(std::size_t off) const noexcept {
    const std::size_t kk = off % (cutoffs_.k_max + 1);
    const std::size_t rest = off / (cutoffs_.k_max + 1);
    return {rest / (cutoffs_.l_max + 1), rest % (cutoffs_.l_max + 1), kk};
  }

  complex& operator()(std::size_t n, std::size_t l, std::size_t k) noexcept { return coeffs_[offset(n, l, k)]; }
  complex operator()(std::size_t n, std::size_t l, std::size_t k) const noexcept {
    return coeffs_[offset(n, l, k)];
  }
  complex at(const BasisIndex& i) const {
    if (!cutoffs_.contains(i)) throw CutoffMismatch("basis index outside the state's cutoffs");
    return coeffs_[offset(i)];
  }

  std::span<const complex> coefficients() const noexcept { return coeffs_; }
  std::span<complex> coefficients() noexcept { return coeffs_; }

  /// Upper bound on the squared-norm mass discarded by the truncation.
  double tail_bound() const noexcept { return tail_bound_; }
  void set_tail_bound(double t) noexcept { tail_bound_ = t; }

  /// Squared norm the un-normalized (analytically scaled) vector carries
  /// before being brought to unit length; 1 for families whose expansion
  /// is already normalized over its own indices.
  double paper_norm2() const noexcept { return paper_norm2_; }
  void set_paper_norm2(double w) noexcept { paper_norm2_ = w; }

  /// Visit every stored index with its coefficient in storage order.
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t off = 0; off < coeffs_.size(); ++off) f(index_of(off), coeffs_[off]);
  }

 private:
  BasisCutoffs cutoffs_{};
  std::vector<complex> coeffs_;
  double tail_bound_ = 0.0;
  double paper_norm2_ = 1.0;
};

/// <a|b> = sum conj(a) b, compensated and in storage order.
inline complex inner_product(const TruncatedState& a, const TruncatedState& b) {
  if (!(a.cutoffs() == b.cutoffs())) throw CutoffMismatch("inner_product: states have different cutoffs");
  detail::CompensatedSum<complex> s;
  auto ca = a.coefficients();
  auto cb = b.coefficients();
  for (std::size_t i = 0; i < ca.size(); ++i) s += std::conj(ca[i]) * cb[i];
  return s.value();
}

inline double norm_squared(const TruncatedState& a) {
  detail::CompensatedSum<double> s;
  for (const auto& c : a.coefficients()) s += std::norm(c);
  return s.value();
}

/// Ordered list of basis vectors spanning the subspace a frame operator is
/// restricted to.
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(std::vector<BasisIndex> basis, std::string description = {})
      : basis_(std::move(basis)), description_(std::move(description)) {}

  /// All (n, l, k) with n in [n0, n1], l in [l0, l1], k in [k0, k1], k fastest.
  static Subspace box(std::size_t n0, std::size_t n1, std::size_t l0, std::size_t l1, std::size_t k0,
                      std::size_t k1) {
    std::vector<BasisIndex> b;
    for (std::size_t n = n0; n <= n1; ++n)
      for (std::size_t l = l0; l <= l1; ++l)
        for (std::size_t k = k0; k <= k1; ++k) b.push_back({n, l, k});
    std::ostringstream os;
    os << "n in [" << n0 << "," << n1 << "], l in [" << l0 << "," << l1 << "], k in [" << k0 << "," << k1 << "]";
    return Subspace(std::move(b), os.str());
  }

  std::size_t dimension() const noexcept { return basis_.size(); }
  const std::vector<BasisIndex>& basis() const noexcept { return basis_; }
  const std::string& description() const noexcept { return description_; }

  /// Smallest cutoffs containing every subspace vector.
  BasisCutoffs bounding_cutoffs() const noexcept {
    BasisCutoffs c;
    for (const auto& i : basis_) {
      c.n_max = std::max(c.n_max, i.n);
      c.l_max = std::max(c.l_max, i.l);
      c.k_max = std::max(c.k_max, i.k);
    }
    return c;
  }

  std::optional<std::size_t> position(const BasisIndex& i) const {
    auto it = std::find(basis_.begin(), basis_.end(), i);
    if (it == basis_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - basis_.begin());
  }

 private:
  std::vector<BasisIndex> basis_;
  std::string description_;
};

/// Energies multiplying each label angle in the coefficient phase
/// exp(-i sum_a energy[a] phi_a). Unused angles carry 0.
struct PhaseSignature {
  std::array<double, 3> energy{};
};

using PhaseMap = std::function<PhaseSignature(const BasisIndex&)>;

/// Two phase signatures are resonant when every angle carries the same energy
/// (up to rounding of the closed-form energies).
inline bool resonant(const PhaseSignature& a, const PhaseSignature& b) noexcept {
  for (std::size_t i = 0; i < a.energy.size(); ++i) {
    const double scale = std::max({1.0, std::abs(a.energy[i]), std::abs(b.energy[i])});
    if (std::abs(a.energy[i] - b.energy[i]) > 1e-12 * scale) return false;
  }
  return true;
}

/// Running weighted sum of |psi><psi| restricted to a subspace, with
/// per-element compensation. An optional resonance mask keeps only elements
/// between basis vectors whose selected phase energies coincide: the average
/// over those label angles applied symbolically.
class FrameAccumulator {
 public:
  explicit FrameAccumulator(Subspace subspace)
      : subspace_(std::move(subspace)),
        sum_(Eigen::MatrixXcd::Zero(dim(), dim())),
        comp_(Eigen::MatrixXcd::Zero(dim(), dim())) {}

  const Subspace& subspace() const noexcept { return subspace_; }
  std::size_t dim() const noexcept { return subspace_.dimension(); }

  /// Average symbolically over the angles flagged in `angles`.
  void set_dephasing(const PhaseMap& phases, std::array<bool, 3> angles = {true, true, true}) {
    std::vector<PhaseSignature> sig;
    sig.reserve(dim());
    for (const auto& i : subspace_.basis()) {
      auto p = phases(i);
      for (std::size_t a = 0; a < 3; ++a)
        if (!angles[a]) p.energy[a] = 0.0;
      sig.push_back(p);
    }
    mask_.assign(dim() * dim(), 0);
    for (std::size_t j = 0; j < dim(); ++j)
      for (std::size_t i = 0; i < dim(); ++i) mask_[j * dim() + i] = resonant(sig[i], sig[j]) ? 1 : 0;
  }
  bool dephasing() const noexcept { return !mask_.empty(); }

  /// Coefficients of `state` on the subspace basis, in subspace order.
  std::vector<complex> restrict(const TruncatedState& state) const {
    std::vector<complex> v(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      const auto& b = subspace_.basis()[i];
      if (!state.cutoffs().contains(b)) throw CutoffMismatch("outer_accumulate: subspace exceeds state cutoffs");
      v[i] = state(b.n, b.l, b.k);
    }
    return v;
  }

  /// acc += weight |state><state| on the subspace.
  void add(const TruncatedState& state, double weight) {
    if (weight == 0.0) return;
    add_vector(restrict(state), weight);
  }

  /// Same, averaging symbolically over every label angle of `phases`.
  void add_dephased(const TruncatedState& state, double weight, const PhaseMap& phases) {
    if (!dephasing()) set_dephasing(phases);
    add(state, weight);
  }

  /// acc += weight |v><v| for a vector already restricted to the subspace.
  void add_vector(std::span<const complex> v, double weight) {
    if (v.size() != dim()) throw CutoffMismatch("outer_accumulate: vector length differs from subspace dimension");
    if (weight == 0.0) return;
    const bool masked = dephasing();
    for (std::size_t j = 0; j < dim(); ++j) {
      const complex cj = std::conj(v[j]) * weight;
      for (std::size_t i = 0; i < dim(); ++i) {
        if (masked && !mask_[j * dim() + i]) continue;
        kahan(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), v[i] * cj);
      }
    }
  }

  /// Fold another accumulator over the same subspace in; used for ordered
  /// reductions of per-chunk partial sums.
  void merge(const FrameAccumulator& other) {
    if (other.dim() != dim()) throw CutoffMismatch("FrameAccumulator::merge: subspace mismatch");
    for (Eigen::Index j = 0; j < sum_.cols(); ++j)
      for (Eigen::Index i = 0; i < sum_.rows(); ++i) {
        kahan(i, j, other.sum_(i, j));
        kahan(i, j, other.comp_(i, j));
      }
  }

  /// Fresh accumulator with the same subspace and mask.
  FrameAccumulator empty_copy() const {
    FrameAccumulator f(subspace_);
    f.mask_ = mask_;
    return f;
  }

  Eigen::MatrixXcd value() const { return sum_ + comp_; }

 private:
  void kahan(Eigen::Index i, Eigen::Index j, complex x) {
    complex& s = sum_(i, j);
    complex& c = comp_(i, j);
    const complex t = s + x;
    auto part = [](double sv, double xv, double tv) {
      return std::abs(sv) >= std::abs(xv) ? (sv - tv) + xv : (xv - tv) + sv;
    };
    c += complex(part(s.real(), x.real(), t.real()), part(s.imag(), x.imag(), t.imag()));
    s = t;
  }

  Subspace subspace_;
  Eigen::MatrixXcd sum_;
  Eigen::MatrixXcd comp_;
  std::vector<char> mask_;
};

inline void outer_accumulate(FrameAccumulator& acc, const TruncatedState& state, double weight) {
  acc.add(state, weight);
}

}  // namespace lcs
