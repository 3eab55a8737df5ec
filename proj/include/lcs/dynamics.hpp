#pragma once

// Diagonal time evolution, temporal stability and energy expectations.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <variant>

#include "lcs/detail/summation.hpp"
#include "lcs/fockspace.hpp"
#include "lcs/spectrum.hpp"
#include "lcs/states.hpp"

namespace lcs {

struct HamiltonianSpec {
  enum class Kind {
    ShiftedH1,           ///< E'_{n,alpha_k} = kappa n - xi alpha_k
    UnshiftedOscMinusT,  ///< kappa n + xi eps_k: oscillator part plus the k-dependent split
    OscDifference        ///< omega_c (n - l)
  };
  Kind kind = Kind::ShiftedH1;
  SpectrumBundle spectrum;

  double energy(const BasisIndex& i) const {
    const auto& sc = spectrum.scales;
    switch (kind) {
      case Kind::ShiftedH1: return spectrum.shifted(i.n, i.k);
      case Kind::UnshiftedOscMinusT: return sc.kappa * static_cast<double>(i.n) + sc.xi * spectrum.eps[i.k];
      case Kind::OscDifference:
        return spectrum.params.omega_c * (static_cast<double>(i.n) - static_cast<double>(i.l));
    }
    return 0.0;
  }
};

inline const char* to_string(HamiltonianSpec::Kind k) noexcept {
  switch (k) {
    case HamiltonianSpec::Kind::ShiftedH1: return "shifted_h1";
    case HamiltonianSpec::Kind::UnshiftedOscMinusT: return "unshifted_osc_minus_t";
    case HamiltonianSpec::Kind::OscDifference: return "osc_difference";
  }
  return "?";
}

/// c_{nlk} -> e^{-i E t} c_{nlk}. Zero coefficients are left alone, so a
/// finite alpha list need not cover the whole k cutoff.
inline TruncatedState evolve(const TruncatedState& state, const HamiltonianSpec& h, double t) {
  TruncatedState out = state;
  auto c = out.coefficients();
  for (std::size_t off = 0; off < c.size(); ++off) {
    if (c[off] == complex{}) continue;
    c[off] *= std::polar(1.0, -h.energy(out.index_of(off)) * t);
  }
  return out;
}

/// sum E |c|^2.
inline double expectation_H(const TruncatedState& state, const HamiltonianSpec& h) {
  detail::CompensatedSum<double> s;
  state.for_each([&](const BasisIndex& i, complex c) {
    if (c != complex{}) s += h.energy(i) * std::norm(c);
  });
  return s.value();
}

/// Hamiltonian under which each family is temporally stable.
inline HamiltonianSpec natural_hamiltonian(const SpectrumBundle& b, const FamilyLabel& label) {
  using K = HamiltonianSpec::Kind;
  switch (label.index()) {
    case 2:
    case 3: return {K::UnshiftedOscMinusT, b};
    case 5:
    case 6: return {K::OscDifference, b};
    default: return {K::ShiftedH1, b};
  }
}

/// Label the evolved state should coincide with: theta, delta -> +t for the
/// shifted families (only the angles the family carries move), theta, theta' ->
/// + omega_c t for bi-coherent states.
inline FamilyLabel shifted_label(const FamilyLabel& label, double t, double omega_c) {
  return std::visit(
      [&](auto x) -> FamilyLabel {
        using T = decltype(x);
        if constexpr (std::is_same_v<T, OneDof>) {
          x.delta += t;
        } else if constexpr (std::is_same_v<T, TwoDof> || std::is_same_v<T, ThreeDofDependent>) {
          x.theta += t;
        } else if constexpr (std::is_same_v<T, ThreeDofIndependentL> || std::is_same_v<T, ThreeDofIndependentN>) {
          x.theta += t;
          x.delta += t;
        } else if constexpr (std::is_same_v<T, BiCoherentAngles>) {
          x.theta += omega_c * t;
          x.theta_p += omega_c * t;
        } else {
          const complex rot = std::polar(1.0, -omega_c * t);
          x.z *= rot;
          x.zp *= rot;
        }
        return x;
      },
      label);
}

/// |<evolve(psi(label), t) | psi(shifted label)>| on a common basis.
inline double check_temporal_stability(const SpectrumBundle& b, const FamilyLabel& label, double t,
                                       const BuildOptions& opt = {}) {
  const auto psi = build(b, label, opt).state;
  BuildOptions same = opt;
  same.cutoffs = psi.cutoffs();
  same.enforce_tail = false;
  const auto target = build(b, shifted_label(label, t, b.params.omega_c), same).state;
  const auto evolved = evolve(psi, natural_hamiltonian(b, label), t);
  return std::abs(inner_product(evolved, target));
}

}  // namespace lcs
