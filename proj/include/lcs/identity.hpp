#pragma once

// Numerical resolution of the identity: the frame operator
//   sum_nodes w |CS><CS|
// restricted to a finite subspace, for every family, with the measure
// densities and normalization factors of each family.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "lcs/errors.hpp"
#include "lcs/fockspace.hpp"
#include "lcs/quadrature.hpp"
#include "lcs/specfun.hpp"
#include "lcs/spectrum.hpp"
#include "lcs/states.hpp"

namespace lcs {

/// A single one-dimensional rule, as requested by a caller or reported back.
struct QuadratureSpec {
  enum class Rule { GaussLaguerreGeneralized, GaussLegendre, AngularExact, AngularTrapezoid, MomentMatched };
  Rule rule = Rule::GaussLaguerreGeneralized;
  std::size_t order = 1;
  double gamma = 1.0;
  double kappa = 1.0;
  double a = 0.0;
  double b = 1.0;

  static QuadratureSpec laguerre(double gamma, double kappa, std::size_t order) {
    return {Rule::GaussLaguerreGeneralized, order, gamma, kappa};
  }
  static QuadratureSpec legendre(double a, double b, std::size_t order) {
    return {Rule::GaussLegendre, order, 1.0, 1.0, a, b};
  }

  void check() const {
    if (order == 0 && rule != Rule::AngularExact) throw QuadratureOrderError("quadrature order must be >= 1");
    if (rule == Rule::GaussLaguerreGeneralized && !(gamma > 0.0)) {
      throw DegenerateSpectrum("Laguerre rule needs gamma > 0");
    }
  }

  /// Nodes and weights for the continuous rules.
  DiscreteMeasure measure() const {
    check();
    switch (rule) {
      case Rule::GaussLaguerreGeneralized: return jtheta_quadrature(gamma, kappa, order);
      case Rule::GaussLegendre: return gauss_legendre(a, b, order);
      case Rule::AngularTrapezoid: return trapezoid_angles(order);
      default: throw QuadratureOrderError("rule has no standalone node set");
    }
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (rule) {
      case Rule::GaussLaguerreGeneralized: os << "gauss_laguerre(gamma=" << gamma << ", kappa=" << kappa << ")"; break;
      case Rule::GaussLegendre: os << "gauss_legendre(a=" << a << ", b=" << b << ")"; break;
      case Rule::AngularExact: os << "angular_exact"; break;
      case Rule::AngularTrapezoid: os << "angular_trapezoid"; break;
      case Rule::MomentMatched: os << "moment_matched"; break;
    }
    return os.str();
  }
};

/// Node counts for the radial integrals and the angle treatment.
struct IdentityQuadrature {
  std::size_t j_order = 64;   ///< Laguerre nodes on J
  std::size_t jp_order = 16;  ///< Laguerre nodes on J'
  std::size_t k_nodes = 10;   ///< moment-matched nodes on K
  AngularRule angular = AngularRule::exact();
  /// Skip the order-vs-subspace check (convergence studies).
  bool allow_underresolved = false;
  unsigned threads = 1;
};

// Subspaces the frame operator is restricted to, one per family.
struct OneDofIdentity {
  std::size_t n = 0, l = 0, k_max = 8;
};
struct TwoDofIdentity {
  std::size_t l = 0, k = 0, n_max = 20;
};
struct ThreeDofIndependentLIdentity {
  std::size_t l = 0, n_max = 10, k_max = 6;
};
struct ThreeDofIndependentNIdentity {
  std::size_t n = 0, l_max = 10, k_max = 6;
};
struct ThreeDofDependentIdentity {
  std::size_t l = 0, n_max = 10, k_max = 6;
};
struct BiCoherentIdentity {
  std::size_t k = 0, n_max = 8, l_max = 8;
};

using IdentityTarget = std::variant<OneDofIdentity, TwoDofIdentity, ThreeDofIndependentLIdentity,
                                    ThreeDofIndependentNIdentity, ThreeDofDependentIdentity, BiCoherentIdentity>;

inline const char* family_name(const IdentityTarget& t) {
  constexpr const char* names[] = {"one_dof",
                                   "two_dof",
                                   "three_dof_independent_l",
                                   "three_dof_independent_n",
                                   "three_dof_dependent",
                                   "bicoherent"};
  return names[t.index()];
}

struct QuadratureUsage {
  std::string axis;
  QuadratureSpec spec;
};

struct IdentityCheckReport {
  std::string family;
  Subspace subspace;
  Eigen::MatrixXcd frame;
  double max_offdiag = 0.0;
  double max_diag_dev = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  std::vector<QuadratureUsage> quadrature;
  std::vector<std::string> warnings;

  double max_deviation() const noexcept { return std::max(max_offdiag, max_diag_dev); }
  bool hermitian(double tol = 1e-12) const noexcept { return hermiticity_error <= tol; }
  bool positive_semidefinite(double tol = 1e-12) const noexcept { return min_eigenvalue >= -tol; }
};

namespace detail {

inline double constant(const BuiltState& s, const std::string& name) {
  for (const auto& c : s.constants)
    if (c.name == name) return c.value;
  throw std::logic_error("missing normalization constant " + name);
}

inline double ln_or_ninf(double w) { return w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity(); }

inline void require_order(const char* axis, std::size_t order, std::size_t dimension, std::size_t degree,
                          const IdentityQuadrature& q) {
  if (order == 0) throw QuadratureOrderError(std::string(axis) + ": quadrature order must be >= 1");
  if (q.allow_underresolved) return;
  if (order < dimension || 2 * order < degree + 1) {
    std::ostringstream os;
    os << axis << ": insufficient quadrature order " << order << " for subspace dimension " << dimension
       << " (polynomial degree " << degree << ")";
    throw QuadratureOrderError(os.str());
  }
}

/// Adds w |v><v| for one radial node, either once under the symbolic mask or
/// sampled on a trapezoid grid over the angles that vary on the subspace.
class AngularSampler {
 public:
  AngularSampler(const Subspace& sub, const PhaseMap& phases, const AngularRule& rule, double unit)
      : rule_(rule) {
    sig_.reserve(sub.dimension());
    for (const auto& i : sub.basis()) {
      auto p = phases(i);
      for (auto& e : p.energy) e /= unit;
      sig_.push_back(p);
    }
    for (std::size_t a = 0; a < 3; ++a) {
      for (const auto& s : sig_)
        if (std::abs(s.energy[a] - sig_.front().energy[a]) > 0.0) active_[a] = true;
    }
    if (rule_.kind == AngularRule::Kind::Trapezoid) {
      angles_ = trapezoid_angles(rule_.points);
    }
  }

  /// Prototype accumulator carrying the mask for the exact rule.
  FrameAccumulator prototype(const Subspace& sub, const PhaseMap& phases) const {
    FrameAccumulator acc(sub);
    if (rule_.kind == AngularRule::Kind::Exact) acc.set_dephasing(phases);
    return acc;
  }

  void add(FrameAccumulator& acc, const std::vector<complex>& v, double w) const {
    if (rule_.kind == AngularRule::Kind::Exact) {
      acc.add_vector(v, w);
      return;
    }
    std::vector<std::size_t> axes;
    for (std::size_t a = 0; a < 3; ++a)
      if (active_[a]) axes.push_back(a);
    const std::size_t P = angles_.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < axes.size(); ++i) total *= P;
    const double ws = w / static_cast<double>(total);
    std::vector<complex> r(v.size());
    for (std::size_t g = 0; g < total; ++g) {
      std::array<double, 3> phi{};
      std::size_t rest = g;
      for (auto a : axes) {
        phi[a] = angles_.nodes[rest % P];
        rest /= P;
      }
      for (std::size_t i = 0; i < v.size(); ++i) {
        double ph = 0.0;
        for (auto a : axes) ph += sig_[i].energy[a] * phi[a];
        r[i] = v[i] * std::polar(1.0, -ph);
      }
      acc.add_vector(r, ws);
    }
  }

  QuadratureSpec spec() const {
    QuadratureSpec s;
    s.rule = rule_.kind == AngularRule::Kind::Exact ? QuadratureSpec::Rule::AngularExact
                                                    : QuadratureSpec::Rule::AngularTrapezoid;
    s.order = rule_.points;
    return s;
  }

 private:
  AngularRule rule_;
  std::vector<PhaseSignature> sig_;
  std::array<bool, 3> active_{};
  DiscreteMeasure angles_;
};

/// Runs contribution(chunk, acc) for chunk = 0..chunks-1 on a fixed
/// partition and folds the partial sums in chunk order, so the result does
/// not depend on the thread count.
template <typename F>
Eigen::MatrixXcd accumulate_chunks(const FrameAccumulator& proto, std::size_t chunks, unsigned threads,
                                   F&& contribution) {
  std::vector<FrameAccumulator> parts;
  parts.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) parts.push_back(proto.empty_copy());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(chunks);
  auto worker = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      try {
        contribution(c, parts[c]);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(chunks, 1))));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  FrameAccumulator total = proto.empty_copy();
  for (const auto& p : parts) total.merge(p);
  return total.value();
}

inline void summarize(IdentityCheckReport& r) {
  const auto& M = r.frame;
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      r.hermiticity_error = std::max(r.hermiticity_error, std::abs(M(i, j) - std::conj(M(j, i))));
      if (i == j) {
        r.max_diag_dev = std::max(r.max_diag_dev, std::abs(M(i, i) - 1.0));
      } else {
        r.max_offdiag = std::max(r.max_offdiag, std::abs(M(i, j)));
      }
    }
  if (M.size() > 0) {
    const Eigen::MatrixXcd H = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
  }
}

/// 1 / (kappa^gamma Gamma(gamma)) in log form.
inline double ln_density_norm(double gamma, double kappa) {
  return -(gamma * std::log(kappa) + specfun::ln_gamma(gamma));
}

inline BuildOptions node_options(const Subspace& sub) {
  BuildOptions o;
  o.cutoffs = sub.bounding_cutoffs();
  o.enforce_tail = false;
  return o;
}

}  // namespace detail

// One degree of freedom: K-integral with the moment-matched measure times N(K),
// delta averaged.
inline IdentityCheckReport resolve_identity(const SpectrumBundle& b, const OneDofIdentity& t,
                                            const IdentityQuadrature& q = {}) {
  detail::require_order("K", q.k_nodes, t.k_max + 1, t.k_max, q);
  IdentityCheckReport r;
  r.family = "one_dof";
  r.subspace = Subspace::box(t.n, t.n, t.l, t.l, 0, t.k_max);
  const auto km = moment_measure(b, q.k_nodes);
  r.warnings = km.warnings;
  const auto phases = one_dof_phases(b);
  const detail::AngularSampler ang(r.subspace, phases, q.angular, b.scales.kappa);
  const auto opt = detail::node_options(r.subspace);

  r.frame = detail::accumulate_chunks(ang.prototype(r.subspace, phases), km.size(), q.threads,
                                      [&](std::size_t i, FrameAccumulator& acc) {
                                        const auto s = build_one_dof(b, OneDof{km.nodes[i], 0.0, t.n, t.l}, opt);
                                        const double w = std::exp(detail::ln_or_ninf(km.weights[i]) +
                                                                  detail::constant(s, "ln_N_K"));
                                        ang.add(acc, acc.restrict(s.state), w * s.state.paper_norm2());
                                      });
  QuadratureSpec ks;
  ks.rule = QuadratureSpec::Rule::MomentMatched;
  ks.order = q.k_nodes;
  r.quadrature = {{"K", ks}, {"delta", ang.spec()}};
  detail::summarize(r);
  return r;
}

// Two degrees of freedom: Laguerre rules with exponent gamma(alpha_k) on J and J'.
inline IdentityCheckReport resolve_identity(const SpectrumBundle& b, const TwoDofIdentity& t,
                                            const IdentityQuadrature& q = {}) {
  detail::require_order("J", q.j_order, t.n_max + 1, t.n_max, q);
  detail::require_order("J'", q.jp_order, 1, t.l, q);
  IdentityCheckReport r;
  r.family = "two_dof";
  r.subspace = Subspace::box(0, t.n_max, t.l, t.l, t.k, t.k);
  const auto& sc = b.scales;
  const double alpha = b.alpha[t.k];
  const double g = gamma_param(sc, alpha);
  const auto jspec = QuadratureSpec::laguerre(g, sc.kappa, q.j_order);
  const auto jpspec = QuadratureSpec::laguerre(g, sc.kappa, q.jp_order);
  const auto jm = jspec.measure();
  const auto jpm = jpspec.measure();
  const double ln_dn = detail::ln_density_norm(g, sc.kappa);
  const auto phases = two_dof_phases(sc, alpha);
  const detail::AngularSampler ang(r.subspace, phases, q.angular, sc.kappa);
  const auto opt = detail::node_options(r.subspace);

  r.frame = detail::accumulate_chunks(
      ang.prototype(r.subspace, phases), jm.size(), q.threads, [&](std::size_t i, FrameAccumulator& acc) {
        for (std::size_t j = 0; j < jpm.size(); ++j) {
          const auto s = build_two_dof(sc, alpha, TwoDof{jm.nodes[i], 0.0, jpm.nodes[j], 0.0, t.l, t.k}, opt);
          const double lw = detail::ln_or_ninf(jm.weights[i]) + detail::ln_or_ninf(jpm.weights[j]) + 2.0 * ln_dn +
                            detail::constant(s, "ln_N_J") + detail::constant(s, "ln_N_Jp") +
                            detail::constant(s, "ln_fiber_weight");
          ang.add(acc, acc.restrict(s.state), std::exp(lw));
        }
      });
  r.quadrature = {{"J", jspec}, {"J'", jpspec}, {"theta", ang.spec()}};
  detail::summarize(r);
  return r;
}

namespace detail {

template <bool FixedL>
IdentityCheckReport resolve_three_independent(const SpectrumBundle& b, std::size_t fixed, std::size_t p_max,
                                              std::size_t k_max, const IdentityQuadrature& q) {
  require_nonpositive(b, FixedL ? "three_dof_independent_l" : "three_dof_independent_n");
  // Variant L sums n with J; variant N sums l with J'.
  const std::size_t summed_order = FixedL ? q.j_order : q.jp_order;
  const std::size_t fixed_order = FixedL ? q.jp_order : q.j_order;
  require_order(FixedL ? "J" : "J'", summed_order, p_max + 1, p_max, q);
  require_order(FixedL ? "J'" : "J", fixed_order, 1, fixed, q);
  require_order("K", q.k_nodes, k_max + 1, k_max, q);

  IdentityCheckReport r;
  r.family = FixedL ? "three_dof_independent_l" : "three_dof_independent_n";
  r.subspace = FixedL ? Subspace::box(0, p_max, fixed, fixed, 0, k_max) : Subspace::box(fixed, fixed, 0, p_max, 0, k_max);
  const auto& sc = b.scales;
  const auto jspec = QuadratureSpec::laguerre(1.0, sc.kappa, q.j_order);
  const auto jpspec = QuadratureSpec::laguerre(1.0, sc.kappa, q.jp_order);
  const auto jm = jspec.measure();
  const auto jpm = jpspec.measure();
  const auto km = moment_measure(b, q.k_nodes);
  r.warnings = km.warnings;
  const double ln_dn = ln_density_norm(1.0, sc.kappa);
  const auto phases = three_dof_independent_phases(b);
  const AngularSampler ang(r.subspace, phases, q.angular, sc.kappa);
  const auto opt = node_options(r.subspace);

  r.frame = accumulate_chunks(ang.prototype(r.subspace, phases), jm.size(), q.threads,
                              [&](std::size_t i, FrameAccumulator& acc) {
                                for (std::size_t j = 0; j < jpm.size(); ++j)
                                  for (std::size_t m = 0; m < km.size(); ++m) {
                                    const double J = jm.nodes[i], Jp = jpm.nodes[j], K = km.nodes[m];
                                    const auto s = build_three_independent<FixedL>(b, J, 0.0, Jp, 0.0, K, 0.0,
                                                                                   fixed, opt);
                                    const double lw = ln_or_ninf(jm.weights[i]) + ln_or_ninf(jpm.weights[j]) +
                                                      2.0 * ln_dn + ln_or_ninf(km.weights[m]) +
                                                      constant(s, "ln_N_J") + constant(s, "ln_N_Jp") +
                                                      constant(s, "ln_N_K") + constant(s, "ln_fiber_weight");
                                    ang.add(acc, acc.restrict(s.state), std::exp(lw));
                                  }
                              });
  QuadratureSpec ks;
  ks.rule = QuadratureSpec::Rule::MomentMatched;
  ks.order = q.k_nodes;
  r.quadrature = {{"J", jspec}, {"J'", jpspec}, {"K", ks}, {"angles", ang.spec()}};
  summarize(r);
  return r;
}

}  // namespace detail

inline IdentityCheckReport resolve_identity(const SpectrumBundle& b, const ThreeDofIndependentLIdentity& t,
                                            const IdentityQuadrature& q = {}) {
  return detail::resolve_three_independent<true>(b, t.l, t.n_max, t.k_max, q);
}

inline IdentityCheckReport resolve_identity(const SpectrumBundle& b, const ThreeDofIndependentNIdentity& t,
                                            const IdentityQuadrature& q = {}) {
  return detail::resolve_three_independent<false>(b, t.n, t.l_max, t.k_max, q);
}

// Dependent sums: the J density carries gamma(alpha_k), so each k block gets
// its own Laguerre rule and only that block of the frame operator is taken
// from it. Cross-k elements vanish under the delta average.
inline IdentityCheckReport resolve_identity(const SpectrumBundle& b, const ThreeDofDependentIdentity& t,
                                            const IdentityQuadrature& q = {}) {
  detail::require_nonpositive(b, "three_dof_dependent");
  detail::require_order("J", q.j_order, t.n_max + 1, t.n_max, q);
  detail::require_order("J'", q.jp_order, 1, t.l, q);
  detail::require_order("K", q.k_nodes, t.k_max + 1, t.k_max, q);
  if (q.angular.kind != AngularRule::Kind::Exact) {
    throw QuadratureOrderError("three_dof_dependent: the block assembly needs the exact angular rule");
  }

  IdentityCheckReport r;
  r.family = "three_dof_dependent";
  r.subspace = Subspace::box(0, t.n_max, t.l, t.l, 0, t.k_max);
  const auto& sc = b.scales;
  const auto jpspec = QuadratureSpec::laguerre(1.0, sc.kappa, q.jp_order);
  const auto jpm = jpspec.measure();
  const auto km = moment_measure(b, q.k_nodes);
  r.warnings = km.warnings;
  const double ln_dnp = detail::ln_density_norm(1.0, sc.kappa);

  std::vector<double> gammas;
  std::vector<DiscreteMeasure> jms;
  for (std::size_t k = 0; k <= t.k_max; ++k) {
    gammas.push_back(gamma_param(sc, b.alpha[k]));
    jms.push_back(jtheta_quadrature(gammas.back(), sc.kappa, q.j_order));
  }
  const auto phases = three_dof_dependent_phases(b);
  FrameAccumulator proto(r.subspace);
  proto.set_dephasing(phases);
  const auto opt = detail::node_options(r.subspace);
  const std::size_t per_block = q.j_order;

  r.frame = detail::accumulate_chunks(
      proto, (t.k_max + 1) * per_block, q.threads, [&](std::size_t c, FrameAccumulator& acc) {
        const std::size_t k = c / per_block;
        const std::size_t i = c % per_block;
        const auto& jm = jms[k];
        const double J = jm.nodes[i];
        const double ln_NJk = specfun::ln_kummer_1f1_unit(gammas[k], J / sc.kappa);
        const double ln_dn = detail::ln_density_norm(gammas[k], sc.kappa);
        for (std::size_t j = 0; j < jpm.size(); ++j)
          for (std::size_t m = 0; m < km.size(); ++m) {
            const auto s = build_three_dof_dependent(b, ThreeDofDependent{J, 0.0, jpm.nodes[j], 0.0, km.nodes[m], 0.0, t.l},
                                                     opt);
            auto v = acc.restrict(s.state);
            for (std::size_t p = 0; p < v.size(); ++p)
              if (r.subspace.basis()[p].k != k) v[p] = 0.0;
            const double lw = detail::ln_or_ninf(jm.weights[i]) + ln_dn + detail::ln_or_ninf(jpm.weights[j]) +
                              ln_dnp + detail::ln_or_ninf(km.weights[m]) + ln_NJk +
                              detail::constant(s, "ln_N_Jp") + std::log(detail::constant(s, "N_KJ"));
            acc.add_vector(v, std::exp(lw) * s.state.paper_norm2());
          }
      });
  QuadratureSpec ks;
  ks.rule = QuadratureSpec::Rule::MomentMatched;
  ks.order = q.k_nodes;
  r.quadrature.push_back({"J", QuadratureSpec::laguerre(gammas.front(), sc.kappa, q.j_order)});
  r.quadrature.push_back({"J'", jpspec});
  r.quadrature.push_back({"K", ks});
  r.quadrature.push_back({"angles", QuadratureSpec{QuadratureSpec::Rule::AngularExact, 0}});
  if (t.k_max > 0) r.warnings.push_back("J rule exponent follows gamma(alpha_k) per k block");
  detail::summarize(r);
  return r;
}

// Bi-coherent states on a fixed k: e^{-J} Laguerre rules times e^{J + J'}.
inline IdentityCheckReport resolve_identity(const BiCoherentIdentity& t, const IdentityQuadrature& q = {}) {
  detail::require_order("J", q.j_order, t.n_max + 1, t.n_max, q);
  detail::require_order("J'", q.jp_order, t.l_max + 1, t.l_max, q);
  IdentityCheckReport r;
  r.family = "bicoherent";
  r.subspace = Subspace::box(0, t.n_max, 0, t.l_max, t.k, t.k);
  const auto jspec = QuadratureSpec::laguerre(1.0, 1.0, q.j_order);
  const auto jpspec = QuadratureSpec::laguerre(1.0, 1.0, q.jp_order);
  const auto jm = jspec.measure();
  const auto jpm = jpspec.measure();
  const auto phases = bicoherent_phases();
  const detail::AngularSampler ang(r.subspace, phases, q.angular, 1.0);
  const auto opt = detail::node_options(r.subspace);

  r.frame = detail::accumulate_chunks(ang.prototype(r.subspace, phases), jm.size(), q.threads,
                                      [&](std::size_t i, FrameAccumulator& acc) {
                                        for (std::size_t j = 0; j < jpm.size(); ++j) {
                                          const double J = jm.nodes[i], Jp = jpm.nodes[j];
                                          const auto s = build_bicoherent(BiCoherentAngles{J, 0.0, Jp, 0.0, t.k}, opt);
                                          const double lw = detail::ln_or_ninf(jm.weights[i]) +
                                                            detail::ln_or_ninf(jpm.weights[j]) + J + Jp;
                                          ang.add(acc, acc.restrict(s.state), std::exp(lw));
                                        }
                                      });
  r.quadrature = {{"J", jspec}, {"J'", jpspec}, {"angles", ang.spec()}};
  detail::summarize(r);
  return r;
}

inline IdentityCheckReport resolve_identity(const SpectrumBundle& b, const IdentityTarget& target,
                                            const IdentityQuadrature& q = {}) {
  return std::visit(
      [&](const auto& t) -> IdentityCheckReport {
        if constexpr (std::is_same_v<std::decay_t<decltype(t)>, BiCoherentIdentity>) {
          return resolve_identity(t, q);
        } else {
          return resolve_identity(b, t, q);
        }
      },
      target);
}

}  // namespace lcs
