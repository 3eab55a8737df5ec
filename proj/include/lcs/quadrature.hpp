#pragma once

// Discrete measures: Gauss rules synthesized from three-term recurrences,
// either known in closed form (Laguerre, Legendre) or extracted from a
// finite moment sequence. The recurrence-to-rule step is:
//   1. eigenvalues of the symmetric Jacobi matrix in double precision,
//   2. Newton polishing of each node on the monic orthogonal polynomial,
//   3. Christoffel weights 1 / sum_j p_j(x)^2 over orthonormal polynomials,
// with steps 2-3 carried out in 50-digit arithmetic. Moment-to-recurrence
// extraction (Cholesky of the Hankel matrix) runs in the same precision,
// since Hankel matrices of factorial-growth moments are badly conditioned.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "lcs/errors.hpp"
#include "lcs/specfun.hpp"
#include "lcs/spectrum.hpp"

namespace lcs {

using WorkReal = boost::multiprecision::cpp_bin_float_50;

struct DiscreteMeasure {
  std::vector<double> nodes;
  std::vector<double> weights;
  /// Non-fatal diagnostics, e.g. conditioning of the moment problem.
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return nodes.size(); }

  /// sum_i w_i x_i^k.
  double moment(std::size_t k) const {
    detail::CompensatedSum<double> s;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * std::pow(nodes[i], static_cast<double>(k));
    return s.value();
  }
};

/// Monic three-term recurrence p_{j+1} = (x - a_j) p_j - b_j p_{j-1},
/// with b_0 = mu_0 the total mass.
struct Recurrence {
  std::vector<WorkReal> a;
  std::vector<WorkReal> b;

  std::size_t size() const noexcept { return a.size(); }
};

/// Largest node count gauss_from_moments accepts without a conditioning warning.
inline constexpr std::size_t moment_conditioning_limit = 12;

/// Golub-Welsch extraction of the first M recurrence coefficients from
/// 2M moments, via Cholesky of the Hankel matrix H_ij = mu_{i+j}.
inline Recurrence recurrence_from_moments(std::span<const double> moments) {
  if (moments.empty() || moments.size() % 2 != 0) {
    throw InvalidMoments("gauss_from_moments: need an even, non-zero number of moments");
  }
  const std::size_t M = moments.size() / 2;
  std::vector<WorkReal> mu(moments.begin(), moments.end());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!std::isfinite(moments[i])) throw InvalidMoments("gauss_from_moments: non-finite moment");
  }
  // R is upper triangular, rows 0..M-1, columns 0..M.
  std::vector<std::vector<WorkReal>> R(M, std::vector<WorkReal>(M + 1, WorkReal(0)));
  for (std::size_t j = 0; j < M; ++j) {
    WorkReal d = mu[2 * j];
    for (std::size_t i = 0; i < j; ++i) d -= R[i][j] * R[i][j];
    if (!(d > 0)) {
      std::ostringstream os;
      os << "gauss_from_moments: Hankel matrix is not positive definite (pivot " << j << ")";
      throw InvalidMoments(os.str());
    }
    R[j][j] = sqrt(d);
    for (std::size_t c = j + 1; c <= M; ++c) {
      WorkReal v = mu[j + c];
      for (std::size_t i = 0; i < j; ++i) v -= R[i][c] * R[i][j];
      R[j][c] = v / R[j][j];
    }
  }
  Recurrence rc;
  rc.a.resize(M);
  rc.b.resize(M);
  rc.b[0] = mu[0];
  for (std::size_t j = 0; j < M; ++j) {
    rc.a[j] = R[j][j + 1] / R[j][j];
    if (j > 0) {
      rc.a[j] -= R[j - 1][j] / R[j - 1][j - 1];
      const WorkReal q = R[j][j] / R[j - 1][j - 1];
      rc.b[j] = q * q;
    }
  }
  return rc;
}

namespace detail {

/// Monic p_M(x) and p_M'(x).
inline std::pair<WorkReal, WorkReal> monic_eval(const Recurrence& rc, const WorkReal& x) {
  WorkReal p_prev = 0, p = 1, d_prev = 0, d = 0;
  for (std::size_t j = 0; j < rc.size(); ++j) {
    const WorkReal bj = j == 0 ? WorkReal(0) : rc.b[j];
    const WorkReal p_next = (x - rc.a[j]) * p - bj * p_prev;
    const WorkReal d_next = p + (x - rc.a[j]) * d - bj * d_prev;
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
  }
  return {p, d};
}

/// 1 / sum_{j<M} phat_j(x)^2 with phat_j orthonormal against the measure.
inline WorkReal christoffel_weight(const Recurrence& rc, const WorkReal& x) {
  WorkReal p_prev = 0;
  WorkReal p = 1 / sqrt(rc.b[0]);
  WorkReal s = p * p;
  for (std::size_t j = 0; j + 1 < rc.size(); ++j) {
    const WorkReal sb_next = sqrt(rc.b[j + 1]);
    const WorkReal sb = j == 0 ? WorkReal(0) : sqrt(rc.b[j]);
    const WorkReal p_next = ((x - rc.a[j]) * p - sb * p_prev) / sb_next;
    p_prev = p;
    p = p_next;
    s += p * p;
  }
  return 1 / s;
}

}  // namespace detail

/// Gauss rule with rc.size() nodes from a recurrence.
inline DiscreteMeasure gauss_from_recurrence(const Recurrence& rc) {
  const std::size_t M = rc.size();
  if (M == 0) throw QuadratureOrderError("gauss rule needs at least one node");
  for (std::size_t j = 1; j < M; ++j) {
    if (!(rc.b[j] > 0)) throw InvalidMoments("recurrence coefficient b_j <= 0");
  }
  Eigen::VectorXd diag(static_cast<Eigen::Index>(M));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(M > 1 ? M - 1 : 0));
  for (std::size_t j = 0; j < M; ++j) diag(static_cast<Eigen::Index>(j)) = static_cast<double>(rc.a[j]);
  for (std::size_t j = 1; j < M; ++j) sub(static_cast<Eigen::Index>(j - 1)) = std::sqrt(static_cast<double>(rc.b[j]));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw InvalidMoments("Jacobi matrix eigen-decomposition failed");

  DiscreteMeasure m;
  m.nodes.resize(M);
  m.weights.resize(M);
  for (std::size_t i = 0; i < M; ++i) {
    WorkReal x = es.eigenvalues()(static_cast<Eigen::Index>(i));
    for (int it = 0; it < 20; ++it) {
      const auto [p, d] = detail::monic_eval(rc, x);
      if (d == 0) break;
      const WorkReal step = p / d;
      x -= step;
      if (abs(step) <= WorkReal("1e-40") * (1 + abs(x))) break;
    }
    m.nodes[i] = static_cast<double>(x);
    m.weights[i] = static_cast<double>(detail::christoffel_weight(rc, x));
  }
  return m;
}

/// M-node measure reproducing 2M input moments mu_0 .. mu_{2M-1}.
inline DiscreteMeasure gauss_from_moments(std::span<const double> moments) {
  auto m = gauss_from_recurrence(recurrence_from_moments(moments));
  if (m.size() > moment_conditioning_limit) {
    std::ostringstream os;
    os << "moment problem with " << m.size() << " nodes exceeds the conditioning limit of "
       << moment_conditioning_limit << "; moment round-off is amplified";
    m.warnings.push_back(os.str());
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!(m.weights[i] > 0.0)) throw InvalidMoments("gauss_from_moments: non-positive weight");
    if (i > 0 && !(m.nodes[i] > m.nodes[i - 1])) throw InvalidMoments("gauss_from_moments: nodes not increasing");
  }
  return m;
}

/// Measure on [0, L] whose moments are int K^k varpi(K) dK = eps_k! xi^k,
/// k < 2M. Moments are assembled for K / xi and the nodes scaled back.
inline DiscreteMeasure moment_measure(const SpectrumBundle& b, std::size_t nodes) {
  std::vector<double> mu(2 * nodes);
  for (std::size_t k = 0; k < mu.size(); ++k) mu[k] = b.eps.factorial(k);
  auto m = gauss_from_moments(mu);
  for (auto& x : m.nodes) x *= b.scales.xi;
  return m;
}

/// |sum_i w_i x_i^k - eps_k! xi^k| / (eps_k! xi^k) for k = 0..k_max.
inline std::vector<double> moment_check(const DiscreteMeasure& m, const EpsilonSequence& eps, double xi,
                                        std::size_t k_max) {
  std::vector<double> err(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) {
    const double target = eps.factorial(k) * std::pow(xi, static_cast<double>(k));
    err[k] = std::abs(m.moment(k) - target) / target;
  }
  return err;
}

/// Generalized Gauss-Laguerre rule for int_0^inf f(J) J^{gamma-1} e^{-J/kappa} dJ,
/// exact for polynomials of degree <= 2 order - 1.
inline DiscreteMeasure jtheta_quadrature(double gamma, double kappa, std::size_t order) {
  if (!(gamma > 0.0)) throw DegenerateSpectrum("Laguerre rule needs gamma > 0");
  if (!(kappa > 0.0)) throw DomainError("Laguerre rule needs kappa > 0");
  if (order == 0) throw QuadratureOrderError("Laguerre rule needs order >= 1");
  Recurrence rc;
  rc.a.resize(order);
  rc.b.resize(order);
  const WorkReal g = gamma;
  rc.b[0] = boost::multiprecision::tgamma(g);
  for (std::size_t j = 0; j < order; ++j) {
    const WorkReal jj = static_cast<double>(j);
    rc.a[j] = 2 * jj + g;
    if (j > 0) rc.b[j] = jj * (jj + g - 1);
  }
  auto m = gauss_from_recurrence(rc);
  const double scale = std::pow(kappa, gamma);
  for (std::size_t i = 0; i < m.size(); ++i) {
    m.nodes[i] *= kappa;
    m.weights[i] *= scale;
  }
  return m;
}

/// Gauss-Legendre rule on [a, b] with unit weight.
inline DiscreteMeasure gauss_legendre(double a, double b, std::size_t order) {
  if (order == 0) throw QuadratureOrderError("Legendre rule needs order >= 1");
  if (!(b > a)) throw DomainError("Legendre rule needs b > a");
  Recurrence rc;
  rc.a.assign(order, WorkReal(0));
  rc.b.resize(order);
  rc.b[0] = 2;
  for (std::size_t j = 1; j < order; ++j) {
    const WorkReal jj = static_cast<double>(j);
    rc.b[j] = jj * jj / (4 * jj * jj - 1);
  }
  auto m = gauss_from_recurrence(rc);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < m.size(); ++i) {
    m.nodes[i] = a + half * (m.nodes[i] + 1.0);
    m.weights[i] *= half;
  }
  return m;
}

/// Angle rule on [0, 2 pi) for the normalized measure d phi / 2 pi.
struct AngularRule {
  enum class Kind {
    Exact,     ///< long-time average: keep only resonant matrix elements
    Trapezoid  ///< equally spaced points, exact for integer spacings below `points`
  };
  Kind kind = Kind::Exact;
  std::size_t points = 0;

  static AngularRule exact() { return {}; }
  static AngularRule trapezoid(std::size_t p) { return {Kind::Trapezoid, p}; }
};

inline DiscreteMeasure trapezoid_angles(std::size_t points) {
  if (points == 0) throw QuadratureOrderError("trapezoid rule needs at least one point");
  DiscreteMeasure m;
  for (std::size_t p = 0; p < points; ++p) {
    m.nodes.push_back(2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(points));
    m.weights.push_back(1.0 / static_cast<double>(points));
  }
  return m;
}

}  // namespace lcs
