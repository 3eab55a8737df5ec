#pragma once

// CSV and JSON serialization of states, identity reports and matrices.

#include <cstdio>
#include <ostream>
#include <string>
#include <variant>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lcs/fockspace.hpp"
#include "lcs/identity.hpp"
#include "lcs/spectrum.hpp"
#include "lcs/states.hpp"

namespace lcs::io {

using nlohmann::json;

/// %.17g: shortest fixed format that round-trips every double.
inline std::string fmt(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// n,l,k,re,im for every non-zero coefficient, storage order.
inline void write_state_csv(std::ostream& os, const TruncatedState& s) {
  os << "n,l,k,re,im\n";
  s.for_each([&](const BasisIndex& i, complex c) {
    if (c == complex{}) return;
    os << i.n << ',' << i.l << ',' << i.k << ',' << fmt(c.real()) << ',' << fmt(c.imag()) << '\n';
  });
}

/// Long format row,col,re,im.
inline void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& m) {
  os << "row,col,re,im\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << i << ',' << j << ',' << fmt(m(i, j).real()) << ',' << fmt(m(i, j).imag()) << '\n';
}

inline json to_json(const BasisCutoffs& c) { return {{"n_max", c.n_max}, {"l_max", c.l_max}, {"k_max", c.k_max}}; }

inline json to_json(const PhysicalParams& p) {
  return {{"m", p.m}, {"omega_c", p.omega_c}, {"lambda", p.lambda}, {"hbar", p.hbar}};
}

inline json to_json(const FamilyLabel& label) {
  json j = std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, OneDof>) {
          return {{"K", x.K}, {"delta", x.delta}, {"n", x.n}, {"l", x.l}};
        } else if constexpr (std::is_same_v<T, TwoDof>) {
          return {{"J", x.J}, {"theta", x.theta}, {"Jp", x.Jp}, {"theta_p", x.theta_p}, {"l", x.l}, {"k", x.k}};
        } else if constexpr (std::is_same_v<T, ThreeDofIndependentN>) {
          return {{"J", x.J}, {"theta", x.theta}, {"Jp", x.Jp}, {"theta_p", x.theta_p},
                  {"K", x.K}, {"delta", x.delta}, {"n", x.n}};
        } else if constexpr (std::is_same_v<T, ThreeDofIndependentL> || std::is_same_v<T, ThreeDofDependent>) {
          return {{"J", x.J}, {"theta", x.theta}, {"Jp", x.Jp}, {"theta_p", x.theta_p},
                  {"K", x.K}, {"delta", x.delta}, {"l", x.l}};
        } else if constexpr (std::is_same_v<T, BiCoherentAngles>) {
          json o = {{"J", x.J}, {"theta", x.theta}, {"Jp", x.Jp}, {"theta_p", x.theta_p}};
          o["k"] = x.k ? json(*x.k) : json(nullptr);
          return o;
        } else {
          json o = {{"z", {x.z.real(), x.z.imag()}}, {"zp", {x.zp.real(), x.zp.imag()}}};
          o["k"] = x.k ? json(*x.k) : json(nullptr);
          return o;
        }
      },
      label);
  j["family"] = family_name(label);
  return j;
}

inline json state_metadata(const BuiltState& b, const FamilyLabel& label) {
  json consts = json::object();
  for (const auto& c : b.constants) consts[c.name] = c.value;
  const double n2 = norm_squared(b.state);
  return {{"family", family_name(label)},
          {"label", to_json(label)},
          {"cutoffs", to_json(b.state.cutoffs())},
          {"dimension", b.state.cutoffs().dimension()},
          {"norm", std::sqrt(n2)},
          {"norm_squared", n2},
          {"tail_bound", b.state.tail_bound()},
          {"fiber_weight", b.state.paper_norm2()},
          {"constants", consts}};
}

inline json to_json(const QuadratureSpec& q) {
  json j = {{"rule", q.describe()}, {"order", q.order}};
  return j;
}

inline json to_json(const IdentityCheckReport& r, bool include_matrix = true) {
  json quad = json::array();
  for (const auto& u : r.quadrature) {
    json e = to_json(u.spec);
    e["axis"] = u.axis;
    quad.push_back(e);
  }
  json j = {{"family", r.family},
            {"subspace", r.subspace.description()},
            {"dimension", r.subspace.dimension()},
            {"max_offdiag", r.max_offdiag},
            {"max_diag_dev", r.max_diag_dev},
            {"max_deviation", r.max_deviation()},
            {"hermiticity_error", r.hermiticity_error},
            {"min_eigenvalue", r.min_eigenvalue},
            {"quadrature", quad},
            {"warnings", r.warnings}};
  if (include_matrix) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < r.frame.rows(); ++i) {
      json rr = json::array(), ii = json::array();
      for (Eigen::Index c = 0; c < r.frame.cols(); ++c) {
        rr.push_back(r.frame(i, c).real());
        ii.push_back(r.frame(i, c).imag());
      }
      re.push_back(rr);
      im.push_back(ii);
    }
    j["frame"] = {{"re", re}, {"im", im}};
  }
  return j;
}

}  // namespace lcs::io
