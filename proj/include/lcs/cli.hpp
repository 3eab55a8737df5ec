#pragma once

// Config-driven batch commands behind the `lcs` executable: build, verify, scan.
// A run is described by one YAML file; see configs/ for annotated examples.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "lcs/dynamics.hpp"
#include "lcs/identity.hpp"
#include "lcs/io.hpp"

namespace lcs::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kConfigError = 2 };

/// Bad config: dotted field path, 1-based line (0 when unknown) and reason.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, int line, const std::string& why)
      : std::runtime_error(format(field, line, why)), field_(std::move(field)), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& field, int line, const std::string& why) {
    std::ostringstream os;
    os << "config error";
    if (line > 0) os << " at line " << line;
    if (!field.empty()) os << " in '" << field << "'";
    os << ": " << why;
    return os.str();
  }

  std::string field_;
  int line_;
};

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {"norm", "identity", "stability", "action", "moments"};
  return names;
}

inline const std::vector<std::string>& observable_names() {
  static const std::vector<std::string> names = {"norm", "energy", "fidelity", "identity"};
  return names;
}

/// Label fields accepted for each family type; integers are stored as doubles
/// and checked when the label is made.
inline const std::map<std::string, std::vector<std::string>>& family_fields() {
  static const std::map<std::string, std::vector<std::string>> f = {
      {"one_dof", {"K", "delta", "n", "l"}},
      {"two_dof", {"J", "theta", "Jp", "theta_p", "l", "k"}},
      {"three_dof_independent_l", {"J", "theta", "Jp", "theta_p", "K", "delta", "l"}},
      {"three_dof_independent_n", {"J", "theta", "Jp", "theta_p", "K", "delta", "n"}},
      {"three_dof_dependent", {"J", "theta", "Jp", "theta_p", "K", "delta", "l"}},
      {"bicoherent_angles", {"J", "theta", "Jp", "theta_p", "k"}},
      {"bicoherent_complex", {"z_re", "z_im", "zp_re", "zp_im", "k"}},
  };
  return f;
}

struct FamilySpec {
  std::string type = "one_dof";
  std::map<std::string, double> fields;
  bool k_summed = false;  // bi-coherent only: uniform superposition over k

  double get(const std::string& name) const {
    auto it = fields.find(name);
    return it == fields.end() ? 0.0 : it->second;
  }
};

struct AlphaSpec {
  std::string generator = "linear";  // linear | geometric | harmonic | values
  Regime regime = Regime::NonPositive;
  double alpha0 = -0.5;
  double step = 1.0;
  double q = 0.5;
  double alpha_inf = 0.0;
  std::vector<double> values;
  std::size_t n_ref = 1;
  std::optional<std::size_t> count;

  AlphaSequence make() const {
    if (generator == "linear") return AlphaSequence::linear(regime, alpha0, step, n_ref, count);
    if (generator == "geometric") return AlphaSequence::geometric(alpha0, alpha_inf, q, n_ref);
    if (generator == "harmonic") return AlphaSequence::harmonic(alpha0, alpha_inf, n_ref);
    return AlphaSequence::from_values(values, regime, n_ref);
  }
};

/// Subspace extents for the identity check; unset entries take the family default.
struct IdentityExtent {
  std::optional<std::size_t> n_max, l_max, k_max;
};

struct ScanAxis {
  std::string name;
  std::vector<double> values;
};

struct ScanSpec {
  std::vector<ScanAxis> axes;
  double time = 1.0;
  std::size_t max_points = 10'000;
  std::vector<std::string> observables = observable_names();
};

struct RunConfig {
  std::string source;
  PhysicalParams physics;
  AlphaSpec alpha;
  FamilySpec family;
  BuildOptions build;
  IdentityExtent identity;
  IdentityQuadrature quadrature;
  std::vector<double> times = {0.1, 1.0, 10.0};
  std::size_t moment_nodes = 10;
  std::size_t moment_k_max = 19;
  std::vector<std::string> checks = check_names();
  std::map<std::string, double> tolerances = {
      {"norm", 1e-10}, {"identity", 1e-8}, {"stability", 1e-10}, {"action", 1e-8}, {"moments", 1e-10}};
  ScanSpec scan;
  std::optional<SpectrumBundle> bundle;  // set by the loader after validation

  const SpectrumBundle& spectrum() const {
    if (!bundle) throw ConfigError("", 0, "config was not validated");
    return *bundle;
  }
};

namespace detail {

inline int line_of(const YAML::Node& n) { return n.IsDefined() && n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

/// One YAML mapping; remembers which keys were read so unknown ones are reported.
class Section {
 public:
  Section(YAML::Node node, std::string path, int parent_line = 0)
      : node_(std::move(node)), path_(std::move(path)), line_(parent_line) {
    if (node_.IsDefined() && !node_.IsNull()) {
      line_ = line_of(node_);
      if (!node_.IsMap()) throw ConfigError(path_, line_, "expected a mapping");
    }
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  int line() const noexcept { return line_; }

  YAML::Node lookup(const std::string& key) {
    seen_.insert(key);
    if (!node_.IsDefined() || node_.IsNull()) return YAML::Node(YAML::NodeType::Undefined);
    const YAML::Node& c = node_;
    return c[key];
  }
  bool has(const std::string& key) const {
    if (!node_.IsDefined() || node_.IsNull()) return false;
    const YAML::Node& c = node_;
    return c[key].IsDefined();
  }

  double number(const std::string& key, double fallback) {
    const auto n = lookup(key);
    return n.IsDefined() ? to_double(n, join(key)) : fallback;
  }
  double positive(const std::string& key, double fallback) {
    const double v = number(key, fallback);
    if (!(v > 0.0)) throw ConfigError(join(key), line_of(lookup(key)), "must be > 0");
    return v;
  }
  std::size_t count(const std::string& key, std::size_t fallback) {
    const auto n = lookup(key);
    return n.IsDefined() ? to_index(n, join(key)) : fallback;
  }
  std::optional<std::size_t> maybe_count(const std::string& key) {
    const auto n = lookup(key);
    if (!n.IsDefined()) return std::nullopt;
    return to_index(n, join(key));
  }
  std::string text(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed) {
    const auto n = lookup(key);
    if (!n.IsDefined()) return fallback;
    return choice(n, join(key), allowed);
  }
  bool flag(const std::string& key, bool fallback) {
    const auto n = lookup(key);
    if (!n.IsDefined()) return fallback;
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      throw ConfigError(join(key), line_of(n), "expected true or false");
    }
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const auto n = lookup(key);
    if (!n.IsDefined()) return fallback;
    return to_doubles(n, join(key));
  }
  Section child(const std::string& key) { return Section(lookup(key), join(key), line_); }

  /// Every key must have been read.
  void finish() const {
    if (!node_.IsDefined() || node_.IsNull()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(join(key), line_of(kv.first), "unknown field");
    }
  }

  static double to_double(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) throw ConfigError(field, line_of(n), "expected a number");
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) throw ConfigError(field, line_of(n), "must be finite");
      return v;
    } catch (const YAML::Exception&) {
      throw ConfigError(field, line_of(n), "expected a number, got '" + n.Scalar() + "'");
    }
  }
  static std::size_t to_index(const YAML::Node& n, const std::string& field) {
    const double v = to_double(n, field);
    if (v < 0.0 || v != std::floor(v) || v > 1e12) {
      throw ConfigError(field, line_of(n), "expected a non-negative integer");
    }
    return static_cast<std::size_t>(v);
  }
  static std::vector<double> to_doubles(const YAML::Node& n, const std::string& field) {
    if (!n.IsSequence()) throw ConfigError(field, line_of(n), "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(to_double(n[i], field + "[" + std::to_string(i) + "]"));
    return out;
  }
  static std::string choice(const YAML::Node& n, const std::string& field, const std::vector<std::string>& allowed) {
    const std::string v = n.IsScalar() ? n.Scalar() : std::string{};
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError(field, line_of(n), "expected one of {" + list + "}");
    }
    return v;
  }

 private:
  YAML::Node node_;
  std::string path_;
  int line_ = 0;
  std::set<std::string> seen_;
};

inline std::size_t as_index(double v, const std::string& name) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e12) throw DomainError(name + " must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

inline bool is_physics(const std::string& name) {
  return name == "m" || name == "omega_c" || name == "lambda" || name == "hbar";
}

inline void set_physics(PhysicalParams& p, const std::string& name, double v) {
  if (name == "m") p.m = v;
  if (name == "omega_c") p.omega_c = v;
  if (name == "lambda") p.lambda = v;
  if (name == "hbar") p.hbar = v;
}

inline void parse_family(Section s, FamilySpec& f) {
  std::vector<std::string> types;
  for (const auto& kv : family_fields()) types.push_back(kv.first);
  const auto type_node = s.lookup("type");
  if (!type_node.IsDefined()) throw ConfigError(s.join("type"), s.line(), "required field missing");
  f.type = Section::choice(type_node, s.join("type"), types);
  const auto& allowed = family_fields().at(f.type);
  for (const auto& name : allowed) {
    if (name == "k" && f.type.rfind("bicoherent", 0) == 0) {
      const auto n = s.lookup("k");
      if (n.IsDefined() && n.IsScalar() && n.Scalar() == "sum") {
        f.k_summed = true;
        continue;
      }
    }
    if (name == "z_re" || name == "z_im" || name == "zp_re" || name == "zp_im") continue;
    const auto n = s.lookup(name);
    if (!n.IsDefined()) continue;
    const double v = Section::to_double(n, s.join(name));
    if ((name == "n" || name == "l" || name == "k") && (v < 0 || v != std::floor(v))) {
      throw ConfigError(s.join(name), line_of(n), "expected a non-negative integer");
    }
    if ((name == "K" || name == "J" || name == "Jp") && v < 0) {
      throw ConfigError(s.join(name), line_of(n), "action variables must be >= 0");
    }
    f.fields[name] = v;
  }
  if (f.type == "bicoherent_complex") {
    for (const char* z : {"z", "zp"}) {
      const auto n = s.lookup(z);
      if (!n.IsDefined()) continue;
      const auto v = Section::to_doubles(n, s.join(z));
      if (v.size() != 2) throw ConfigError(s.join(z), line_of(n), "expected [re, im]");
      f.fields[std::string(z) + "_re"] = v[0];
      f.fields[std::string(z) + "_im"] = v[1];
    }
  }
  s.finish();
}

inline void parse_alpha(Section s, AlphaSpec& a) {
  a.generator = s.text("generator", a.generator, {"linear", "geometric", "harmonic", "values"});
  const auto regime = s.text("regime", a.generator == "linear" || a.generator == "values" ? "nonpositive"
                                                                                          : "shifted_bounded",
                             {"nonpositive", "shifted_bounded"});
  a.regime = regime == "nonpositive" ? Regime::NonPositive : Regime::ShiftedBounded;
  a.alpha0 = s.number("alpha0", a.alpha0);
  a.step = s.number("step", a.step);
  a.q = s.number("q", a.q);
  a.alpha_inf = s.number("alpha_inf", a.alpha_inf);
  a.values = s.numbers("values", a.values);
  a.n_ref = s.count("n_ref", a.n_ref);
  a.count = s.maybe_count("count");
  if (a.generator == "values" && a.values.empty()) {
    throw ConfigError(s.join("values"), s.line(), "generator 'values' needs a non-empty list");
  }
  if (a.generator != "linear" && a.generator != "values" && a.regime != Regime::ShiftedBounded) {
    throw ConfigError(s.join("regime"), s.line(), "geometric and harmonic sequences are bounded generators");
  }
  s.finish();
}

inline void parse_scan(Section s, ScanSpec& sc, const FamilySpec& family) {
  sc.time = s.number("time", sc.time);
  sc.max_points = s.count("max_points", sc.max_points);
  const auto obs = s.lookup("observables");
  if (obs.IsDefined()) {
    if (!obs.IsSequence()) throw ConfigError(s.join("observables"), line_of(obs), "expected a list");
    sc.observables.clear();
    for (std::size_t i = 0; i < obs.size(); ++i) {
      sc.observables.push_back(
          Section::choice(obs[i], s.join("observables") + "[" + std::to_string(i) + "]", observable_names()));
    }
  }
  const auto grid = s.lookup("grid");
  if (grid.IsDefined() && !grid.IsNull()) {
    if (!grid.IsMap()) throw ConfigError(s.join("grid"), line_of(grid), "expected a mapping name -> values");
    const auto& fields = family_fields().at(family.type);
    for (const auto& kv : grid) {
      const auto name = kv.first.as<std::string>();
      const auto field = s.join("grid") + "." + name;
      const bool label_field = std::find(fields.begin(), fields.end(), name) != fields.end();
      if (!label_field && !is_physics(name)) {
        throw ConfigError(field, line_of(kv.first), "not a parameter of family '" + family.type + "' or a physical constant");
      }
      ScanAxis ax{name, {}};
      if (kv.second.IsMap()) {
        Section r(kv.second, field);
        const double a = r.number("start", 0.0), b = r.number("stop", 0.0);
        const std::size_t num = r.count("num", 0);
        r.finish();
        for (std::size_t i = 0; i < num; ++i)
          ax.values.push_back(num == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(num - 1));
      } else {
        ax.values = Section::to_doubles(kv.second, field);
      }
      sc.axes.push_back(std::move(ax));
    }
  }
  std::size_t points = sc.axes.empty() ? 0 : 1;
  for (const auto& ax : sc.axes) points *= ax.values.size();
  if (points > sc.max_points) {
    throw ConfigError(s.join("grid"), line_of(grid),
                      std::to_string(points) + " grid points exceed max_points = " + std::to_string(sc.max_points));
  }
  s.finish();
}

}  // namespace detail

inline FamilyLabel make_label(const FamilySpec& f) {
  using detail::as_index;
  const auto g = [&](const char* n) { return f.get(n); };
  const auto k_opt = [&]() -> std::optional<std::size_t> {
    if (f.k_summed) return std::nullopt;
    return as_index(g("k"), "k");
  };
  if (f.type == "one_dof") return OneDof{g("K"), g("delta"), as_index(g("n"), "n"), as_index(g("l"), "l")};
  if (f.type == "two_dof") {
    return TwoDof{g("J"), g("theta"), g("Jp"), g("theta_p"), as_index(g("l"), "l"), as_index(g("k"), "k")};
  }
  if (f.type == "three_dof_independent_l") {
    return ThreeDofIndependentL{g("J"), g("theta"), g("Jp"), g("theta_p"), g("K"), g("delta"), as_index(g("l"), "l")};
  }
  if (f.type == "three_dof_independent_n") {
    return ThreeDofIndependentN{g("J"), g("theta"), g("Jp"), g("theta_p"), g("K"), g("delta"), as_index(g("n"), "n")};
  }
  if (f.type == "three_dof_dependent") {
    return ThreeDofDependent{g("J"), g("theta"), g("Jp"), g("theta_p"), g("K"), g("delta"), as_index(g("l"), "l")};
  }
  if (f.type == "bicoherent_angles") return BiCoherentAngles{g("J"), g("theta"), g("Jp"), g("theta_p"), k_opt()};
  if (f.type == "bicoherent_complex") {
    return BiCoherentComplex{{g("z_re"), g("z_im")}, {g("zp_re"), g("zp_im")}, k_opt()};
  }
  throw DomainError("unknown family type '" + f.type + "'");
}

/// Subspace the identity check runs on for this label.
inline IdentityTarget identity_target(const FamilyLabel& label, const IdentityExtent& e) {
  return std::visit(
      [&](const auto& x) -> IdentityTarget {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, OneDof>) {
          return OneDofIdentity{x.n, x.l, e.k_max.value_or(8)};
        } else if constexpr (std::is_same_v<T, TwoDof>) {
          return TwoDofIdentity{x.l, x.k, e.n_max.value_or(20)};
        } else if constexpr (std::is_same_v<T, ThreeDofIndependentL>) {
          return ThreeDofIndependentLIdentity{x.l, e.n_max.value_or(10), e.k_max.value_or(6)};
        } else if constexpr (std::is_same_v<T, ThreeDofIndependentN>) {
          return ThreeDofIndependentNIdentity{x.n, e.l_max.value_or(10), e.k_max.value_or(6)};
        } else if constexpr (std::is_same_v<T, ThreeDofDependent>) {
          return ThreeDofDependentIdentity{x.l, e.n_max.value_or(10), e.k_max.value_or(6)};
        } else {
          return BiCoherentIdentity{x.k.value_or(0), e.n_max.value_or(8), e.l_max.value_or(8)};
        }
      },
      label);
}

inline std::string describe(const IdentityTarget& t) {
  std::ostringstream os;
  os << family_name(t);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, OneDofIdentity>) os << " n=" << x.n << " l=" << x.l << " k<=" << x.k_max;
        if constexpr (std::is_same_v<T, TwoDofIdentity>) os << " l=" << x.l << " k=" << x.k << " n<=" << x.n_max;
        if constexpr (std::is_same_v<T, ThreeDofIndependentLIdentity> || std::is_same_v<T, ThreeDofDependentIdentity>)
          os << " l=" << x.l << " n<=" << x.n_max << " k<=" << x.k_max;
        if constexpr (std::is_same_v<T, ThreeDofIndependentNIdentity>)
          os << " n=" << x.n << " l<=" << x.l_max << " k<=" << x.k_max;
        if constexpr (std::is_same_v<T, BiCoherentIdentity>) os << " k=" << x.k << " n<=" << x.n_max << " l<=" << x.l_max;
      },
      t);
  return os.str();
}

/// Validated bundle or a ConfigError listing every violated constraint.
inline SpectrumBundle validate_spectrum(const PhysicalParams& p, const AlphaSpec& a, int line = 0) {
  auto r = validate(p, a.make());
  if (r.ok()) return std::move(*r.bundle);
  std::ostringstream os;
  os << r.violations.size() << " constraint violation(s):";
  for (const auto& v : r.violations) os << "\n  " << v.message();
  throw ConfigError(r.violations.front().field == "alpha" || r.violations.front().field == "eps" ? "alpha" : "physics",
                    line, os.str());
}

/// Parse and validate a YAML run description.
inline RunConfig parse_config(const std::string& text, std::string source = "<string>") {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, e.msg);
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  RunConfig c;
  c.source = std::move(source);
  detail::Section top(root, "");

  auto ph = top.child("physics");
  c.physics.m = ph.number("m", 1.0);
  c.physics.omega_c = ph.number("omega_c", 1.0);
  c.physics.lambda = ph.number("lambda", 1.0);
  c.physics.hbar = ph.number("hbar", 1.0);
  ph.finish();

  auto al = top.child("alpha");
  const int alpha_line = al.line();
  detail::parse_alpha(al, c.alpha);
  if (!top.has("family")) throw ConfigError("family", 0, "required section missing");
  detail::parse_family(top.child("family"), c.family);

  auto cut = top.child("cutoffs");
  if (top.has("cutoffs")) {
    c.build.cutoffs = BasisCutoffs{cut.count("n_max", 0), cut.count("l_max", 0), cut.count("k_max", 0)};
  }
  cut.finish();

  auto bo = top.child("build");
  c.build.tail_threshold = bo.positive("tail_threshold", c.build.tail_threshold);
  c.build.enforce_tail = bo.flag("enforce_tail", c.build.enforce_tail);
  c.build.radius = bo.text("radius", "ratio_test", {"ratio_test", "sqrt_limit"}) == "ratio_test"
                       ? RadiusRule::RatioTest
                       : RadiusRule::SqrtLimit;
  c.build.dimension_cap = bo.count("dimension_cap", c.build.dimension_cap);
  bo.finish();

  auto id = top.child("identity");
  c.identity.n_max = id.maybe_count("n_max");
  c.identity.l_max = id.maybe_count("l_max");
  c.identity.k_max = id.maybe_count("k_max");
  id.finish();

  auto q = top.child("quadrature");
  c.quadrature.j_order = q.count("j_order", c.quadrature.j_order);
  c.quadrature.jp_order = q.count("jp_order", c.quadrature.jp_order);
  c.quadrature.k_nodes = q.count("k_nodes", c.quadrature.k_nodes);
  if (q.text("angular", "exact", {"exact", "trapezoid"}) == "trapezoid") {
    c.quadrature.angular = AngularRule::trapezoid(q.count("angular_points", 64));
  } else {
    q.lookup("angular_points");
  }
  c.quadrature.allow_underresolved = q.flag("allow_underresolved", false);
  q.finish();

  auto st = top.child("stability");
  c.times = st.numbers("times", c.times);
  st.finish();

  auto mo = top.child("moments");
  c.moment_nodes = mo.count("nodes", c.moment_nodes);
  c.moment_k_max = mo.count("k_max", c.moment_k_max);
  mo.finish();

  const auto checks = top.lookup("verify");
  if (checks.IsDefined()) {
    if (!checks.IsSequence()) throw ConfigError("verify", detail::line_of(checks), "expected a list of checks");
    c.checks.clear();
    for (std::size_t i = 0; i < checks.size(); ++i)
      c.checks.push_back(detail::Section::choice(checks[i], "verify[" + std::to_string(i) + "]", check_names()));
  }

  auto tol = top.child("tolerances");
  for (auto& [name, value] : c.tolerances) value = tol.positive(name, value);
  tol.finish();

  detail::parse_scan(top.child("scan"), c.scan, c.family);
  top.finish();

  c.bundle = validate_spectrum(c.physics, c.alpha, alpha_line);
  try {
    (void)make_label(c.family);
  } catch (const DomainError& e) {
    throw ConfigError("family", 0, e.what());
  }
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

/// --tol NAME=VALUE.
inline void apply_tolerance(RunConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const std::string name = assignment.substr(0, eq);
  if (eq == std::string::npos || !c.tolerances.count(name)) {
    throw ConfigError("--tol", 0, "expected NAME=VALUE with NAME in {norm, identity, stability, action, moments}, got '" +
                                      assignment + "'");
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(assignment.substr(eq + 1), &used);
    if (used != assignment.size() - eq - 1 || !(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("");
    c.tolerances[name] = v;
  } catch (const std::exception&) {
    throw ConfigError("--tol", 0, "tolerance for '" + name + "' must be a positive number");
  }
}

// Commands -------------------------------------------------------------------

namespace detail {

inline io::json run_header(const RunConfig& c, const char* command) {
  return {{"command", command},
          {"config", c.source},
          {"physics", io::to_json(c.physics)},
          {"alpha", {{"description", c.spectrum().alpha.description()}, {"regime", to_string(c.spectrum().alpha.regime())}}},
          {"family", c.family.type}};
}

inline void write_json(const std::filesystem::path& p, const io::json& j) {
  std::ofstream out(p, std::ios::binary);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

inline std::pair<double, double> actions(const FamilyLabel& label) {
  if (const auto* a = std::get_if<BiCoherentAngles>(&label)) return {a->J, a->Jp};
  const auto& z = std::get<BiCoherentComplex>(label);
  return {std::norm(z.z), std::norm(z.zp)};
}

inline bool is_bicoherent(const FamilyLabel& label) { return label.index() >= 5; }

}  // namespace detail

/// State coefficients to state.csv and metadata to state.json.
inline int cmd_build(const RunConfig& c, const std::filesystem::path& out, std::ostream& log) {
  const auto label = make_label(c.family);
  const auto built = build(c.spectrum(), label, c.build);
  std::filesystem::create_directories(out);
  {
    std::ofstream csv(out / "state.csv", std::ios::binary);
    io::write_state_csv(csv, built.state);
  }
  auto meta = detail::run_header(c, "build");
  meta["state"] = io::state_metadata(built, label);
  detail::write_json(out / "state.json", meta);
  log << "build " << c.family.type << ": dimension " << built.state.cutoffs().dimension() << ", norm^2 "
      << io::fmt(norm_squared(built.state)) << ", tail " << io::fmt(built.state.tail_bound()) << " -> "
      << (out / "state.csv").string() << '\n';
  return kPass;
}

/// One verification entry; never throws, failures become status "error".
inline io::json run_check(const RunConfig& c, const std::string& name, const std::filesystem::path& out) {
  const double tol = c.tolerances.at(name);
  io::json e = {{"name", name}, {"tolerance", tol}};
  try {
    const auto& b = c.spectrum();
    const auto label = make_label(c.family);
    double value = 0.0;
    if (name == "norm") {
      const auto s = build(b, label, c.build).state;
      value = std::abs(norm_squared(s) - 1.0);
      e["metric"] = "|<psi|psi> - 1|";
      e["detail"] = {{"norm_squared", norm_squared(s)},
                     {"tail_bound", s.tail_bound()},
                     {"cutoffs", io::to_json(s.cutoffs())}};
    } else if (name == "identity") {
      const auto r = resolve_identity(b, identity_target(label, c.identity), c.quadrature);
      value = r.max_deviation();
      e["metric"] = "max |M - I|";
      e["detail"] = io::to_json(r, false);
      std::ofstream csv(out / "identity_frame.csv", std::ios::binary);
      io::write_matrix_csv(csv, r.frame);
    } else if (name == "stability") {
      const auto h = natural_hamiltonian(b, label);
      io::json per = io::json::array();
      for (double t : c.times) {
        const double f = check_temporal_stability(b, label, t, c.build);
        value = std::max(value, 1.0 - f);
        per.push_back({{"t", t}, {"fidelity", f}});
      }
      e["metric"] = "max_t (1 - |<e^{-iHt} psi(label) | psi(shifted label)>|)";
      e["detail"] = {{"hamiltonian", to_string(h.kind)}, {"times", per}};
    } else if (name == "action") {
      if (!detail::is_bicoherent(label)) {
        e["status"] = "not_applicable";
        e["reason"] = "shifted-spectrum families are temporally stable but carry no action identity";
        return e;
      }
      const auto s = build(b, label, c.build).state;
      const auto [J, Jp] = detail::actions(label);
      const double H = expectation_H(s, {HamiltonianSpec::Kind::OscDifference, b});
      value = std::abs(H - b.params.omega_c * (J - Jp));
      e["metric"] = "|<H> - omega_c (J - J')|";
      e["detail"] = {{"expectation", H}, {"expected", b.params.omega_c * (J - Jp)}, {"tail_bound", s.tail_bound()}};
    } else if (name == "moments") {
      const auto m = moment_measure(b, c.moment_nodes);
      const auto err = moment_check(m, b.eps, b.scales.xi, c.moment_k_max);
      value = *std::max_element(err.begin(), err.end());
      e["metric"] = "max_k |mu_k - eps_k! xi^k| / (eps_k! xi^k)";
      e["detail"] = {{"nodes", m.nodes}, {"weights", m.weights}, {"k_max", c.moment_k_max}};
    }
    e["value"] = value;
    e["status"] = value <= tol ? "pass" : "fail";
  } catch (const std::exception& ex) {
    e["status"] = "error";
    e["message"] = ex.what();
  }
  return e;
}

/// Runs the requested checks (config list when empty), writes verify.json.
inline int cmd_verify(const RunConfig& c, std::vector<std::string> which, const std::filesystem::path& out,
                      std::ostream& log) {
  if (which.empty()) which = c.checks;
  for (const auto& w : which)
    if (std::find(check_names().begin(), check_names().end(), w) == check_names().end())
      throw ConfigError("verify", 0, "unknown check '" + w + "'");
  std::filesystem::create_directories(out);
  auto report = detail::run_header(c, "verify");
  report["label"] = io::to_json(make_label(c.family));
  io::json checks = io::json::array();
  bool pass = true;
  for (const auto& w : which) {
    auto e = run_check(c, w, out);
    const std::string st = e["status"];
    pass = pass && (st == "pass" || st == "not_applicable");
    log << w << ": " << st;
    if (e.contains("value")) log << " (" << io::fmt(e["value"].get<double>()) << " vs " << io::fmt(e["tolerance"].get<double>()) << ")";
    if (e.contains("message")) log << " " << e["message"].get<std::string>();
    if (e.contains("reason")) log << ": " << e["reason"].get<std::string>();
    log << '\n';
    checks.push_back(std::move(e));
  }
  report["checks"] = checks;
  report["pass"] = pass;
  detail::write_json(out / "verify.json", report);
  return pass ? kPass : kFail;
}

/// Long-format CSV: point, one column per axis, observable, value, status.
/// Points that cannot be built are kept, with an empty value and a status of
/// out_of_domain, invalid_parameters or error.
inline int cmd_scan(const RunConfig& c, const std::filesystem::path& out, std::ostream& log) {
  std::filesystem::create_directories(out);
  std::ofstream csv(out / "scan.csv", std::ios::binary);
  csv << "point";
  for (const auto& ax : c.scan.axes) csv << ',' << ax.name;
  csv << ",observable,value,status\n";

  std::size_t points = c.scan.axes.empty() ? 0 : 1;
  for (const auto& ax : c.scan.axes) points *= ax.values.size();

  std::map<std::string, std::pair<double, std::string>> identity_cache;
  std::size_t flagged = 0;
  for (std::size_t p = 0; p < points; ++p) {
    PhysicalParams phys = c.physics;
    FamilySpec fam = c.family;
    std::vector<double> coord(c.scan.axes.size());
    std::size_t rem = p;
    for (std::size_t a = c.scan.axes.size(); a-- > 0;) {
      const auto& ax = c.scan.axes[a];
      coord[a] = ax.values[rem % ax.values.size()];
      rem /= ax.values.size();
      if (detail::is_physics(ax.name)) {
        detail::set_physics(phys, ax.name, coord[a]);
      } else {
        fam.fields[ax.name] = coord[a];
      }
    }

    std::map<std::string, std::pair<double, std::string>> obs;
    auto flag_all = [&](const std::string& status) {
      for (const auto& o : c.scan.observables) obs[o] = {0.0, status};
    };
    std::optional<SpectrumBundle> bundle;
    std::optional<FamilyLabel> label;
    try {
      auto r = validate(phys, c.alpha.make());
      if (!r.ok()) throw ConfigError("", 0, "invalid");
      bundle = std::move(r.bundle);
      label = make_label(fam);
    } catch (const std::exception&) {
      flag_all("invalid_parameters");
    }
    if (bundle && label) {
      std::string state_status = "ok";
      std::optional<BuiltState> built;
      try {
        built = build(*bundle, *label, c.build);
      } catch (const DomainError&) {
        state_status = "out_of_domain";
      } catch (const std::exception&) {
        state_status = "error";
      }
      for (const auto& o : c.scan.observables) {
        if (o == "identity") {
          std::ostringstream key;
          key.precision(17);
          key << phys.m << ' ' << phys.omega_c << ' ' << phys.lambda << ' ' << phys.hbar << ' '
              << describe(identity_target(*label, c.identity));
          auto it = identity_cache.find(key.str());
          if (it == identity_cache.end()) {
            std::pair<double, std::string> r{0.0, "ok"};
            try {
              r.first = resolve_identity(*bundle, identity_target(*label, c.identity), c.quadrature).max_deviation();
            } catch (const DomainError&) {
              r.second = "out_of_domain";
            } catch (const std::exception&) {
              r.second = "error";
            }
            it = identity_cache.emplace(key.str(), r).first;
          }
          obs[o] = it->second;
          continue;
        }
        if (!built) {
          obs[o] = {0.0, state_status};
          continue;
        }
        try {
          if (o == "norm") obs[o] = {norm_squared(built->state), "ok"};
          if (o == "energy") obs[o] = {expectation_H(built->state, natural_hamiltonian(*bundle, *label)), "ok"};
          if (o == "fidelity") obs[o] = {check_temporal_stability(*bundle, *label, c.scan.time, c.build), "ok"};
        } catch (const std::exception&) {
          obs[o] = {0.0, "error"};
        }
      }
    }
    for (const auto& o : c.scan.observables) {
      const auto& [v, st] = obs[o];
      if (st != "ok") ++flagged;
      csv << p;
      for (double x : coord) csv << ',' << io::fmt(x);
      csv << ',' << o << ',' << (st == "ok" ? io::fmt(v) : std::string{}) << ',' << st << '\n';
    }
  }
  log << "scan: " << points << " point(s), " << flagged << " flagged row(s) -> " << (out / "scan.csv").string() << '\n';
  return kPass;
}

}  // namespace lcs::cli
