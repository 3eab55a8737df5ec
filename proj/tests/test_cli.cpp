#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "lcs/cli.hpp"

using namespace lcs;
using namespace lcs::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("lcs_test_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConfigError config_error(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "no ConfigError for:\n" << yaml;
  return ConfigError("", 0, "");
}

}  // namespace

TEST(Config, DefaultsAreNaturalUnits) {
  const auto c = parse_config("family: {type: bicoherent_angles, J: 1}");
  EXPECT_EQ(c.physics.m, 1.0);
  EXPECT_EQ(c.physics.omega_c, 1.0);
  EXPECT_EQ(c.physics.lambda, 1.0);
  EXPECT_EQ(c.physics.hbar, 1.0);
  EXPECT_EQ(c.spectrum().alpha.regime(), Regime::NonPositive);
  EXPECT_DOUBLE_EQ(c.spectrum().eps[3], 3.5);
  EXPECT_EQ(c.tolerances.at("identity"), 1e-8);
  EXPECT_EQ(c.checks.size(), 5u);
}

TEST(Config, FamilyFieldsAndComplexLabels) {
  const auto c = parse_config(R"(
family:
  type: bicoherent_complex
  z: [1.0, -0.5]
  zp: [0.25, 0]
  k: sum
cutoffs: {n_max: 20, l_max: 20, k_max: 2}
)");
  const auto label = std::get<BiCoherentComplex>(make_label(c.family));
  EXPECT_EQ(label.z, complex(1.0, -0.5));
  EXPECT_EQ(label.zp, complex(0.25, 0));
  EXPECT_FALSE(label.k.has_value());
  EXPECT_EQ(c.build.cutoffs, (BasisCutoffs{20, 20, 2}));
}

TEST(Config, DiagnosticsCarryLineAndField) {
  auto e = config_error("family:\n  type: one_dof\n  K: 0.5\n  Kappa: 2\n");
  EXPECT_EQ(e.field(), "family.Kappa");
  EXPECT_EQ(e.line(), 4);

  e = config_error("physics:\n  m: 1\n  lambda: -2\nfamily: {type: one_dof}\n");
  EXPECT_EQ(e.field(), "physics");
  EXPECT_NE(std::string(e.what()).find("lambda = -2 violates > 0"), std::string::npos) << e.what();

  e = config_error("family: {type: one_dof, n: 1.5}\n");
  EXPECT_EQ(e.field(), "family.n");
  EXPECT_EQ(e.line(), 1);

  e = config_error("family: {type: four_dof}\n");
  EXPECT_EQ(e.field(), "family.type");

  e = config_error("family: {type: one_dof}\nquadrature:\n  angular: simpson\n");
  EXPECT_EQ(e.field(), "quadrature.angular");
  EXPECT_EQ(e.line(), 3);

  e = config_error("family: [1, 2\n");
  EXPECT_GT(e.line(), 0);

  e = config_error("alpha: {generator: linear}\n");
  EXPECT_EQ(e.field(), "family");
}

TEST(Config, ConstraintReportListsEveryViolation) {
  const auto e = config_error(R"(
alpha:
  generator: values
  regime: shifted_bounded
  values: [0.2, 1.5, 2.0]
family: {type: one_dof}
)");
  const std::string msg = e.what();
  EXPECT_EQ(e.line(), 3);
  EXPECT_NE(msg.find("alpha[1] = 1.5 violates 0 <= alpha_k <= m*omega_c/lambda = 1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("alpha[2] = 2"), std::string::npos) << msg;
}

TEST(Config, ScanGridAndCap) {
  const auto c = parse_config(R"(
family: {type: one_dof, K: 0.1}
scan:
  grid:
    K: {start: 0, stop: 1, num: 5}
    omega_c: [1, 2]
)");
  ASSERT_EQ(c.scan.axes.size(), 2u);
  EXPECT_EQ(c.scan.axes[0].name, "K");
  EXPECT_EQ(c.scan.axes[0].values, (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  EXPECT_EQ(config_error("family: {type: one_dof}\nscan:\n  grid: {J: [1]}\n").field(), "scan.grid.J");
  EXPECT_EQ(config_error("family: {type: one_dof}\nscan:\n  max_points: 3\n  grid: {K: [1, 2, 3, 4]}\n").field(),
            "scan.grid");
}

TEST(Config, ToleranceOverride) {
  auto c = parse_config("family: {type: one_dof}");
  apply_tolerance(c, "identity=1e-6");
  EXPECT_EQ(c.tolerances.at("identity"), 1e-6);
  EXPECT_THROW(apply_tolerance(c, "identity"), ConfigError);
  EXPECT_THROW(apply_tolerance(c, "speed=1"), ConfigError);
  EXPECT_THROW(apply_tolerance(c, "norm=-1"), ConfigError);
  EXPECT_THROW(apply_tolerance(c, "norm=1e-3x"), ConfigError);
}

TEST(Build, ZeroKOneDofIsSingleRow) {
  const auto c = parse_config("family: {type: one_dof, K: 0, delta: 0.4, n: 2, l: 1}");
  const auto out = scratch("zero");
  std::ostringstream log;
  EXPECT_EQ(cmd_build(c, out, log), kPass);
  std::istringstream csv(slurp(out / "state.csv"));
  std::string header, row, extra;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_EQ(header, "n,l,k,re,im");
  EXPECT_EQ(row.substr(0, 6), "2,1,0,");
  EXPECT_FALSE(std::getline(csv, extra));
  const auto meta = io::json::parse(slurp(out / "state.json"));
  EXPECT_EQ(meta["state"]["norm"], 1.0);
  EXPECT_EQ(meta["state"]["tail_bound"], 0.0);
}

TEST(Verify, TwoDofIdentityPasses) {
  const auto c = parse_config(R"(
alpha: {generator: values, values: [0.0]}
family: {type: two_dof, J: 1, Jp: 0.5}
identity: {n_max: 10}
quadrature: {j_order: 32, jp_order: 2}
)");
  const auto out = scratch("two_dof");
  std::ostringstream log;
  EXPECT_EQ(cmd_verify(c, {"identity"}, out, log), kPass);
  const auto r = io::json::parse(slurp(out / "verify.json"));
  EXPECT_TRUE(r["pass"].get<bool>());
  EXPECT_LE(r["checks"][0]["value"].get<double>(), 1e-8);
  EXPECT_EQ(r["checks"][0]["detail"]["dimension"], 11);
  EXPECT_TRUE(std::filesystem::exists(out / "identity_frame.csv"));
}

TEST(Verify, ActionNotApplicableToShiftedFamilies) {
  const auto c = parse_config("family: {type: one_dof, K: 0.5}");
  std::ostringstream log;
  EXPECT_EQ(cmd_verify(c, {"action"}, scratch("action"), log), kPass);
  const auto e = run_check(c, "action", scratch("action2"));
  EXPECT_EQ(e["status"], "not_applicable");
  EXPECT_FALSE(e.contains("value"));
}

TEST(Verify, ActionIdentityForBiCoherent) {
  const auto c = parse_config("family: {type: bicoherent_angles, J: 2, Jp: 0.5}");
  const auto e = run_check(c, "action", scratch("action3"));
  EXPECT_EQ(e["status"], "pass");
  EXPECT_NEAR(e["detail"]["expectation"].get<double>(), 1.5, 1e-10);
}

TEST(Verify, FailuresAreStructuredEntries) {
  // 40 Laguerre nodes cannot resolve n <= 60 exactly: order error, reported not thrown
  auto c = parse_config(R"(
family: {type: two_dof, J: 1}
identity: {n_max: 60}
quadrature: {j_order: 40}
)");
  const auto out = scratch("fail");
  std::ostringstream log;
  EXPECT_EQ(cmd_verify(c, {"norm", "identity"}, out, log), kFail);
  const auto r = io::json::parse(slurp(out / "verify.json"));
  EXPECT_EQ(r["checks"][0]["status"], "pass");
  EXPECT_EQ(r["checks"][1]["status"], "error");
  EXPECT_NE(r["checks"][1]["message"].get<std::string>().find("order"), std::string::npos);

  c.tolerances["norm"] = 1e-30;
  EXPECT_EQ(run_check(c, "norm", out)["status"], "fail");
}

TEST(Verify, MomentsNeedEnoughAlphaEntries) {
  const auto c = parse_config("alpha: {generator: values, values: [0, -1, -2]}\nfamily: {type: one_dof}");
  EXPECT_EQ(run_check(c, "moments", scratch("mom"))["status"], "error");
}

TEST(Scan, EnergyAlongActionGrid) {
  const auto c = parse_config(R"(
family: {type: bicoherent_angles, Jp: 0}
physics: {omega_c: 2}
scan:
  grid: {J: [0, 1, 2]}
  observables: [energy]
)");
  const auto out = scratch("scan");
  std::ostringstream log;
  EXPECT_EQ(cmd_scan(c, out, log), kPass);
  std::istringstream csv(slurp(out / "scan.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "point,J,observable,value,status");
  for (double J : {0.0, 1.0, 2.0}) {
    ASSERT_TRUE(std::getline(csv, line));
    const auto v = std::stod(line.substr(line.find("energy,") + 7));
    EXPECT_NEAR(v, 2.0 * J, 1e-10) << line;
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "ok");
  }
}

TEST(Scan, EmptyGridIsHeaderOnly) {
  const auto c = parse_config("family: {type: one_dof}\nscan:\n  grid: {K: []}\n");
  const auto out = scratch("empty");
  std::ostringstream log;
  EXPECT_EQ(cmd_scan(c, out, log), kPass);
  EXPECT_EQ(slurp(out / "scan.csv"), "point,K,observable,value,status\n");
}

TEST(Scan, PhysicsAxisFlagsInvalidPoints) {
  const auto c = parse_config(R"(
family: {type: one_dof, K: 0.3}
scan:
  grid: {lambda: [1, -1]}
  observables: [norm]
)");
  const auto out = scratch("invalid");
  std::ostringstream log;
  cmd_scan(c, out, log);
  const auto text = slurp(out / "scan.csv");
  EXPECT_NE(text.find("0,1,norm,"), std::string::npos) << text;
  EXPECT_NE(text.find("1,-1,norm,,invalid_parameters"), std::string::npos) << text;
}

TEST(Configs, ShippedExamplesParse) {
  for (const auto& f : std::filesystem::directory_iterator(std::filesystem::path(LCS_SOURCE_DIR) / "configs")) {
    if (f.path().extension() != ".yaml") continue;
    EXPECT_NO_THROW(load_config(f.path())) << f.path();
  }
}
