// lcs: build coherent states, verify their properties, scan parameter grids.
//
//   lcs build  --config configs/bicoherent.yaml --out out/
//   lcs verify --config configs/two_dof.yaml --out out/ [norm identity stability action moments]
//   lcs scan   --config configs/scan_bicoherent.yaml --out out/
//
// Exit codes: 0 pass, 1 verification failure, 2 config error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lcs/cli.hpp"

namespace cli = lcs::cli;

int main(int argc, char** argv) {
  CLI::App app{"Coherent states over truncated Landau-level bases"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> tolerances;
  unsigned threads = 1;
  std::vector<std::string> which;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "YAML run description")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--tol", tolerances, "override a tolerance, NAME=VALUE (repeatable)")->allow_extra_args(false);
    sub->add_option("--threads", threads, "worker threads for quadrature sums")->check(CLI::Range(1u, 256u));
  };
  auto* build = app.add_subcommand("build", "write state coefficients (CSV) and metadata (JSON)");
  auto* verify = app.add_subcommand("verify", "run verification checks and write verify.json");
  auto* scan = app.add_subcommand("scan", "evaluate observables over a parameter grid, write scan.csv");
  for (auto* s : {build, verify, scan}) common(s);
  verify->add_option("checks", which, "subset of: norm identity stability action moments")
      ->check(CLI::IsMember(cli::check_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kPass : cli::kConfigError;
  }

  cli::RunConfig cfg;
  try {
    cfg = cli::load_config(config_path);
    for (const auto& t : tolerances) cli::apply_tolerance(cfg, t);
    cfg.quadrature.threads = threads;
  } catch (const cli::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return cli::kConfigError;
  }

  try {
    if (*build) return cli::cmd_build(cfg, out_dir, std::cout);
    if (*verify) return cli::cmd_verify(cfg, which, out_dir, std::cout);
    return cli::cmd_scan(cfg, out_dir, std::cout);
  } catch (const cli::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return cli::kConfigError;
  } catch (const lcs::DomainError& e) {
    std::cerr << config_path << ": label or parameters outside the domain: " << e.what() << '\n';
    return cli::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kFail;
  }
}
