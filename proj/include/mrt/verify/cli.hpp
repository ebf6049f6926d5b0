#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mrt/verify/config.hpp"
#include "mrt/verify/field_io.hpp"
#include "mrt/verify/report.hpp"
#include "mrt/verify/suites.hpp"

namespace mrt::verify {

enum ExitCode { exit_pass = 0, exit_fail = 1, exit_usage = 2 };

/// Command-line driver; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Seeded verification of momentum ray transform and Saint Venant operator identities", "mrt_verify"};
  SuiteConfig cfg;
  std::string suite = "all";
  std::string out_path, field_path, sabotage;

  app.add_option("--suite", suite, "Suite to run")->check(CLI::IsMember({"kernel", "identities", "all"}));
  auto* n_opt = app.add_option("--n", cfg.n, "Dimension of the base space")->capture_default_str();
  auto* m_opt = app.add_option("--m", cfg.m, "Tensor rank")->capture_default_str();
  app.add_option("--k", cfg.k, "Order parameter, 0 <= k <= m")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--degree", cfg.degree, "Polynomial degree of random fields")->capture_default_str();
  app.add_option("--samples", cfg.samples, "Sample points per check")->capture_default_str();
  app.add_option("--tol", cfg.tol_float, "Tolerance for floating-point checks")->capture_default_str();
  const std::map<std::string, Format> formats{{"json", Format::json}, {"csv", Format::csv}, {"text", Format::text}};
  std::string format_name = "json";
  app.add_option("--format", format_name, "Report format: json, csv or text")
      ->transform(CLI::IsMember({"json", "csv", "text"}, CLI::ignore_case))
      ->capture_default_str();
  app.add_option("--out", out_path, "Write the report to FILE instead of stdout");
  app.add_option("--field", field_path, "Load the field from FILE instead of generating one")
      ->check(CLI::ExistingFile);
  app.add_option("--sabotage", sabotage,
                 "Inject one coefficient error: wk-sign:L, wk-binomial:L, recovery-sign:P, recovery-binomial:P, "
                 "recovery-factor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_pass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return exit_usage;
  }
  cfg.format = formats.at(format_name);

  std::optional<SymField> loaded;
  try {
    if (!sabotage.empty()) cfg.sabotage = parse_sabotage(sabotage);
    if (!field_path.empty()) {
      std::ifstream in(field_path);
      std::stringstream buf;
      buf << in.rdbuf();
      loaded = parse_field(buf.str());
      if (n_opt->count() && cfg.n != loaded->dim())
        throw argument_error("--n " + std::to_string(cfg.n) + " disagrees with the field's n = " +
                             std::to_string(loaded->dim()));
      if (m_opt->count() && cfg.m != loaded->rank())
        throw argument_error("--m " + std::to_string(cfg.m) + " disagrees with the field's rank = " +
                             std::to_string(loaded->rank()));
      cfg.n = loaded->dim();
      cfg.m = loaded->rank();
    }
    cfg.validate();
  } catch (const field_parse_error& e) {
    err << "error: " << field_path << ": " << e.what() << '\n';
    return exit_usage;
  } catch (const argument_error& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return exit_usage;
  }

  std::vector<SuiteResult> results;
  const SymField* field = loaded ? &*loaded : nullptr;
  if (suite == "kernel" || suite == "all") results.push_back(suite_kernel(cfg, field));
  if (suite == "identities" || suite == "all") results.push_back(suite_identities(cfg, field));
  const std::string text = format_report(cfg, results);

  if (out_path.empty()) {
    out << text;
  } else {
    std::ofstream file(out_path, std::ios::binary);
    if (!(file << text)) {
      err << "error: cannot write " << out_path << '\n';
      return exit_usage;
    }
  }
  return all_pass(results) ? exit_pass : exit_fail;
}

}  // namespace mrt::verify
