// ppmoments: run verification suites and Monte Carlo experiments.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ppm/errors.hpp"
#include "ppm/suites.hpp"

namespace {

int status(ppm::ExitStatus s) { return static_cast<int>(s); }

int run(const std::string& suite, const std::string& config_path, std::optional<std::uint64_t> seed,
        const std::string& out_path) {
  ppm::SuiteConfig config;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "ppmoments: cannot read " << config_path << '\n';
      return status(ppm::ExitStatus::ParseError);
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      std::cerr << "ppmoments: " << config_path << ": " << e.what() << '\n';
      return status(ppm::ExitStatus::ParseError);
    }
    try {
      config = ppm::parse_suite_config(j);
    } catch (const ppm::Error& e) {
      std::cerr << "ppmoments: " << e.what() << '\n';
      return status(ppm::ExitStatus::ValidationFailure);
    }
  }
  if (!suite.empty()) {
    if (!config.suite.empty() && config.suite != suite) {
      std::cerr << "ppmoments: --suite " << suite << " conflicts with config suite " << config.suite << '\n';
      return status(ppm::ExitStatus::ValidationFailure);
    }
    config.suite = suite;
  }
  if (config.suite.empty()) {
    std::cerr << "ppmoments: no suite given (use --suite or a config file)\n";
    return status(ppm::ExitStatus::ValidationFailure);
  }
  if (seed) config.seed = *seed;

  try {
    ppm::resolved_parameters(config);
    ppm::SuiteResult result;
    if (out_path.empty() || out_path == "-") {
      result = ppm::run_suite(config, std::cout);
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        std::cerr << "ppmoments: cannot write " << out_path << '\n';
        return status(ppm::ExitStatus::ValidationFailure);
      }
      result = ppm::run_suite(config, out);
    }
    std::cerr << config.suite << ": " << result.records << " records, " << result.failures << " failed\n";
    return status(result.status);
  } catch (const ppm::Error& e) {
    std::cerr << "ppmoments: " << e.what() << '\n';
    return status(ppm::ExitStatus::ValidationFailure);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "ppmoments: " << e.what() << '\n';
    return status(ppm::ExitStatus::ValidationFailure);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification suites for factorial-moment identities of point processes"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run one suite and write JSON-lines records");
  std::string suite, config_path, out_path;
  std::optional<std::uint64_t> seed;
  run_cmd->add_option("--suite", suite, "Suite name (see list-suites)");
  run_cmd->add_option("--config", config_path, "JSON config file");
  run_cmd->add_option("--seed", seed, "Seed, overrides the config");
  run_cmd->add_option("--out", out_path, "Output path; stdout when omitted or -");

  auto* list_cmd = app.add_subcommand("list-suites", "List suite names");

  auto* explain_cmd = app.add_subcommand("explain", "Describe what a suite verifies");
  std::string explain_name;
  explain_cmd->add_option("suite", explain_name, "Suite name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : status(ppm::ExitStatus::ParseError);
  }

  if (*run_cmd) return run(suite, config_path, seed, out_path);
  if (*list_cmd) {
    for (const auto& s : ppm::suite_catalog()) std::cout << s.name << "  " << s.summary << '\n';
    return 0;
  }
  const ppm::SuiteInfo* info = ppm::find_suite(explain_name);
  if (!info) {
    std::cerr << "ppmoments: unknown suite \"" << explain_name << "\"\n";
    return status(ppm::ExitStatus::ValidationFailure);
  }
  std::cout << info->name << ": " << info->summary << "\n\n" << info->explanation << "\n\nDefaults: "
            << info->default_instances << " instance(s), parameters " << info->default_parameters.dump() << '\n';
  return 0;
}
