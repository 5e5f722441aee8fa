#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ppm {

inline constexpr const char* kReportVersion = "1.0.0";

/// Exit statuses of a suite run.
enum class ExitStatus : int { Pass = 0, GateFailure = 1, ParseError = 2, ValidationFailure = 3 };

/// Gates applied to every record.
inline constexpr double kExactGate = 1e-9;
inline constexpr double kZGate = 4.0;
inline constexpr double kPGate = 1e-3;

struct SuiteInfo {
  std::string name;
  std::string summary;
  std::string explanation;
  std::int64_t default_instances;
  nlohmann::json default_parameters;
};

const std::vector<SuiteInfo>& suite_catalog();
/// nullptr when the name is unknown.
const SuiteInfo* find_suite(std::string_view name);

struct SuiteConfig {
  std::string suite;
  std::uint64_t seed = 1;
  std::int64_t instance_count = 0;  // 0: the suite default
  nlohmann::json parameters = nlohmann::json::object();
};

/// {"suite": name, "seed": s, "instance_count": n, "parameters": {...}};
/// every key is optional. Throws ValidationError on schema violations.
SuiteConfig parse_suite_config(const nlohmann::json& j);

/// Checks the suite name and merges parameters over the suite defaults.
/// Unknown parameter keys and type mismatches throw ValidationError.
nlohmann::json resolved_parameters(const SuiteConfig& config);

/// FNV-1a 64 of the canonical JSON of the resolved configuration.
std::string config_hash(const SuiteConfig& config);

struct SuiteResult {
  ExitStatus status = ExitStatus::Pass;
  std::int64_t records = 0;
  std::int64_t failures = 0;
};

/// Writes one header line (version, config hash, timestamp), one line per
/// record in instance order, and a closing summary line. Everything after
/// the header depends only on the configuration. Throws ValidationError
/// (or RangeError) for invalid configurations before writing anything.
SuiteResult run_suite(const SuiteConfig& config, std::ostream& out);

}  // namespace ppm
