#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ppm/errors.hpp"
#include "ppm/suites.hpp"

using namespace ppm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string run_to_string(const SuiteConfig& c, SuiteResult* result = nullptr) {
  std::ostringstream out;
  const SuiteResult r = run_suite(c, out);
  if (result) *result = r;
  return out.str();
}

std::string body(const std::string& text) { return text.substr(text.find('\n') + 1); }

std::vector<json> lines(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(json::parse(line));
  return out;
}

SuiteConfig small(const std::string& suite, json params = json::object(), std::int64_t instances = 5) {
  SuiteConfig c;
  c.suite = suite;
  c.seed = 7;
  c.instance_count = instances;
  c.parameters = std::move(params);
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("ppm_suites_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d / name;
}

int cli(const std::string& args) {
  const std::string cmd = "\"" PPMOMENTS_EXE "\" " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("catalog") {
  const std::vector<std::string> names{"exact-gnz",    "exact-factorial", "exact-joint", "exact-stirling",
                                       "exact-partition", "exact-independence", "stir1", "ddd0",
                                       "mc-poisson",   "mc-gibbs",        "mc-identity", "transform-invariance",
                                       "rho-tau"};
  REQUIRE(suite_catalog().size() == names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    CHECK(suite_catalog()[i].name == names[i]);
    CHECK_FALSE(suite_catalog()[i].explanation.empty());
    REQUIRE(find_suite(names[i]) != nullptr);
    CHECK(find_suite(names[i])->name == names[i]);
  }
  CHECK(find_suite("nope") == nullptr);
}

TEST_CASE("config parsing and validation") {
  const SuiteConfig c = parse_suite_config(json::parse(R"({"suite":"exact-gnz","seed":3,"instance_count":4,
                                                             "parameters":{"max_sites":5}})"));
  CHECK(c.suite == "exact-gnz");
  CHECK(c.seed == 3);
  CHECK(c.instance_count == 4);
  CHECK(resolved_parameters(c).at("max_sites") == 5);
  CHECK(resolved_parameters(c).at("kernels_per_model") == 5);

  CHECK_THROWS_AS(parse_suite_config(json::parse("[1]")), ValidationError);
  CHECK_THROWS_AS(parse_suite_config(json::parse(R"({"seeds":1})")), ValidationError);
  CHECK_THROWS_AS(parse_suite_config(json::parse(R"({"seed":"1"})")), ValidationError);
  CHECK_THROWS_AS(parse_suite_config(json::parse(R"({"instance_count":0})")), ValidationError);
  CHECK_THROWS_AS(resolved_parameters(small("nope")), ValidationError);
  CHECK_THROWS_AS(resolved_parameters(small("exact-gnz", {{"colour", 1}})), ValidationError);
  CHECK_THROWS_AS(resolved_parameters(small("exact-gnz", {{"max_sites", 2.5}})), ValidationError);
  // Integers are accepted where reals are expected.
  CHECK(resolved_parameters(small("mc-poisson", {{"intensity", 2}})).at("intensity") == 2);

  SUBCASE("hash covers the resolved configuration") {
    SuiteConfig a = small("exact-gnz");
    SuiteConfig b = a;
    CHECK(config_hash(a) == config_hash(b));
    b.parameters = {{"max_sites", 8}};  // the default value
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 8;
    CHECK(config_hash(a) != config_hash(b));
  }
  SUBCASE("out-of-range parameters are rejected before any output") {
    std::ostringstream out;
    CHECK_THROWS_AS(run_suite(small("exact-gnz", {{"max_sites", 30}}), out), Error);
    CHECK_THROWS_AS(run_suite(small("exact-factorial", {{"max_order", 9}}), out), Error);
    CHECK_THROWS_AS(run_suite(small("mc-poisson", {{"samples", 0}}), out), Error);
    CHECK(out.str().empty());
  }
}

TEST_CASE("report stream") {
  SuiteResult r;
  const std::string text = run_to_string(small("exact-gnz"), &r);
  const auto recs = lines(text);
  REQUIRE(recs.size() == 2 + 25);
  CHECK(r.status == ExitStatus::Pass);
  CHECK(r.records == 25);
  CHECK(r.failures == 0);
  CHECK(recs.front().at("record") == "header");
  CHECK(recs.front().at("version") == kReportVersion);
  CHECK(recs.front().at("config_hash") == config_hash(small("exact-gnz")));
  CHECK(recs.front().contains("timestamp"));
  for (std::size_t i = 1; i + 1 < recs.size(); ++i) CHECK(recs[i].at("index") == i - 1);
  CHECK(recs.back().at("record") == "summary");
  CHECK(recs.back().at("passed") == true);
  CHECK(recs.back().at("config").at("instance_count") == 5);
}

TEST_CASE("same seed, same body") {
  for (const SuiteConfig& c :
       {small("exact-factorial"), small("stir1", json::object(), 2), small("ddd0", {{"constructed_instances", 3}}),
        small("mc-poisson", {{"samples", 2000}}), small("mc-gibbs", {{"samples", 200}, {"poisson_check_samples", 200},
                                                                      {"hardcore_draws", 5}}),
        small("transform-invariance", {{"replicates", 300}, {"cover_instances", 5}}),
        small("rho-tau", {{"replicates", 300}})}) {
    CAPTURE(c.suite);
    const std::string a = run_to_string(c), b = run_to_string(c);
    CHECK(body(a) == body(b));
    SuiteConfig other = c;
    other.seed = c.seed + 1;
    CHECK(body(run_to_string(other)) != body(a));
  }
}

TEST_CASE("identity transform gives zero baseline differences") {
  SuiteResult r;
  const auto recs =
      lines(run_to_string(small("transform-invariance", {{"offset", 0.0}, {"replicates", 500}, {"cover_instances", 3}}),
                          &r));
  CHECK(r.status == ExitStatus::Pass);
  const json& inv = recs.at(1);
  REQUIRE(inv.at("record") == "invariance");
  for (const json& reg : inv.at("regions")) {
    CHECK(reg.at("baseline_z") == 0.0);
    CHECK(reg.at("baseline_difference").at("mean") == 0.0);
  }
}

TEST_CASE("command line exit statuses") {
  CHECK(cli("list-suites") == 0);
  CHECK(cli("explain exact-gnz") == 0);
  CHECK(cli("explain nope") == 3);
  CHECK(cli("frobnicate") == 2);
  CHECK(cli("run --seed notanumber --suite exact-gnz") == 2);

  const fs::path out = scratch("out.jsonl");
  const fs::path good = scratch("good.json");
  write(good, R"({"suite":"exact-partition","seed":2,"instance_count":3})");
  CHECK(cli("run --config \"" + good.string() + "\" --out \"" + out.string() + "\"") == 0);
  std::ifstream in(out);
  std::string first;
  std::getline(in, first);
  CHECK(json::parse(first).at("suite") == "exact-partition");

  const fs::path bad = scratch("bad.json");
  write(bad, R"({"suite": "exact-gnz", )");
  CHECK(cli("run --config \"" + bad.string() + "\"") == 2);
  CHECK(cli("run --config \"" + scratch("missing.json").string() + "\"") == 2);

  const fs::path schema = scratch("schema.json");
  write(schema, R"({"suite":"exact-gnz","seed":-1.5})");
  CHECK(cli("run --config \"" + schema.string() + "\"") == 3);
  CHECK(cli("run --suite no-such-suite") == 3);
  CHECK(cli("run --suite exact-gnz --config \"" + good.string() + "\"") == 3);
  CHECK(cli("run") == 3);

  std::error_code ec;
  fs::remove_all(out.parent_path(), ec);
}
