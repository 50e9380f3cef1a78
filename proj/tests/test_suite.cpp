#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "twistlab/suite.hpp"

using namespace twistlab;
using Catch::Approx;

namespace {

ExperimentConfig small_config(const std::string& map, std::vector<std::size_t> dims, std::size_t samples) {
  ExperimentConfig c;
  c.map = map;
  c.dims = std::move(dims);
  c.samples = samples;
  c.seed = 11;
  return c;
}

const EstimateReport* find_report(const ReportBundle& b, const std::string& stat, std::size_t dim) {
  for (const auto& r : b.reports)
    if (r.statistic == stat && r.dim == dim) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("every catalog map runs clean at small size") {
  for (const auto& name : catalog_names()) {
    const ReportBundle b = run_suite(small_config(name, {16}, 10));
    INFO(name);
    for (const auto& f : b.failures) INFO(f.name + ": " + f.message);
    for (const auto& c : b.checks) {
      INFO(c.name << " deviation " << c.max_deviation << " tolerance " << c.tolerance);
      CHECK(c.passed);
    }
    CHECK(b.failures.empty());
    CHECK_FALSE(b.reports.empty());
    CHECK(b.ok());
  }
}

TEST_CASE("kp sweep follows the logarithmic growth law") {
  const ReportBundle b = run_suite(small_config("kp", {16, 64, 256}, 20));
  CHECK(b.ok());
  std::size_t growth_checks = 0;
  for (const auto& c : b.checks)
    if (c.name.find("growth") != std::string::npos || c.name.find("uniform") != std::string::npos) ++growth_checks;
  CHECK(growth_checks >= 3);
  for (std::size_t d : {16, 64, 256}) CHECK(find_report(b, "quasilinearity:kp", d));
}

TEST_CASE("payloads are deterministic") {
  const ExperimentConfig c = small_config("kothe", {16, 32}, 15);
  const ReportBundle a = run_suite(c), b = run_suite(c);
  CHECK(payload_json(a) == payload_json(b));
  CHECK(payload_json(a).dump() == payload_json(b).dump());
}

TEST_CASE("serialization") {
  SECTION("empty bundle") {
    ReportBundle b;
    b.config = small_config("kp", {4}, 1);
    CHECK(serialize(b, Format::csv) == std::string(kCsvHeader) + "\n");
    CHECK(deserialize(serialize(b, Format::json)) == b);
  }
  SECTION("one report per CSV row") {
    ReportBundle b;
    b.config = small_config("kp", {4}, 1);
    EstimateReport r;
    r.statistic = "quasilinearity:kp";
    r.sup_value = 0.1;
    r.samples = 3;
    r.seed = 9;
    r.dim = 4;
    b.reports.push_back(r);
    CHECK(serialize(b, Format::csv) == std::string(kCsvHeader) + "\nquasilinearity:kp,4,3,9,0.10000000000000001\n");
    b.reports[0].replay_deviation = 1.0;
    CHECK_THROWS_AS(serialize(b, Format::csv), Error);
  }
  SECTION("round trip of a real run") {
    const ReportBundle b = run_suite(small_config("translation", {8}, 5));
    const ReportBundle back = deserialize(serialize(b, Format::json));
    CHECK(back == b);
  }
  CHECK_THROWS_AS(format_from_string("xml"), InvalidArgument);
  CHECK_THROWS_AS(deserialize("{not json"), InvalidArgument);
}

TEST_CASE("configuration") {
  CHECK_THROWS_WITH(run_suite(small_config("nope", {8}, 5)), Catch::Matchers::ContainsSubstring("unknown map"));
  CHECK_THROWS_AS(small_config("kp", {}, 5).validate(), InvalidArgument);
  CHECK_THROWS_AS(small_config("kp", {16, 16}, 5).validate(), InvalidArgument);
  CHECK_THROWS_AS(small_config("kp", {32, 16}, 5).validate(), InvalidArgument);
  CHECK_THROWS_AS(small_config("kp", {16}, 0).validate(), InvalidArgument);

  const json good = to_json(small_config("kothe", {8, 16}, 5));
  CHECK(config_from_json(good) == small_config("kothe", {8, 16}, 5));
  json missing = good;
  missing["tolerances"].erase("tol_opt");
  CHECK_THROWS_WITH(config_from_json(missing), Catch::Matchers::ContainsSubstring("tol_opt"));
  json negative = good;
  negative["tolerances"]["noise_floor"] = -1.0;
  CHECK_THROWS_AS(config_from_json(negative), InvalidArgument);
  json no_params = good;
  no_params.erase("params");
  CHECK(config_from_json(no_params).params == CatalogParams{});
}

TEST_CASE("a failing case does not stop the suite") {
  ReportBundle b;
  const ExperimentConfig c = small_config("kp", {8}, 5);
  detail::SuiteRun s(c, 8, b);
  s.run("boom", [] { throw InvalidArgument("boom"); });
  s.run("diverge", [] { throw WitnessDivergence("kp", WitnessDiagnostics{false, 3, 1.0, "x"}); });
  s.run("fine", [&] { s.check("fine", 0.0, 0.0); });
  REQUIRE(b.failures.size() == 2);
  CHECK(b.failures[0].kind == "error");
  CHECK(b.failures[1].kind == "witness-divergence");
  REQUIRE(b.checks.size() == 1);
  CHECK(b.checks[0].passed);
  CHECK(b.timings.size() == 3);
  CHECK_FALSE(b.ok());
}

TEST_CASE("file I/O") {
  const auto dir = std::filesystem::temp_directory_path() / "twistlab-test-io";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "x.txt").string();
  write_text(path, "hello\n");
  CHECK(read_text(path) == "hello\n");
  CHECK_THROWS_WITH(read_text((dir / "missing.json").string()), Catch::Matchers::ContainsSubstring("cannot open"));
  CHECK_THROWS_AS(write_text((dir / "no" / "such" / "dir.json").string(), "x"), Error);
  write_text(path, to_json(small_config("kp", {8}, 2)).dump());
  CHECK(load_config(path).map == "kp");
  write_text(path, "{");
  CHECK_THROWS_AS(load_config(path), InvalidArgument);
  std::filesystem::remove_all(dir);
}
