#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "twistlab/acceptance.hpp"
#include "twistlab/suite.hpp"

using namespace twistlab;

namespace {

struct RunOptions {
  std::string map;
  std::vector<std::size_t> dims;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> sampler;
  std::string format = "json";
  std::string out;
  std::string config;
};

void add_run_flags(CLI::App* cmd, RunOptions& o, const char* dims_help) {
  cmd->add_option("map", o.map, "catalog map: kp, kp12, kp21, kothe, translation, rochberg");
  cmd->add_option("--dims", o.dims, dims_help)->delimiter(',');
  cmd->add_option("--samples", o.samples, "samples per sampler kind (default 1000)");
  cmd->add_option("--seed", o.seed, "sampler seed (default 7)");
  cmd->add_option("--sampler", o.sampler, "gaussian, structured or both (default both)");
  cmd->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", o.out, "output file (default stdout)");
  cmd->add_option("--config", o.config, "JSON experiment config; flags override its fields");
}

ExperimentConfig build_config(const RunOptions& o, std::vector<std::size_t> default_dims) {
  ExperimentConfig c;
  if (!o.config.empty()) {
    c = load_config(o.config);
  } else {
    c.dims = std::move(default_dims);
    c.samples = 1000;
    c.seed = 7;
  }
  if (!o.map.empty()) c.map = o.map;
  if (c.map.empty()) throw InvalidArgument("no map given (positional argument or config 'map')");
  if (!o.dims.empty()) c.dims = o.dims;
  if (o.samples) c.samples = *o.samples;
  if (o.seed) c.seed = *o.seed;
  if (o.sampler) c.sampler = sampler_kind_from_string(*o.sampler);
  c.validate();
  return c;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
}

void summarize(const ReportBundle& b) {
  for (const auto& c : b.checks)
    if (!c.passed)
      std::fprintf(stderr, "check failed: %s (dim %zu): deviation %.3e > %.3e\n", c.name.c_str(), c.dim,
                   c.max_deviation, c.tolerance);
  for (const auto& f : b.failures)
    std::fprintf(stderr, "case failed: %s (dim %zu, %s): %s\n", f.name.c_str(), f.dim, f.kind.c_str(),
                 f.message.c_str());
}

int run(const RunOptions& o, std::vector<std::size_t> default_dims) {
  const ExperimentConfig cfg = build_config(o, std::move(default_dims));
  const ReportBundle b = run_suite(cfg);
  emit(serialize(b, format_from_string(o.format)), o.out);
  summarize(b);
  return b.ok() ? 0 : 1;
}

int verify() {
  int failed = 0;
  const auto all = acceptance::criteria();
  for (const auto& c : all) {
    const auto r = acceptance::evaluate(c);
    std::printf("%s [%d] %s: %s (%.2fs)\n", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.detail.c_str(),
                r.seconds);
    std::fflush(stdout);
    if (!r.passed) ++failed;
  }
  std::printf("%zu/%zu criteria passed\n", all.size() - static_cast<std::size_t>(failed), all.size());
  return failed == 0 ? 0 : 1;
}

int report(const std::string& path, const std::string& format, const std::string& out) {
  const ReportBundle b = deserialize(read_text(path));
  if (!format.empty()) {
    emit(serialize(b, format_from_string(format)), out);
  } else {
    std::size_t passed = 0;
    for (const auto& c : b.checks) passed += c.passed ? 1 : 0;
    std::printf("map %s, dims", b.config.map.c_str());
    for (auto d : b.config.dims) std::printf(" %zu", d);
    std::printf(", seed %llu, %zu samples, sampler %s\n", static_cast<unsigned long long>(b.config.seed),
                b.config.samples, to_string(b.config.sampler).c_str());
    std::printf("exact checks: %zu/%zu passed; case failures: %zu\n", passed, b.checks.size(), b.failures.size());
    for (const auto& r : b.reports) std::printf("  %-48s dim %6zu  sup %.6g\n", r.statistic.c_str(), r.dim, r.sup_value);
  }
  summarize(b);
  return b.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twistlab: quasilinear maps, twisted sums and their duality, at finite dimension"};
  app.require_subcommand(1);

  RunOptions est, swp;
  auto* estimate = app.add_subcommand("estimate", "run the estimators and exact checks for one map at one dimension");
  add_run_flags(estimate, est, "dimension (default 64)");
  auto* sweep = app.add_subcommand("sweep", "run the estimators and exact checks for one map across dimensions");
  add_run_flags(sweep, swp, "comma-separated increasing dimensions (default 16,64,256,1024,4096)");
  auto* ver = app.add_subcommand("verify", "run the acceptance criteria");
  std::string report_path, report_format, report_out;
  auto* rep = app.add_subcommand("report", "summarize or convert a saved JSON report");
  rep->add_option("path", report_path, "JSON report file")->required();
  rep->add_option("--format", report_format, "convert to json or csv instead of summarizing")
      ->check(CLI::IsMember({"json", "csv"}));
  rep->add_option("--out", report_out, "output file for --format (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (estimate->parsed()) {
      if (est.dims.size() > 1) throw InvalidArgument("estimate takes a single dimension; use sweep");
      return run(est, {64});
    }
    if (sweep->parsed()) return run(swp, {16, 64, 256, 1024, 4096});
    if (ver->parsed()) return verify();
    if (rep->parsed()) return report(report_path, report_format, report_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
