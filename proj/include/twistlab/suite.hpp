#pragma once

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "twistlab/catalog.hpp"
#include "twistlab/duality.hpp"
#include "twistlab/error.hpp"
#include "twistlab/estimate.hpp"
#include "twistlab/inverse.hpp"
#include "twistlab/sampling.hpp"

namespace twistlab {

struct Tolerances {
  double tol_lux = 1e-10;
  double tol_opt = 1e-12;
  double noise_floor = 1e-12;

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct ExperimentConfig {
  std::string map;
  std::vector<std::size_t> dims;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  SamplerKind sampler = SamplerKind::both;
  Tolerances tolerances;
  CatalogParams params;

  void validate() const {
    if (dims.empty()) throw InvalidArgument("config: dims must be nonempty");
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (dims[k] == 0) throw InvalidArgument("config: dims must be positive");
      if (k > 0 && dims[k] <= dims[k - 1]) throw InvalidArgument("config: dims must be strictly increasing");
    }
    if (samples == 0) throw InvalidArgument("config: samples must be >= 1");
    if (!(tolerances.tol_lux > 0.0 && tolerances.tol_opt > 0.0 && tolerances.noise_floor > 0.0))
      throw InvalidArgument("config: tolerances must be positive");
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct ExactCheck {
  std::string name;
  std::size_t dim = 0;
  bool passed = false;
  double max_deviation = 0.0;
  double tolerance = 0.0;

  friend bool operator==(const ExactCheck&, const ExactCheck&) = default;
};

// A case that raised instead of producing a result.
struct CaseFailure {
  std::string name;
  std::size_t dim = 0;
  std::string kind;  // "witness-divergence" or "error"
  std::string message;

  friend bool operator==(const CaseFailure&, const CaseFailure&) = default;
};

struct StageTiming {
  std::string name;
  std::size_t dim = 0;
  double seconds = 0.0;

  friend bool operator==(const StageTiming&, const StageTiming&) = default;
};

struct ReportBundle {
  ExperimentConfig config;
  std::vector<EstimateReport> reports;
  std::vector<ExactCheck> checks;
  std::vector<CaseFailure> failures;
  std::vector<StageTiming> timings;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return failures.empty();
  }

  friend bool operator==(const ReportBundle&, const ReportBundle&) = default;
};

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

using json = nlohmann::json;

inline json to_json(const Vector& v) { return json(v.values()); }
inline Vector vector_from_json(const json& j) { return Vector(j.get<std::vector<double>>()); }

inline json to_json(const Tolerances& t) {
  return {{"tol_lux", t.tol_lux}, {"tol_opt", t.tol_opt}, {"noise_floor", t.noise_floor}};
}

inline json to_json(const CatalogParams& p) {
  return {{"p", p.p}, {"z", p.z}, {"theta", p.theta}, {"order", p.order}, {"weights", p.weights}};
}

inline json to_json(const ExperimentConfig& c) {
  return {{"map", c.map},
          {"dims", c.dims},
          {"samples", c.samples},
          {"seed", c.seed},
          {"sampler", to_string(c.sampler)},
          {"tolerances", to_json(c.tolerances)},
          {"params", to_json(c.params)}};
}

inline ExperimentConfig config_from_json(const json& j) {
  auto need = [&](const json& obj, const char* key) -> const json& {
    if (!obj.contains(key)) throw InvalidArgument(std::string("config: missing key '") + key + "'");
    return obj.at(key);
  };
  ExperimentConfig c;
  try {
    c.map = need(j, "map").get<std::string>();
    c.dims = need(j, "dims").get<std::vector<std::size_t>>();
    c.samples = need(j, "samples").get<std::size_t>();
    c.seed = need(j, "seed").get<std::uint64_t>();
    c.sampler = sampler_kind_from_string(need(j, "sampler").get<std::string>());
    const json& t = need(j, "tolerances");
    c.tolerances.tol_lux = need(t, "tol_lux").get<double>();
    c.tolerances.tol_opt = need(t, "tol_opt").get<double>();
    c.tolerances.noise_floor = need(t, "noise_floor").get<double>();
    if (j.contains("params")) {
      const json& p = j.at("params");
      c.params.p = p.value("p", c.params.p);
      c.params.z = p.value("z", c.params.z);
      c.params.theta = p.value("theta", c.params.theta);
      c.params.order = p.value("order", c.params.order);
      c.params.weights = p.value("weights", c.params.weights);
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline json to_json(const EstimateReport& r) {
  json inputs = json::array();
  for (const auto& v : r.argmax_inputs) inputs.push_back(to_json(v));
  return {{"statistic", r.statistic}, {"sup_value", r.sup_value},   {"argmax_inputs", inputs},
          {"samples", r.samples},     {"seed", r.seed},             {"dim", r.dim},
          {"sampler", r.sampler},     {"replay_deviation", r.replay_deviation}};
}

inline EstimateReport report_from_json(const json& j) {
  EstimateReport r;
  r.statistic = j.at("statistic").get<std::string>();
  r.sup_value = j.at("sup_value").get<double>();
  for (const auto& v : j.at("argmax_inputs")) r.argmax_inputs.push_back(vector_from_json(v));
  r.samples = j.at("samples").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.dim = j.at("dim").get<std::size_t>();
  r.sampler = j.at("sampler").get<std::string>();
  r.replay_deviation = j.at("replay_deviation").get<double>();
  return r;
}

// Everything except wall-clock timings; identical configs give identical payloads.
inline json payload_json(const ReportBundle& b) {
  json reports = json::array(), checks = json::array(), failures = json::array();
  for (const auto& r : b.reports) reports.push_back(to_json(r));
  for (const auto& c : b.checks)
    checks.push_back({{"name", c.name},
                      {"dim", c.dim},
                      {"passed", c.passed},
                      {"max_deviation", c.max_deviation},
                      {"tolerance", c.tolerance}});
  for (const auto& f : b.failures)
    failures.push_back({{"name", f.name}, {"dim", f.dim}, {"kind", f.kind}, {"message", f.message}});
  return {{"config", to_json(b.config)}, {"reports", reports}, {"checks", checks}, {"failures", failures}};
}

inline json to_json(const ReportBundle& b) {
  json j = payload_json(b);
  json timings = json::array();
  for (const auto& t : b.timings) timings.push_back({{"name", t.name}, {"dim", t.dim}, {"seconds", t.seconds}});
  j["timings"] = timings;
  return j;
}

inline ReportBundle bundle_from_json(const json& j) {
  ReportBundle b;
  b.config = config_from_json(j.at("config"));
  for (const auto& r : j.at("reports")) b.reports.push_back(report_from_json(r));
  for (const auto& c : j.at("checks"))
    b.checks.push_back({c.at("name").get<std::string>(), c.at("dim").get<std::size_t>(), c.at("passed").get<bool>(),
                        c.at("max_deviation").get<double>(), c.at("tolerance").get<double>()});
  for (const auto& f : j.at("failures"))
    b.failures.push_back({f.at("name").get<std::string>(), f.at("dim").get<std::size_t>(),
                          f.at("kind").get<std::string>(), f.at("message").get<std::string>()});
  if (j.contains("timings"))
    for (const auto& t : j.at("timings"))
      b.timings.push_back({t.at("name").get<std::string>(), t.at("dim").get<std::size_t>(), t.at("seconds").get<double>()});
  return b;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

enum class Format { json, csv };

inline Format format_from_string(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  throw InvalidArgument("unknown format '" + s + "' (json or csv)");
}

inline constexpr const char* kCsvHeader = "statistic,dim,samples,seed,sup_value";

// Every stored argmax must still reproduce its supremum.
inline void check_replay(const ReportBundle& b) {
  for (const auto& r : b.reports) {
    if (r.replay_deviation > 1e-12 * std::max(1.0, std::abs(r.sup_value)))
      throw Error("report '" + r.statistic + "' does not replay: deviation " + std::to_string(r.replay_deviation));
  }
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv(const ReportBundle& b) {
  std::string out = std::string(kCsvHeader) + "\n";
  char buf[64];
  for (const auto& r : b.reports) {
    std::snprintf(buf, sizeof buf, "%.17g", r.sup_value);
    out += csv_field(r.statistic) + "," + std::to_string(r.dim) + "," + std::to_string(r.samples) + "," +
           std::to_string(r.seed) + "," + buf + "\n";
  }
  return out;
}

inline std::string serialize(const ReportBundle& b, Format f) {
  check_replay(b);
  return f == Format::json ? to_json(b).dump(2) + "\n" : to_csv(b);
}

inline ReportBundle deserialize(const std::string& text) {
  try {
    return bundle_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("report: ") + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing: " + std::strerror(errno));
  out << text;
  out.flush();
  if (!out) throw Error("write to '" + path + "' failed: " + std::strerror(errno));
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "': " + std::strerror(errno));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ExperimentConfig load_config(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return config_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config '" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

namespace detail {

inline double rel_dev(double got, double want) {
  const double scale = std::abs(want);
  return scale > 0.0 ? std::abs(got - want) / scale : std::abs(got);
}

// |a - b| relative to the larger of the two and `floor`.
inline double vec_dev(const Vector& a, const Vector& b, double floor = 0.0) {
  const double scale = std::max({l2_norm(a), l2_norm(b), floor});
  return scale > 0.0 ? l2_norm(a - b) / scale : 0.0;
}

class SuiteRun {
 public:
  SuiteRun(const ExperimentConfig& cfg, std::size_t dim, ReportBundle& out)
      : cfg_(cfg), dim_(dim), sampler_(Sampler::random(cfg.sampler, cfg.seed, dim)), out_(out) {}

  const Sampler& sampler() const { return sampler_; }
  std::size_t dim() const { return dim_; }
  std::size_t samples() const { return cfg_.samples; }
  const Tolerances& tol() const { return cfg_.tolerances; }

  // Runs one case; any error is recorded and the suite moves on.
  void run(const std::string& name, const std::function<void()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const WitnessDivergence& e) {
      out_.failures.push_back({name, dim_, "witness-divergence", e.what()});
    } catch (const std::exception& e) {
      out_.failures.push_back({name, dim_, "error", e.what()});
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    out_.timings.push_back({name, dim_, dt.count()});
  }

  void report(EstimateReport r) { out_.reports.push_back(std::move(r)); }

  void check(const std::string& name, double deviation, double tolerance) {
    out_.checks.push_back({name, dim_, deviation <= tolerance, deviation, tolerance});
  }

  // Largest value of `dev` over the configured samples.
  double sample_max(const std::string& name, const Generator& gen, const Statistic& dev) const {
    return estimate_sup(name, sampler_, cfg_.samples, gen, dev).sup_value;
  }

 private:
  const ExperimentConfig& cfg_;
  std::size_t dim_;
  Sampler sampler_;
  ReportBundle& out_;
};

inline Generator scaled_generator(const SpaceSpec& space) {
  return [space](Rng& rng, SamplerKind kind, std::size_t n) {
    Vector x = std::exp(rng.uniform(-3.0, 3.0)) * sample_unit(space, rng, kind, n);
    const double lambda = rng.sign() * std::exp(rng.uniform(-4.0, 4.0));
    return std::vector<Vector>{std::move(x), Vector{lambda}};
  };
}

// Cases shared by every map.
inline void common_cases(SuiteRun& s, const QMapPtr& omega) {
  const QMap& m = *omega;
  const double floor = s.tol().noise_floor;

  s.run("homogeneity", [&] {
    const double dev = s.sample_max("homogeneity:" + m.name, scaled_generator(m.source), [&](std::span<const Vector> in) {
      const double lambda = in[1][0];
      const Vector lhs = m(lambda * in[0]);
      const Vector rhs = lambda * m(in[0]);
      const double scale = std::abs(lambda) * std::max(l2_norm(m(in[0])), l2_norm(in[0]));
      return l2_norm(lhs - rhs) / scale;
    });
    s.check("homogeneity:" + m.name, dev, floor);
  });

  s.run("zero", [&] {
    const Vector z = m(Vector::zeros(s.dim() * m.source_blocks));
    s.check("zero:" + m.name, l2_norm(z), 0.0);
  });

  s.run("selector-identity", [&] {
    const SpaceSpec src = m.source, tgt = m.target;
    Generator gen = [src, tgt](Rng& rng, SamplerKind kind, std::size_t n) {
      return std::vector<Vector>{std::exp(rng.uniform(-3.0, 3.0)) * sample_unit(src, rng, kind, n),
                                 std::exp(rng.uniform(-3.0, 3.0)) * sample_unit(tgt, rng, kind, n)};
    };
    const double dev = s.sample_max("selector-identity:" + m.name, gen, [&](std::span<const Vector> in) {
      const double a = rel_dev(twisted_norm({m(in[0]), in[0]}, m), norm(m.source, in[0]));
      const double b = rel_dev(twisted_norm({in[1], Vector::zeros(in[0].dim())}, m), norm(m.target, in[1]));
      return std::max(a, b);
    });
    s.check("selector-identity:" + m.name, dev, floor);
  });

  s.run("quasilinearity", [&] {
    EstimateReport r = quasilinearity_constant(m, s.sampler(), s.samples());
    if (m.linear) s.check("linear-additivity:" + m.name, r.sup_value, floor);
    s.report(std::move(r));
  });

  s.run("one-quasilinearity", [&] { s.report(one_quasilinearity_constant(m, s.sampler(), s.samples(), 4)); });
}

inline void kp_cases(SuiteRun& s, const ExperimentConfig& cfg, const CatalogEntry& e) {
  const QMapPtr& kpm = e.map;
  const double p = cfg.params.p;
  const std::size_t n = s.dim();
  const double ln = std::log(static_cast<double>(n));
  const Vector u = Vector::constant(n, std::pow(static_cast<double>(n), -1.0 / p));

  s.run("kp-growth-law", [&] {
    const double tn = twisted_norm({kp(u, p), -u}, *kpm);
    s.check("kp-growth:twisted-norm", rel_dev(tn, 2.0 * ln + 1.0), 1e-9);
    s.check("kp-growth:boundedness", rel_dev(boundedness_sweep(*kpm, std::span(&u, 1))[0], ln), 1e-9);
    s.check("kp-growth:domain-norm", rel_dev(domain_norm(u, *kpm), 1.0 + ln), 1e-9);
  });

  s.run("triangle", [&] { s.report(twisted_triangle_constant(*kpm, s.sampler(), s.samples())); });

  s.run("witness-recovery", [&] {
    const SpaceSpec src = kpm->source;
    s.report(estimate_sup("witness-recovery:" + kpm->name, s.sampler(), s.samples(), unit_generator(src, 1),
                          [&](std::span<const Vector> in) {
                            const Vector beta = kp(in[0], p);
                            return twisted_norm({beta, e.witness->solve(beta)}, *kpm) / norm(src, in[0]);
                          }));
  });

  s.run("U-isomorphism", [&] {
    UIsomorphismReport r = check_U_isomorphism(*kpm, *e.witness, s.sampler(), s.samples());
    s.report(r.forward);
    s.report(r.backward);
    s.report(r.triangle);
    s.report(r.selector);
  });

  s.run("inverse-of-inverse", [&] {
    EstimateReport r = inverse_of_inverse_defect(kpm, e.witness, forward_witness(kpm), s.sampler(), s.samples());
    s.check("inverse-of-inverse:" + kpm->name, r.sup_value, 0.0);
    s.report(std::move(r));
  });

  s.run("orlicz-domain", [&] {
    const OrliczFn f = OrliczFn::fp(p);
    const LuxemburgOptions lux{cfg.tolerances.tol_lux};
    const SpaceSpec src = kpm->source;
    s.report(estimate_sup("domain/luxemburg:" + kpm->name, s.sampler(), s.samples(), unit_generator(src, 1),
                          [&](std::span<const Vector> in) { return domain_norm(in[0], *kpm) / luxemburg_norm(in[0], f, lux); }));
    s.report(estimate_sup("luxemburg/domain:" + kpm->name, s.sampler(), s.samples(), unit_generator(src, 1),
                          [&](std::span<const Vector> in) { return luxemburg_norm(in[0], f, lux) / domain_norm(in[0], *kpm); }));
  });

  if (p != 2.0) return;

  s.run("self-duality", [&] {
    s.report(duality_defect({kpm, negate(kpm)}, s.sampler(), s.samples()));
    const DualPairSpec plus{kpm, kpm};
    s.check("duality-positive-control:uniform", rel_dev(duality_defect_ratio(plus, u, u), 2.0 * ln), 1e-9);
  });

  s.run("order-two-duality", [&] {
    s.report(kp_order2_duality_defect(s.sampler(), s.samples(), true));
    const Vector z = concat(kp(u), u);
    s.check("order-two-without-u:uniform", rel_dev(kp_order2_ratio(u, z, false), 2.0 * ln * ln), 1e-9);
  });

  for (std::size_t order : {1, 2, 3}) {
    s.run("zn-selfduality", [&] {
      ZnReport r = zn_selfduality_check(order, s.sampler(), s.samples());
      s.check("zn-signs:" + std::to_string(order), r.sign_deviation, 0.0);
      if (order == 1) s.check("zn-cauchy-schwarz", std::max(0.0, r.pairing.sup_value - 1.0), s.tol().noise_floor);
      s.report(std::move(r.pairing));
    });
  }
}

inline void diagonal_cases(SuiteRun& s, const QMapPtr& omega) {
  const double floor = s.tol().noise_floor;
  const QMap& m = *omega;

  s.run("diagonal-inversion", [&] {
    const QMapPtr inv = make_inverse(omega, diagonal_exact_witness(m), {}, s.tol().tol_opt);
    const double dev = s.sample_max("diagonal-inversion:" + m.name, unit_generator(m.source, 1),
                                    [&](std::span<const Vector> in) {
                                      const Vector& x = in[0];
                                      return std::max(max_relative_deviation((*inv)(m(x)), x, 0.0),
                                                      max_relative_deviation(m((*inv)(x)), x, 0.0));
                                    });
    s.check("diagonal-inversion:" + m.name, dev, floor);
  });

  s.run("duality", [&] {
    EstimateReport r = duality_defect({omega, negate(omega)}, s.sampler(), s.samples());
    s.check("diagonal-duality:" + m.name, r.sup_value, floor);
    s.report(std::move(r));
  });

  s.run("dual-inverse", [&] { s.check("dual-inverse:" + m.name, dual_inverse_deviation(omega), 0.0); });

  s.run("perp-domain", [&] {
    const QMapPtr phi = negate(omega);
    std::vector<double> taus{1.0};
    auto a = detail::l2_weights(m.target, s.dim());
    auto b = detail::l2_weights(m.source, s.dim());
    if (!a || !b) throw Unsupported("perp-domain: spaces must be l2-type");
    for (std::size_t j = 0; j < s.dim(); ++j) taus.push_back(std::max(1.0, std::abs(m.diagonal->factor(j)) * (*a)[j] / (*b)[j]));
    double mismatches = 0.0;
    for (double t : taus) mismatches += perp_domain_check(m, *phi, t).equal ? 0.0 : 1.0;
    s.check("perp-domain:" + m.name, mismatches, 0.0);
  });

  s.run("U-isomorphism", [&] {
    const WitnessPtr j = diagonal_range_witness(omega);
    UIsomorphismReport r = check_U_isomorphism(m, *j, s.sampler(), s.samples());
    const double excess = std::max(r.forward.sup_value, r.backward.sup_value) - r.bound;
    s.check("U-isomorphism-bound:" + m.name, std::max(0.0, excess), floor * r.bound);
    s.report(r.forward);
    s.report(r.backward);
    s.report(r.triangle);
    s.report(r.selector);
  });

  s.run("M-vs-J", [&] {
    const WitnessPtr jm = diagonal_range_witness(omega);
    const WitnessPtr jj = diagonal_exact_witness(m);
    const QMapPtr inv_m = make_inverse(omega, jm, {}, s.tol().tol_opt);
    const QMapPtr inv_j = make_inverse(omega, jj, {}, s.tol().tol_opt);
    const double k = std::max(selector_constant(m, *jm, s.sampler(), s.samples()).sup_value,
                              selector_constant(m, *jj, s.sampler(), s.samples()).sup_value);
    EstimateReport r = bounded_equivalence_constant(*inv_m, *inv_j, s.sampler(), s.samples());
    s.check("M-vs-J:" + m.name, std::max(0.0, r.sup_value - (k + k * k)), 0.0);
    s.report(std::move(r));
  });
}

inline void kothe_cases(SuiteRun& s, const ExperimentConfig& cfg, const CatalogEntry& e) {
  diagonal_cases(s, e.map);

  s.run("inverse-of-inverse", [&] {
    const WitnessPtr j = diagonal_exact_witness(*e.map);
    const QMapPtr inv = make_inverse(e.map, j);
    EstimateReport r = inverse_of_inverse_defect(e.map, j, diagonal_exact_witness(*inv), s.sampler(), s.samples());
    s.check("inverse-of-inverse:" + e.map->name, r.sup_value, 0.0);
    s.report(std::move(r));
  });

  s.run("refusal", [&] {
    // Put w_j = 1 at a few coordinates; inversion must name exactly those.
    Vector w = catalog_weights(cfg.params, s.dim()).values();
    std::vector<double> raw = w.values();
    std::vector<std::size_t> ones;
    for (std::size_t j = 0; j < s.dim(); j += std::max<std::size_t>(1, s.dim() / 3)) {
      raw[j] = 1.0;
      ones.push_back(j);
    }
    const QMapPtr degenerate = symmetric_kothe_map(WeightVector(Vector(raw)));
    double mismatch = 1.0;
    try {
      diagonal_exact_witness(*degenerate);
    } catch (const InversionRefused& err) {
      mismatch = err.coordinates == ones ? 0.0 : 1.0;
    }
    double spurious = 0.0;
    try {
      diagonal_exact_witness(*e.map);
    } catch (const InversionRefused&) {
      spurious = 1.0;
    }
    s.check("refusal:exact-coordinates", mismatch + spurious, 0.0);
  });

  s.run("boundedness", [&] {
    std::vector<Vector> family;
    for (std::size_t j = 0; j < s.dim(); ++j) family.push_back(Vector::unit(s.dim(), j));
    const auto ratios = boundedness_sweep(*e.map, family);
    const Vector mult = e.map->diagonal->multipliers;
    double dev = 0.0;
    for (std::size_t j = 0; j < s.dim(); ++j) dev = std::max(dev, rel_dev(ratios[j], std::abs(mult[j])));
    s.check("boundedness:unit-vectors", dev, s.tol().noise_floor);
  });
}

inline void translation_cases(SuiteRun& s, const ExperimentConfig& cfg, const CatalogEntry& e) {
  const WeightVector w = catalog_weights(cfg.params, s.dim());
  const double z = cfg.params.z, theta = cfg.params.theta;
  const double floor = s.tol().noise_floor;

  s.run("translation-involution", [&] {
    const double dev = s.sample_max("translation-involution", unit_generator(SpaceSpec::l2(), 1),
                                    [&](std::span<const Vector> in) {
                                      const Vector& x = in[0];
                                      return std::max(vec_dev(translation(translation(x, z, theta, w), theta, z, w), x),
                                                      vec_dev(translation(x, theta, theta, w), x));
                                    });
    s.check("translation-involution", dev, floor);
  });

  s.run("translation-isometry", [&] {
    const Vector wt = interpolation_weight(w, theta).values();
    const Vector wz = interpolation_weight(w, z).values();
    const double dev = s.sample_max("translation-isometry", unit_generator(SpaceSpec::l2(), 1),
                                    [&](std::span<const Vector> in) {
                                      return rel_dev(weighted_l2_norm(translation(in[0], z, theta, w), wz),
                                                     weighted_l2_norm(in[0], wt));
                                    });
    s.check("translation-isometry", dev, floor);
  });

  s.run("inverse-of-inverse", [&] {
    EstimateReport r = inverse_of_inverse_defect(e.map, e.witness, translation_witness(theta, z, w), s.sampler(),
                                                 s.samples());
    s.check("inverse-of-inverse:translation", r.sup_value, 0.0);
    s.report(std::move(r));
  });

  s.run("bounded-domain", [&] {
    const QMap& m = *e.map;
    s.report(estimate_sup("domain/source:" + m.name, s.sampler(), s.samples(), unit_generator(m.source, 1),
                          [&](std::span<const Vector> in) { return domain_norm(in[0], m) / norm(m.source, in[0]); }));
  });

  s.run("U-isomorphism", [&] {
    UIsomorphismReport r = check_U_isomorphism(*e.map, *e.witness, s.sampler(), s.samples());
    const double excess = std::max(r.forward.sup_value, r.backward.sup_value) - r.bound;
    s.check("U-isomorphism-bound:translation", std::max(0.0, excess), floor * r.bound);
    s.report(r.forward);
    s.report(r.backward);
    s.report(r.triangle);
    s.report(r.selector);
  });
}

inline void rochberg_cases(SuiteRun& s, const ExperimentConfig& cfg, const CatalogEntry& e) {
  const WeightVector w = catalog_weights(cfg.params, s.dim());
  const std::size_t order = cfg.params.order;
  const double floor = s.tol().noise_floor;

  s.run("rochberg-closed-form", [&] {
    const double dev = s.sample_max("rochberg-closed-form", unit_generator(SpaceSpec::l2(), 1),
                                    [&](std::span<const Vector> in) {
                                      const Vector& x = in[0];
                                      const auto blocks = rochberg_differential(x, w, order);
                                      double d = 0.0;
                                      for (std::size_t j = 1; j < order; ++j) {
                                        const double k = static_cast<double>(order - j);
                                        const double c = std::pow(2.0, k) / std::tgamma(k + 1.0);
                                        std::vector<double> want(x.dim());
                                        for (std::size_t i = 0; i < x.dim(); ++i)
                                          want[i] = c * std::pow(std::log(w[i]), k) * x[i];
                                        d = std::max(d, vec_dev(blocks[j - 1], Vector(want)));
                                      }
                                      return d;
                                    });
    s.check("rochberg-closed-form:" + std::to_string(order), dev, floor);
  });

  s.run("rochberg-selector", [&] {
    Generator gen = [order](Rng& rng, SamplerKind kind, std::size_t n) {
      std::vector<Vector> out{sample_unit(SpaceSpec::l2(), rng, kind, n)};
      for (std::size_t j = 1; j < order; ++j) out.push_back(sample_unit(SpaceSpec::l2(), rng, kind, n));
      return out;
    };
    const double dev = s.sample_max("rochberg-selector", gen, [&](std::span<const Vector> in) {
      const Vector& x = in[0];
      auto blocks = rochberg_differential(x, w, order);
      blocks.push_back(x);
      const double a = rel_dev(rochberg_norm(RochbergVector(blocks), w), l2_norm(x));
      std::vector<Vector> top(in.begin() + 1, in.end());
      const RochbergVector y(top);
      top.push_back(Vector::zeros(x.dim()));
      const double b = rel_dev(rochberg_norm(RochbergVector(top), w), rochberg_norm(y, w));
      return std::max(a, b);
    });
    s.check("rochberg-selector:" + std::to_string(order), dev, floor);
  });

  s.run("rochberg-exactness", [&] {
    double dev = 0.0;
    Rng rng = Rng::for_sample(cfg.seed, stream_id("rochberg-exactness"), s.dim());
    for (std::size_t m = 1; m < order; ++m) {
      std::vector<Vector> blocks;
      for (std::size_t j = 0; j < m; ++j) blocks.push_back(gaussian_vector(rng, s.dim()));
      const RochbergVector v(blocks);
      const RochbergVector pi = rochberg_project(rochberg_include(v, order), order - m);
      dev = std::max(dev, l2_norm(pi.flat()));
      const RochbergVector full = rochberg_include(v, order);
      dev = std::max(dev, l2_norm(u_n(u_n(full)).flat() - full.flat()));
    }
    s.check("rochberg-exactness:" + std::to_string(order), dev, 0.0);
  });

  (void)e;
}

}  // namespace detail

// Runs every estimator and exact check relevant to cfg.map for each dimension.
inline ReportBundle run_suite(const ExperimentConfig& cfg) {
  cfg.validate();
  make_catalog_entry(cfg.map, cfg.dims.front(), cfg.params);  // rejects unknown names up front

  ReportBundle bundle;
  bundle.config = cfg;
  for (std::size_t dim : cfg.dims) {
    detail::SuiteRun s(cfg, dim, bundle);
    CatalogEntry e;
    s.run("construct", [&] { e = make_catalog_entry(cfg.map, dim, cfg.params); });
    if (!e.map) continue;
    detail::common_cases(s, e.map);
    if (cfg.map == "kp") detail::kp_cases(s, cfg, e);
    if (cfg.map == "kothe") detail::kothe_cases(s, cfg, e);
    if (cfg.map == "translation") detail::translation_cases(s, cfg, e);
    if (cfg.map == "rochberg") detail::rochberg_cases(s, cfg, e);
  }
  return bundle;
}

}  // namespace twistlab
