#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "twistlab/error.hpp"
#include "twistlab/qmap.hpp"
#include "twistlab/sampling.hpp"
#include "twistlab/vector.hpp"

namespace twistlab {

// Empirical supremum of a ratio statistic, with the inputs that attain it.
struct EstimateReport {
  std::string statistic;
  double sup_value = 0.0;
  std::vector<Vector> argmax_inputs;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  std::string sampler;
  double replay_deviation = 0.0;  // |stat(argmax_inputs) - sup_value|

  friend bool operator==(const EstimateReport&, const EstimateReport&) = default;
};

using Statistic = std::function<double(std::span<const Vector>)>;
using Generator = std::function<std::vector<Vector>(Rng&, SamplerKind, std::size_t)>;

namespace detail {

inline unsigned worker_count(std::size_t total) {
  const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::clamp<std::size_t>(total / 32, 1, hw));
}

// Runs body(i) for i in [0, total) over contiguous chunks. Exceptions are
// rethrown from the lowest failing index so errors are reproducible.
template <class Body>
void parallel_for(std::size_t total, Body&& body) {
  const unsigned workers = worker_count(total);
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) body(i, 0U);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> error_index(workers, total);
  std::vector<std::thread> pool;
  const std::size_t chunk = (total + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t begin = w * chunk, end = std::min(total, begin + chunk);
      for (std::size_t i = begin; i < end; ++i) {
        try {
          body(i, w);
        } catch (...) {
          errors[w] = std::current_exception();
          error_index[w] = i;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  std::size_t first = total;
  std::exception_ptr err;
  for (unsigned w = 0; w < workers; ++w) {
    if (errors[w] && error_index[w] < first) {
      first = error_index[w];
      err = errors[w];
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace detail

// Supremum of `stat` over inputs drawn from `sampler`. The maximum is taken in
// a fixed order (ties go to the lower index), so the report is a pure function
// of the sampler seed regardless of thread scheduling.
inline EstimateReport estimate_sup(const std::string& name, const Sampler& sampler, std::size_t n,
                                   const Generator& gen, const Statistic& stat) {
  if (n == 0) throw InvalidArgument(name + ": at least one sample is required");
  const std::size_t total = sampler.total(n);
  const std::uint64_t stream = stream_id(name);

  struct Best {
    double value = -1.0;
    std::size_t index = 0;
  };
  const unsigned workers = detail::worker_count(total);
  std::vector<Best> best(workers);
  detail::parallel_for(total, [&](std::size_t i, unsigned w) {
    auto inputs = sampler.draw(stream, i, gen);
    const double v = stat(inputs);
    if (std::isnan(v) || v < 0.0)
      throw Error(name + ": statistic returned " + std::to_string(v) + " at sample " + std::to_string(i));
    if (v > best[w].value) best[w] = {v, i};
  });
  Best top;
  for (const auto& b : best) {
    if (b.value > top.value || (b.value == top.value && b.value >= 0.0 && b.index < top.index)) top = b;
  }

  EstimateReport r;
  r.statistic = name;
  r.sup_value = top.value;
  r.argmax_inputs = sampler.draw(stream, top.index, gen);
  r.samples = total;
  r.seed = sampler.seed();
  r.dim = sampler.dim();
  r.sampler = sampler.describe();
  r.replay_deviation = std::abs(stat(r.argmax_inputs) - r.sup_value);
  return r;
}

// ---- input generators ----

inline Generator unit_generator(const SpaceSpec& space, std::size_t count) {
  return [space, count](Rng& rng, SamplerKind kind, std::size_t n) {
    std::vector<Vector> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(sample_unit(space, rng, kind, n));
    return out;
  };
}

inline Generator pair_generator(const SpaceSpec& space) {
  return [space](Rng& rng, SamplerKind kind, std::size_t n) {
    Vector x = sample_unit(space, rng, kind, n);
    Vector z = companion_unit(x, space, rng, kind, n);
    return std::vector<Vector>{std::move(x), std::move(z)};
  };
}

// Flattened twisted vector (beta, x) with beta = Omega x + r, either part possibly zero.
inline Vector sample_twisted_flat(const QMap& omega, Rng& rng, SamplerKind kind, std::size_t n) {
  const double mode = rng.uniform();
  Vector x = mode < 0.2 ? Vector::zeros(n * omega.source_blocks)
                        : std::exp(rng.uniform(-2.0, 2.0)) * sample_unit(omega.source, rng, kind, n);
  Vector r = (mode >= 0.2 && mode < 0.4) ? Vector::zeros(n * omega.target_blocks)
                                         : std::exp(rng.uniform(-3.0, 2.0)) * sample_unit(omega.target, rng, kind, n);
  return concat(omega(x) + r, x);
}

// ---- estimators ----

inline double quasilinearity_ratio(const QMap& omega, const Vector& x, const Vector& z) {
  const double denom = norm(omega.source, x) + norm(omega.source, z);
  if (!(denom > 0.0)) throw InvalidArgument("quasilinearity_ratio: both inputs are zero");
  return norm(omega.target, omega(x + z) - omega(x) - omega(z)) / denom;
}

// sup |Omega(x+z) - Omega x - Omega z|_Y / (|x|_X + |z|_X) over unit pairs.
inline EstimateReport quasilinearity_constant(const QMap& omega, const Sampler& sampler, std::size_t n) {
  return estimate_sup(
      "quasilinearity:" + omega.name, sampler, n, pair_generator(omega.source),
      [&omega](std::span<const Vector> in) { return quasilinearity_ratio(omega, in[0], in[1]); });
}

inline double one_quasilinearity_ratio(const QMap& omega, std::span<const Vector> family) {
  if (family.empty()) throw InvalidArgument("one_quasilinearity_ratio: empty family");
  Vector sum = family[0];
  Vector images = omega(family[0]);
  double denom = norm(omega.source, family[0]);
  for (std::size_t k = 1; k < family.size(); ++k) {
    sum = sum + family[k];
    images = images + omega(family[k]);
    denom += norm(omega.source, family[k]);
  }
  if (!(denom > 0.0)) throw InvalidArgument("one_quasilinearity_ratio: all family members are zero");
  return norm(omega.target, omega(sum) - images) / denom;
}

// sup |Omega(sum x_k) - sum Omega x_k|_Y / sum |x_k|_X over families of 2..k_max unit vectors.
inline EstimateReport one_quasilinearity_constant(const QMap& omega, const Sampler& sampler, std::size_t n,
                                                  std::size_t k_max) {
  if (k_max < 2) throw InvalidArgument("one_quasilinearity_constant: family size bound must be >= 2");
  Generator gen = [space = omega.source, k_max](Rng& rng, SamplerKind kind, std::size_t dim) {
    const std::size_t k = 2 + rng.index(k_max - 1);
    std::vector<Vector> fam;
    fam.push_back(sample_unit(space, rng, kind, dim));
    for (std::size_t j = 1; j < k; ++j) {
      fam.push_back(rng.coin() ? companion_unit(fam[rng.index(j)], space, rng, kind, dim)
                               : sample_unit(space, rng, kind, dim));
    }
    return fam;
  };
  return estimate_sup("one-quasilinearity:" + omega.name, sampler, n, gen,
                      [&omega](std::span<const Vector> in) { return one_quasilinearity_ratio(omega, in); });
}

// |Omega x|_Y / |x|_X for each member, in order.
inline std::vector<double> boundedness_sweep(const QMap& omega, std::span<const Vector> family) {
  std::vector<double> out;
  out.reserve(family.size());
  for (std::size_t k = 0; k < family.size(); ++k) {
    const double d = norm(omega.source, family[k]);
    if (!(d > 0.0))
      throw InvalidArgument("boundedness_sweep: member " + std::to_string(k) + " is the zero vector");
    out.push_back(norm(omega.target, omega(family[k])) / d);
  }
  return out;
}

inline void require_same_shape(const char* where, const QMap& a, const QMap& b) {
  if (a.source_blocks != b.source_blocks || a.target_blocks != b.target_blocks)
    throw InvalidArgument(std::string(where) + ": maps '" + a.name + "' and '" + b.name +
                          "' have different block shapes");
}

// sup |Omega1 x - Omega2 x|_Y / |x|_X over unit samples in the source of Omega1.
inline EstimateReport bounded_equivalence_constant(const QMap& a, const QMap& b, const Sampler& sampler,
                                                   std::size_t n) {
  require_same_shape("bounded_equivalence_constant", a, b);
  return estimate_sup("equivalence:" + a.name + "|" + b.name, sampler, n, unit_generator(a.source, 1),
                      [&a, &b](std::span<const Vector> in) {
                        return norm(a.target, a(in[0]) - b(in[0])) / norm(a.source, in[0]);
                      });
}

// Quasi-triangle constant of the twisted quasi-norm: sup |u+v| / (|u| + |v|).
inline EstimateReport twisted_triangle_constant(const QMap& omega, const Sampler& sampler, std::size_t n) {
  Generator gen = [&omega](Rng& rng, SamplerKind kind, std::size_t dim) {
    Vector u = sample_twisted_flat(omega, rng, kind, dim);
    Vector v = rng.coin(0.25) ? std::exp(rng.uniform(-1.0, 1.0)) * u : sample_twisted_flat(omega, rng, kind, dim);
    return std::vector<Vector>{std::move(u), std::move(v)};
  };
  return estimate_sup("triangle:" + omega.name, sampler, n, gen, [&omega](std::span<const Vector> in) {
    auto tn = [&](const Vector& f) { return twisted_norm(split_twisted(f, omega), omega); };
    const double d = tn(in[0]) + tn(in[1]);
    return d > 0.0 ? tn(in[0] + in[1]) / d : 0.0;
  });
}

}  // namespace twistlab
