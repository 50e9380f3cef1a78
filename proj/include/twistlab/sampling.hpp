#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "twistlab/error.hpp"
#include "twistlab/qmap.hpp"
#include "twistlab/vector.hpp"

namespace twistlab {

enum class SamplerKind { gaussian, structured, both };

inline std::string to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::gaussian: return "gaussian";
    case SamplerKind::structured: return "structured";
    case SamplerKind::both: return "both";
  }
  return "?";
}

inline SamplerKind sampler_kind_from_string(std::string_view s) {
  if (s == "gaussian") return SamplerKind::gaussian;
  if (s == "structured") return SamplerKind::structured;
  if (s == "both") return SamplerKind::both;
  throw InvalidArgument("unknown sampler kind '" + std::string(s) + "'");
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_id(std::string_view name) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent generator for sample `index` of stream `stream`; the draw for a
  // given index never depends on how many other samples were drawn.
  static Rng for_sample(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return Rng(splitmix64(splitmix64(seed ^ splitmix64(stream)) + index));
  }

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  double sign() { return (engine_() & 1U) ? 1.0 : -1.0; }
  bool coin(double p = 0.5) { return uniform() < p; }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

 private:
  std::mt19937_64 engine_;
};

inline Vector gaussian_vector(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (auto& e : v) e = rng.normal();
  if (std::all_of(v.begin(), v.end(), [](double e) { return e == 0.0; })) v[0] = 1.0;
  return Vector(std::move(v));
}

// Log-shaped and block-shaped vectors. Maps built from log|x| attain their
// extremal ratios on these, which plain Gaussian sampling almost never visits.
inline Vector structured_vector(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  const std::size_t offset = rng.index(dim);
  auto at = [&](std::size_t k) -> double& { return v[(offset + k) % dim]; };
  auto support = [&] {
    const double k = std::floor(rng.log_uniform(1.0, static_cast<double>(dim) + 0.999));
    return std::clamp<std::size_t>(static_cast<std::size_t>(k), 1, dim);
  };

  switch (rng.index(7)) {
    case 0:  // spike
      at(0) = 1.0;
      break;
    case 1: {  // flat block
      const std::size_t k = support();
      for (std::size_t i = 0; i < k; ++i) at(i) = 1.0;
      break;
    }
    case 2: {  // dyadic levels: 2^j coordinates at height 2^{-a j}
      const double a = rng.uniform(0.25, 1.0);
      std::size_t pos = 0;
      for (int j = 0; pos < dim; ++j) {
        const std::size_t len = std::size_t{1} << j;
        const double h = std::exp2(-a * j);
        for (std::size_t i = 0; i < len && pos < dim; ++i) at(pos++) = h;
        if (rng.coin(0.15)) break;
      }
      break;
    }
    case 3: {  // power law
      const std::size_t k = support();
      const double a = rng.uniform(0.25, 1.5);
      for (std::size_t i = 0; i < k; ++i) at(i) = std::pow(static_cast<double>(i + 1), -a);
      break;
    }
    case 4: {  // critical log profile
      const std::size_t k = support();
      for (std::size_t i = 0; i < k; ++i)
        at(i) = 1.0 / (std::sqrt(static_cast<double>(i + 1)) * std::log(static_cast<double>(i) + 2.0));
      break;
    }
    case 5: {  // two flat levels
      const std::size_t k1 = support();
      const std::size_t k2 = support();
      const double h = std::exp(rng.uniform(-4.0, 4.0));
      for (std::size_t i = 0; i < k1; ++i) at(i) = 1.0;
      for (std::size_t i = 0; i < k2 && k1 + i < dim; ++i) at(k1 + i) = h;
      break;
    }
    default: {  // Gaussian with log-uniform coordinate spread
      const double spread = rng.uniform(0.0, 6.0);
      for (std::size_t i = 0; i < dim; ++i) v[i] = rng.normal() * std::exp(-spread * rng.uniform());
      break;
    }
  }
  if (rng.coin()) {
    for (auto& e : v) e *= rng.sign();
  }
  if (std::all_of(v.begin(), v.end(), [](double e) { return e == 0.0; })) v[offset] = 1.0;
  return Vector(std::move(v));
}

inline Vector raw_vector(Rng& rng, SamplerKind kind, std::size_t dim) {
  return kind == SamplerKind::gaussian ? gaussian_vector(rng, dim) : structured_vector(rng, dim);
}

// A nonzero element of `space` built over base dimension n. Twisted sums are
// sampled as (Psi a + r, a), ranges as Psi a + r.
inline Vector sample_element(const SpaceSpec& space, Rng& rng, SamplerKind kind, std::size_t n) {
  if (const auto* ts = space.as<space::TwistedSum>()) {
    const QMap& psi = *ts->map;
    Vector a = sample_element(psi.source, rng, kind, n);
    Vector r = rng.uniform() < 0.2 ? Vector::zeros(n * psi.target_blocks)
                                   : std::exp(rng.uniform(-3.0, 1.0)) * sample_element(psi.target, rng, kind, n);
    return concat(psi(a) + r, a);
  }
  if (const auto* rg = space.as<space::Range>()) {
    const QMap& psi = *rg->map;
    Vector a = sample_element(psi.source, rng, kind, n);
    Vector r = std::exp(rng.uniform(-3.0, 1.0)) * sample_element(psi.target, rng, kind, n);
    return psi(a) + r;
  }
  if (const auto* dm = space.as<space::Domain>()) return sample_element(dm->map->source, rng, kind, n);
  return raw_vector(rng, kind, n);
}

inline Vector normalize(const Vector& v, const SpaceSpec& space) {
  const double s = norm(space, v);
  if (!(s > 0.0)) throw InvalidArgument("normalize: zero vector in " + space.describe());
  return (1.0 / s) * v;
}

inline Vector sample_unit(const SpaceSpec& space, Rng& rng, SamplerKind kind, std::size_t n) {
  return normalize(sample_element(space, rng, kind, n), space);
}

// A second unit vector correlated with x: independent, shifted copy (disjoint
// blocks), multiplicative perturbation, or near-cancellation.
inline Vector companion_unit(const Vector& x, const SpaceSpec& space, Rng& rng, SamplerKind kind, std::size_t n) {
  if (kind == SamplerKind::gaussian || x.dim() != n) return sample_unit(space, rng, kind, n);
  switch (rng.index(4)) {
    case 0: return sample_unit(space, rng, kind, n);
    case 1: {
      const std::size_t shift = 1 + rng.index(n);
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) v[(i + shift) % n] = x[i];
      return normalize(Vector(std::move(v)), space);
    }
    case 2: {
      const double sigma = rng.uniform(0.0, 3.0);
      return normalize(map_entries(x, [&](double e) { return e * std::exp(sigma * rng.normal()); }), space);
    }
    default: {
      const double eps = std::exp(rng.uniform(-8.0, 0.0));
      Vector w = sample_unit(space, rng, kind, n);
      Vector z = -x + eps * w;
      if (z.is_zero()) return w;
      return normalize(z, space);
    }
  }
}

// Source of estimator inputs: either seeded random draws or a finite list.
class Sampler {
 public:
  static Sampler random(SamplerKind kind, std::uint64_t seed, std::size_t dim) {
    if (dim == 0) throw InvalidArgument("Sampler: dimension must be positive");
    Sampler s;
    s.kind_ = kind;
    s.seed_ = seed;
    s.dim_ = dim;
    return s;
  }
  static Sampler fixed(std::vector<std::vector<Vector>> cases) {
    Sampler s;
    s.fixed_ = std::move(cases);
    s.is_fixed_ = true;
    s.dim_ = s.fixed_.empty() || s.fixed_[0].empty() ? 0 : s.fixed_[0][0].dim();
    return s;
  }

  bool is_fixed() const { return is_fixed_; }
  SamplerKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t dim() const { return dim_; }
  std::string describe() const { return is_fixed_ ? "fixed" : to_string(kind_); }

  // Both kinds run N samples each.
  std::size_t total(std::size_t n) const {
    if (is_fixed_) {
      if (n > fixed_.size())
        throw Error("sampler exhausted: requested " + std::to_string(n) + " cases, " +
                    std::to_string(fixed_.size()) + " available");
      return n;
    }
    return kind_ == SamplerKind::both ? 2 * n : n;
  }

  SamplerKind kind_at(std::size_t i) const {
    if (kind_ != SamplerKind::both) return kind_;
    return (i % 2 == 0) ? SamplerKind::gaussian : SamplerKind::structured;
  }

  template <class Gen>
  std::vector<Vector> draw(std::uint64_t stream, std::size_t i, Gen&& gen) const {
    if (is_fixed_) return fixed_.at(i);
    Rng rng = Rng::for_sample(seed_, stream, i);
    return gen(rng, kind_at(i), dim_);
  }

 private:
  SamplerKind kind_ = SamplerKind::both;
  std::uint64_t seed_ = 0;
  std::size_t dim_ = 0;
  bool is_fixed_ = false;
  std::vector<std::vector<Vector>> fixed_;
};

}  // namespace twistlab
