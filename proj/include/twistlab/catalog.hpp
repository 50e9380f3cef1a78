#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "twistlab/error.hpp"
#include "twistlab/qmap.hpp"
#include "twistlab/spaces.hpp"
#include "twistlab/vector.hpp"

namespace twistlab {

// ---------------------------------------------------------------------------
// Kalton-Peck family
// ---------------------------------------------------------------------------

// log(|v_i| / |v|_p), with 0 on the zero coordinates (and everywhere if v = 0).
inline Vector log_profile(const Vector& v, double p = 2.0) {
  const double nv = lp_norm(v, p);
  if (nv == 0.0) return Vector::zeros(v.dim());
  return map_entries(v, [nv](double e) { return e == 0.0 ? 0.0 : std::log(std::abs(e) / nv); });
}

// p x log(|x| / |x|_p)
inline Vector kp(const Vector& x, double p = 2.0) {
  if (!(p > 1.0)) throw InvalidArgument("kp: p must exceed 1");
  const Vector l = log_profile(x, p);
  return zip_with(x, l, [p](double e, double li) { return p * e * li; });
}

// (2 x log^2(|x|/|x|), 2 x log(|x|/|x|)), highest-order block first.
inline std::pair<Vector, Vector> kp_12(const Vector& x) {
  const Vector l = log_profile(x);
  return {zip_with(x, l, [](double e, double li) { return 2.0 * e * li * li; }),
          zip_with(x, l, [](double e, double li) { return 2.0 * e * li; })};
}

// 2u log(|u|/|u|) + 2x log^2(|x|/|x|) with u = y - 2x log(|x|/|x|); the first
// term is 0 when u = 0.
inline Vector kp_21(const Vector& y, const Vector& x) {
  require_same_dim("kp_21", y, x);
  const Vector lx = log_profile(x);
  const Vector u = y - zip_with(x, lx, [](double e, double li) { return 2.0 * e * li; });
  const Vector lu = log_profile(u);
  const Vector first = zip_with(u, lu, [](double e, double li) { return 2.0 * e * li; });
  return first + zip_with(x, lx, [](double e, double li) { return 2.0 * e * li * li; });
}

// ---------------------------------------------------------------------------
// Weighted sequence spaces
// ---------------------------------------------------------------------------

class WeightVector {
 public:
  explicit WeightVector(Vector w, bool non_increasing = false) : w_(std::move(w)), non_increasing_(non_increasing) {
    require_positive_weights("WeightVector", w_);
    if (non_increasing_) {
      for (std::size_t i = 1; i < w_.dim(); ++i)
        if (w_[i] > w_[i - 1])
          throw InvalidArgument("WeightVector: flagged non-increasing but w[" + std::to_string(i) +
                                "] > w[" + std::to_string(i - 1) + "]");
    }
  }

  // (i + 2)^{-1/2}: non-increasing, tends to 0, not summable, and never 1.
  static WeightVector harmonic(std::size_t dim) {
    std::vector<double> w(dim);
    for (std::size_t i = 0; i < dim; ++i) w[i] = 1.0 / std::sqrt(static_cast<double>(i) + 2.0);
    return WeightVector(Vector(std::move(w)), true);
  }
  // 2^{-i}
  static WeightVector dyadic(std::size_t dim) {
    std::vector<double> w(dim);
    for (std::size_t i = 0; i < dim; ++i) w[i] = std::exp2(-static_cast<double>(i));
    return WeightVector(Vector(std::move(w)), true);
  }

  const Vector& values() const { return w_; }
  std::size_t dim() const { return w_.dim(); }
  double operator[](std::size_t i) const { return w_[i]; }
  bool non_increasing() const { return non_increasing_; }

  WeightVector reciprocal() const {
    return WeightVector(map_entries(w_, [](double v) { return 1.0 / v; }));
  }
  WeightVector power(double e) const {
    return WeightVector(map_entries(w_, [e](double v) { return std::pow(v, e); }));
  }

 private:
  Vector w_;
  bool non_increasing_;
};

// log(w1_i / w0_i) x_i
inline Vector kothe_differential(const Vector& x, const WeightVector& w0, const WeightVector& w1) {
  require_same_dim("kothe_differential", x, w0.values());
  require_same_dim("kothe_differential", x, w1.values());
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = std::log(w1[i] / w0[i]) * x[i];
  return Vector(std::move(out));
}

// Multipliers 2 log w of the differential for the pair (w^{-1}, w) at 1/2.
inline Vector symmetric_kothe_multipliers(const WeightVector& w) {
  return map_entries(w.values(), [](double v) { return 2.0 * std::log(v); });
}

// w^{2(theta - z)} x: maps l2(w^{2 theta - 1}) isometrically onto l2(w^{2z - 1})
// and is the identity at z = theta.
inline Vector translation(const Vector& x, double z, double theta, const WeightVector& w) {
  if (!(z > 0.0 && z < 1.0 && theta > 0.0 && theta < 1.0))
    throw InvalidArgument("translation: z and theta must lie in (0,1)");
  require_same_dim("translation", x, w.values());
  const double e = 2.0 * (theta - z);
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = std::pow(w[i], e) * x[i];
  return Vector(std::move(out));
}

// Weight of the interpolation space at theta for the pair (w^{-1}, w).
inline WeightVector interpolation_weight(const WeightVector& w, double theta) { return w.power(2.0 * theta - 1.0); }

// ---------------------------------------------------------------------------
// Rochberg vectors
// ---------------------------------------------------------------------------

// Blocks (a_{n-1}, ..., a_1, a_0): leftmost is the highest-order coefficient,
// rightmost the interpolation-space coordinate.
struct RochbergVector {
  std::vector<Vector> blocks;

  explicit RochbergVector(std::vector<Vector> b) : blocks(std::move(b)) {
    if (blocks.empty()) throw InvalidArgument("RochbergVector: order must be >= 1");
    for (const auto& v : blocks) require_same_dim("RochbergVector", v, blocks.front());
  }
  static RochbergVector from_flat(const Vector& flat, std::size_t order) {
    return RochbergVector(split_blocks(flat, order));
  }

  std::size_t order() const { return blocks.size(); }
  std::size_t dim() const { return blocks.front().dim(); }
  const Vector& base() const { return blocks.back(); }
  Vector flat() const { return concat(blocks); }
  // All blocks except a_0.
  std::vector<Vector> upper() const { return {blocks.begin(), blocks.end() - 1}; }

  friend bool operator==(const RochbergVector&, const RochbergVector&) = default;
};

// (2^{n-1}/(n-1)! log^{n-1} w . x, ..., 2 log w . x)
inline std::vector<Vector> rochberg_differential(const Vector& x, const WeightVector& w, std::size_t n) {
  if (n < 2) throw InvalidArgument("rochberg_differential: order must be >= 2");
  require_same_dim("rochberg_differential", x, w.values());
  std::vector<Vector> out;
  out.reserve(n - 1);
  for (std::size_t j = 1; j < n; ++j) {
    const std::size_t k = n - j;
    const double coeff = std::exp2(static_cast<double>(k)) / std::tgamma(static_cast<double>(k) + 1.0);
    std::vector<double> b(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) b[i] = coeff * std::pow(std::log(w[i]), static_cast<double>(k)) * x[i];
    out.emplace_back(std::move(b));
  }
  return out;
}

// n = 1: |a_0|_2; n >= 2: |(upper blocks) - differential(a_0)|_{R_{n-1}} + |a_0|_2.
inline double rochberg_norm(const RochbergVector& v, const WeightVector& w) {
  if (v.order() == 1) return l2_norm(v.base());
  const auto diff = rochberg_differential(v.base(), w, v.order());
  std::vector<Vector> rest;
  rest.reserve(v.order() - 1);
  for (std::size_t j = 0; j + 1 < v.order(); ++j) rest.push_back(v.blocks[j] - diff[j]);
  return rochberg_norm(RochbergVector(std::move(rest)), w) + l2_norm(v.base());
}

// Rochberg spaces of the Kalton-Peck scale at 1/2: R_1 = l2, R_2 = Z_2, and
// R_3 quotient-normed through (kp_12(a_0), a_0).
inline double kp_rochberg_norm(const RochbergVector& v) {
  switch (v.order()) {
    case 1: return l2_norm(v.base());
    case 2: return l2_norm(v.blocks[0] - kp(v.blocks[1])) + l2_norm(v.blocks[1]);
    case 3: {
      const auto [a2, a1] = kp_12(v.base());
      return kp_rochberg_norm(RochbergVector({v.blocks[0] - a2, v.blocks[1] - a1})) + l2_norm(v.base());
    }
    default: throw Unsupported("kp_rochberg_norm: closed forms are available for orders 1-3 only");
  }
}

// a_{n-i} -> (-1)^{n-i} a_{n-i}: block j from the left has sign (-1)^{n-1-j}.
inline RochbergVector u_n(const RochbergVector& v) {
  std::vector<Vector> out;
  out.reserve(v.order());
  const std::size_t n = v.order();
  for (std::size_t j = 0; j < n; ++j) out.push_back(((n - 1 - j) % 2 == 0) ? v.blocks[j] : -v.blocks[j]);
  return RochbergVector(std::move(out));
}

// Pairing of R_n with its dual: block j against block n-1-j, so that a_0
// meets the top coefficient.
inline double reversal_pairing(const RochbergVector& a, const RochbergVector& b) {
  if (a.order() != b.order()) throw InvalidArgument("reversal_pairing: orders differ");
  double s = 0.0;
  const std::size_t n = a.order();
  for (std::size_t j = 0; j < n; ++j) s += dot(a.blocks[j], b.blocks[n - 1 - j]);
  return s;
}

// R_m -> R_n, (a_{m-1}, ..., a_0) -> (a_{m-1}, ..., a_0, 0, ..., 0)
inline RochbergVector rochberg_include(const RochbergVector& v, std::size_t n) {
  if (n < v.order()) throw InvalidArgument("rochberg_include: target order below source order");
  std::vector<Vector> out = v.blocks;
  while (out.size() < n) out.push_back(Vector::zeros(v.dim()));
  return RochbergVector(std::move(out));
}

// R_n -> R_k, keeps the k lowest-order blocks.
inline RochbergVector rochberg_project(const RochbergVector& v, std::size_t k) {
  if (k == 0 || k > v.order()) throw InvalidArgument("rochberg_project: k must lie in [1, order]");
  return RochbergVector({v.blocks.end() - static_cast<std::ptrdiff_t>(k), v.blocks.end()});
}

// ---------------------------------------------------------------------------
// QMap factories
// ---------------------------------------------------------------------------

inline QMapPtr kp_map(double p = 2.0) {
  auto m = std::make_shared<QMap>();
  m->name = p == 2.0 ? "kp" : "kp_p" + std::to_string(p);
  m->source = SpaceSpec::lp(p);
  m->target = SpaceSpec::lp(p);
  m->fn = [p](const Vector& x) { return kp(x, p); };
  return m;
}

// l2 ~> Z_2 (ambient l_inf^2)
inline QMapPtr kp12_map() {
  auto m = std::make_shared<QMap>();
  m->name = "kp12";
  m->source = SpaceSpec::l2();
  m->target = SpaceSpec::twisted_sum(kp_map(2.0));
  m->target_blocks = 2;
  m->fn = [](const Vector& x) {
    auto [a2, a1] = kp_12(x);
    return concat(a2, a1);
  };
  return m;
}

// Z_2 ~> l2, input stored as concat(y, x)
inline QMapPtr kp21_map() {
  auto m = std::make_shared<QMap>();
  m->name = "kp21";
  m->source = SpaceSpec::twisted_sum(kp_map(2.0));
  m->target = SpaceSpec::l2();
  m->source_blocks = 2;
  m->fn = [](const Vector& v) {
    auto parts = split_blocks(v, 2);
    return kp_21(parts[0], parts[1]);
  };
  return m;
}

// log(w1/w0) . x on X(w_theta), w_theta = w0^{1-theta} w1^theta.
inline QMapPtr kothe_map(const WeightVector& w0, const WeightVector& w1, double theta = 0.5) {
  require_same_dim("kothe_map", w0.values(), w1.values());
  std::vector<double> m(w0.dim()), wt(w0.dim());
  for (std::size_t i = 0; i < w0.dim(); ++i) {
    m[i] = std::log(w1[i] / w0[i]);
    wt[i] = std::pow(w0[i], 1.0 - theta) * std::pow(w1[i], theta);
  }
  SpaceSpec space = SpaceSpec::weighted_l2(Vector(std::move(wt)));
  return make_diagonal_map("kothe", DiagonalForm{Vector(std::move(m)), false}, space, space);
}

// 2 log w . x on l2, the differential of (l2(w^{-1}), l2(w)) at 1/2.
inline QMapPtr symmetric_kothe_map(const WeightVector& w) {
  return make_diagonal_map("kothe", DiagonalForm{symmetric_kothe_multipliers(w), false}, SpaceSpec::l2(),
                           SpaceSpec::l2());
}

inline QMapPtr translation_map(double z, double theta, const WeightVector& w) {
  auto m = std::make_shared<QMap>();
  m->name = "translation";
  m->source = SpaceSpec::weighted_l2(interpolation_weight(w, theta).values());
  m->target = SpaceSpec::weighted_l2(interpolation_weight(w, z).values());
  m->linear = true;
  std::vector<double> f(w.dim());
  for (std::size_t i = 0; i < w.dim(); ++i) f[i] = std::pow(w[i], 2.0 * (theta - z));
  m->diagonal = DiagonalForm{Vector(std::move(f)), false};
  m->fn = [z, theta, w](const Vector& x) { return translation(x, z, theta, w); };
  return m;
}

// Omega_{<n-1,...,1>,0}: l2 ~> R_{n-1}
inline QMapPtr rochberg_map(const WeightVector& w, std::size_t n) {
  if (n < 2) throw InvalidArgument("rochberg_map: order must be >= 2");
  auto m = std::make_shared<QMap>();
  m->name = "rochberg" + std::to_string(n);
  m->source = SpaceSpec::l2();
  m->target = n == 2 ? SpaceSpec::l2() : SpaceSpec::twisted_sum(rochberg_map(w, n - 1));
  m->target_blocks = n - 1;
  m->linear = true;
  if (n == 2) m->diagonal = DiagonalForm{symmetric_kothe_multipliers(w), false};
  m->fn = [w, n](const Vector& x) { return concat(rochberg_differential(x, w, n)); };
  return m;
}

// ---------------------------------------------------------------------------
// Selectors for the catalog maps
// ---------------------------------------------------------------------------

namespace detail {

// Solves p t log(1/t) = c for t in (0, 1/e], 0 <= c <= p/e. With u = -log t the
// equation reads u - log u = log(p/c), increasing in u >= 1.
inline double kp_small_root(double c, double p) {
  if (c <= 0.0) return 0.0;
  const double target = std::log(p / c);
  if (target <= 1.0) return std::exp(-1.0);
  double lo = 1.0, hi = 2.0 * target + 2.0;
  double u = target + std::log(target);
  for (int it = 0; it < 100; ++it) {
    const double g = u - std::log(u) - target;
    if (g > 0.0) hi = u; else lo = u;
    const double step = g / (1.0 - 1.0 / u);
    double next = u - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) <= 1e-15 * u) {
      u = next;
      break;
    }
    u = next;
  }
  return std::exp(-u);
}

}  // namespace detail

// Selector for KP on l_p: looks for x with KP x = beta, taking for every
// coordinate the root of p t log(s/t) = |beta_i| below s/e with sign opposite
// to beta_i, where s = |x|_p must be self-consistent. s -> |x(s)|_p / s is
// decreasing, so the fixed point is located by bisection on log s. When no
// fixed point exists on that branch the better of x(s_min) and 0 is returned.
inline WitnessPtr kp_witness(double p = 2.0, double rel_tol = 1e-10, int max_iter = 200) {
  auto j = std::make_shared<WitnessFn>();
  j->name = "kp-fixed-point";
  j->for_map = p == 2.0 ? "kp" : "kp_p" + std::to_string(p);
  j->find = [p, rel_tol, max_iter](const Vector& beta) -> WitnessOutcome {
    const std::size_t n = beta.dim();
    double bmax = 0.0;
    for (double b : beta.entries()) bmax = std::max(bmax, std::abs(b));
    if (bmax == 0.0) return {Vector::zeros(n), {true, 0, 0.0, "zero input"}};

    auto x_at = [&](double s) {
      return map_entries(beta, [&](double b) {
        const double t = s * detail::kp_small_root(std::abs(b) / s, p);
        return b > 0.0 ? -t : (b < 0.0 ? t : 0.0);
      });
    };
    auto ratio = [&](double s) { return lp_norm(x_at(s), p) / s; };

    const double s_min = bmax * std::exp(1.0) / p;
    if (ratio(s_min) < 1.0) {
      Vector cand = x_at(s_min);
      const QMapPtr k = kp_map(p);
      const double with = twisted_norm({beta, cand}, *k);
      const double without = twisted_norm({beta, Vector::zeros(n)}, *k);
      return {with < without ? cand : Vector::zeros(n), {true, 0, 0.0, "no fixed point on the small-root branch"}};
    }
    double lo = s_min;
    double hi = std::max(s_min, lp_norm(beta, p) / (1.0 + std::log(static_cast<double>(n))));
    int it = 0;
    while (ratio(hi) >= 1.0) {
      lo = hi;
      hi *= 2.0;
      if (++it > max_iter) return {x_at(hi), {false, it, ratio(hi) - 1.0, "could not bracket the fixed point"}};
    }
    it = 0;
    while (hi / lo - 1.0 > rel_tol) {
      if (++it > max_iter) {
        const double s = std::sqrt(lo * hi);
        return {x_at(s), {false, it, std::abs(ratio(s) - 1.0), "bisection budget exhausted"}};
      }
      const double mid = std::sqrt(lo * hi);
      if (ratio(mid) >= 1.0) lo = mid; else hi = mid;
    }
    const double s = std::sqrt(lo * hi);
    return {x_at(s), {true, it, std::abs(ratio(s) - 1.0), ""}};
  };
  return j;
}

// T_{z,theta}^{-1} = T_{theta,z}
inline WitnessPtr translation_witness(double z, double theta, const WeightVector& w) {
  auto j = std::make_shared<WitnessFn>();
  j->name = "translation-swap";
  j->for_map = "translation";
  j->find = [z, theta, w](const Vector& beta) -> WitnessOutcome {
    return {translation(beta, theta, z, w), {true, 0, 0.0, ""}};
  };
  return j;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

struct CatalogParams {
  double p = 2.0;
  double z = 0.25;
  double theta = 0.5;
  std::size_t order = 3;
  std::string weights = "harmonic";  // or "dyadic"

  friend bool operator==(const CatalogParams&, const CatalogParams&) = default;
};

struct CatalogEntry {
  QMapPtr map;
  WitnessPtr witness;  // may be null
};

inline WeightVector catalog_weights(const CatalogParams& params, std::size_t dim) {
  if (params.weights == "harmonic") return WeightVector::harmonic(dim);
  if (params.weights == "dyadic") return WeightVector::dyadic(dim);
  throw InvalidArgument("unknown weight family '" + params.weights + "'");
}

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"kp", "kp12", "kp21", "kothe", "translation", "rochberg"};
  return names;
}

inline CatalogEntry make_catalog_entry(const std::string& name, std::size_t dim, const CatalogParams& params = {}) {
  if (name == "kp") return {kp_map(params.p), kp_witness(params.p)};
  if (name == "kp12") return {kp12_map(), nullptr};
  if (name == "kp21") return {kp21_map(), nullptr};
  if (name == "kothe") return {symmetric_kothe_map(catalog_weights(params, dim)), nullptr};
  if (name == "translation") {
    const WeightVector w = catalog_weights(params, dim);
    return {translation_map(params.z, params.theta, w), translation_witness(params.z, params.theta, w)};
  }
  if (name == "rochberg") return {rochberg_map(catalog_weights(params, dim), params.order), nullptr};
  throw InvalidArgument("unknown map '" + name + "' (known: kp, kp12, kp21, kothe, translation, rochberg)");
}

}  // namespace twistlab
