#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <type_traits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "twistlab/error.hpp"
#include "twistlab/spaces.hpp"
#include "twistlab/vector.hpp"

namespace twistlab {

struct QMap;
struct WitnessFn;

namespace space {
struct Lp {
  double p = 2.0;
};
struct WeightedL2 {
  Vector w;
};
struct Orlicz {
  OrliczFn phi;
};
// |x|_X + |Omega x|_Y
struct Domain {
  std::shared_ptr<const QMap> map;
};
// infimal twisted norm over witnesses, realised as a certified upper bound
struct Range {
  std::shared_ptr<const QMap> map;
  std::shared_ptr<const WitnessFn> witness;
  double tol_opt = 1e-12;
};
// pairs (beta, x) stored as concat(beta, x), quasi-normed by |beta - Omega x|_Y + |x|_X
struct TwistedSum {
  std::shared_ptr<const QMap> map;
};
}  // namespace space

class SpaceSpec {
 public:
  using Kind = std::variant<space::Lp, space::WeightedL2, space::Orlicz, space::Domain,
                            space::Range, space::TwistedSum>;

  SpaceSpec() : kind_(space::Lp{2.0}) {}
  explicit SpaceSpec(Kind k) : kind_(std::move(k)) {}

  static SpaceSpec lp(double p) {
    if (!(p >= 1.0)) throw InvalidArgument("SpaceSpec::lp: p must be >= 1");
    return SpaceSpec(space::Lp{p});
  }
  static SpaceSpec l2() { return lp(2.0); }
  static SpaceSpec weighted_l2(Vector w) {
    require_positive_weights("SpaceSpec::weighted_l2", w);
    return SpaceSpec(space::WeightedL2{std::move(w)});
  }
  static SpaceSpec orlicz(OrliczFn phi) {
    phi.validate();
    return SpaceSpec(space::Orlicz{phi});
  }
  static SpaceSpec domain(std::shared_ptr<const QMap> m) { return SpaceSpec(space::Domain{std::move(m)}); }
  static SpaceSpec range(std::shared_ptr<const QMap> m, std::shared_ptr<const WitnessFn> j, double tol_opt = 1e-12) {
    return SpaceSpec(space::Range{std::move(m), std::move(j), tol_opt});
  }
  static SpaceSpec twisted_sum(std::shared_ptr<const QMap> m) {
    return SpaceSpec(space::TwistedSum{std::move(m)});
  }

  const Kind& kind() const { return kind_; }
  template <class T>
  const T* as() const {
    return std::get_if<T>(&kind_);
  }

  std::string describe() const;

 private:
  Kind kind_;
};

// Diagonal linear action x -> m.x (or x / m when reciprocal). Keeping the
// reciprocal symbolic makes the inverse of an inverse bit-identical to the
// original map.
struct DiagonalForm {
  Vector multipliers;
  bool reciprocal = false;

  double factor(std::size_t i) const { return reciprocal ? 1.0 / multipliers[i] : multipliers[i]; }

  Vector apply(const Vector& x) const {
    require_same_dim("DiagonalForm::apply", x, multipliers);
    if (reciprocal) return zip_with(x, multipliers, [](double a, double m) { return a / m; });
    return hadamard(multipliers, x);
  }

  DiagonalForm inverted() const { return DiagonalForm{multipliers, !reciprocal}; }
  DiagonalForm negated() const { return DiagonalForm{-multipliers, reciprocal}; }
};

// Homogeneous map X ~> Y with values in a coordinate ambient space. Source and
// target vectors are tuples of equal-dimension blocks (one block for ordinary
// sequence spaces, several for Rochberg-type spaces).
struct QMap {
  std::string name;
  SpaceSpec source;
  SpaceSpec target;
  std::size_t source_blocks = 1;
  std::size_t target_blocks = 1;
  std::function<Vector(const Vector&)> fn;
  std::optional<DiagonalForm> diagonal;
  bool linear = false;

  Vector operator()(const Vector& x) const {
    if (x.dim() % source_blocks != 0)
      throw InvalidArgument(name + ": input dimension " + std::to_string(x.dim()) +
                            " is not a multiple of " + std::to_string(source_blocks));
    Vector y = fn(x);
    const std::size_t expected = x.dim() / source_blocks * target_blocks;
    if (y.dim() != expected) throw DimensionMismatch(name + " output", expected, y.dim());
    return y;
  }

  std::size_t base_dim(const Vector& x) const { return x.dim() / source_blocks; }
};

using QMapPtr = std::shared_ptr<const QMap>;

struct WitnessOutcome {
  Vector x;
  WitnessDiagnostics diagnostics;
};

// Homogeneous selector beta -> x with (beta, x) in the twisted sum, carrying
// convergence diagnostics.
struct WitnessFn {
  std::string name;
  std::string for_map;
  std::function<WitnessOutcome(const Vector&)> find;
  // Set when the selector is the exact diagonal inverse of a diagonal map.
  std::optional<DiagonalForm> diagonal;

  // Witness or WitnessDivergence.
  Vector solve(const Vector& beta) const {
    WitnessOutcome out = find(beta);
    if (!out.diagnostics.converged) throw WitnessDivergence(for_map, out.diagnostics);
    return std::move(out.x);
  }
};

using WitnessPtr = std::shared_ptr<const WitnessFn>;

struct TwistedVector {
  Vector beta;
  Vector x;
};

inline double norm(const SpaceSpec& space, const Vector& v);

inline double twisted_norm(const TwistedVector& v, const QMap& omega) {
  const std::size_t n = omega.base_dim(v.x);
  if (v.x.dim() != n * omega.source_blocks)
    throw DimensionMismatch("twisted_norm source", n * omega.source_blocks, v.x.dim());
  if (v.beta.dim() != n * omega.target_blocks)
    throw DimensionMismatch("twisted_norm target", n * omega.target_blocks, v.beta.dim());
  return norm(omega.target, v.beta - omega(v.x)) + norm(omega.source, v.x);
}

inline double domain_norm(const Vector& x, const QMap& omega) {
  return norm(omega.source, x) + norm(omega.target, omega(x));
}

inline TwistedVector split_twisted(const Vector& flat, const QMap& omega) {
  const std::size_t blocks = omega.source_blocks + omega.target_blocks;
  auto parts = split_blocks(flat, blocks);
  std::vector<Vector> beta(parts.begin(), parts.begin() + static_cast<std::ptrdiff_t>(omega.target_blocks));
  std::vector<Vector> x(parts.begin() + static_cast<std::ptrdiff_t>(omega.target_blocks), parts.end());
  return {concat(beta), concat(x)};
}

inline Vector flatten(const TwistedVector& v) { return concat(v.beta, v.x); }

namespace detail {

// Coordinate weights of an l2-type space, or nullopt for anything else.
inline std::optional<Vector> l2_weights(const SpaceSpec& s, std::size_t dim) {
  if (const auto* lp = s.as<space::Lp>(); lp && lp->p == 2.0) return Vector::constant(dim, 1.0);
  if (const auto* wl = s.as<space::WeightedL2>(); wl && wl->w.dim() == dim) return wl->w;
  return std::nullopt;
}

}  // namespace detail

// Exact minimiser of |beta - m.x|_Y + |x|_X for a diagonal map between (weighted)
// l2 spaces. After the substitution x~ = b.x, beta~ = a.beta the optimality
// conditions force x~_i = c m~_i beta~_i / (1 + c m~_i^2) for one scalar c >= 0,
// so the problem collapses to a one-dimensional search over log c.
inline std::optional<Vector> diagonal_range_minimizer(const Vector& beta, const QMap& omega,
                                                      double tol_opt = 1e-12) {
  if (!omega.diagonal || omega.source_blocks != 1 || omega.target_blocks != 1) return std::nullopt;
  const std::size_t n = beta.dim();
  auto a = detail::l2_weights(omega.target, n);
  auto b = detail::l2_weights(omega.source, n);
  if (!a || !b) return std::nullopt;

  std::vector<double> bt(n), mt(n);
  for (std::size_t i = 0; i < n; ++i) {
    bt[i] = (*a)[i] * beta[i];
    mt[i] = (*a)[i] * omega.diagonal->factor(i) / (*b)[i];
  }
  auto point = [&](double c, std::vector<double>& xt) {
    double rr = 0.0, xx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = 1.0 + c * mt[i] * mt[i];
      const double r = bt[i] / d;
      xt[i] = c * mt[i] * bt[i] / d;
      rr += r * r;
      xx += xt[i] * xt[i];
    }
    return std::sqrt(rr) + std::sqrt(xx);
  };
  std::vector<double> xt(n), best_x(n, 0.0);
  double best = l2_norm(Vector(bt));  // c = 0, x = 0

  {  // c -> infinity
    double rr = 0.0, xx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mt[i] != 0.0) {
        xt[i] = bt[i] / mt[i];
        xx += xt[i] * xt[i];
      } else {
        xt[i] = 0.0;
        rr += bt[i] * bt[i];
      }
    }
    const double f = std::sqrt(rr) + std::sqrt(xx);
    if (f < best) {
      best = f;
      best_x = xt;
    }
  }

  constexpr double t_min = -60.0, t_max = 60.0, step = 0.5;
  const int steps = static_cast<int>((t_max - t_min) / step);
  int best_k = -1;
  double grid_best = kInfinity;
  for (int k = 0; k <= steps; ++k) {
    const double f = point(std::exp(t_min + step * k), xt);
    if (f < grid_best) {
      grid_best = f;
      best_k = k;
    }
  }
  double lo = t_min + step * std::max(best_k - 1, 0);
  double hi = t_min + step * std::min(best_k + 1, steps);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double t1 = hi - g * (hi - lo), t2 = lo + g * (hi - lo);
  double f1 = point(std::exp(t1), xt), f2 = point(std::exp(t2), xt);
  for (int it = 0; it < 200 && hi - lo > tol_opt; ++it) {
    if (f1 <= f2) {
      hi = t2;
      t2 = t1;
      f2 = f1;
      t1 = hi - g * (hi - lo);
      f1 = point(std::exp(t1), xt);
    } else {
      lo = t1;
      t1 = t2;
      f1 = f2;
      t2 = lo + g * (hi - lo);
      f2 = point(std::exp(t2), xt);
    }
  }
  const double f = point(std::exp(0.5 * (lo + hi)), xt);
  if (f < best) {
    best = f;
    best_x = xt;
  }
  for (std::size_t i = 0; i < n; ++i) best_x[i] /= (*b)[i];
  return Vector(std::move(best_x));
}

struct RangeBound {
  double value = 0.0;
  Vector witness;
  std::string provenance;
};

// Certified upper bound on |beta|_R: the smallest twisted norm among the
// witness J(beta), the zero witness, any extra candidates, and (for diagonal
// maps between l2 spaces) the exact minimiser.
inline RangeBound range_norm_upper(const Vector& beta, const QMap& omega, const WitnessFn* witness,
                                   std::span<const Vector> extra_candidates = {}, double tol_opt = 1e-12) {
  if (beta.dim() % omega.target_blocks != 0)
    throw InvalidArgument("range_norm_upper: target block structure mismatch");
  const std::size_t n = beta.dim() / omega.target_blocks;
  Vector zero = Vector::zeros(n * omega.source_blocks);
  RangeBound best{twisted_norm({beta, zero}, omega), zero, "zero"};
  auto consider = [&](const Vector& x, const char* tag) {
    const double v = twisted_norm({beta, x}, omega);
    if (v < best.value) best = {v, x, tag};
  };
  if (witness) consider(witness->solve(beta), "witness");
  for (const auto& c : extra_candidates) consider(c, "candidate");
  if (auto x = diagonal_range_minimizer(beta, omega, tol_opt)) consider(*x, "diagonal-exact");
  return best;
}

inline double dual_norm(const SpaceSpec& s, const Vector& y) {
  if (const auto* lp = s.as<space::Lp>()) {
    const double q = lp->p == 1.0 ? kInfinity : (lp->p == kInfinity ? 1.0 : lp->p / (lp->p - 1.0));
    return lp_norm(y, q);
  }
  if (const auto* wl = s.as<space::WeightedL2>()) {
    return weighted_l2_norm(y, map_entries(wl->w, [](double w) { return 1.0 / w; }));
  }
  throw Unsupported("dual_norm: only lp and weighted l2 spaces have a closed-form dual here (" +
                    s.describe() + ")");
}

inline double norm(const SpaceSpec& s, const Vector& v) {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, space::Lp>) {
          return lp_norm(v, k.p);
        } else if constexpr (std::is_same_v<K, space::WeightedL2>) {
          return weighted_l2_norm(v, k.w);
        } else if constexpr (std::is_same_v<K, space::Orlicz>) {
          return luxemburg_norm(v, k.phi);
        } else if constexpr (std::is_same_v<K, space::Domain>) {
          return domain_norm(v, *k.map);
        } else if constexpr (std::is_same_v<K, space::Range>) {
          return range_norm_upper(v, *k.map, k.witness.get(), {}, k.tol_opt).value;
        } else {
          return twisted_norm(split_twisted(v, *k.map), *k.map);
        }
      },
      s.kind());
}

inline std::string SpaceSpec::describe() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, space::Lp>) {
          return k.p == kInfinity ? "l_inf" : "l_" + std::to_string(k.p);
        } else if constexpr (std::is_same_v<K, space::WeightedL2>) {
          return "l_2(w)";
        } else if constexpr (std::is_same_v<K, space::Orlicz>) {
          return "orlicz(" + to_string(k.phi.mode) + ")";
        } else if constexpr (std::is_same_v<K, space::Domain>) {
          return "Dom " + k.map->name;
        } else if constexpr (std::is_same_v<K, space::Range>) {
          return "Ran " + k.map->name;
        } else {
          return "twisted(" + k.map->name + ")";
        }
      },
      kind_);
}

// ---- constructors for derived maps ----

inline QMapPtr make_diagonal_map(std::string name, DiagonalForm d, SpaceSpec source, SpaceSpec target) {
  auto m = std::make_shared<QMap>();
  m->name = std::move(name);
  m->source = std::move(source);
  m->target = std::move(target);
  m->diagonal = d;
  m->linear = true;
  m->fn = [d](const Vector& x) { return d.apply(x); };
  return m;
}

// x -> -Omega x
inline QMapPtr negate(const QMapPtr& omega) {
  auto m = std::make_shared<QMap>(*omega);
  m->name = "-" + omega->name;
  if (omega->diagonal) m->diagonal = omega->diagonal->negated();
  m->fn = [inner = omega](const Vector& x) { return -(*inner)(x); };
  return m;
}

// x -> Omega x + b x, a bounded linear perturbation
inline QMapPtr add_scalar_multiple(const QMapPtr& omega, double b) {
  if (omega->source_blocks != omega->target_blocks)
    throw InvalidArgument("add_scalar_multiple: source and target block counts differ");
  auto m = std::make_shared<QMap>(*omega);
  m->name = omega->name + "+" + std::to_string(b) + "I";
  if (omega->diagonal && !omega->diagonal->reciprocal) {
    m->diagonal = DiagonalForm{map_entries(omega->diagonal->multipliers, [b](double v) { return v + b; }), false};
  } else {
    m->diagonal.reset();
  }
  m->fn = [inner = omega, b](const Vector& x) { return (*inner)(x) + b * x; };
  return m;
}

}  // namespace twistlab
