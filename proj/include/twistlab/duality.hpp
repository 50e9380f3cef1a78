#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "twistlab/catalog.hpp"
#include "twistlab/error.hpp"
#include "twistlab/estimate.hpp"
#include "twistlab/inverse.hpp"
#include "twistlab/qmap.hpp"
#include "twistlab/sampling.hpp"
#include "twistlab/vector.hpp"

namespace twistlab {

// Dual of an lp or weighted l2 space under the coordinate pairing.
inline SpaceSpec dual_space(const SpaceSpec& s) {
  if (const auto* lp = s.as<space::Lp>()) {
    if (lp->p == 1.0) return SpaceSpec::lp(kInfinity);
    if (lp->p == kInfinity) return SpaceSpec::lp(1.0);
    return SpaceSpec::lp(lp->p / (lp->p - 1.0));
  }
  if (const auto* wl = s.as<space::WeightedL2>())
    return SpaceSpec::weighted_l2(map_entries(wl->w, [](double w) { return 1.0 / w; }));
  throw Unsupported("dual_space: no closed-form dual for " + s.describe());
}

// Omega: X ~> Y together with a candidate dual Phi: Y* ~> X*.
struct DualPairSpec {
  QMapPtr omega;
  QMapPtr phi;

  void validate() const {
    if (!omega || !phi) throw InvalidArgument("DualPairSpec: both maps are required");
    if (omega->source_blocks != phi->target_blocks || omega->target_blocks != phi->source_blocks)
      throw InvalidArgument("DualPairSpec: '" + phi->name + "' does not act between the duals of '" + omega->name +
                            "'");
  }
  DualPairSpec transposed() const { return {phi, omega}; }
};

// <Omega x, y> + <x, Phi y>
inline double duality_defect_value(const DualPairSpec& spec, const Vector& x, const Vector& y) {
  return dot((*spec.omega)(x), y) + dot(x, (*spec.phi)(y));
}

inline double duality_defect_ratio(const DualPairSpec& spec, const Vector& x, const Vector& y) {
  const double d = norm(spec.omega->source, x) * norm(dual_space(spec.omega->target), y);
  if (!(d > 0.0)) throw InvalidArgument("duality_defect_ratio: zero input");
  return std::abs(duality_defect_value(spec, x, y)) / d;
}

// sup |<Omega x, y> + <x, Phi y>| / (|x|_X |y|_{Y*})
inline EstimateReport duality_defect(const DualPairSpec& spec, const Sampler& sampler, std::size_t n) {
  spec.validate();
  const SpaceSpec xs = spec.omega->source;
  const SpaceSpec ys = dual_space(spec.omega->target);
  Generator gen = [xs, ys](Rng& rng, SamplerKind kind, std::size_t dim) {
    Vector x = sample_unit(xs, rng, kind, dim);
    Vector y = (kind != SamplerKind::gaussian && rng.coin(0.2)) ? normalize(x, ys) : companion_unit(x, ys, rng, kind, dim);
    return std::vector<Vector>{std::move(x), std::move(y)};
  };
  return estimate_sup("duality:" + spec.omega->name + "|" + spec.phi->name, sampler, n, gen,
                      [&spec](std::span<const Vector> in) { return duality_defect_ratio(spec, in[0], in[1]); });
}

// ---- order two ----

// <KP_{1,2}(x), w> + <x, KP_{2,1}(u_2 w)> with the reversal pairing in the first
// term. With keep_u = false the u_2 inside is dropped.
inline double kp_order2_display(const Vector& x, const Vector& w_first, const Vector& w_second, bool keep_u = true) {
  require_same_dim("kp_order2_display", x, w_first);
  require_same_dim("kp_order2_display", x, w_second);
  const auto [a2, a1] = kp_12(x);
  const RochbergVector w({w_first, w_second});
  const double first = reversal_pairing(RochbergVector({a2, a1}), w);
  const RochbergVector arg = keep_u ? u_n(w) : w;
  return first + dot(x, kp_21(arg.blocks[0], arg.blocks[1]));
}

// |display| / (|x|_2 |z|_{Z_2}) for z in Z_2 paired through w = u_2 z.
inline double kp_order2_ratio(const Vector& x, const Vector& z_flat, bool keep_u = true) {
  const auto parts = split_blocks(z_flat, 2);
  const RochbergVector w = u_n(RochbergVector({parts[0], parts[1]}));
  const double d = l2_norm(x) * kp_rochberg_norm(RochbergVector({parts[0], parts[1]}));
  if (!(d > 0.0)) throw InvalidArgument("kp_order2_ratio: zero input");
  return std::abs(kp_order2_display(x, w.blocks[0], w.blocks[1], keep_u)) / d;
}

inline EstimateReport kp_order2_duality_defect(const Sampler& sampler, std::size_t n, bool keep_u = true) {
  const SpaceSpec z2 = SpaceSpec::twisted_sum(kp_map(2.0));
  Generator gen = [z2](Rng& rng, SamplerKind kind, std::size_t dim) {
    Vector z = sample_unit(z2, rng, kind, dim);
    Vector base = split_blocks(z, 2)[1];
    Vector x = (kind != SamplerKind::gaussian && rng.coin() && !base.is_zero())
                   ? normalize(base, SpaceSpec::l2())
                   : sample_unit(SpaceSpec::l2(), rng, kind, dim);
    return std::vector<Vector>{std::move(x), std::move(z)};
  };
  return estimate_sup(keep_u ? "kp-order2" : "kp-order2-without-u", sampler, n, gen,
                      [keep_u](std::span<const Vector> in) { return kp_order2_ratio(in[0], in[1], keep_u); });
}

// ---- Z_n self-duality ----

// R_1 = l2, R_2 = Z_2, R_3 = the twisted sum of Z_2 and l2 by KP_{1,2}.
inline SpaceSpec kp_rochberg_space(std::size_t n) {
  switch (n) {
    case 1: return SpaceSpec::l2();
    case 2: return SpaceSpec::twisted_sum(kp_map(2.0));
    case 3: return SpaceSpec::twisted_sum(kp12_map());
    default: throw InvalidArgument("kp_rochberg_space: order must be 1, 2 or 3");
  }
}

struct ZnReport {
  EstimateReport pairing;       // sup |<u_n a, b>| over unit a, b in R_n
  double sign_deviation = 0.0;  // max |u_n u_n a - a| and the explicit n = 1, 2 forms
  bool sign_identities = false;
};

inline ZnReport zn_selfduality_check(std::size_t n, const Sampler& sampler, std::size_t samples) {
  if (n < 1 || n > 3) throw InvalidArgument("zn_selfduality_check: order must be 1, 2 or 3");
  const SpaceSpec rn = kp_rochberg_space(n);
  Generator gen = [rn](Rng& rng, SamplerKind kind, std::size_t dim) {
    Vector a = sample_unit(rn, rng, kind, dim);
    Vector b = sample_unit(rn, rng, kind, dim);
    return std::vector<Vector>{std::move(a), std::move(b)};
  };
  auto value = [n](std::span<const Vector> in) {
    const RochbergVector a = RochbergVector::from_flat(in[0], n);
    const RochbergVector b = RochbergVector::from_flat(in[1], n);
    return std::abs(reversal_pairing(u_n(a), b));
  };

  ZnReport r;
  r.pairing = estimate_sup("zn-selfduality:" + std::to_string(n), sampler, samples, gen, value);

  double dev = 0.0;
  const std::size_t checks = std::min<std::size_t>(samples, 64);
  for (std::size_t i = 0; i < checks; ++i) {
    const auto in = sampler.draw(stream_id("zn-signs"), i, gen);
    const RochbergVector a = RochbergVector::from_flat(in[0], n);
    const RochbergVector uu = u_n(u_n(a));
    dev = std::max(dev, l2_norm(uu.flat() - a.flat()));
    const RochbergVector ua = u_n(a);
    if (n == 1) dev = std::max(dev, l2_norm(ua.flat() - a.flat()));
    if (n == 2) {
      dev = std::max(dev, l2_norm(ua.blocks[0] + a.blocks[0]));
      dev = std::max(dev, l2_norm(ua.blocks[1] - a.blocks[1]));
    }
  }
  r.sign_deviation = dev;
  r.sign_identities = dev == 0.0;
  return r;
}

// ---- annihilator of the domain ----

struct PerpReport {
  double threshold = 1.0;
  std::vector<std::size_t> annihilator;  // coordinates where (0, e_j) stays tau-bounded on the twisted sum
  std::vector<std::size_t> dual_domain;  // coordinates where e_j has Dom Phi ratio <= tau
  bool equal = false;
};

// For diagonal Omega = m.(.) : l2(b) -> l2(a) and diagonal Phi = phi.(.), the
// coordinate functional e_j on Y*, lifted to the twisted sum, has norm
// max(1, |m_j| a_j / b_j); e_j lies in Dom Phi with ratio |phi_j| a_j / b_j
// (in the dual weights). Coordinates whose ratio stays below tau form the
// finite-dimensional picture of (Dom Omega)^perp and of Dom Phi.
inline PerpReport perp_domain_check(const QMap& omega, const QMap& phi, double tau) {
  if (!omega.diagonal || !phi.diagonal)
    throw Unsupported("perp_domain_check: only diagonal maps are supported ('" + omega.name + "', '" + phi.name +
                      "')");
  if (!(tau >= 1.0)) throw InvalidArgument("perp_domain_check: threshold must be >= 1");
  const std::size_t n = omega.diagonal->multipliers.dim();
  if (phi.diagonal->multipliers.dim() != n) throw DimensionMismatch("perp_domain_check", n, phi.diagonal->multipliers.dim());
  auto a = detail::l2_weights(omega.target, n);
  auto b = detail::l2_weights(omega.source, n);
  if (!a || !b) throw Unsupported("perp_domain_check: spaces must be l2-type");

  PerpReport r;
  r.threshold = tau;
  for (std::size_t j = 0; j < n; ++j) {
    const double scale = (*a)[j] / (*b)[j];
    if (std::max(1.0, std::abs(omega.diagonal->factor(j)) * scale) <= tau) r.annihilator.push_back(j);
    if (std::abs(phi.diagonal->factor(j)) * scale <= tau) r.dual_domain.push_back(j);
  }
  r.equal = r.annihilator == r.dual_domain;
  return r;
}

// Inverse of the candidate dual -Omega against the candidate dual of Omega^{-1};
// returns the largest coordinate deviation (0 when they coincide).
inline double dual_inverse_deviation(const QMapPtr& omega) {
  const QMapPtr dual = negate(omega);
  const WitnessPtr inv_of_dual = diagonal_exact_witness(*dual);
  const DiagonalForm dual_of_inv = diagonal_exact_witness(*omega)->diagonal->negated();
  double dev = 0.0;
  for (std::size_t i = 0; i < dual_of_inv.multipliers.dim(); ++i)
    dev = std::max(dev, std::abs(inv_of_dual->diagonal->factor(i) - dual_of_inv.factor(i)));
  return dev;
}

}  // namespace twistlab
