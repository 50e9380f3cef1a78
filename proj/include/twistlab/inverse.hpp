#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "twistlab/error.hpp"
#include "twistlab/estimate.hpp"
#include "twistlab/qmap.hpp"
#include "twistlab/sampling.hpp"
#include "twistlab/vector.hpp"

namespace twistlab {

// ---- selectors ----

// J(beta) = 0, always admissible: |(beta, 0)| = |beta|_Y.
inline WitnessPtr zero_witness(const QMap& omega) {
  auto j = std::make_shared<WitnessFn>();
  j->name = "zero";
  j->for_map = omega.name;
  j->find = [src = omega.source_blocks, tgt = omega.target_blocks](const Vector& beta) -> WitnessOutcome {
    return {Vector::zeros(beta.dim() / tgt * src), {true, 0, 0.0, ""}};
  };
  return j;
}

// J(beta) = m^{-1} beta for a diagonal map with no vanishing multiplier.
inline WitnessPtr diagonal_exact_witness(const QMap& omega) {
  if (!omega.diagonal) throw Unsupported("diagonal_exact_witness: '" + omega.name + "' is not diagonal");
  std::vector<std::size_t> zeros;
  const Vector& m = omega.diagonal->multipliers;
  for (std::size_t i = 0; i < m.dim(); ++i)
    if (m[i] == 0.0) zeros.push_back(i);
  if (!zeros.empty()) throw InversionRefused(omega.name, std::move(zeros));

  auto j = std::make_shared<WitnessFn>();
  j->name = "diagonal-exact";
  j->for_map = omega.name;
  j->diagonal = omega.diagonal->inverted();
  j->find = [d = *j->diagonal](const Vector& beta) -> WitnessOutcome { return {d.apply(beta), {true, 0, 0.0, ""}}; };
  return j;
}

// Exact minimiser of the twisted norm over x, for diagonal maps between l2 spaces.
inline WitnessPtr diagonal_range_witness(const QMapPtr& omega) {
  if (!omega->diagonal) throw Unsupported("diagonal_range_witness: '" + omega->name + "' is not diagonal");
  auto j = std::make_shared<WitnessFn>();
  j->name = "diagonal-minimiser";
  j->for_map = omega->name;
  j->find = [omega](const Vector& beta) -> WitnessOutcome {
    auto x = diagonal_range_minimizer(beta, *omega);
    if (!x) return {Vector::zeros(beta.dim()), {false, 0, 0.0, "spaces are not l2-type"}};
    return {*x, {true, 0, 0.0, ""}};
  };
  return j;
}

// J(x) = Omega x, the selector for Omega^{-1}: (x, Omega x) has zero defect.
inline WitnessPtr forward_witness(const QMapPtr& omega) {
  auto j = std::make_shared<WitnessFn>();
  j->name = "forward";
  j->for_map = omega->name + "^-1";
  j->diagonal = omega->diagonal;
  j->find = [omega](const Vector& x) -> WitnessOutcome { return {(*omega)(x), {true, 0, 0.0, ""}}; };
  return j;
}

// ---- inverse ----

// Omega^{-1}: Ran Omega ~> Dom Omega, beta -> J(beta). The witness must converge
// on every probe or the construction is refused.
inline QMapPtr make_inverse(const QMapPtr& omega, const WitnessPtr& j, std::span<const Vector> probes = {},
                            double tol_opt = 1e-12) {
  if (!j) throw InvalidArgument("make_inverse: no witness supplied for '" + omega->name + "'");
  for (const auto& beta : probes) {
    WitnessOutcome out = j->find(beta);
    if (!out.diagnostics.converged) throw WitnessDivergence(omega->name, out.diagnostics);
  }
  auto m = std::make_shared<QMap>();
  m->name = omega->name + "^-1";
  m->source = SpaceSpec::range(omega, j, tol_opt);
  m->target = SpaceSpec::domain(omega);
  m->source_blocks = omega->target_blocks;
  m->target_blocks = omega->source_blocks;
  m->diagonal = j->diagonal;
  m->linear = j->diagonal.has_value();
  m->fn = [j](const Vector& beta) { return j->solve(beta); };
  return m;
}

// |(beta, J beta)|_Omega / |beta|_R over sampled beta.
inline EstimateReport selector_constant(const QMap& omega, const WitnessFn& j, const Sampler& sampler, std::size_t n) {
  Generator gen = [&omega](Rng& rng, SamplerKind kind, std::size_t dim) {
    return std::vector<Vector>{split_twisted(sample_twisted_flat(omega, rng, kind, dim), omega).beta};
  };
  return estimate_sup("selector:" + omega.name + ":" + j.name, sampler, n, gen,
                      [&omega, &j](std::span<const Vector> in) {
                        const Vector& beta = in[0];
                        const double r = range_norm_upper(beta, omega, &j).value;
                        if (r == 0.0) return 0.0;
                        return twisted_norm({beta, j.solve(beta)}, omega) / r;
                      });
}

// |U(beta, x)|_{Omega^{-1}} = |x - J beta|_D + |beta|_R
inline double u_image_norm(const TwistedVector& v, const QMap& omega, const WitnessFn& j) {
  return domain_norm(v.x - j.solve(v.beta), omega) + range_norm_upper(v.beta, omega, &j).value;
}

struct UIsomorphismReport {
  EstimateReport forward;   // sup |Uv| / |v|
  EstimateReport backward;  // sup |v| / |Uv|
  EstimateReport triangle;  // quasi-triangle constant C of the twisted sum
  EstimateReport selector;  // |B|, B(beta) = (beta, J beta)
  double bound = 0.0;       // C + C|B| + 1

  bool within_bound(double rel_slack = 0.0) const {
    const double limit = bound * (1.0 + rel_slack);
    return forward.sup_value <= limit && backward.sup_value <= limit;
  }
};

inline UIsomorphismReport check_U_isomorphism(const QMap& omega, const WitnessFn& j, const Sampler& sampler,
                                              std::size_t n) {
  Generator gen = [&omega](Rng& rng, SamplerKind kind, std::size_t dim) {
    return std::vector<Vector>{sample_twisted_flat(omega, rng, kind, dim)};
  };
  auto ratio = [&omega, &j](const Vector& flat, bool fwd) {
    const TwistedVector v = split_twisted(flat, omega);
    const double a = twisted_norm(v, omega);
    const double b = u_image_norm(v, omega, j);
    if (fwd) return a > 0.0 ? b / a : 0.0;
    return b > 0.0 ? a / b : 0.0;
  };
  UIsomorphismReport r;
  r.forward = estimate_sup("U-forward:" + omega.name, sampler, n, gen,
                           [&](std::span<const Vector> in) { return ratio(in[0], true); });
  r.backward = estimate_sup("U-backward:" + omega.name, sampler, n, gen,
                            [&](std::span<const Vector> in) { return ratio(in[0], false); });
  r.triangle = twisted_triangle_constant(omega, sampler, n);
  r.selector = selector_constant(omega, j, sampler, n);
  const double c = r.triangle.sup_value;
  r.bound = c + c * r.selector.sup_value + 1.0;
  return r;
}

// sup |Omega x - (Omega^{-1})^{-1} x| / |x|, the inner inverse built from j and
// the outer one from j2.
inline EstimateReport inverse_of_inverse_defect(const QMapPtr& omega, const WitnessPtr& j, const WitnessPtr& j2,
                                                const Sampler& sampler, std::size_t n) {
  const QMapPtr inv = make_inverse(omega, j);
  const QMapPtr invinv = make_inverse(inv, j2);
  auto m = std::make_shared<QMap>(*invinv);
  // Compare on the source and target of Omega itself.
  m->source = omega->source;
  m->target = omega->target;
  return bounded_equivalence_constant(*omega, *m, sampler, n);
}

}  // namespace twistlab
