#include <catch_amalgamated.hpp>

#include <cmath>

#include "twistlab/qmap.hpp"
#include "twistlab/sampling.hpp"
#include "twistlab/spaces.hpp"

using namespace twistlab;
using Catch::Approx;

TEST_CASE("lp_norm examples") {
  CHECK(lp_norm(Vector{3.0, 4.0}, 2.0) == 5.0);
  CHECK(lp_norm(Vector::constant(9, 1.0), 2.0) == Approx(3.0).epsilon(1e-15));
  CHECK(lp_norm(Vector{1.0, -2.0, 3.0}, kInfinity) == 3.0);
  CHECK(lp_norm(Vector{1.0, -2.0, 3.0}, 1.0) == 6.0);
  CHECK_THROWS_AS(lp_norm(Vector{1.0}, 0.5), InvalidArgument);
}

TEST_CASE("lp_norm does not overflow on large entries") {
  CHECK(lp_norm(Vector{3e200, 4e200}, 2.0) == Approx(5e200));
}

TEST_CASE("weighted_l2_norm examples") {
  CHECK(weighted_l2_norm(Vector{1.0, 1.0}, Vector{1.0, 1.0}) == Approx(std::sqrt(2.0)));
  CHECK(weighted_l2_norm(Vector{1.0, 0.0}, Vector{3.0, 7.0}) == 3.0);
  CHECK(weighted_l2_norm(Vector{1.0, 1.0}, Vector{2.0, 2.0}) == Approx(2.0 * std::sqrt(2.0)));
  CHECK_THROWS_AS(weighted_l2_norm(Vector{1.0, 1.0}, Vector{1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(weighted_l2_norm(Vector{1.0, 1.0}, Vector{1.0, -1.0}), InvalidArgument);
  CHECK_THROWS_AS(weighted_l2_norm(Vector{1.0, 1.0}, Vector{1.0}), DimensionMismatch);
}

TEST_CASE("orlicz_eval examples") {
  const OrliczFn f = OrliczFn::fp(2.0);
  CHECK(orlicz_eval(f, 0.0) == 0.0);
  CHECK(orlicz_eval(f, std::exp(-2.0)) == Approx(4.0 * std::exp(-4.0)).epsilon(1e-14));
  const double lambda = 0.7;
  CHECK(orlicz_eval(f, lambda) == Approx(orlicz_eval(f, f.t0) + f.s0 * (lambda - f.t0)).epsilon(1e-15));
  CHECK_THROWS(orlicz_eval(f, -1.0));
}

TEST_CASE("orlicz germs are exact below the cutoff") {
  const double p = 3.0, q = 1.5;
  const OrliczFn f = OrliczFn::fp(p), g = OrliczFn::gq(p);
  for (double t : {1e-8, 1e-4, 0.01, 0.1}) {
    const double lg = std::abs(std::log(t));
    CHECK(orlicz_eval(f, t) == Approx(std::pow(t, p) * std::pow(lg, p)).epsilon(1e-13));
    CHECK(orlicz_eval(g, t) == Approx(std::pow(t, q) * std::pow(lg, -q)).epsilon(1e-13));
  }
}

TEST_CASE("orlicz functions are nondecreasing and continuous at the cutoff") {
  for (const OrliczFn& f : {OrliczFn::fp(2.0), OrliczFn::fp(1.3), OrliczFn::gq(2.0), OrliczFn::gq(4.0)}) {
    double prev = 0.0;
    for (int k = 1; k <= 4000; ++k) {
      const double t = 3.0 * k / 4000.0;
      const double v = orlicz_eval(f, t);
      CHECK(v >= prev);
      prev = v;
    }
    const double below = orlicz_eval(f, f.t0 * (1.0 - 1e-12));
    const double above = orlicz_eval(f, f.t0 * (1.0 + 1e-12));
    CHECK(above - below == Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("orlicz validation") {
  CHECK_THROWS_AS(OrliczFn::fp(1.0), InvalidArgument);
  CHECK_THROWS_AS(OrliczFn::fp(2.0, 0.5), InvalidArgument);  // above 1/e the fp germ decreases
  CHECK_THROWS_AS(OrliczFn::gq(2.0, 1.5), InvalidArgument);
}

TEST_CASE("luxemburg_norm of zero is zero") {
  CHECK(luxemburg_norm(Vector::zeros(5), OrliczFn::fp(2.0)) == 0.0);
}

// Independent scalar solver: sum phi(|x_i|/rho) = 1 by plain bisection on rho.
static double oracle_luxemburg(const Vector& x, const OrliczFn& f) {
  auto modular = [&](double rho) {
    double s = 0.0;
    for (double v : x.entries()) s += orlicz_eval(f, std::abs(v) / rho);
    return s;
  };
  double lo = 1e-300, hi = 1.0;
  while (modular(hi) > 1.0) hi *= 10.0;
  lo = hi;
  while (modular(lo) <= 1.0) lo /= 10.0;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    (modular(mid) > 1.0 ? lo : hi) = mid;
  }
  return hi;
}

TEST_CASE("luxemburg_norm of a single coordinate") {
  const OrliczFn f = OrliczFn::fp(2.0);
  const double a = std::exp(-3.0);
  const Vector x{a, 0.0, 0.0};
  const double rho = luxemburg_norm(x, f);
  // phi(t0) < 1, so the solution sits on the linear continuation.
  const double t = f.t0 + (1.0 - orlicz_eval(f, f.t0)) / f.s0;
  CHECK(rho == Approx(a / t).epsilon(1e-10));
  CHECK(rho == Approx(oracle_luxemburg(x, f)).epsilon(1e-10));
}

TEST_CASE("luxemburg_norm matches an independent solver on random vectors") {
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng = Rng::for_sample(5, stream_id("lux-oracle"), i);
    const Vector x = std::exp(rng.uniform(-4.0, 4.0)) * structured_vector(rng, 1 + rng.index(40));
    for (const OrliczFn& f : {OrliczFn::fp(2.0), OrliczFn::gq(2.0), OrliczFn::fp(1.5)})
      CHECK(luxemburg_norm(x, f) == Approx(oracle_luxemburg(x, f)).epsilon(1e-9));
  }
}

TEST_CASE("power-mode luxemburg_norm equals lp_norm") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng = Rng::for_sample(11, stream_id("lux-power"), i);
    const Vector x = raw_vector(rng, i % 2 ? SamplerKind::structured : SamplerKind::gaussian, 1 + rng.index(50));
    const double p = rng.uniform(1.0, 8.0);
    CHECK(luxemburg_norm(x, OrliczFn::power(p)) == Approx(lp_norm(x, p)).epsilon(1e-10));
  }
}

TEST_CASE("norms are homogeneous") {
  const std::vector<SpaceSpec> spaces = {SpaceSpec::lp(1.0), SpaceSpec::l2(), SpaceSpec::lp(3.5),
                                         SpaceSpec::lp(kInfinity), SpaceSpec::orlicz(OrliczFn::fp(2.0)),
                                         SpaceSpec::orlicz(OrliczFn::gq(3.0))};
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng = Rng::for_sample(3, stream_id("homog"), i);
    const std::size_t n = 1 + rng.index(30);
    const Vector x = raw_vector(rng, i % 2 ? SamplerKind::structured : SamplerKind::gaussian, n);
    const double lambda = rng.sign() * std::exp(rng.uniform(-8.0, 8.0));
    const Vector w = map_entries(gaussian_vector(rng, n), [](double v) { return std::exp(v); });
    const SpaceSpec weighted = SpaceSpec::weighted_l2(w);
    for (const auto& s : spaces)
      CHECK(norm(s, lambda * x) == Approx(std::abs(lambda) * norm(s, x)).epsilon(1e-12));
    CHECK(norm(weighted, lambda * x) == Approx(std::abs(lambda) * norm(weighted, x)).epsilon(1e-12));
  }
}

TEST_CASE("norms vanish only at zero") {
  for (const auto& s : {SpaceSpec::l2(), SpaceSpec::weighted_l2(Vector{1.0, 2.0, 3.0}),
                        SpaceSpec::orlicz(OrliczFn::fp(2.0))}) {
    CHECK(norm(s, Vector::zeros(3)) == 0.0);
    CHECK(norm(s, Vector{0.0, 1e-300, 0.0}) > 0.0);
  }
}
