#include <catch_amalgamated.hpp>

#include <cmath>

#include "twistlab/catalog.hpp"
#include "twistlab/sampling.hpp"

using namespace twistlab;
using Catch::Approx;

namespace {

// Coordinate-wise evaluation straight from the defining formulas.
double oracle_l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

std::vector<double> oracle_kp21(const std::vector<double>& y, const std::vector<double>& x) {
  const double nx = oracle_l2(x);
  std::vector<double> u(x.size()), out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double l = x[i] == 0.0 ? 0.0 : std::log(std::abs(x[i]) / nx);
    u[i] = y[i] - 2.0 * x[i] * l;
    out[i] = 2.0 * x[i] * l * l;
  }
  const double nu = oracle_l2(u);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (u[i] != 0.0) out[i] += 2.0 * u[i] * std::log(std::abs(u[i]) / nu);
  return out;
}

Vector random_vector(std::uint64_t i, std::size_t n) {
  Rng rng = Rng::for_sample(11, stream_id("catalog-test"), i);
  return raw_vector(rng, i % 2 ? SamplerKind::structured : SamplerKind::gaussian, n);
}

}  // namespace

TEST_CASE("kp examples") {
  CHECK(kp(Vector{1.0, 0.0}) == Vector{0.0, 0.0});
  const Vector k = kp(Vector{1.0, 1.0});
  CHECK(k[0] == Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(k[1] == Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(kp(Vector::zeros(3)).is_zero());
  CHECK_THROWS_AS(kp(Vector{1.0}, 1.0), InvalidArgument);
}

TEST_CASE("kp is homogeneous") {
  for (std::uint64_t i = 0; i < 30; ++i) {
    const Vector x = random_vector(i, 17);
    for (double lambda : {-3.5, 0.25, 7.0}) {
      CHECK(max_relative_deviation(kp(lambda * x), lambda * kp(x)) <= 1e-13);
      CHECK(max_relative_deviation(kp(lambda * x, 3.0), lambda * kp(x, 3.0)) <= 1e-13);
    }
  }
}

TEST_CASE("kp_12 and kp_21 examples") {
  const auto [a2, a1] = kp_12(Vector{1.0, 1.0});
  const double l = std::log(1.0 / std::sqrt(2.0));
  CHECK(a2[0] == Approx(2.0 * l * l).epsilon(1e-15));
  CHECK(a1[1] == Approx(2.0 * l).epsilon(1e-15));
  const auto [b2, b1] = kp_12(Vector{0.0, -3.0});
  CHECK(b2.is_zero());
  CHECK(b1.is_zero());

  // y = 2x log: u = 0, only the log^2 term remains.
  const Vector x{3.0, -1.0, 0.5};
  const Vector only = kp_21(kp_12(x).second, x);
  CHECK(max_relative_deviation(only, kp_12(x).first) <= 1e-15);
  // x = 0: kp_21(y, 0) = KP(y).
  const Vector y{0.5, 2.0, -1.0};
  CHECK(max_relative_deviation(kp_21(y, Vector::zeros(3)), kp(y)) <= 1e-15);

  for (std::uint64_t i = 0; i < 40; ++i) {
    const Vector yi = random_vector(2 * i, 9);
    const Vector xi = random_vector(2 * i + 1, 9);
    const Vector want(oracle_kp21(yi.values(), xi.values()));
    CHECK(max_relative_deviation(kp_21(yi, xi), want) <= 1e-12);
  }
}

TEST_CASE("kothe differential") {
  const WeightVector w0(Vector{1.0, 2.0}), w1(Vector{std::exp(1.0), 2.0});
  const Vector d = kothe_differential(Vector{3.0, 5.0}, w0, w1);
  CHECK(d[0] == Approx(3.0).epsilon(1e-15));
  CHECK(d[1] == 0.0);

  const WeightVector w = WeightVector::dyadic(4);
  const Vector m = symmetric_kothe_multipliers(w);
  for (std::size_t i = 0; i < 4; ++i) CHECK(m[i] == Approx(-2.0 * double(i) * std::log(2.0)).margin(1e-15));
  const QMapPtr k = kothe_map(w.reciprocal(), w, 0.5);
  CHECK(max_relative_deviation(k->diagonal->multipliers, m) <= 1e-15);
}

TEST_CASE("translation") {
  const WeightVector w = WeightVector::harmonic(12);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Vector x = random_vector(i, 12);
    CHECK(translation(x, 0.5, 0.5, w) == x);
    CHECK(max_relative_deviation(translation(translation(x, 0.3, 0.7, w), 0.7, 0.3, w), x) <= 1e-14);
    const double src = norm(SpaceSpec::weighted_l2(interpolation_weight(w, 0.7).values()), x);
    const double dst = norm(SpaceSpec::weighted_l2(interpolation_weight(w, 0.3).values()), translation(x, 0.3, 0.7, w));
    CHECK(dst == Approx(src).epsilon(1e-13));
  }
  CHECK_THROWS_AS(translation(Vector::zeros(12), 0.0, 0.5, w), InvalidArgument);
  CHECK_THROWS_AS(translation(Vector::zeros(12), 0.5, 1.0, w), InvalidArgument);
}

TEST_CASE("rochberg differential") {
  const WeightVector w = WeightVector::dyadic(3);
  const Vector x{1.0, 2.0, -1.0};
  const auto d2 = rochberg_differential(x, w, 2);
  REQUIRE(d2.size() == 1);
  for (std::size_t i = 0; i < 3; ++i) CHECK(d2[0][i] == Approx(2.0 * std::log(w[i]) * x[i]).margin(1e-15));
  const auto d3 = rochberg_differential(x, w, 3);
  REQUIRE(d3.size() == 2);
  for (std::size_t i = 0; i < 3; ++i) {
    const double l = std::log(w[i]);
    CHECK(d3[0][i] == Approx(2.0 * l * l * x[i]).margin(1e-15));
    CHECK(d3[1][i] == Approx(2.0 * l * x[i]).margin(1e-15));
  }
  const WeightVector ones(Vector::constant(3, 1.0));
  for (const auto& b : rochberg_differential(x, ones, 4)) CHECK(b.is_zero());
  CHECK_THROWS_AS(rochberg_differential(x, w, 1), InvalidArgument);
  CHECK_THROWS_AS(rochberg_map(w, 1), InvalidArgument);
}

TEST_CASE("rochberg norm") {
  const WeightVector w = WeightVector::harmonic(4);
  const Vector x{1.0, -2.0, 0.5, 0.0};
  CHECK(rochberg_norm(RochbergVector({x}), w) == Approx(l2_norm(x)));
  // (differential(x), x) has norm |x|.
  std::vector<Vector> blocks = rochberg_differential(x, w, 3);
  blocks.push_back(x);
  CHECK(rochberg_norm(RochbergVector(blocks), w) == Approx(l2_norm(x)).epsilon(1e-14));
  // (a, 0, 0) has norm |a|.
  const Vector a{3.0, 4.0, 0.0, 0.0};
  CHECK(rochberg_norm(RochbergVector({a, Vector::zeros(4), Vector::zeros(4)}), w) == Approx(5.0));
  // order 2 is the twisted norm of the diagonal map.
  const Vector b{0.1, 0.2, 0.3, 0.4};
  const Vector m = symmetric_kothe_multipliers(w);
  CHECK(rochberg_norm(RochbergVector({b, x}), w) == Approx(l2_norm(b - hadamard(m, x)) + l2_norm(x)).epsilon(1e-14));
}

TEST_CASE("u_n and the reversal pairing") {
  const Vector a{1.0}, b{2.0}, c{3.0};
  CHECK(u_n(RochbergVector({a})) == RochbergVector({a}));
  CHECK(u_n(RochbergVector({a, b})) == RochbergVector({-a, b}));
  CHECK(u_n(RochbergVector({a, b, c})) == RochbergVector({a, -b, c}));
  CHECK(reversal_pairing(RochbergVector({a, b, c}), RochbergVector({c, b, a})) == 1.0 + 4.0 + 9.0);
  CHECK(reversal_pairing(RochbergVector({a, b}), RochbergVector({Vector{5.0}, Vector{7.0}})) == 1.0 * 7.0 + 2.0 * 5.0);
  CHECK_THROWS_AS(reversal_pairing(RochbergVector({a}), RochbergVector({a, b})), InvalidArgument);
  for (std::uint64_t i = 0; i < 10; ++i) {
    const RochbergVector v({random_vector(3 * i, 5), random_vector(3 * i + 1, 5), random_vector(3 * i + 2, 5)});
    CHECK(u_n(u_n(v)) == v);
  }
}

TEST_CASE("inclusion and projection form an exact sequence") {
  const RochbergVector v({Vector{1.0, 2.0}, Vector{3.0, 4.0}});
  const RochbergVector inc = rochberg_include(v, 5);
  CHECK(inc.order() == 5);
  CHECK(inc.blocks[0] == v.blocks[0]);
  for (std::size_t k = 1; k <= 3; ++k) {
    for (const auto& blk : rochberg_project(inc, k).blocks) CHECK(blk.is_zero());
  }
  CHECK(rochberg_project(v, 1).base() == v.base());
  CHECK_THROWS_AS(rochberg_include(v, 1), InvalidArgument);
  CHECK_THROWS_AS(rochberg_project(v, 0), InvalidArgument);
}

TEST_CASE("kp_12 selects an element of R_3") {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Vector x = random_vector(i, 16);
    const auto [a2, a1] = kp_12(x);
    CHECK(kp_rochberg_norm(RochbergVector({a2, a1, x})) == Approx(l2_norm(x)).epsilon(1e-13));
    // The top two blocks of (kp_12 x, x) form (KP_{1,2} x) whose lower part is KP x.
    CHECK(max_relative_deviation(a1, kp(x)) <= 1e-15);
  }
  CHECK_THROWS_AS(kp_rochberg_norm(RochbergVector({Vector{1.0}, Vector{1.0}, Vector{1.0}, Vector{1.0}})),
                  Unsupported);
}

TEST_CASE("kp witness recovers x on non-dominant vectors") {
  const WitnessPtr j = kp_witness();
  const QMapPtr k = kp_map();
  for (std::size_t n : {64, 512}) {
    // Near-uniform magnitudes: every |x_i| / |x| stays below 1/e.
    for (std::uint64_t i = 0; i < 5; ++i) {
      Rng rng = Rng::for_sample(3, stream_id("kp-witness"), i);
      std::vector<double> v(n);
      for (auto& e : v) e = rng.sign() * rng.uniform(0.9, 1.0);
      const Vector x(std::move(v));
      const Vector beta = (*k)(x);
      const Vector got = j->solve(beta);
      CHECK(max_relative_deviation(got, x) <= 1e-8);
      CHECK(l2_norm(beta - (*k)(got)) <= 1e-8 * l2_norm(beta));
    }
  }
  const WitnessOutcome zero = j->find(Vector::zeros(5));
  CHECK(zero.diagnostics.converged);
  CHECK(zero.x.is_zero());
}

TEST_CASE("kp witness is homogeneous and bounded by the zero selector") {
  const WitnessPtr j = kp_witness();
  const QMapPtr k = kp_map();
  for (std::uint64_t i = 0; i < 30; ++i) {
    const Vector beta = random_vector(i, 32);
    const Vector x = j->solve(beta);
    CHECK(max_relative_deviation(j->solve(-2.5 * beta), -2.5 * x) <= 1e-8);
    CHECK(twisted_norm({beta, x}, *k) <= l2_norm(beta) * (1.0 + 1e-12));
  }
}

TEST_CASE("weight vectors") {
  CHECK(WeightVector::harmonic(5).non_increasing());
  CHECK(WeightVector::dyadic(5)[3] == 0.125);
  CHECK_THROWS_AS(WeightVector(Vector{1.0, 2.0}, true), InvalidArgument);
  CHECK_THROWS_AS(WeightVector(Vector{1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(WeightVector(Vector{1.0, -1.0}), InvalidArgument);
  CHECK_FALSE(WeightVector(Vector{1.0, 2.0}).non_increasing());
  const WeightVector r = WeightVector::dyadic(3).reciprocal();
  CHECK(r[2] == 4.0);
}

TEST_CASE("registry") {
  for (const auto& name : catalog_names()) {
    const CatalogEntry e = make_catalog_entry(name, 8);
    REQUIRE(e.map);
    CHECK_FALSE(e.map->name.empty());
    const Vector x = Vector::uniform(8 * e.map->source_blocks);
    CHECK((*e.map)(x).dim() == 8 * e.map->target_blocks);
  }
  CHECK(make_catalog_entry("rochberg", 8).map->target_blocks == 2);
  CHECK(make_catalog_entry("translation", 8).witness);
  CHECK_THROWS_WITH(make_catalog_entry("nope", 8), Catch::Matchers::ContainsSubstring("unknown map 'nope'"));
  CatalogParams bad;
  bad.weights = "flat";
  CHECK_THROWS_AS(make_catalog_entry("kothe", 8, bad), InvalidArgument);
}
