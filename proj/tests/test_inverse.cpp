#include <catch_amalgamated.hpp>

#include <cmath>

#include "twistlab/catalog.hpp"
#include "twistlab/inverse.hpp"

using namespace twistlab;
using Catch::Approx;

namespace {

Vector random_vector(std::uint64_t i, std::size_t n) {
  Rng rng = Rng::for_sample(21, stream_id("inverse-test"), i);
  return raw_vector(rng, i % 2 ? SamplerKind::structured : SamplerKind::gaussian, n);
}

}  // namespace

TEST_CASE("diagonal inverse is the reciprocal multiplier") {
  const WeightVector w = WeightVector::harmonic(20);
  const QMapPtr omega = symmetric_kothe_map(w);
  const QMapPtr inv = make_inverse(omega, diagonal_exact_witness(*omega));
  CHECK(inv->source_blocks == 1);
  CHECK(inv->linear);
  const Vector m = symmetric_kothe_multipliers(w);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Vector x = random_vector(i, 20);
    const Vector want = zip_with(x, m, [](double a, double b) { return a / b; });
    CHECK((*inv)(x) == want);
    CHECK(max_relative_deviation((*inv)((*omega)(x)), x) <= 1e-15);
    CHECK(max_relative_deviation((*omega)((*inv)(x)), x) <= 1e-15);
  }
}

TEST_CASE("inversion is refused exactly at vanishing multipliers") {
  std::vector<double> raw = WeightVector::harmonic(10).values().values();
  raw[0] = 1.0;
  raw[7] = 1.0;
  const QMapPtr omega = symmetric_kothe_map(WeightVector(Vector(std::move(raw))));
  try {
    diagonal_exact_witness(*omega);
    FAIL("expected InversionRefused");
  } catch (const InversionRefused& e) {
    CHECK(e.coordinates == std::vector<std::size_t>{0, 7});
  }
  // Dyadic weights start at 1.
  CHECK_THROWS_AS(diagonal_exact_witness(*symmetric_kothe_map(WeightVector::dyadic(4))), InversionRefused);
  CHECK_THROWS_AS(diagonal_exact_witness(*kp_map()), Unsupported);
  CHECK_THROWS_AS(make_inverse(kp_map(), nullptr), InvalidArgument);
}

TEST_CASE("U on (y, 0) under the zero selector does not increase the norm") {
  const QMapPtr omega = symmetric_kothe_map(WeightVector::harmonic(12));
  const WitnessPtr j = zero_witness(*omega);
  for (std::uint64_t i = 0; i < 30; ++i) {
    const Vector y = random_vector(i, 12);
    const TwistedVector v{y, Vector::zeros(12)};
    CHECK(u_image_norm(v, *omega, *j) <= twisted_norm(v, *omega) * (1.0 + 1e-12));
  }
}

TEST_CASE("U in dimension one") {
  for (double m : {0.25, 1.0, 3.0, -5.0}) {
    const QMapPtr omega = make_diagonal_map("scalar", DiagonalForm{Vector{m}, false}, SpaceSpec::l2(), SpaceSpec::l2());
    const WitnessPtr j = zero_witness(*omega);
    const TwistedVector v{Vector{2.0}, Vector{0.0}};
    // |beta|_R = |beta| min(1, 1/|m|) in dimension one.
    CHECK(u_image_norm(v, *omega, *j) / twisted_norm(v, *omega) ==
          Approx(std::min(1.0, 1.0 / std::abs(m))).epsilon(1e-10));
  }
}

TEST_CASE("U ratios stay within the bound for diagonal maps") {
  const QMapPtr omega = symmetric_kothe_map(WeightVector::harmonic(32));
  const WitnessPtr j = diagonal_range_witness(omega);
  const auto r = check_U_isomorphism(*omega, *j, Sampler::random(SamplerKind::both, 5, 32), 200);
  CHECK(r.triangle.sup_value >= 1.0);
  CHECK(r.selector.sup_value >= 1.0 - 1e-12);
  CHECK(r.bound == Approx(r.triangle.sup_value * (1.0 + r.selector.sup_value) + 1.0));
  CHECK(r.within_bound(1e-12));
}

TEST_CASE("inverse of the inverse returns the map") {
  const Sampler s = Sampler::random(SamplerKind::both, 6, 24);
  SECTION("diagonal") {
    const QMapPtr omega = symmetric_kothe_map(WeightVector::harmonic(24));
    const WitnessPtr j = diagonal_exact_witness(*omega);
    const QMapPtr inv = make_inverse(omega, j);
    CHECK(inverse_of_inverse_defect(omega, j, diagonal_exact_witness(*inv), s, 100).sup_value == 0.0);
  }
  SECTION("translation") {
    const WeightVector w = WeightVector::harmonic(24);
    const QMapPtr t = translation_map(0.25, 0.5, w);
    const auto r = inverse_of_inverse_defect(t, translation_witness(0.25, 0.5, w), translation_witness(0.5, 0.25, w), s, 100);
    CHECK(r.sup_value <= 1e-14);
  }
  SECTION("kp") {
    const QMapPtr k = kp_map();
    CHECK(inverse_of_inverse_defect(k, kp_witness(), forward_witness(k), s, 100).sup_value == 0.0);
  }
}

TEST_CASE("the two inverses of a diagonal map are boundedly equivalent") {
  const QMapPtr omega = symmetric_kothe_map(WeightVector::harmonic(16));
  const Sampler s = Sampler::random(SamplerKind::both, 8, 16);
  const WitnessPtr jm = diagonal_range_witness(omega);
  const WitnessPtr jj = diagonal_exact_witness(*omega);
  const double k = std::max(selector_constant(*omega, *jm, s, 200).sup_value, selector_constant(*omega, *jj, s, 200).sup_value);
  const auto r = bounded_equivalence_constant(*make_inverse(omega, jm), *make_inverse(omega, jj), s, 200);
  CHECK(r.sup_value <= k + k * k);
}

TEST_CASE("diverging selectors are reported") {
  const QMapPtr k = kp_map();
  auto bad = std::make_shared<WitnessFn>();
  bad->name = "never";
  bad->for_map = "kp";
  bad->find = [](const Vector& beta) -> WitnessOutcome { return {beta, {false, 7, 0.5, "stuck"}}; };
  const std::vector<Vector> probes{Vector{1.0, 2.0}};
  try {
    make_inverse(k, bad, probes);
    FAIL("expected WitnessDivergence");
  } catch (const WitnessDivergence& e) {
    CHECK(e.diagnostics.iterations == 7);
    CHECK(e.diagnostics.note == "stuck");
  }
  const QMapPtr lazy = make_inverse(k, bad);
  CHECK_THROWS_AS((*lazy)(Vector{1.0, 2.0}), WitnessDivergence);
}
