#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "twistlab/vector.hpp"

using twistlab::Vector;

TEST_CASE("vector construction validates entries") {
  CHECK_THROWS_AS(Vector(std::vector<double>{}), twistlab::InvalidArgument);
  CHECK_THROWS_AS((Vector{1.0, std::numeric_limits<double>::quiet_NaN()}), twistlab::InvalidArgument);
  CHECK_THROWS_AS((Vector{std::numeric_limits<double>::infinity()}), twistlab::InvalidArgument);
  const Vector v{1.0, -2.0, 3.0};
  CHECK(v.dim() == 3);
  CHECK(v[1] == -2.0);
}

TEST_CASE("builders") {
  CHECK(Vector::zeros(4).is_zero());
  CHECK(Vector::unit(3, 1) == Vector{0.0, 1.0, 0.0});
  CHECK_THROWS(Vector::unit(3, 3));
  const Vector u = Vector::uniform(16);
  for (double e : u.entries()) CHECK(e == 0.25);
}

TEST_CASE("arithmetic and block helpers") {
  const Vector a{1.0, 2.0}, b{3.0, -1.0};
  CHECK(a + b == Vector{4.0, 1.0});
  CHECK(a - b == Vector{-2.0, 3.0});
  CHECK(-a == Vector{-1.0, -2.0});
  CHECK(2.0 * a == Vector{2.0, 4.0});
  CHECK(twistlab::hadamard(a, b) == Vector{3.0, -2.0});
  CHECK(twistlab::dot(a, b) == 1.0);
  CHECK_THROWS_AS(a + Vector{1.0}, twistlab::DimensionMismatch);

  const Vector c = twistlab::concat(a, b);
  CHECK(c == Vector{1.0, 2.0, 3.0, -1.0});
  const auto parts = twistlab::split_blocks(c, 2);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0] == a);
  CHECK(parts[1] == b);
  CHECK_THROWS(twistlab::split_blocks(Vector{1.0, 2.0, 3.0}, 2));
}

TEST_CASE("relative deviation helpers") {
  CHECK(twistlab::max_relative_deviation(Vector{1.0, 2.0}, Vector{1.0, 2.0}) == 0.0);
  CHECK(twistlab::max_relative_deviation(Vector{1.0, 2.5}, Vector{1.0, 2.0}) == Catch::Approx(0.25));
  CHECK(twistlab::relative_deviation(3.0, 2.0) == Catch::Approx(0.5));
}
