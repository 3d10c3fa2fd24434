#include <cmath>
#include <limits>
#include <stdexcept>

#include "brth/special.hpp"
#include "doctest.h"

using brth::associated_legendre;
using brth::spherical_bessel_j;

// Reference values computed with 50-digit arbitrary precision arithmetic.
TEST_CASE("spherical bessel matches high-precision references") {
  struct Ref {
    int l;
    double x;
    double value;
  };
  const Ref refs[] = {
      {0, 0.0, 1.0},
      {1, 0.5, 0.16253703063606656886},
      {1, 10.0, 0.078466941798751547092},
      {5, 1.0, 9.2561158611258163567e-5},
      {8, 10.0, 0.12557802364956783121},
      {3, 100.0, 0.0089139973696122128944},
      {8, 1000.0, 0.000846600399009209003},
  };
  for (const auto& ref : refs) {
    CAPTURE(ref.l);
    CAPTURE(ref.x);
    CHECK(spherical_bessel_j(ref.l, ref.x) == doctest::Approx(ref.value).epsilon(1e-13));
  }
}

TEST_CASE("spherical bessel small-argument series region") {
  // j_2(x) -> x^2/15 as x -> 0; reference at x = 0.005.
  CHECK(spherical_bessel_j(2, 0.005) ==
        doctest::Approx(1.6666636904782572743e-6).epsilon(1e-13));
  // Deep in the decaying regime the downward recurrence must not lose the scale.
  CHECK(spherical_bessel_j(8, 0.5) ==
        doctest::Approx(1.1261439602121288724e-10).epsilon(1e-12));
  // Both branches straddling the series/recurrence switch at x = 1e-2 agree
  // with the exact values, so the function is continuous there.
  CHECK(spherical_bessel_j(3, 0.0099999) ==
        doctest::Approx(9.5234709050937268e-9).epsilon(1e-13));
  CHECK(spherical_bessel_j(3, 0.0100001) ==
        doctest::Approx(9.5240423283741827e-9).epsilon(1e-13));
}

TEST_CASE("spherical bessel zero crossings") {
  // First zero of j_1.
  const double z = 4.4934094579090641753;
  CHECK(std::abs(spherical_bessel_j(1, z)) < 1e-15);
  CHECK(spherical_bessel_j(1, z - 0.1) > 0.0);
  CHECK(spherical_bessel_j(1, z + 0.1) < 0.0);
  // j_0 at the breather wavenumber times a couple of radii.
  CHECK(spherical_bessel_j(0, 2.0 * std::sqrt(3.0)) ==
        doctest::Approx(-0.091494764996574326554).epsilon(1e-14));
  CHECK(spherical_bessel_j(0, 30.0 * std::sqrt(3.0)) ==
        doctest::Approx(0.019094263526372190664).epsilon(1e-13));
}

TEST_CASE("spherical bessel rejects bad input") {
  CHECK_THROWS_AS(spherical_bessel_j(-1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(spherical_bessel_j(0, -0.5), std::invalid_argument);
}

TEST_CASE("associated legendre low orders") {
  const double u = 0.3;
  const double s = std::sqrt(1.0 - u * u);
  CHECK(associated_legendre(0, 0, u) == doctest::Approx(1.0));
  CHECK(associated_legendre(1, 0, u) == doctest::Approx(u));
  CHECK(associated_legendre(1, 1, u) == doctest::Approx(s));              // no C-S phase
  CHECK(associated_legendre(2, 0, u) == doctest::Approx(0.5 * (3 * u * u - 1)));
  CHECK(associated_legendre(2, 1, u) == doctest::Approx(3.0 * u * s));
  CHECK(associated_legendre(2, 2, u) == doctest::Approx(3.0 * (1 - u * u)));
  CHECK(associated_legendre(3, 2, u) == doctest::Approx(15.0 * u * (1 - u * u)));
}

TEST_CASE("associated legendre negative order is the factorial ratio") {
  const double u = -0.62;
  // P_l^{-n} = (l-n)!/(l+n)! P_l^n with no extra sign.
  CHECK(associated_legendre(2, -1, u) ==
        doctest::Approx(associated_legendre(2, 1, u) / 6.0).epsilon(1e-14));
  CHECK(associated_legendre(3, -3, u) ==
        doctest::Approx(associated_legendre(3, 3, u) / 720.0).epsilon(1e-14));
}

TEST_CASE("associated legendre endpoints and validation") {
  CHECK(associated_legendre(5, 0, 1.0) == doctest::Approx(1.0));
  CHECK(associated_legendre(4, 0, -1.0) == doctest::Approx(1.0));  // (-1)^4
  CHECK(associated_legendre(3, 0, -1.0) == doctest::Approx(-1.0));
  CHECK(associated_legendre(3, 2, 1.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(associated_legendre(1, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(associated_legendre(-1, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(associated_legendre(2, 0, 1.5), std::invalid_argument);
}
