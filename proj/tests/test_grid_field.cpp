#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "brth/field.hpp"
#include "brth/grid.hpp"
#include "brth/parallel.hpp"
#include "doctest.h"

using namespace brth;

TEST_CASE("axis endpoints are exact and spacing uniform") {
  const Axis ax{"x", -1.0, 2.0, 7};
  CHECK(ax.coord(0) == -1.0);
  CHECK(ax.coord(6) == 2.0);
  CHECK(ax.spacing() == doctest::Approx(0.5));
  for (std::size_t i = 0; i + 1 < ax.count; ++i)
    CHECK(ax.coord(i + 1) - ax.coord(i) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("grid strides are row-major, last axis fastest") {
  const SpacetimeGrid g = build_grid({Axis{"t", 0, 1, 4}, Axis{"x", 0, 1, 5}, Axis{"y", 0, 1, 6}});
  CHECK(g.rank() == 3);
  CHECK(g.size() == 4u * 5u * 6u);
  CHECK(g.stride(2) == 1u);
  CHECK(g.stride(1) == 6u);
  CHECK(g.stride(0) == 30u);

  std::size_t idx[3] = {2, 3, 4};
  const std::size_t flat = g.flatten(idx);
  CHECK(flat == 2u * 30u + 3u * 6u + 4u);
  std::size_t back[3];
  g.unflatten(flat, back);
  CHECK(back[0] == 2u);
  CHECK(back[1] == 3u);
  CHECK(back[2] == 4u);

  double coords[3];
  g.point(flat, coords);
  CHECK(coords[0] == doctest::Approx(2.0 / 3.0));
  CHECK(coords[1] == doctest::Approx(0.75));
  CHECK(coords[2] == doctest::Approx(0.8));
}

TEST_CASE("interior predicate excludes every face") {
  const SpacetimeGrid g = build_grid({Axis{"t", 0, 1, 4}, Axis{"r", 0, 1, 4}});
  std::size_t interior = 0;
  for (std::size_t i = 0; i < g.size(); ++i) interior += g.is_interior(i) ? 1 : 0;
  CHECK(interior == 4u);  // (4-2)^2
}

TEST_CASE("grid construction validates its axes") {
  CHECK_THROWS_AS(build_grid({}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid({Axis{"x", 0, 1, 3}}), std::invalid_argument);  // < 4 points
  CHECK_THROWS_AS(build_grid({Axis{"x", 1, 0, 5}}), std::invalid_argument);  // min >= max
  CHECK_THROWS_AS(build_grid({Axis{"q", 0, 1, 5}}), std::invalid_argument);  // unknown name
  CHECK_THROWS_AS(build_grid({Axis{"x", 0, 1, 5}, Axis{"x", 0, 1, 5}}), std::invalid_argument);
}

TEST_CASE("sample evaluates pointwise and respects the mask") {
  const SpacetimeGrid g = build_grid({Axis{"x", 0, 1, 5}});
  const PointSampler f = [](std::span<const double> c) { return cplx{c[0], -c[0]}; };
  const MaskPredicate near_half = [](std::span<const double> c) {
    return std::abs(c[0] - 0.5) < 0.01;
  };
  const ComplexField field = sample(f, g, Quantity::Psi, &near_half);
  CHECK(field.size() == 5u);
  CHECK(field.masked_count() == 1u);
  CHECK(field.masked(2));
  CHECK(field[1] == cplx{0.25, -0.25});
  CHECK(field[2] == cplx{0.0, 0.0});  // masked nodes are zeroed
}

TEST_CASE("sample rejects non-finite values at unmasked nodes") {
  const SpacetimeGrid g = build_grid({Axis{"x", 0, 1, 5}});
  const PointSampler bad = [](std::span<const double> c) {
    return cplx{1.0 / (c[0] - 0.5), 0.0};  // infinite at the midpoint
  };
  CHECK_THROWS_WITH_AS(sample(bad, g, Quantity::Psi),
                       doctest::Contains("non-finite"), std::runtime_error);
  const MaskPredicate near_half = [](std::span<const double> c) {
    return std::abs(c[0] - 0.5) < 0.01;
  };
  CHECK_NOTHROW(sample(bad, g, Quantity::Psi, &near_half));
}

TEST_CASE("blocked reductions are independent of thread count") {
  std::vector<double> xs(100000);
  for (std::size_t i = 0; i < xs.size(); ++i)
    xs[i] = std::sin(0.1 * static_cast<double>(i)) * 1e-3 + 1.0 / (1.0 + static_cast<double>(i));

  par::set_threads(1);
  const double s1 = par::blocked_sum(xs.size(), [&](std::size_t i) { return xs[i]; });
  const double m1 = par::blocked_max(xs.size(), [&](std::size_t i) { return xs[i]; });
  par::set_threads(7);
  const double s7 = par::blocked_sum(xs.size(), [&](std::size_t i) { return xs[i]; });
  const double m7 = par::blocked_max(xs.size(), [&](std::size_t i) { return xs[i]; });
  par::set_threads(0);  // back to automatic

  CHECK(s1 == s7);  // bitwise, not approximately
  CHECK(m1 == m7);
}
