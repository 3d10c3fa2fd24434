#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "brth/breather.hpp"
#include "brth/field.hpp"
#include "brth/grid.hpp"
#include "brth/params.hpp"
#include "brth/residual.hpp"
#include "doctest.h"

using namespace brth;

namespace {
const PhysicalParams P = natural_units();

BreatherSpec rest(double alpha) {
  BreatherSpec s;
  s.alpha = alpha;
  return s;
}

const std::vector<GridExtent> kRadialExtents = {{"t", 0.0, 2.0}, {"r", 0.5, 4.5}};
}  // namespace

TEST_CASE("free dispersion pins the locked frequency") {
  CHECK(std::abs(dispersion_omega(std::sqrt(3.0), P) - 2.0) < 1e-15);
  CHECK(dispersion_omega(0.0, P) == doctest::Approx(1.0));  // rest mass gap
  const PhysicalParams heavy{3.0, 2.0, 0.7, 0.0};
  const double k = breather_wavenumber(heavy);
  CHECK(dispersion_omega(k, heavy) == doctest::Approx(locked_omega(heavy)).epsilon(1e-14));
}

TEST_CASE("convergence order fits the log-log slope") {
  CHECK(convergence_order({{0.1, 1e-2}, {0.05, 2.5e-3}}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(convergence_order({{0.4, 8e-3}, {0.2, 1e-3}, {0.1, 1.25e-4}}) ==
        doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(convergence_order({{0.1, 1e-2}}), std::invalid_argument);
  CHECK_THROWS_AS(convergence_order({{0.1, 1e-2}, {0.1, 2e-2}}), std::invalid_argument);
  CHECK_THROWS_AS(convergence_order({{0.1, 0.0}, {0.05, 1e-3}}), std::invalid_argument);
}

TEST_CASE("box operator is exact on quadratics") {
  const SpacetimeGrid g = build_grid({Axis{"t", 0, 1, 6}, Axis{"x", 0, 1, 6}, Axis{"y", 0, 1, 6},
                                      Axis{"z", 0, 1, 6}});
  // f = t^2: box f = 2/c^2 exactly for the 3-point stencil.
  const ComplexField f =
      sample([](std::span<const double> c) { return cplx{c[0] * c[0], 0.0}; }, g, Quantity::Psi);
  const ComplexField bf = box_operator(f, P);
  for (std::size_t i = 0; i < bf.size(); ++i) {
    if (bf.masked(i)) continue;
    CHECK(bf[i].real() == doctest::Approx(2.0).epsilon(1e-10));
  }
  // g = x^2 + y^2: box g = -4.
  const ComplexField h = sample(
      [](std::span<const double> c) { return cplx{c[1] * c[1] + c[2] * c[2], 0.0}; }, g,
      Quantity::Psi);
  const ComplexField bh = box_operator(h, P);
  for (std::size_t i = 0; i < bh.size(); ++i) {
    if (bh.masked(i)) continue;
    CHECK(bh[i].real() == doctest::Approx(-4.0).epsilon(1e-10));
  }
}

TEST_CASE("box operator masks boundaries and spreads input masks") {
  const SpacetimeGrid g = build_grid({Axis{"t", 0, 1, 5}, Axis{"x", 0, 1, 5}});
  const ComplexField f =
      sample([](std::span<const double>) { return cplx{1.0, 0.0}; }, g, Quantity::Psi);
  const ComplexField bf = box_operator(f, P);
  // Interior is 3x3 = 9; everything else masked.
  CHECK(bf.masked_count() == 25u - 9u);

  // Mask one interior input node: its stencil neighbours go too.
  std::vector<std::uint8_t> mask(g.size(), 0);
  std::size_t centre_idx[2] = {2, 2};
  mask[g.flatten(centre_idx)] = 1;
  const ComplexField fm(g, f.values(), Quantity::Psi, mask);
  const ComplexField bfm = box_operator(fm, P);
  CHECK(bfm.masked_count() == 25u - 9u + 5u);  // centre + its 4 neighbours
}

TEST_CASE("radial grids get the reduced 1+1D operator") {
  // u = r * exp(-i t): (1/c^2) u_tt - u_rr = -u, so box u + kappa^2 u = 0
  // is the full KG operator acting on the clock mode. Check box alone = -u.
  const SpacetimeGrid g = build_grid({Axis{"t", 0, 1, 9}, Axis{"r", 0.5, 2.5, 9}});
  const ComplexField u = sample(
      [](std::span<const double> c) {
        return c[1] * std::exp(cplx{0.0, -c[0]});
      },
      g, Quantity::Psi);
  const ComplexField bu = box_operator(u, P);
  double worst = 0.0;
  for (std::size_t i = 0; i < bu.size(); ++i) {
    if (bu.masked(i)) continue;
    worst = std::max(worst, std::abs(bu[i] + u[i]));
  }
  // Second-order truncation of the t stencil: worst node is r_max h^2/12.
  CHECK(worst < 4e-3);
  CHECK(worst > 1e-3);
}

TEST_CASE("kg residual annihilates the rest breather at second order") {
  const ResidualReport rep =
      kg_residual_study(rest(0.5), kRadialExtents, {0.1, 0.05}, P);
  REQUIRE(rep.convergence_order.has_value());
  CHECK(*rep.convergence_order == doctest::Approx(2.0).epsilon(0.1));
  CHECK(rep.samples.size() == 2u);
  CHECK(rep.samples[0].l2 > rep.samples[1].l2);
  CHECK(rep.masked_point_count == 0u);  // no log, no branch mask
  CHECK(rep.l2_norm < 1e-3);            // finest-grid norm
}

TEST_CASE("kg residual stalls under a detuned frequency") {
  BreatherSpec s = rest(0.5);
  s.omega_override = 1.9;
  const ResidualReport rep = kg_residual_study(s, kRadialExtents, {0.1, 0.05}, P);
  REQUIRE(rep.convergence_order.has_value());
  CHECK(*rep.convergence_order < 0.5);
  CHECK(rep.l2_norm > 1e-2);  // the residual is O(1), not truncation
}

TEST_CASE("kg residual handles boosted and spinning specs on cartesian grids") {
  const std::vector<GridExtent> ext = {
      {"t", 0.0, 0.8}, {"x", 0.6, 2.2}, {"y", 0.6, 2.2}, {"z", 0.6, 2.2}};

  BreatherSpec boosted = rest(0.5);
  boosted.velocity = {0.6, 0.0, 0.0};
  const ResidualReport rb = kg_residual_study(boosted, ext, {0.2, 0.1}, P);
  REQUIRE(rb.convergence_order.has_value());
  CHECK(*rb.convergence_order == doctest::Approx(2.0).epsilon(0.2));

  BreatherSpec spin;
  spin.alpha = 0.5;
  spin.mode = {1, 1};
  const ResidualReport rs = kg_residual_study(spin, ext, {0.2, 0.1}, P);
  REQUIRE(rs.convergence_order.has_value());
  CHECK(*rs.convergence_order == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("kg residual rejects misused grids") {
  const SpacetimeGrid radial = build_grid({Axis{"t", 0, 1, 5}, Axis{"r", 0.5, 2.5, 5}});
  BreatherSpec boosted = rest(0.5);
  boosted.velocity = {0.6, 0.0, 0.0};
  CHECK_THROWS(kg_residual(boosted, radial, P));  // boosts need cartesian axes

  // Spacing that does not tile the extent is named in the error.
  CHECK_THROWS_WITH_AS(kg_residual_study(rest(0.5), kRadialExtents, {0.3}, P),
                       doctest::Contains("tile"), std::invalid_argument);
}

TEST_CASE("qhj residual annihilates the log action and masks branch points") {
  const ResidualReport rep =
      qhj_residual_study(rest(0.5), kRadialExtents, {0.1, 0.05}, P);
  REQUIRE(rep.convergence_order.has_value());
  CHECK(*rep.convergence_order == doctest::Approx(2.0).epsilon(0.1));
  CHECK(rep.masked_point_count == 0u);  // |1+w| >= 1 - 0.5 j0max stays clear

  // alpha close to 1 pushes |1+w| below the 0.05 floor near t = pi, r ~ 0.
  const std::vector<GridExtent> near_origin = {{"t", 2.6, 3.6}, {"r", 0.05, 0.55}};
  const ResidualReport masked =
      qhj_residual_study(rest(0.96), near_origin, {0.025}, P);
  CHECK(masked.masked_point_count > 0u);
  CHECK(masked.l2_norm < 1.0);  // norms stay finite because the spike is excluded
}

TEST_CASE("qhj residual requires r away from zero") {
  CHECK_THROWS(qhj_residual_study(rest(0.5), {{"t", 0.0, 1.0}, {"r", 0.0, 2.0}}, {0.1}, P));
}

TEST_CASE("lorentz gauge check separates compatible from incompatible potentials") {
  const SpacetimeGrid g = build_grid({Axis{"t", 0, 1, 9}, Axis{"x", 0, 1, 9}});
  Potentials ok;
  ok.U = [](double t, Vec3) { return 0.3 * t; };
  ok.A = [](double, Vec3 x) { return Vec3{-0.3 * x.x, 0.0, 0.0}; };  // div A = -U_t / c
  const ResidualReport good = lorentz_gauge_check(ok, g, P);
  CHECK(good.l2_norm < 1e-10);

  Potentials bad;
  bad.U = [](double t, Vec3) { return 0.3 * t; };
  const ResidualReport off = lorentz_gauge_check(bad, g, P);
  CHECK(off.l2_norm == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("einstein relation holds far from the core and is reported sanely") {
  const double far = einstein_relation_check(rest(0.1), P, EinsteinMode::far_field);
  CHECK(far < 1e-2);
  CHECK(far > 0.0);

  const EinsteinReport rep =
      einstein_relation_report(rest(0.1), P, EinsteinMode::breather_average);
  CHECK(std::isfinite(rep.deviation));
  // The averaged energy sits near the rest energy; the clock dominates.
  CHECK(std::abs(rep.mean_energy) == doctest::Approx(P.m * P.c * P.c).epsilon(0.2));
}
