#include <cmath>
#include <complex>

#include "brth/breather.hpp"
#include "brth/params.hpp"
#include "doctest.h"

using namespace brth;

namespace {
const PhysicalParams P = natural_units();
constexpr double kPi = 3.14159265358979323846;

BreatherSpec rest(double alpha) {
  BreatherSpec s;
  s.alpha = alpha;
  return s;
}
}  // namespace

TEST_CASE("locked dispersion constants") {
  CHECK(locked_omega(P) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(breather_wavenumber(P) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  const PhysicalParams heavy{2.0, 3.0, 0.5, 0.0};
  CHECK(locked_omega(heavy) == doctest::Approx(2.0 * 2.0 * 9.0 / 0.5));
  CHECK(breather_wavenumber(heavy) == doctest::Approx(std::sqrt(3.0) * 2.0 * 3.0 / 0.5));
}

TEST_CASE("rest wave function at the origin and at a j0 zero") {
  const BreatherSpec s = rest(0.5);
  // j_0(0) = 1: psi(0,0) = 1 + alpha.
  CHECK(psi_rest(s, {0.0, {}}, P).real() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(psi_rest(s, {0.0, {}}, P).imag() == doctest::Approx(0.0));
  // At r = pi/k the mode term vanishes (first zero of sin(kr)/kr).
  const double r0 = kPi / breather_wavenumber(P);
  const cplx clock_only = psi_rest(s, {0.7, {r0, 0.0, 0.0}}, P);
  CHECK(std::abs(clock_only - std::exp(cplx{0.0, -0.7})) < 1e-15);
}

TEST_CASE("rest wave function is periodic with the clock period") {
  const BreatherSpec s = rest(0.5);
  const double T = 2.0 * kPi / P.clock_frequency();
  const SpacetimeEvent e{1.234, {0.4, -0.2, 0.9}};
  const cplx a = psi_rest(s, e, P);
  const cplx b = psi_rest(s, {e.t + T, e.x}, P);
  CHECK(std::abs(a - b) < 1e-14);
}

TEST_CASE("action exponentiates back to the wave function") {
  const BreatherSpec s = rest(0.5);
  for (double t : {0.0, 0.3, 2.9}) {
    for (double r : {0.05, 1.0, 7.7}) {
      const SpacetimeEvent e{t, {r, 0.0, 0.0}};
      const cplx S = action_rest(s, e, P);
      const cplx psi = std::exp(cplx{0.0, 1.0} * S / P.hbar);
      CHECK(std::abs(psi - psi_rest(s, e, P)) < 1e-12);
    }
  }
}

TEST_CASE("action separates into clock plus log oscillation") {
  const BreatherSpec s = rest(0.25);
  const SpacetimeEvent e{0.9, {2.0, 0.0, 0.0}};
  const cplx S = action_rest(s, e, P);
  const double k = breather_wavenumber(P);
  const cplx w = 0.25 * std::exp(cplx{0.0, -(locked_omega(P) - P.clock_frequency()) * e.t}) *
                 spherical_bessel_j(0, k * 2.0);
  const cplx expected = -P.m * P.c * P.c * e.t - cplx{0.0, P.hbar} * std::log(1.0 + w);
  CHECK(std::abs(S - expected) < 1e-14);
}

TEST_CASE("far from the core the log action approaches the clock line") {
  const BreatherSpec s = rest(0.5);
  const double k = breather_wavenumber(P);
  const SpacetimeEvent e{0.0, {60.0, 0.0, 0.0}};
  const cplx S = action_rest(s, e, P);
  const cplx w = 0.5 * spherical_bessel_j(0, k * 60.0);
  // |ln(1+w) - w| <= |w|^2 for |w| <= 1/2.
  CHECK(std::abs(S - (-P.m * P.c * P.c * e.t) - (-cplx{0.0, P.hbar} * w)) <= std::norm(w));
}

TEST_CASE("branch mask: the action blows up where psi vanishes") {
  BreatherSpec s;
  s.alpha = 1.0;
  s.allow_unwrap = true;  // |alpha| = 1 reaches psi = 0
  // 1 + exp(-i t) j0(0) = 0 at t = pi, r = 0.
  CHECK_THROWS_AS(action_rest(s, {kPi, {}}, P), BranchPointError);
}

TEST_CASE("amplitude above one requires the unwrap flag") {
  BreatherSpec s;
  s.alpha = 1.2;
  CHECK_THROWS_AS(s.validate(P), std::invalid_argument);
  s.allow_unwrap = true;
  CHECK_NOTHROW(s.validate(P));
  // Amplitudes >= 1 always go through the tracked branch and say so.
  const ActionSample far = action_rest_sample(s, {0.1, {50.0, 0, 0}}, P);
  CHECK(far.unwrapped);
  BreatherSpec mild;
  mild.alpha = 0.5;
  CHECK_FALSE(action_rest_sample(mild, {0.1, {50.0, 0, 0}}, P).unwrapped);
}

TEST_CASE("spinning term carries the angular factors") {
  const double k = breather_wavenumber(P);
  const ModeIndex m11{1, 1};
  // On the z axis P_1^1(cos 0) = 0: the term vanishes identically.
  CHECK(std::abs(spinning_term(m11, 0.5, {0.3, {0, 0, 2.0}}, P)) < 1e-15);
  // In the equatorial plane theta = pi/2, P_1^1 = 1; phase rotates with phi.
  const double r = 1.7;
  const cplx eq = spinning_term(m11, 0.5, {0.0, {r, 0.0, 0.0}}, P);
  CHECK(std::abs(eq - 0.5 * spherical_bessel_j(1, k * r)) < 1e-14);
  const cplx quarter = spinning_term(m11, 0.5, {0.0, {0.0, r, 0.0}}, P);  // phi = pi/2
  CHECK(std::abs(quarter - eq * std::exp(cplx{0.0, kPi / 2.0})) < 1e-14);
  // Time dependence at the locked frequency 2 m c^2 / hbar.
  const cplx later = spinning_term(m11, 0.5, {0.25, {r, 0.0, 0.0}}, P);
  CHECK(std::abs(later - eq * std::exp(cplx{0.0, -locked_omega(P) * 0.25})) < 1e-14);
}

TEST_CASE("spinning term is regular at the origin") {
  const cplx v = spinning_term({2, 1}, 0.5, {0.0, {1e-9, 1e-9, 1e-9}}, P);
  CHECK(std::isfinite(v.real()));
  CHECK(std::abs(v) < 1e-15);  // j_2 ~ r^2 kills it
}

TEST_CASE("breather_psi dispatches rest and spinning forms") {
  BreatherSpec s0 = rest(0.5);
  const SpacetimeEvent e{0.4, {1.0, 0.5, -0.3}};
  CHECK(std::abs(breather_psi(s0, e, P) - psi_rest(s0, e, P)) < 1e-15);

  BreatherSpec s21;
  s21.alpha = 0.3;
  s21.mode = {2, 1};
  const cplx expect = std::exp(cplx{0.0, -P.clock_frequency() * e.t}) +
                      spinning_term({2, 1}, 0.3, e, P);
  CHECK(std::abs(breather_psi(s21, e, P) - expect) < 1e-15);
}

TEST_CASE("lorentz boost: reference numbers and inverse") {
  const Vec3 v{0.6, 0.0, 0.0};  // gamma = 1.25
  const SpacetimeEvent e{0.0, {1.0, 2.0, 3.0}};
  const SpacetimeEvent b = lorentz_boost(e, v, P);
  CHECK(b.t == doctest::Approx(-0.75).epsilon(1e-15));
  CHECK(b.x.x == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(b.x.y == doctest::Approx(2.0));
  CHECK(b.x.z == doctest::Approx(3.0));

  const SpacetimeEvent back = lorentz_boost(b, {-0.6, 0.0, 0.0}, P);
  CHECK(back.t == doctest::Approx(e.t).epsilon(1e-14));
  CHECK(back.x.x == doctest::Approx(e.x.x).epsilon(1e-14));

  CHECK_THROWS_AS(lorentz_boost(e, {1.0, 0.0, 0.0}, P), std::invalid_argument);
}

TEST_CASE("boosted action carries energy-momentum phase -E t + p.x") {
  BreatherSpec s = rest(0.5);
  s.velocity = {0.6, 0.0, 0.0};
  const double gamma = 1.25;
  // Far from the (moving) core the log term decays like 1/(k gamma x): at
  // x = 1e6 it perturbs the phase by < 1e-6, so the linear part reads off.
  const SpacetimeEvent e{0.0, {1.0e6, 0.0, 0.0}};
  const cplx S = action_boosted(s, e, P);
  const double expected = gamma * P.m * 0.6 * 1.0e6;  // p.x at t = 0
  CHECK(S.real() == doctest::Approx(expected).epsilon(1e-9));
  // Time slope at fixed x gives -E. The phase is exactly linear in t, so the
  // centered difference only sees the (tiny) log-term slope and roundoff.
  const double dt = 1e-3;
  const cplx Sp = action_boosted(s, {dt, e.x}, P);
  const cplx Sm = action_boosted(s, {-dt, e.x}, P);
  CHECK(((Sp - Sm) / (2 * dt)).real() == doctest::Approx(-gamma * P.m).epsilon(1e-6));
}

TEST_CASE("train action is d-periodic and converges in the truncation") {
  BreatherSpec s = rest(0.4);
  s.train_period_d = 8.0;
  s.train_truncation_K = 40;
  const SpacetimeEvent e{0.3, {1.1, 0.0, 0.0}};
  const TrainEval a = train_action(s, e, P);
  const TrainEval b = train_action(s, {0.3, {1.1 + 8.0, 0.0, 0.0}}, P);
  // Shifting by d swaps one edge core for another; the mismatch is tail-sized.
  CHECK(std::abs(a.value - b.value) <= a.tail_estimate + b.tail_estimate);
  CHECK_FALSE(a.k_too_small);

  // Doubling K moves the value by no more than the claimed tail bound.
  BreatherSpec s2 = s;
  s2.train_truncation_K = 80;
  const TrainEval c = train_action(s2, e, P);
  CHECK(std::abs(c.value - a.value) <= 2.0 * a.tail_estimate);
  CHECK(c.tail_estimate < a.tail_estimate);

  // Close to the truncation edge the tail estimate must flag itself.
  BreatherSpec tiny = s;
  tiny.train_truncation_K = 1;
  CHECK(train_action(tiny, {0.3, {6.0, 0.0, 0.0}}, P).k_too_small);
}

TEST_CASE("uniform potentials shift the clock phase only") {
  const BreatherSpec s = rest(0.5);
  const SpacetimeEvent e{0.8, {1.3, 0.0, 0.0}};
  const double U0 = 0.2;
  const Vec3 A0{0.1, 0.0, 0.0};
  PhysicalParams charged = P;
  charged.e_charge = 1.0;
  const cplx dressed = action_slow_field(s, e, charged, U0, A0);
  const cplx bare = action_rest(s, e, charged);
  const cplx shift = dressed - bare;
  CHECK(shift.real() == doctest::Approx(-U0 * e.t + 0.1 * 1.3).epsilon(1e-13));
  CHECK(shift.imag() == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("semiclassical composite reduces to the slow-field form at rest") {
  BreatherSpec s = rest(0.5);
  SemiclassicalContext ctx;
  ctx.S_c = [](double t, Vec3) { return -0.2 * t; };  // uniform U0 = 0.2, e = 1
  ctx.x_p = [](double) { return Vec3{}; };
  ctx.v_of_t = [](double) { return Vec3{}; };
  CHECK(ctx.validate(P, 0.0, 1.0).empty());

  PhysicalParams charged = P;
  charged.e_charge = 1.0;
  const SpacetimeEvent e{0.6, {0.9, 0.0, 0.0}};
  const cplx a = semiclassical_action(ctx, s, e, charged);
  const cplx b = action_slow_field(s, e, charged, 0.2);
  CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("semiclassical validate checks the carrier kinematics") {
  SemiclassicalContext ctx;
  ctx.S_c = [](double, Vec3) { return 0.0; };
  ctx.x_p = [](double t) { return Vec3{0.3 * t, 0.0, 0.0}; };
  ctx.v_of_t = [](double) { return Vec3{0.5, 0.0, 0.0}; };  // wrong slope
  CHECK_THROWS_AS(ctx.validate(P, 0.0, 1.0), std::invalid_argument);
  // Consistent but fast: validate passes with a slow-field warning.
  ctx.v_of_t = [](double) { return Vec3{0.3, 0.0, 0.0}; };
  CHECK_FALSE(ctx.validate(P, 0.0, 1.0).empty());
  // Consistent and slow: clean.
  ctx.x_p = [](double t) { return Vec3{0.05 * t, 0.0, 0.0}; };
  ctx.v_of_t = [](double) { return Vec3{0.05, 0.0, 0.0}; };
  CHECK(ctx.validate(P, 0.0, 1.0).empty());
}

TEST_CASE("solution sampler agrees with the direct forms") {
  BreatherSpec s = rest(0.5);
  const SolutionSampler sol = make_solution(s, P);
  const SpacetimeEvent e{0.45, {1.9, 0.4, 0.0}};
  CHECK(std::abs(sol.psi(e) - psi_rest(s, e, P)) < 1e-15);
  CHECK(std::abs(sol.action(e) - action_rest(s, e, P)) < 1e-15);
  CHECK(std::abs(std::exp(cplx{0.0, 1.0} * sol.action(e)) - sol.psi(e)) < 1e-12);

  // log_argument is 1 + w: psi times the conjugated clock phase.
  const cplx w1 = std::exp(cplx{0.0, -P.clock_frequency() * e.t});
  CHECK(std::abs(sol.log_argument(e) - sol.psi(e) / w1) < 1e-14);
}

TEST_CASE("spec validation rejects inconsistent requests") {
  BreatherSpec s = rest(0.5);
  s.velocity = {0.2, 0.0, 0.0};
  s.train_period_d = 5.0;  // trains are rest-frame only
  CHECK_THROWS_AS(s.validate(P), std::invalid_argument);

  BreatherSpec bad_mode;
  bad_mode.alpha = 0.5;
  bad_mode.mode = {1, 2};  // |n| > l
  CHECK_THROWS_AS(bad_mode.validate(P), std::invalid_argument);

  BreatherSpec fast;
  fast.alpha = 0.5;
  fast.velocity = {1.5, 0.0, 0.0};
  CHECK_THROWS_AS(fast.validate(P), std::invalid_argument);
}
