#include "brth/breather.hpp"

#include <cmath>
#include <limits>

namespace brth {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

const cplx kI{0.0, 1.0};

cplx expi(double phase) { return cplx{std::cos(phase), std::sin(phase)}; }

double magnitude(cplx z) { return std::abs(z); }

// Oscillating log argument of the rest action, w(t, r) = alpha e^{-i beat t} j_0(k r).
cplx rest_log_argument(const BreatherSpec& spec, double t, double r,
                       const PhysicalParams& params) {
  const double w1 = params.clock_frequency();
  const double w2 = spec.omega_override.value_or(locked_omega(params));
  const double beat = w2 - w1;
  return spec.alpha * expi(-beat * t) * spherical_bessel_j(0, breather_wavenumber(params) * r);
}

}  // namespace

double breather_wavenumber(const PhysicalParams& params) {
  return std::sqrt(3.0) * params.m * params.c / params.hbar;
}

double locked_omega(const PhysicalParams& params) { return 2.0 * params.clock_frequency(); }

void BreatherSpec::validate(const PhysicalParams& params) const {
  params.validate();
  if (mode.l < 0 || std::abs(mode.n) > mode.l)
    throw std::invalid_argument("BreatherSpec: mode requires l >= 0 and |n| <= l");
  if (!(velocity.norm() < params.c))
    throw std::invalid_argument("BreatherSpec: |velocity| must be below c");
  if (magnitude(alpha) >= 1.0 && !allow_unwrap)
    throw std::invalid_argument(
        "BreatherSpec: |alpha| >= 1 requires the unwrap override (log branches wind)");
  if (train_period_d && !(*train_period_d > 0.0))
    throw std::invalid_argument("BreatherSpec: train period d must be positive");
  if (train_period_d && (!train_truncation_K || *train_truncation_K < 1))
    throw std::invalid_argument("BreatherSpec: trains need a truncation order K >= 1");
  if (omega_override && !(*omega_override > 0.0))
    throw std::invalid_argument("BreatherSpec: omega override must be positive");
}

cplx psi_rest(const BreatherSpec& spec, const SpacetimeEvent& event,
              const PhysicalParams& params) {
  spec.validate(params);
  if (spec.velocity.norm() != 0.0 || spec.mode.l != 0 || spec.mode.n != 0 || spec.is_train())
    throw std::invalid_argument("psi_rest: expects the rest (0,0) single-core spec");
  const double w1 = params.clock_frequency();
  return expi(-w1 * event.t) * (cplx{1.0, 0.0} + rest_log_argument(spec, event.t, event.r(), params));
}

cplx spinning_term(const ModeIndex& mode, cplx alpha, const SpacetimeEvent& event,
                   const PhysicalParams& params) {
  if (mode.l < 0 || std::abs(mode.n) > mode.l)
    throw std::invalid_argument("spinning_term: mode requires l >= 0 and |n| <= l");
  const double w2 = locked_omega(params);
  const double r = event.r();
  if (r == 0.0) {
    // j_l(0) vanishes for l >= 1 and the angular factors are bounded.
    if (mode.l > 0) return cplx{0.0, 0.0};
    return alpha * expi(-w2 * event.t);
  }
  const double u = event.x.z / r;  // cos(theta), theta from the z axis
  double phi = std::atan2(event.x.y, event.x.x);
  if (phi < 0.0) phi += kTwoPi;
  const double radial = spherical_bessel_j(mode.l, breather_wavenumber(params) * r);
  const double angular = associated_legendre(mode.l, mode.n, u);
  return alpha * expi(-w2 * event.t + mode.n * phi) * radial * angular;
}

cplx breather_psi(const BreatherSpec& spec, const SpacetimeEvent& event,
                  const PhysicalParams& params) {
  spec.validate(params);
  if (spec.is_train())
    throw std::invalid_argument("breather_psi: trains are evaluated in action form");
  const SpacetimeEvent e =
      spec.velocity.norm() > 0.0 ? lorentz_boost(event, spec.velocity, params) : event;
  const double w1 = params.clock_frequency();
  const cplx clock = expi(-w1 * e.t);
  if (spec.mode.l == 0 && !spec.omega_override)
    return clock + spinning_term(spec.mode, spec.alpha, e, params);
  if (spec.mode.l == 0)
    return clock * (cplx{1.0, 0.0} + rest_log_argument(spec, e.t, e.r(), params));
  return clock + spinning_term(spec.mode, spec.alpha, e, params);
}

cplx action_from_psi(cplx psi, const PhysicalParams& params, std::optional<cplx> branch_anchor) {
  if (psi == cplx{0.0, 0.0})
    throw BranchPointError("action_from_psi: psi = 0 is a branch point of ln");
  // -i hbar (ln|psi| + i arg psi) = hbar arg psi - i hbar ln|psi|
  cplx s = cplx{params.hbar * std::arg(psi), -params.hbar * std::log(std::abs(psi))};
  if (branch_anchor) {
    const double period = kTwoPi * params.hbar;
    const double k = std::round((branch_anchor->real() - s.real()) / period);
    s += cplx{k * period, 0.0};
  }
  return s;
}

ActionSample action_rest_sample(const BreatherSpec& spec, const SpacetimeEvent& event,
                                const PhysicalParams& params) {
  spec.validate(params);
  if (spec.velocity.norm() != 0.0 || spec.mode.l != 0 || spec.is_train())
    throw std::invalid_argument("action_rest: expects the rest (0,0) single-core spec");
  const double w1 = params.clock_frequency();
  const cplx w = rest_log_argument(spec, event.t, event.r(), params);

  if (magnitude(spec.alpha) < 1.0) {
    // |w| < 1 keeps 1 + w inside the principal branch for all t.
    const cplx z = cplx{1.0, 0.0} + w;
    if (magnitude(z) < 1e-300)
      throw BranchPointError("action_rest: log argument vanished");
    return {cplx{-params.m * params.c * params.c * event.t, 0.0} -
                kI * params.hbar * std::log(z),
            false};
  }

  // Amplitude at or above 1: follow the continuous branch of ln(1 + w(tau))
  // from tau = 0 to tau = t. The winding is driven only by the beat phase.
  const double w2 = spec.omega_override.value_or(locked_omega(params));
  const double beat = w2 - w1;
  const double j0 = spherical_bessel_j(0, breather_wavenumber(params) * event.r());
  const int steps = 8 + static_cast<int>(std::ceil(std::abs(beat * event.t) / 0.1));
  cplx z_prev = cplx{1.0, 0.0} + spec.alpha * j0;
  if (magnitude(z_prev) < 1e-10)
    throw BranchPointError("action_rest: log branch passes through zero at t = 0");
  double theta = std::arg(z_prev);
  for (int s = 1; s <= steps; ++s) {
    const double tau = event.t * static_cast<double>(s) / static_cast<double>(steps);
    const cplx z = cplx{1.0, 0.0} + spec.alpha * expi(-beat * tau) * j0;
    if (magnitude(z) < 1e-10)
      throw BranchPointError("action_rest: log branch passes through zero along the path");
    theta += std::arg(z / z_prev);
    z_prev = z;
  }
  const cplx log_cont{std::log(magnitude(z_prev)), theta};
  return {cplx{-params.m * params.c * params.c * event.t, 0.0} - kI * params.hbar * log_cont,
          true};
}

cplx action_rest(const BreatherSpec& spec, const SpacetimeEvent& event,
                 const PhysicalParams& params) {
  return action_rest_sample(spec, event, params).value;
}

SpacetimeEvent lorentz_boost(const SpacetimeEvent& event, Vec3 v, const PhysicalParams& params) {
  const double speed = v.norm();
  if (!(speed < params.c)) throw std::invalid_argument("lorentz_boost: |v| must be below c");
  if (speed == 0.0) return event;
  const double c2 = params.c * params.c;
  const double gamma = 1.0 / std::sqrt(1.0 - speed * speed / c2);
  const Vec3 vhat = v / speed;
  const double par = event.x.dot(vhat);
  const Vec3 perp = event.x - par * vhat;
  SpacetimeEvent out;
  out.t = gamma * (event.t - event.x.dot(v) / c2);
  out.x = perp + (gamma * (par - speed * event.t)) * vhat;
  return out;
}

cplx action_boosted(const BreatherSpec& spec, const SpacetimeEvent& event,
                    const PhysicalParams& params) {
  spec.validate(params);
  if (spec.is_train())
    throw std::invalid_argument("action_boosted: trains are evaluated by train_action");
  BreatherSpec rest = spec;
  rest.velocity = Vec3{};
  return action_rest(rest, lorentz_boost(event, spec.velocity, params), params);
}

TrainEval train_action(const BreatherSpec& spec, const SpacetimeEvent& event,
                       const PhysicalParams& params) {
  spec.validate(params);
  if (!spec.is_train()) throw std::invalid_argument("train_action: spec carries no train period");
  const double d = *spec.train_period_d;
  const int K = *spec.train_truncation_K;
  const double c = params.c;
  const double speed = spec.velocity.norm();
  const Vec3 axis = speed > 0.0 ? spec.velocity / speed : Vec3{1.0, 0.0, 0.0};
  const double gamma = 1.0 / std::sqrt(1.0 - speed * speed / (c * c));
  const double energy = gamma * params.m * c * c;
  const Vec3 momentum = gamma * params.m * spec.velocity;

  const double par = event.x.dot(axis);
  const Vec3 perp = event.x - par * axis;
  const double perp2 = perp.norm2();
  // Co-moving longitudinal coordinate; core k sits at xi = k * d * gamma.
  const double xi = gamma * (par - speed * event.t);
  const double d_dilated = gamma * d;

  const double kb = breather_wavenumber(params);
  double sum = 0.0, abs_sum = 0.0;
  for (int k = -K; k <= K; ++k) {
    const double dx = xi - static_cast<double>(k) * d_dilated;
    const double rk = std::sqrt(dx * dx + perp2);
    const double jk = spherical_bessel_j(0, kb * rk);
    sum += jk;
    abs_sum += std::abs(jk);
  }

  const double edge = static_cast<double>(K) * d_dilated - std::abs(xi);
  const double amp = magnitude(spec.alpha);
  double tail = std::numeric_limits<double>::infinity();
  if (edge > 0.0) tail = amp / (kb * edge);

  if (amp * abs_sum >= 1.0)
    throw std::invalid_argument(
        "train_action: |alpha| times the core-sum bound reaches 1; the log branch is unsafe");

  const double phase = (-energy * event.t + momentum.dot(event.x)) / params.hbar;
  const cplx z = cplx{1.0, 0.0} + spec.alpha * expi(phase) * sum;
  if (magnitude(z) < 1e-12)
    throw BranchPointError("train_action: log argument vanished");

  TrainEval out;
  out.value = cplx{-energy * event.t + momentum.dot(event.x), 0.0} -
              kI * params.hbar * std::log(z);
  out.tail_estimate = tail;
  out.k_too_small = !(tail <= 0.1 * amp);
  return out;
}

cplx action_slow_field(const BreatherSpec& spec, const SpacetimeEvent& event,
                       const PhysicalParams& params, double U0, Vec3 A0) {
  spec.validate(params);
  const double w1 = params.clock_frequency();
  const cplx w = spec.alpha * expi(-w1 * event.t) *
                 spherical_bessel_j(0, breather_wavenumber(params) * event.r());
  const cplx z = cplx{1.0, 0.0} + w;
  if (magnitude(z) < 1e-12) throw BranchPointError("action_slow_field: log argument vanished");
  const double linear = -(params.m * params.c * params.c + params.e_charge * U0) * event.t +
                        params.e_charge / params.c * A0.dot(event.x);
  return cplx{linear, 0.0} - kI * params.hbar * std::log(z);
}

std::vector<std::string> SemiclassicalContext::validate(const PhysicalParams& params, double t0,
                                                        double t1) const {
  if (!S_c || !x_p || !v_of_t)
    throw std::invalid_argument("SemiclassicalContext: S_c, x_p and v_of_t are all required");
  std::vector<std::string> warnings;
  const double h = std::max(1e-6, (t1 - t0) * 1e-5);
  for (int i = 0; i <= 4; ++i) {
    const double t = t0 + (t1 - t0) * i / 4.0;
    const Vec3 fd = (x_p(t + h) - x_p(t - h)) / (2.0 * h);
    const Vec3 v = v_of_t(t);
    const double scale = std::max(v.norm(), 1e-12);
    if ((fd - v).norm() > 1e-6 * scale + 1e-9)
      throw std::invalid_argument(
          "SemiclassicalContext: v_of_t disagrees with the derivative of x_p");
    if (v.norm() > 0.1 * params.c)
      warnings.push_back("semiclassical carrier speed above 0.1 c; slow-field form degrades");
  }
  return warnings;
}

cplx semiclassical_action(const SemiclassicalContext& ctx, const BreatherSpec& spec,
                          const SpacetimeEvent& event, const PhysicalParams& params) {
  spec.validate(params);
  if (!ctx.S_c || !ctx.x_p || !ctx.v_of_t)
    throw std::invalid_argument("semiclassical_action: incomplete context");
  const double w1 = params.clock_frequency();
  const Vec3 v = ctx.v_of_t(event.t);
  const Vec3 rel = event.x - ctx.x_p(event.t);
  const double db_phase = -w1 * event.t + params.m * v.dot(event.x) / params.hbar;
  const cplx w = spec.alpha * expi(db_phase) *
                 spherical_bessel_j(0, breather_wavenumber(params) * rel.norm());
  const cplx z = cplx{1.0, 0.0} + w;
  if (magnitude(z) < 1e-12)
    throw BranchPointError("semiclassical_action: log argument vanished");
  return cplx{-params.m * params.c * params.c * event.t + ctx.S_c(event.t, event.x), 0.0} -
         kI * params.hbar * std::log(z);
}

namespace {

// Log argument 1 + w for any mode (l, n), at an event already in the rest frame.
cplx mode_log_argument(const BreatherSpec& spec, const SpacetimeEvent& e,
                       const PhysicalParams& params) {
  const double w1 = params.clock_frequency();
  const double w2 = spec.omega_override.value_or(locked_omega(params));
  const double beat = w2 - w1;
  const double r = e.r();
  if (r == 0.0) {
    if (spec.mode.l > 0) return cplx{1.0, 0.0};
    return cplx{1.0, 0.0} + spec.alpha * expi(-beat * e.t);
  }
  double phi = std::atan2(e.x.y, e.x.x);
  if (phi < 0.0) phi += kTwoPi;
  const double radial = spherical_bessel_j(spec.mode.l, breather_wavenumber(params) * r);
  const double angular =
      spec.mode.l == 0 ? 1.0 : associated_legendre(spec.mode.l, spec.mode.n, e.x.z / r);
  return cplx{1.0, 0.0} + spec.alpha * expi(-beat * e.t + spec.mode.n * phi) * radial * angular;
}

void require_uniform(const Potentials& pot, double u0, Vec3 a0) {
  const SpacetimeEvent probes[] = {{0.3, {0.7, -0.2, 0.4}},
                                   {-1.1, {0.1, 0.9, -0.5}},
                                   {2.0, {-1.0, 1.0, 1.0}},
                                   {0.05, {3.0, 0.0, 0.0}}};
  for (const auto& p : probes) {
    const double du = std::abs(pot.scalar(p.t, p.x) - u0);
    const double da = (pot.vector(p.t, p.x) - a0).norm();
    if (du > 1e-12 * (1.0 + std::abs(u0)) || da > 1e-12 * (1.0 + a0.norm()))
      throw std::invalid_argument(
          "make_solution: only uniform potentials have a closed dressed form");
  }
}

}  // namespace

SolutionSampler make_solution(const BreatherSpec& spec, const PhysicalParams& params,
                              const Potentials& potentials) {
  spec.validate(params);
  if (spec.is_train())
    throw std::invalid_argument("make_solution: trains carry no pointwise psi; use train_action");

  double u0 = 0.0;
  Vec3 a0{};
  const bool dressed = !potentials.is_zero();
  if (dressed) {
    u0 = potentials.scalar(0.0, Vec3{});
    a0 = potentials.vector(0.0, Vec3{});
    require_uniform(potentials, u0, a0);
    if (spec.velocity.norm() > 0.0)
      throw std::invalid_argument("make_solution: dressed solutions are rest-frame only");
  }

  const double mc2 = params.m * params.c * params.c;
  const double e_over = params.e_charge;
  const double hbar = params.hbar;
  const double c = params.c;
  const bool moving = spec.velocity.norm() > 0.0;

  auto to_rest = [spec, params, moving](const SpacetimeEvent& ev) {
    return moving ? lorentz_boost(ev, spec.velocity, params) : ev;
  };
  // Dressing by uniform (U0, A0) is the gauge phase theta = (-e U0 t + (e/c) A0.x)/hbar.
  auto theta = [=](const SpacetimeEvent& ev) {
    return (-e_over * u0 * ev.t + e_over / c * a0.dot(ev.x)) / hbar;
  };

  SolutionSampler out;
  out.log_argument = [spec, params, to_rest](const SpacetimeEvent& ev) {
    return mode_log_argument(spec, to_rest(ev), params);
  };
  out.psi = [spec, params, dressed, theta](const SpacetimeEvent& ev) {
    const cplx base = breather_psi(spec, ev, params);
    return dressed ? expi(theta(ev)) * base : base;
  };
  if (!moving && spec.mode.l == 0 && magnitude(spec.alpha) >= 1.0) {
    // Tracked branch; the winding count is a continuous function of the event.
    out.action = [spec, params, dressed, theta, hbar](const SpacetimeEvent& ev) {
      cplx s = action_rest(spec, ev, params);
      return dressed ? s + cplx{hbar * theta(ev), 0.0} : s;
    };
    return out;
  }
  out.action = [spec, params, to_rest, dressed, theta, mc2, hbar](const SpacetimeEvent& ev) {
    const SpacetimeEvent e = to_rest(ev);
    const cplx z = mode_log_argument(spec, e, params);
    if (magnitude(z) < 1e-12) throw BranchPointError("make_solution: log argument vanished");
    cplx s = cplx{-mc2 * e.t, 0.0} - kI * hbar * std::log(z);
    return dressed ? s + cplx{hbar * theta(ev), 0.0} : s;
  };
  return out;
}

}  // namespace brth
