#include "brth/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "brth/parallel.hpp"

namespace brth {

namespace {

constexpr double kPi = 3.14159265358979323846;

double well_midpoint(const std::pair<double, double>& tp) { return 0.5 * (tp.first + tp.second); }
double well_halfwidth(const std::pair<double, double>& tp) {
  return 0.5 * (tp.second - tp.first);
}

// Expands outward from x = 0 until the potential crosses the energy, then
// bisects the crossing. sign = +1 for the upper turning point, -1 for lower.
double find_turning_point(const std::function<double(double)>& u, double energy, double sign) {
  double lo = 0.0;
  double hi = sign * 1e-3;
  while (u(hi) < energy) {
    lo = hi;
    hi *= 2.0;
    if (std::abs(hi) > 1e9)
      throw std::runtime_error("classical orbit: potential does not confine this energy");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (u(mid) < energy)
      lo = mid;
    else
      hi = mid;
    if (std::abs(hi - lo) < 1e-12 * std::max(1.0, std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> find_turning_points(const std::function<double(double)>& u,
                                              double energy) {
  if (!u) throw std::invalid_argument("classical orbit: potential sampler missing");
  if (!(energy > u(0.0)))
    throw std::invalid_argument("classical orbit: energy must exceed the potential at x = 0");
  return {find_turning_point(u, energy, -1.0), find_turning_point(u, energy, +1.0)};
}

// Midpoint rule in the angle theta, x = mid - half cos(theta). The
// substitution regularizes the sqrt turning-point singularities; the even
// extension of the integrand is smooth, so the error decays spectrally.
template <class Fn>
double theta_midpoint(int n, Fn&& integrand) {
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double theta = (static_cast<double>(k) + 0.5) * kPi / static_cast<double>(n);
    sum += integrand(theta);
  }
  return sum * kPi / static_cast<double>(n);
}

}  // namespace

double compatibility_residual(double d, double p, const PhysicalParams& params) {
  params.validate();
  if (!(d > 0.0)) throw std::invalid_argument("compatibility_residual: d must be positive");
  const double f = d * p / (2.0 * kPi * params.hbar);
  return std::abs(f - std::round(f));
}

QuantizationScan scan_quantized_momenta(double d, double p_max, int samples,
                                        const PhysicalParams& params) {
  params.validate();
  if (!(d > 0.0)) throw std::invalid_argument("scan_quantized_momenta: d must be positive");
  if (!(p_max > 0.0)) throw std::invalid_argument("scan_quantized_momenta: p_max must be positive");
  if (samples < 100) throw std::invalid_argument("scan_quantized_momenta: need >= 100 samples");
  const double lattice = 2.0 * kPi * params.hbar / d;
  const double step = p_max / static_cast<double>(samples - 1);
  if (step > 0.25 * lattice)
    throw std::invalid_argument(
        "scan_quantized_momenta: sample step too coarse for the momentum lattice");

  QuantizationScan scan;
  scan.d = d;
  scan.momenta.resize(static_cast<std::size_t>(samples));
  scan.residuals.resize(static_cast<std::size_t>(samples));
  par::parallel_for(scan.momenta.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      scan.momenta[i] = static_cast<double>(i) * step;
      scan.residuals[i] = compatibility_residual(d, scan.momenta[i], params);
    }
  });

  auto refine = [&](double lo, double hi) {
    for (int iter = 0; iter < 200 && hi - lo > 1e-13 * std::max(1.0, p_max); ++iter) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (compatibility_residual(d, m1, params) < compatibility_residual(d, m2, params))
        hi = m2;
      else
        lo = m1;
    }
    return 0.5 * (lo + hi);
  };

  const std::size_t last = scan.momenta.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const bool left_ok = i == 0 || scan.residuals[i] <= scan.residuals[i - 1];
    const bool right_ok = i == last || scan.residuals[i] <= scan.residuals[i + 1];
    if (!left_ok || !right_ok) continue;
    const double lo = i == 0 ? scan.momenta[0] : scan.momenta[i - 1];
    const double hi = i == last ? scan.momenta[last] : scan.momenta[i + 1];
    const double p_star = refine(lo, hi);
    if (compatibility_residual(d, p_star, params) > 1e-8) continue;  // cut mid-slope at p_max
    const int n = static_cast<int>(std::llround(d * p_star / (2.0 * kPi * params.hbar)));
    if (!scan.quantum_numbers.empty() && scan.quantum_numbers.back() == n) continue;
    scan.quantized_p.push_back(p_star);
    scan.quantum_numbers.push_back(n);
  }
  return scan;
}

ClassicalOrbit make_classical_orbit(const std::function<double(double)>& potential, double energy,
                                    const PhysicalParams& params, int samples_per_period) {
  params.validate();
  if (samples_per_period < 16)
    throw std::invalid_argument("make_classical_orbit: need >= 16 samples per period");
  ClassicalOrbit orbit;
  orbit.potential = potential;
  orbit.energy = energy;
  orbit.turning_points = find_turning_points(potential, energy);
  const double mid = well_midpoint(orbit.turning_points);
  const double half = well_halfwidth(orbit.turning_points);
  const double m = params.m;

  orbit.period = 2.0 * theta_midpoint(samples_per_period, [&](double theta) {
    const double x = mid - half * std::cos(theta);
    const double speed2 = 2.0 * (energy - potential(x)) / m;
    return half * std::sin(theta) / std::sqrt(std::max(speed2, 1e-300));
  });

  // One period of Newtonian motion from the lower turning point, force by
  // central differencing of the potential.
  const double h_fd = 1e-6 * std::max(1.0, half);
  auto accel = [&](double x) {
    return -(potential(x + h_fd) - potential(x - h_fd)) / (2.0 * h_fd * m);
  };
  const double dt = orbit.period / static_cast<double>(samples_per_period);
  double x = orbit.turning_points.first;
  double v = 0.0;
  auto& traj = orbit.trajectory;
  traj.times.reserve(static_cast<std::size_t>(samples_per_period) + 1);
  for (int n = 0; n <= samples_per_period; ++n) {
    traj.times.push_back(static_cast<double>(n) * dt);
    traj.positions.push_back({x, 0.0, 0.0});
    traj.velocities.push_back({v, 0.0, 0.0});
    if (n == samples_per_period) break;
    const double k1x = v, k1v = accel(x);
    const double k2x = v + 0.5 * dt * k1v, k2v = accel(x + 0.5 * dt * k1x);
    const double k3x = v + 0.5 * dt * k2v, k3v = accel(x + 0.5 * dt * k2x);
    const double k4x = v + dt * k3v, k4v = accel(x + dt * k3x);
    x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
  return orbit;
}

double classical_action(const ClassicalOrbit& orbit, const PhysicalParams& params, double t,
                        double x) {
  params.validate();
  if (t < 0.0 || t > orbit.period)
    throw std::invalid_argument("classical_action: t outside the integrated range");
  const auto [xlo, xhi] = orbit.turning_points;
  const double width = xhi - xlo;
  if (x < xlo - 1e-9 * width || x > xhi + 1e-9 * width)
    throw std::invalid_argument("classical_action: x in the classically forbidden region");
  const double mid = well_midpoint(orbit.turning_points);
  const double half = well_halfwidth(orbit.turning_points);
  const double cos_theta = std::clamp((mid - x) / half, -1.0, 1.0);
  const double theta_x = std::acos(cos_theta);

  // Composite Simpson in theta for W(x); the integrand vanishes ~theta^2 at
  // the lower turning point, so no endpoint care is needed.
  const int n = 2048;
  const double h = theta_x / n;
  auto f = [&](double theta) {
    const double xx = mid - half * std::cos(theta);
    const double p2 = 2.0 * params.m * std::max(orbit.energy - orbit.potential(xx), 0.0);
    return std::sqrt(p2) * half * std::sin(theta);
  };
  double w = f(0.0) + f(theta_x);
  for (int k = 1; k < n; ++k) w += f(k * h) * (k % 2 ? 4.0 : 2.0);
  w *= h / 3.0;
  return -orbit.energy * t + w;
}

double accumulated_lagrangian(const ClassicalOrbit& orbit, const PhysicalParams& params,
                              double t) {
  params.validate();
  const auto& traj = orbit.trajectory;
  if (traj.times.empty() || t < traj.times.front() || t > traj.times.back() + 1e-12)
    throw std::invalid_argument("accumulated_lagrangian: t outside the integrated range");
  auto lagrangian = [&](std::size_t i) {
    return 0.5 * params.m * traj.velocities[i].norm2() - orbit.potential(traj.positions[i].x);
  };
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
    const double t0 = traj.times[i], t1 = traj.times[i + 1];
    if (t <= t0) break;
    if (t >= t1) {
      acc += 0.5 * (lagrangian(i) + lagrangian(i + 1)) * (t1 - t0);
    } else {
      // partial interval, integrand interpolated linearly
      const double frac = (t - t0) / (t1 - t0);
      const double l_t = lagrangian(i) + frac * (lagrangian(i + 1) - lagrangian(i));
      acc += 0.5 * (lagrangian(i) + l_t) * (t - t0);
      break;
    }
  }
  return acc;
}

double loop_integral(const ClassicalOrbit& orbit, const PhysicalParams& params) {
  params.validate();
  const auto& traj = orbit.trajectory;
  if (traj.times.size() < 2) throw std::invalid_argument("loop_integral: empty trajectory");
  const double width = orbit.turning_points.second - orbit.turning_points.first;
  if ((traj.positions.back() - traj.positions.front()).norm() > 1e-6 * std::max(1.0, width))
    throw std::invalid_argument("loop_integral: orbit is not periodic over its stored span");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
    const double f0 = params.m * traj.velocities[i].norm2();
    const double f1 = params.m * traj.velocities[i + 1].norm2();
    acc += 0.5 * (f0 + f1) * (traj.times[i + 1] - traj.times[i]);
  }
  return acc;
}

double loop_integral_quadrature(const std::function<double(double)>& potential, double energy,
                                const PhysicalParams& params, int samples) {
  params.validate();
  if (samples < 16) throw std::invalid_argument("loop_integral_quadrature: too few samples");
  const auto tp = find_turning_points(potential, energy);
  const double mid = well_midpoint(tp);
  const double half = well_halfwidth(tp);
  return 2.0 * theta_midpoint(samples, [&](double theta) {
    const double x = mid - half * std::cos(theta);
    const double p2 = 2.0 * params.m * std::max(energy - potential(x), 0.0);
    return std::sqrt(p2) * half * std::sin(theta);
  });
}

double ring_loop_integral(double p, double d) {
  if (!(d > 0.0)) throw std::invalid_argument("ring_loop_integral: circumference must be positive");
  return p * d;
}

std::vector<std::pair<int, double>> bohr_sommerfeld_levels(
    const std::function<double(double)>& potential, const PhysicalParams& params, int n_min,
    int n_max) {
  params.validate();
  if (n_min < 0 || n_max < n_min)
    throw std::invalid_argument("bohr_sommerfeld_levels: need 0 <= n_min <= n_max");
  std::vector<std::pair<int, double>> levels;
  const double floor_e = potential ? potential(0.0) : 0.0;
  double e_hi_seed = 1.0;
  for (int n = n_min; n <= n_max; ++n) {
    const double target = 2.0 * kPi * params.hbar * static_cast<double>(n);
    if (target == 0.0) {
      levels.emplace_back(0, floor_e);
      continue;
    }
    double lo = floor_e + 1e-12 * std::max(1.0, std::abs(floor_e));
    double hi = e_hi_seed;
    while (loop_integral_quadrature(potential, hi, params) < target) {
      hi *= 2.0;
      if (hi > 1e12)
        throw std::runtime_error("bohr_sommerfeld_levels: action never reaches the target");
    }
    if (!(loop_integral_quadrature(potential, hi, params) >
          loop_integral_quadrature(potential, std::max(lo, hi / 4.0), params)))
      throw std::runtime_error("bohr_sommerfeld_levels: action map is not increasing here");
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-10 * hi; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (loop_integral_quadrature(potential, mid, params) < target)
        lo = mid;
      else
        hi = mid;
    }
    const double e_n = 0.5 * (lo + hi);
    levels.emplace_back(n, e_n);
    e_hi_seed = std::max(1.0, 2.0 * e_n);
  }
  return levels;
}

}  // namespace brth
