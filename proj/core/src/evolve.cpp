#include "brth/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "brth/parallel.hpp"

namespace brth {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
const cplx kI{0.0, 1.0};

bool is_radial_grid(const SpacetimeGrid& grid) {
  return grid.rank() == 1 && grid.axis(0).name == "r";
}

bool is_cartesian_grid(const SpacetimeGrid& grid) {
  if (grid.rank() != 3) return false;
  return grid.has_axis("x") && grid.has_axis("y") && grid.has_axis("z");
}

void check_spatial_grid(const SpacetimeGrid& grid, Geometry geometry, const std::string& who) {
  if (grid.has_axis("t")) throw std::invalid_argument(who + ": spatial slices carry no t axis");
  if (geometry == Geometry::radial_1d) {
    if (!is_radial_grid(grid)) throw std::invalid_argument(who + ": radial_1d needs the {r} grid");
    if (grid.axis(0).min != 0.0)
      throw std::invalid_argument(who + ": radial evolution grids start at r = 0");
  } else if (!is_cartesian_grid(grid)) {
    throw std::invalid_argument(who + ": cartesian_3d needs the {x, y, z} grid");
  }
}

double min_axis_spacing(const SpacetimeGrid& grid) {
  double h = grid.axis(0).spacing();
  for (const auto& ax : grid.axes()) h = std::min(h, ax.spacing());
  return h;
}

// Energy quadratic of a (u, v) pair: 1/2 sum(|v|^2 + c^2 |D+ u|^2
// + (m c^2 / hbar)^2 |u|^2) cellvolume, forward differences, wrapping when
// periodic.
double energy_quadratic(const SpacetimeGrid& grid, const std::vector<cplx>& u,
                        const std::vector<cplx>& v, const PhysicalParams& params, bool periodic) {
  const double c2 = params.c * params.c;
  const double w1 = params.clock_frequency();
  const std::size_t n = grid.size();

  double sum = par::blocked_sum(
      n, [&](std::size_t i) { return std::norm(v[i]) + w1 * w1 * std::norm(u[i]); });

  for (std::size_t a = 0; a < grid.rank(); ++a) {
    const std::size_t stride = grid.stride(a);
    const std::size_t count = grid.axis(a).count;
    const double h = grid.axis(a).spacing();
    sum += par::blocked_sum(n, [&](std::size_t i) {
      std::size_t idx[4];
      grid.unflatten(i, {idx, grid.rank()});
      std::size_t j;
      if (idx[a] + 1 < count)
        j = i + stride;
      else if (periodic)
        j = i - (count - 1) * stride;
      else
        return 0.0;
      return c2 * std::norm((u[j] - u[i]) / h);
    });
  }
  return 0.5 * sum * grid.cell_volume();
}

}  // namespace

std::vector<std::string> resolution_warnings(const SpacetimeGrid& grid,
                                             const PhysicalParams& params) {
  std::vector<std::string> out;
  double hmax = 0.0, halfwidth = 1e300;
  for (const auto& ax : grid.axes()) {
    hmax = std::max(hmax, ax.spacing());
    const double hw = ax.name == "r" ? ax.max : 0.5 * (ax.max - ax.min);
    halfwidth = std::min(halfwidth, hw);
  }
  if (hmax > 0.2 * params.compton_length())
    out.push_back("grid spacing above 0.2 compton lengths; the core is under-resolved");
  if (is_radial_grid(grid) && halfwidth < 10.0 * params.compton_length())
    out.push_back("radial domain shorter than 10 compton lengths; tails are clipped");
  return out;
}

EvolutionState init_from_breather(const BreatherSpec& spec, const SpacetimeGrid& grid,
                                  const PhysicalParams& params) {
  spec.validate(params);
  if (spec.is_train() || spec.velocity.norm() != 0.0)
    throw std::invalid_argument("init_from_breather: rest-frame single cores only");
  const bool radial = is_radial_grid(grid);
  check_spatial_grid(grid, radial ? Geometry::radial_1d : Geometry::cartesian_3d,
                     "init_from_breather");
  if (radial && spec.mode.l != 0)
    throw std::invalid_argument("init_from_breather: spinning modes need the 3D grid");
  if (radial && grid.axis(0).max < 10.0 * params.compton_length())
    throw std::invalid_argument(
        "init_from_breather: radial domain must span at least 10 compton lengths");

  // Fewer than 3 points per core half-width cannot represent the profile.
  const double core_half = kPi / breather_wavenumber(params);
  double hmax = 0.0;
  for (const auto& ax : grid.axes()) hmax = std::max(hmax, ax.spacing());
  if (hmax > core_half / 3.0)
    throw std::invalid_argument(
        "init_from_breather: grid spacing leaves under 3 points per core half-width");

  const SolutionSampler sol = make_solution(spec, params);
  const double w1 = params.clock_frequency();
  const double w2 = spec.omega_override.value_or(locked_omega(params));

  auto event0 = [&](std::span<const double> coords) {
    SpacetimeEvent e{};
    for (std::size_t a = 0; a < grid.rank(); ++a) {
      const std::string& n = grid.axis(a).name;
      if (n == "y")
        e.x.y = coords[a];
      else if (n == "z")
        e.x.z = coords[a];
      else
        e.x.x = coords[a];
    }
    return e;
  };
  const PointSampler value = [&](std::span<const double> coords) {
    const SpacetimeEvent e = event0(coords);
    const cplx psi = sol.psi(e);
    return radial ? coords[0] * psi : psi;
  };
  // Exact derivative of (clock mode) + (alpha term): each factor carries its
  // own locked frequency.
  const PointSampler rate = [&](std::span<const double> coords) {
    const SpacetimeEvent e = event0(coords);
    const cplx term = sol.log_argument(e) - cplx{1.0, 0.0};  // the alpha part at t = 0
    const cplx psi_dot = -kI * w1 - kI * w2 * term;
    return radial ? coords[0] * psi_dot : psi_dot;
  };

  EvolutionState state{sample(value, grid, Quantity::Psi), sample(rate, grid, Quantity::Psi), 0.0,
                       0};
  return state;
}

Evolver::Evolver(EvolutionState initial, EvolveOptions options, PhysicalParams params)
    : state_(std::move(initial)), options_(std::move(options)), params_(params) {
  params_.validate();
  const SpacetimeGrid& grid = state_.psi.grid();
  if (!(grid == state_.psi_dot.grid()))
    throw std::invalid_argument("Evolver: psi and psi_dot must share one grid");
  check_spatial_grid(grid, options_.geometry, "Evolver");
  if (options_.boundary == Boundary::analytic && !options_.boundary_value)
    throw std::invalid_argument("Evolver: analytic boundary needs a boundary_value sampler");

  const double h = min_axis_spacing(grid);
  const double limit = options_.geometry == Geometry::radial_1d
                           ? 0.5 * h / params_.c
                           : 0.5 * h / (params_.c * std::sqrt(static_cast<double>(grid.rank())));
  if (!(options_.dt != 0.0) || !std::isfinite(options_.dt))
    throw std::invalid_argument("Evolver: dt must be a nonzero finite step");
  if (std::abs(options_.dt) > limit)
    throw std::invalid_argument("Evolver: dt violates the CFL bound 0.5 h / (c sqrt(D))");
  dt_ = options_.dt;

  accel_.assign(grid.size(), cplx{});
  held_.assign(grid.size(), 0);
  if (options_.boundary != Boundary::periodic) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (!grid.is_interior(i)) held_[i] = 1;
  }
  if (options_.boundary == Boundary::dirichlet_far) {
    auto& u = state_.psi.mutable_values();
    auto& v = state_.psi_dot.mutable_values();
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (held_[i]) {
        u[i] = cplx{};
        v[i] = cplx{};
      }
  } else if (options_.boundary == Boundary::analytic) {
    refresh_boundary_values();
    refresh_boundary_rates();
  }
}

void Evolver::apply_operator(const std::vector<cplx>& in, std::vector<cplx>& out) const {
  const SpacetimeGrid& grid = state_.psi.grid();
  const double c2 = params_.c * params_.c;
  const double kappa = params_.m * params_.c / params_.hbar;
  const bool periodic = options_.boundary == Boundary::periodic;
  const std::size_t n = grid.size();

  if (grid.rank() == 1) {
    const double inv_h2 = 1.0 / (grid.axis(0).spacing() * grid.axis(0).spacing());
    par::parallel_for(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        if (held_[i]) {
          out[i] = cplx{};
          continue;
        }
        const cplx left = i > 0 ? in[i - 1] : (periodic ? in[n - 1] : cplx{});
        const cplx right = i + 1 < n ? in[i + 1] : (periodic ? in[0] : cplx{});
        out[i] = c2 * ((left - 2.0 * in[i] + right) * inv_h2 - kappa * kappa * in[i]);
      }
    });
    return;
  }

  par::parallel_for(n, [&](std::size_t b, std::size_t e) {
    std::size_t idx[4];
    for (std::size_t i = b; i < e; ++i) {
      if (held_[i]) {
        out[i] = cplx{};
        continue;
      }
      grid.unflatten(i, {idx, grid.rank()});
      cplx lap{};
      for (std::size_t a = 0; a < grid.rank(); ++a) {
        const std::size_t stride = grid.stride(a);
        const std::size_t count = grid.axis(a).count;
        const double h = grid.axis(a).spacing();
        const std::size_t im =
            idx[a] > 0 ? i - stride : i + (count - 1) * stride;  // wraps only when periodic
        const std::size_t ip = idx[a] + 1 < count ? i + stride : i - (count - 1) * stride;
        lap += (in[im] - 2.0 * in[i] + in[ip]) / (h * h);
      }
      out[i] = c2 * (lap - kappa * kappa * in[i]);
    }
  });
}

void Evolver::refresh_boundary_values() {
  const SpacetimeGrid& grid = state_.psi.grid();
  auto& u = state_.psi.mutable_values();
  double coords[4];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!held_[i]) continue;
    grid.point(i, {coords, grid.rank()});
    u[i] = options_.boundary_value(state_.t, {coords, grid.rank()});
  }
}

void Evolver::refresh_boundary_rates() {
  const SpacetimeGrid& grid = state_.psi.grid();
  auto& v = state_.psi_dot.mutable_values();
  const double delta = 1e-6 / params_.clock_frequency();
  double coords[4];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!held_[i]) continue;
    grid.point(i, {coords, grid.rank()});
    const std::span<const double> c{coords, grid.rank()};
    v[i] = (options_.boundary_value(state_.t + delta, c) -
            options_.boundary_value(state_.t - delta, c)) /
           (2.0 * delta);
  }
}

void Evolver::advance(std::size_t steps) {
  auto& u = state_.psi.mutable_values();
  auto& v = state_.psi_dot.mutable_values();
  const std::size_t n = u.size();
  const bool analytic = options_.boundary == Boundary::analytic;

  for (std::size_t s = 0; s < steps; ++s) {
    const double half = 0.5 * dt_;
    apply_operator(u, accel_);
    par::parallel_for(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        v[i] += half * accel_[i];
        if (!held_[i]) u[i] += dt_ * v[i];
      }
    });
    state_.t += dt_;
    if (analytic) refresh_boundary_values();
    apply_operator(u, accel_);
    par::parallel_for(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) v[i] += half * accel_[i];
    });
    if (analytic) refresh_boundary_rates();
    ++state_.step_count;
  }
}

double Evolver::shadow_energy() const {
  const SpacetimeGrid& grid = state_.psi.grid();
  const auto& u = state_.psi.values();
  const auto& v = state_.psi_dot.values();
  const std::size_t n = grid.size();
  std::vector<cplx> lu(n);
  apply_operator(u, lu);
  const double half = 0.5 * dt_;
  const double s1 = par::blocked_sum(n, [&](std::size_t i) {
    const cplx w = v[i] + half * lu[i];
    return std::norm(w);
  });
  const double s2 = par::blocked_sum(n, [&](std::size_t i) {
    const cplx w = v[i] + half * lu[i];
    const cplx x1 = u[i] + dt_ * w;
    return std::real(x1 * std::conj(lu[i]));
  });
  return 0.5 * (s1 - s2) * grid.cell_volume();
}

double Evolver::stated_energy() const {
  return energy_quadratic(state_.psi.grid(), state_.psi.values(), state_.psi_dot.values(),
                          params_, options_.boundary == Boundary::periodic);
}

EvolutionState step(const EvolutionState& state, double dt, const PhysicalParams& params,
                    const EvolveOptions& options) {
  EvolveOptions opt = options;
  opt.dt = dt;
  Evolver ev(state, opt, params);
  ev.advance(1);
  return ev.state();
}

ProbeSeries record_probe(Evolver& evolver, Vec3 location, std::size_t n_samples,
                         std::size_t steps_per_sample) {
  if (n_samples < 2 || steps_per_sample == 0)
    throw std::invalid_argument("record_probe: need >= 2 samples and a positive stride");
  const SpacetimeGrid& grid = evolver.grid();

  std::size_t node = 0;
  double inv_r = 1.0;
  ProbeSeries series;
  if (grid.rank() == 1) {
    const Axis& ax = grid.axis(0);
    const double r = location.norm();
    auto j = static_cast<std::size_t>(
        std::clamp<long long>(std::llround((r - ax.min) / ax.spacing()), 1,
                              static_cast<long long>(ax.count) - 1));
    node = j;
    inv_r = 1.0 / ax.coord(j);
    series.location = {ax.coord(j), 0.0, 0.0};
  } else {
    std::size_t idx[4] = {0, 0, 0, 0};
    double snapped[3] = {0.0, 0.0, 0.0};
    for (std::size_t a = 0; a < grid.rank(); ++a) {
      const Axis& ax = grid.axis(a);
      const double want = ax.name == "x" ? location.x : ax.name == "y" ? location.y : location.z;
      const auto j = static_cast<std::size_t>(std::clamp<long long>(
          std::llround((want - ax.min) / ax.spacing()), 0, static_cast<long long>(ax.count) - 1));
      idx[a] = j;
      snapped[a] = ax.coord(j);
    }
    node = grid.flatten({idx, grid.rank()});
    for (std::size_t a = 0; a < grid.rank(); ++a) {
      const std::string& nme = grid.axis(a).name;
      if (nme == "x") series.location.x = snapped[a];
      if (nme == "y") series.location.y = snapped[a];
      if (nme == "z") series.location.z = snapped[a];
    }
  }

  series.times.reserve(n_samples);
  series.values.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    if (s > 0) evolver.advance(steps_per_sample);
    series.times.push_back(evolver.state().t);
    series.values.push_back(evolver.state().psi.values()[node] * inv_r);
  }
  return series;
}

double dominant_frequency(const ProbeSeries& series, double expected_frequency) {
  const std::size_t n = series.values.size();
  if (n < 16 || series.times.size() != n)
    throw std::invalid_argument("dominant_frequency: series too short");
  if (!(expected_frequency > 0.0))
    throw std::invalid_argument("dominant_frequency: expected frequency must be positive");
  const double dt = series.times[1] - series.times[0];
  const double span = series.times.back() - series.times.front();
  if (span < 8.0 * kTwoPi / expected_frequency)
    throw std::invalid_argument(
        "dominant_frequency: series spans fewer than 8 periods of the expected tone");

  // Mean removal keeps the constant background out of the low bins.
  cplx mean{};
  for (const cplx& v : series.values) mean += v;
  mean /= static_cast<double>(n);
  std::vector<cplx> y(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double w = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(j) /
                                           static_cast<double>(n - 1)));
    y[j] = w * (series.values[j] - mean);
  }

  std::vector<double> mag2(n, 0.0);
  par::parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const double step = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
      const cplx rot{std::cos(step), std::sin(step)};
      cplx phase{1.0, 0.0};
      cplx acc{};
      for (std::size_t j = 0; j < n; ++j) {
        acc += y[j] * phase;
        phase *= rot;
      }
      mag2[k] = std::norm(acc);
    }
  });

  std::size_t peak = 1;
  for (std::size_t k = 2; k < n; ++k)
    if (mag2[k] > mag2[peak]) peak = k;

  auto lg = [&](std::size_t k) { return 0.5 * std::log(std::max(mag2[k % n], 1e-300)); };
  const double l = lg(peak + n - 1), c = lg(peak), r = lg(peak + 1);
  double delta = 0.0;
  const double curve = l - 2.0 * c + r;
  if (curve < 0.0) delta = std::clamp(0.5 * (l - r) / curve, -0.5, 0.5);

  double bin = static_cast<double>(peak) + delta;
  if (bin > static_cast<double>(n) / 2.0) bin -= static_cast<double>(n);
  return std::abs(kTwoPi * bin / (static_cast<double>(n) * dt));
}

StabilityReport stability_experiment(const BreatherSpec& spec, double amplitude,
                                     int duration_periods, std::uint64_t seed,
                                     const PhysicalParams& params,
                                     const StabilityOptions& options) {
  params.validate();
  if (!(amplitude >= 0.0) || amplitude > 0.05)
    throw std::invalid_argument("stability_experiment: amplitude must lie in [0, 0.05]");
  if (duration_periods < 1)
    throw std::invalid_argument("stability_experiment: need at least one period");
  if (options.boundary == Boundary::analytic)
    throw std::invalid_argument("stability_experiment: use periodic or dirichlet_far boundaries");
  const double period = kTwoPi / params.clock_frequency();
  if (options.boundary == Boundary::dirichlet_far &&
      static_cast<double>(duration_periods) * period > options.half_width / params.c)
    throw std::invalid_argument(
        "stability_experiment: run exceeds the boundary-contamination horizon half_width / c");

  const auto cells = static_cast<std::size_t>(std::llround(options.half_width / options.spacing));
  if (cells < 8) throw std::invalid_argument("stability_experiment: domain too small");
  const SpacetimeGrid grid = build_grid({Axis{"r", 0.0, options.half_width, cells + 1}});

  EvolutionState reference = init_from_breather(spec, grid, params);
  EvolutionState perturbed = reference;

  StabilityReport report;
  report.seed = seed;

  const std::size_t n = grid.size();
  if (amplitude > 0.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int modes = std::max(1, options.noise_modes);
    std::vector<double> ca(modes), sa(modes), cb(modes), sb(modes);
    std::vector<cplx> du(n), dv(n);
    for (auto* field : {&du, &dv}) {
      for (int k = 0; k < modes; ++k) {
        ca[k] = gauss(gen);
        sa[k] = gauss(gen);
        cb[k] = gauss(gen);
        sb[k] = gauss(gen);
      }
      par::parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
          const double r = grid.axis(0).coord(i);
          cplx acc{};
          for (int k = 0; k < modes; ++k) {
            const double phase = kTwoPi * static_cast<double>(k + 1) * r / options.half_width;
            acc += cplx{ca[k] * std::cos(phase) + sa[k] * std::sin(phase),
                        cb[k] * std::cos(phase) + sb[k] * std::sin(phase)};
          }
          (*field)[i] = acc;
        }
      });
    }
    const bool periodic = options.boundary == Boundary::periodic;
    const double base = energy_quadratic(grid, reference.psi.values(),
                                         reference.psi_dot.values(), params, periodic);
    const double raw = energy_quadratic(grid, du, dv, params, periodic);
    const double scale = amplitude * std::sqrt(base / raw);
    auto& u = perturbed.psi.mutable_values();
    auto& v = perturbed.psi_dot.mutable_values();
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += scale * du[i];
      v[i] += scale * dv[i];
    }
  }

  EvolveOptions evopt;
  evopt.geometry = Geometry::radial_1d;
  evopt.boundary = options.boundary;
  evopt.dt = options.dt;
  Evolver ref(std::move(reference), evopt, params);
  Evolver pert(std::move(perturbed), evopt, params);

  const auto steps_per_period = static_cast<std::size_t>(std::llround(period / options.dt));
  const bool periodic = options.boundary == Boundary::periodic;
  auto deviation_norm = [&]() {
    std::vector<cplx> du(n), dv(n);
    const auto& u0 = ref.state().psi.values();
    const auto& v0 = ref.state().psi_dot.values();
    const auto& u1 = pert.state().psi.values();
    const auto& v1 = pert.state().psi_dot.values();
    for (std::size_t i = 0; i < n; ++i) {
      du[i] = u1[i] - u0[i];
      dv[i] = v1[i] - v0[i];
    }
    return std::sqrt(energy_quadratic(grid, du, dv, params, periodic));
  };

  report.initial_deviation_norm = deviation_norm();
  report.times.push_back(0.0);
  report.deviation_norm.push_back(report.initial_deviation_norm);
  for (int p = 1; p <= duration_periods; ++p) {
    ref.advance(steps_per_period);
    pert.advance(steps_per_period);
    report.times.push_back(ref.state().t);
    report.deviation_norm.push_back(deviation_norm());
  }
  if (report.initial_deviation_norm > 0.0) {
    double peak = 0.0;
    for (double d : report.deviation_norm) peak = std::max(peak, d);
    report.growth_factor = peak / report.initial_deviation_norm;
  }
  return report;
}

}  // namespace brth
