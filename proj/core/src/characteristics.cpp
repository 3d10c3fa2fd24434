#include "brth/characteristics.hpp"

#include <cmath>

#include "detail/stencil.hpp"

namespace brth {

namespace {

// Right-hand side of the characteristic equation, with the singularity and
// causality guards from the module contract.
Vec3 characteristic_velocity(const ActionGradients& g, const Potentials& pot, double t, Vec3 x,
                             const PhysicalParams& params) {
  const double c2 = params.c * params.c;
  const double denom = g.dS_dt(t, x) + params.e_charge * pot.scalar(t, x);
  if (std::abs(denom) < 1e-6 * params.m * c2)
    throw SingularCharacteristicError(
        "integrate_trajectory: S_t + e U vanished along the characteristic");
  const Vec3 p = g.grad_S(t, x) - (params.e_charge / params.c) * pot.vector(t, x);
  const Vec3 v = (-c2 / denom) * p;
  if (!(v.norm() < params.c))
    throw SuperluminalError("integrate_trajectory: characteristic speed reached c");
  return v;
}

}  // namespace

ActionGradients free_action_gradients(double energy, Vec3 momentum) {
  return {[energy](double, Vec3) { return -energy; },
          [momentum](double, Vec3) { return momentum; }};
}

Trajectory integrate_trajectory(const ActionGradients& gradients, const Potentials& potentials,
                                Vec3 x0, std::pair<double, double> t_span, double dt,
                                const PhysicalParams& params) {
  params.validate();
  if (!gradients.dS_dt || !gradients.grad_S)
    throw std::invalid_argument("integrate_trajectory: both gradient samplers are required");
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_trajectory: dt must be positive");
  const auto [t0, t1] = t_span;
  if (!(t1 > t0)) throw std::invalid_argument("integrate_trajectory: need t1 > t0");

  const auto steps =
      static_cast<std::size_t>(std::ceil((t1 - t0) / dt - 1e-12));
  const double h = (t1 - t0) / static_cast<double>(steps);

  auto rhs = [&](double t, Vec3 x) {
    return characteristic_velocity(gradients, potentials, t, x, params);
  };

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.positions.reserve(steps + 1);
  traj.velocities.reserve(steps + 1);

  Vec3 x = x0;
  for (std::size_t n = 0; n <= steps; ++n) {
    const double t = t0 + static_cast<double>(n) * h;
    traj.times.push_back(t);
    traj.positions.push_back(x);
    traj.velocities.push_back(rhs(t, x));
    if (n == steps) break;
    const Vec3 k1 = traj.velocities.back();
    const Vec3 k2 = rhs(t + 0.5 * h, x + (0.5 * h) * k1);
    const Vec3 k3 = rhs(t + 0.5 * h, x + (0.5 * h) * k2);
    const Vec3 k4 = rhs(t + h, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return traj;
}

SpatialSampler advect_profile(const PerturbationProfile& profile, Vec3 velocity, double t) {
  if (!profile.s0) throw std::invalid_argument("advect_profile: profile sampler missing");
  return [s0 = profile.s0, velocity, t](Vec3 x) { return s0(x - t * velocity); };
}

SpatialSampler advect_profile(const PerturbationProfile& profile,
                              const std::function<Vec3(Vec3, double)>& integrals, double t) {
  if (!profile.s0) throw std::invalid_argument("advect_profile: profile sampler missing");
  if (!integrals) throw std::invalid_argument("advect_profile: integrals-of-motion sampler missing");
  return [s0 = profile.s0, integrals, t](Vec3 x) { return s0(integrals(x, t)); };
}

ResidualReport linearized_residual(const ComplexField& s_field, const ActionGradients& gradients,
                                   const Potentials& potentials, const PhysicalParams& params) {
  params.validate();
  if (!gradients.dS_dt || !gradients.grad_S)
    throw std::invalid_argument("linearized_residual: both gradient samplers are required");
  const SpacetimeGrid& grid = s_field.grid();
  const detail::StencilLayout lay = detail::analyze_grid(grid, "linearized_residual");
  if (lay.radial)
    throw std::invalid_argument("linearized_residual: Cartesian spatial axes required");

  const std::vector<cplx>& f = s_field.values();
  const double inv_c2 = 1.0 / (params.c * params.c);
  const std::size_t st = grid.stride(lay.t_axis);
  const double ht = grid.axis(lay.t_axis).spacing();

  std::vector<cplx> res(grid.size(), cplx{});
  std::vector<std::uint8_t> use(grid.size(), 0);

  detail::for_each_node(grid, [&](std::size_t i, std::span<const std::size_t> idx,
                                  std::span<const double> coords) {
    if (!detail::stencil_complete(grid, idx)) return;
    if (s_field.has_mask()) {
      bool touched = s_field.masked(i) || s_field.masked(i - st) || s_field.masked(i + st);
      for (std::size_t a : lay.space_axes) {
        const std::size_t s = grid.stride(a);
        touched = touched || s_field.masked(i - s) || s_field.masked(i + s);
      }
      if (touched) return;
    }
    const SpacetimeEvent e = detail::event_at(grid, coords);
    const double denom = gradients.dS_dt(e.t, e.x) +
                         params.e_charge * (potentials.is_zero() ? 0.0 : potentials.scalar(e.t, e.x));
    const Vec3 p = gradients.grad_S(e.t, e.x) -
                   (params.e_charge / params.c) *
                       (potentials.is_zero() ? Vec3{} : potentials.vector(e.t, e.x));
    cplx v = inv_c2 * denom * (f[i + st] - f[i - st]) / (2.0 * ht);
    for (std::size_t a : lay.space_axes) {
      const std::size_t s = grid.stride(a);
      const double h = grid.axis(a).spacing();
      v -= detail::axis_component(grid.axis(a).name, p) * (f[i + s] - f[i - s]) / (2.0 * h);
    }
    res[i] = v;
    use[i] = 1;
  });

  return detail::report_from_sample(
      detail::reduce_sample(res, use, 0, detail::max_axis_spacing(grid)));
}

}  // namespace brth
