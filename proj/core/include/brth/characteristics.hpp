#pragma once

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "brth/field.hpp"
#include "brth/params.hpp"
#include "brth/potentials.hpp"
#include "brth/residual.hpp"
#include "brth/types.hpp"

// Characteristic curves of the action equation are the particle trajectories:
//   dx/dt = -c^2 (grad S - e A / c) / (S_t + e U).
// Perturbations of the action ride along them unchanged.
namespace brth {

struct SingularCharacteristicError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SuperluminalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Analytic derivatives of a background action, supplied by the caller.
struct ActionGradients {
  std::function<double(double t, Vec3 x)> dS_dt;
  std::function<Vec3(double t, Vec3 x)> grad_S;
};

// Gradients of the free action S = -E t + p.x.
ActionGradients free_action_gradients(double energy, Vec3 momentum);

struct Trajectory {
  std::vector<double> times;      // strictly increasing, uniform
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;   // the right-hand side at each sample
};

// Fixed-step RK4 on the characteristic equation from t_span.first to
// t_span.second; the step is shrunk slightly so the samples land exactly on
// the interval endpoints. Fails when the denominator S_t + e U approaches 0
// (|.| < 1e-6 m c^2) or when the speed reaches c.
Trajectory integrate_trajectory(const ActionGradients& gradients, const Potentials& potentials,
                                Vec3 x0, std::pair<double, double> t_span, double dt,
                                const PhysicalParams& params);

// Spatial perturbation profile with finite support.
struct PerturbationProfile {
  std::function<cplx(Vec3)> s0;
  double support_radius = 0.0;
};

using SpatialSampler = std::function<cplx(Vec3)>;

// Free advection: the profile translated rigidly, x -> s0(x - v t).
SpatialSampler advect_profile(const PerturbationProfile& profile, Vec3 velocity, double t);

// General form: the profile composed with caller-supplied integrals of
// motion f(x, t); constant f along characteristics makes the perturbation
// constant along them.
SpatialSampler advect_profile(const PerturbationProfile& profile,
                              const std::function<Vec3(Vec3, double)>& integrals, double t);

// Residual of the linearized transport equation
//   (1/c^2)(S_t + e U) ds/dt - (grad S - e A / c) . grad s
// for a sampled perturbation s on a Cartesian spacetime grid, central
// differences throughout.
ResidualReport linearized_residual(const ComplexField& s_field, const ActionGradients& gradients,
                                   const Potentials& potentials, const PhysicalParams& params);

}  // namespace brth
