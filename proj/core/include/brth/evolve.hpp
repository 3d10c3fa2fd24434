#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "brth/breather.hpp"
#include "brth/field.hpp"
#include "brth/grid.hpp"
#include "brth/params.hpp"
#include "brth/types.hpp"

// Time-domain wave-equation solver: leapfrog (velocity-Verlet) on
//   psi_tt = c^2 (laplacian psi - (m c / hbar)^2 psi),
// primarily in the reduced radial form on u = r psi. Used to test that the
// constructed breathers persist, keep their beat frequency, and shrug off
// small perturbations.
namespace brth {

enum class Geometry { radial_1d, cartesian_3d };

// periodic wraps the stencil; dirichlet_far pins the field to zero at the
// domain rim (valid until influence from the rim arrives); analytic pins the
// rim to caller-supplied exact values, which tracks non-decaying backgrounds.
enum class Boundary { periodic, dirichlet_far, analytic };

// Exact field value at the rim for Boundary::analytic. Returns the stored
// quantity (u = r psi on radial grids); coords arrive in grid axis order.
using BoundaryValue = std::function<cplx(double t, std::span<const double> coords)>;

struct EvolutionState {
  ComplexField psi;      // stored spatial slice: u = r psi on radial grids
  ComplexField psi_dot;  // its time derivative
  double t = 0.0;
  std::size_t step_count = 0;
};

// Cauchy data for a rest-frame breather: the closed form and its exact time
// derivative at t = 0 (u and u_dot on radial grids, with u(0) = 0). Radial
// grids must start at r = 0 and span at least 10 compton lengths; spacing
// coarser than a third of the core half-width is an error.
EvolutionState init_from_breather(const BreatherSpec& spec, const SpacetimeGrid& grid,
                                  const PhysicalParams& params);

// Advisory resolution notes for a spatial grid (spacing above 0.2 compton
// lengths, short domains); empty when the grid is comfortable.
std::vector<std::string> resolution_warnings(const SpacetimeGrid& grid,
                                             const PhysicalParams& params);

struct EvolveOptions {
  Geometry geometry = Geometry::radial_1d;
  Boundary boundary = Boundary::dirichlet_far;
  double dt = 0.0;
  BoundaryValue boundary_value;  // required iff boundary == analytic
};

// Stepper with persistent state. CFL bound dt <= 0.5 h / c on radial grids
// and 0.5 h / (c sqrt(D)) on D-dimensional Cartesian grids is enforced at
// construction.
class Evolver {
 public:
  Evolver(EvolutionState initial, EvolveOptions options, PhysicalParams params);

  const EvolutionState& state() const { return state_; }
  const SpacetimeGrid& grid() const { return state_.psi.grid(); }
  double dt() const { return dt_; }

  void advance(std::size_t steps);
  // Flips the integration direction; leapfrog retraces its own path.
  void reverse() { dt_ = -dt_; }

  // The quadratic form leapfrog conserves exactly (periodic and dirichlet_far
  // boundaries): 1/2 ||v + dt/2 L u||^2 + 1/2 <u + dt (v + dt/2 L u), -L u>.
  double shadow_energy() const;
  // The continuum energy functional 1/2 sum(|v|^2 + c^2|grad u|^2
  // + (m c^2/hbar)^2 |u|^2); oscillates at O(dt^2) around a constant.
  double stated_energy() const;

 private:
  void apply_operator(const std::vector<cplx>& in, std::vector<cplx>& out) const;
  void refresh_boundary_values();
  void refresh_boundary_rates();

  EvolutionState state_;
  EvolveOptions options_;
  PhysicalParams params_;
  double dt_ = 0.0;
  std::vector<cplx> accel_;
  std::vector<std::uint8_t> held_;  // nodes pinned by the boundary mode
};

// One leapfrog step as a pure function (convenience wrapper over Evolver).
EvolutionState step(const EvolutionState& state, double dt, const PhysicalParams& params,
                    const EvolveOptions& options);

struct ProbeSeries {
  Vec3 location{};             // the grid node actually probed
  std::vector<double> times;   // uniformly spaced
  std::vector<cplx> values;    // psi at the probe (radial states divide r out)
};

// Advances the evolver, sampling psi at the node nearest `location` every
// steps_per_sample steps (n_samples total, the current state included).
ProbeSeries record_probe(Evolver& evolver, Vec3 location, std::size_t n_samples,
                         std::size_t steps_per_sample);

// Dominant nonzero angular frequency magnitude of a uniformly sampled series:
// mean removed, Hann window, discrete Fourier transform peak with quadratic
// interpolation of the peak bin. The series must span at least 8 periods of
// expected_frequency.
double dominant_frequency(const ProbeSeries& series, double expected_frequency);

struct StabilityOptions {
  double half_width = 40.0;  // domain radius, natural units
  double spacing = 0.05;
  double dt = 0.02;
  Boundary boundary = Boundary::periodic;
  int noise_modes = 32;  // band limit of the seeded perturbation
};

struct StabilityReport {
  double growth_factor = 1.0;  // max over time of deviation norm / initial norm
  double initial_deviation_norm = 0.0;
  std::vector<double> times;           // one sample per clock period
  std::vector<double> deviation_norm;  // energy norm of (perturbed - reference)
  std::uint64_t seed = 0;
};

// Seeds a band-limited random perturbation of relative size `amplitude`
// (<= 0.05) onto rest-breather data, evolves perturbed and reference states
// side by side for duration_periods clock periods, and reports the deviation
// growth in the energy norm. dirichlet_far runs must stay inside the
// boundary-contamination horizon (half_width / c).
StabilityReport stability_experiment(const BreatherSpec& spec, double amplitude,
                                     int duration_periods, std::uint64_t seed,
                                     const PhysicalParams& params,
                                     const StabilityOptions& options = {});

}  // namespace brth
