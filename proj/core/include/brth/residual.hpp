#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "brth/breather.hpp"
#include "brth/field.hpp"
#include "brth/grid.hpp"
#include "brth/params.hpp"
#include "brth/potentials.hpp"
#include "brth/types.hpp"

// Finite-difference oracles. Constructed solutions are sampled on uniform
// grids and pushed through second-order central-difference discretisations of
// the operators they are supposed to annihilate. Norms shrink like h^2 when
// the closed forms are right and stall when they are not.
namespace brth {

// One axis range; the point count is derived from the requested spacing,
// which must tile the range exactly.
struct GridExtent {
  std::string axis;
  double min = 0.0;
  double max = 0.0;
};

struct ResolutionSample {
  double spacing = 0.0;
  double l2 = 0.0;    // RMS of |residual| over unmasked interior points
  double linf = 0.0;  // max of |residual| over unmasked interior points
  std::size_t interior_points = 0;  // points contributing to the norms
  std::size_t masked_points = 0;    // interior points dropped near log branch points
};

struct ResidualReport {
  // Norms at the finest resolution (the only one for single-grid checks).
  double l2_norm = 0.0;
  double linf_norm = 0.0;
  std::size_t interior_point_count = 0;
  std::size_t masked_point_count = 0;
  std::vector<double> resolutions;        // spacings, coarse to fine
  std::optional<double> convergence_order;  // set only with >= 2 resolutions
  std::vector<ResolutionSample> samples;  // one entry per resolution
  std::vector<std::string> warnings;
};

// d'Alembertian (1/c^2) d_tt - sum_i d_ii of a sampled field, second-order
// central differences. A grid with an "r" axis is the reduced radial
// representation (the field is u = r psi) and gets the 1+1D operator
// (1/c^2) d_tt - d_rr. Boundary points, and stencil neighbours of masked
// input points, come back masked with value zero.
ComplexField box_operator(const ComplexField& field, const PhysicalParams& params);

// Free-particle dispersion: omega(k) = c sqrt(k^2 + (m c / hbar)^2).
double dispersion_omega(double k, const PhysicalParams& params);

// Least-squares slope of ln(norm) against ln(spacing). Demands >= 2 entries,
// distinct positive spacings, positive norms.
double convergence_order(const std::vector<std::pair<double, double>>& spacing_norm);

// Wave-equation residual of the constructed psi on one grid:
//   (1/c^2)(d_t + i e U / hbar)^2 psi - (grad - i e A /(hbar c))^2 psi + (m c/hbar)^2 psi.
// Grids with an "r" axis use the reduced field u = r psi and require a
// rest-frame mode-(0,0) spec and a scalar-only potential; Cartesian grids
// accept boosted and spinning specs. Uniform potentials dress the solution.
ResidualReport kg_residual(const BreatherSpec& spec, const SpacetimeGrid& grid,
                           const PhysicalParams& params, const Potentials& potentials = {});

// Multi-resolution wave-equation study: one grid per spacing (each must tile
// the extents exactly), merged into a single report with an order fit.
ResidualReport kg_residual_study(const BreatherSpec& spec, const std::vector<GridExtent>& extents,
                                 const std::vector<double>& spacings,
                                 const PhysicalParams& params, const Potentials& potentials = {});

// Hamilton-Jacobi residual of the constructed action:
//   (1/c^2)(S_t + e U)^2 - (grad S - e A / c)^2 - m^2 c^2 - i hbar Box S.
// Radial grids need r_min > 0 (the (2/r) S_r term lives there) and reject
// vector potentials. Interior points where the log argument has magnitude
// below 0.05 are masked and counted: the log surface steepens without bound
// near its branch points.
ResidualReport qhj_residual(const BreatherSpec& spec, const SpacetimeGrid& grid,
                            const PhysicalParams& params, const Potentials& potentials = {});

ResidualReport qhj_residual_study(const BreatherSpec& spec, const std::vector<GridExtent>& extents,
                                  const std::vector<double>& spacings,
                                  const PhysicalParams& params, const Potentials& potentials = {});

// Residual of the Lorenz gauge condition (1/c) dU/dt + div A on one grid
// carrying t and at least one spatial axis.
ResidualReport lorentz_gauge_check(const Potentials& potentials, const SpacetimeGrid& grid,
                                   const PhysicalParams& params = natural_units());

// How the energy-momentum invariant is probed.
enum class EinsteinMode {
  far_field,         // E = -S_t, p = grad S read off far from the core
  breather_average,  // E and the radial momentum averaged over a ball first
};

struct EinsteinOptions {
  double far_radius_comptons = 30.0;   // far-field probe distance
  double ball_radius_comptons = 10.0;  // averaging ball for breather_average
  double spacing_comptons = 0.05;      // finite-difference spacing
  int time_samples = 128;              // samples across one clock period
};

struct EinsteinReport {
  // |E^2/c^2 - p^2 - m^2 c^2| / (m c)^2, time-averaged over one clock period.
  double deviation = 0.0;
  cplx mean_energy{};    // period average of -S_t at the probe
  cplx mean_momentum{};  // period average of the momentum component used
  double probe_radius = 0.0;
};

// Checks E^2 = p^2 c^2 + m^2 c^4 on the energy and momentum extracted from
// the action by central differences. far_field evaluates pointwise on the
// motion axis, |deviation| time-averaged over one clock period as seen at the
// probe; breather_average (rest specs only) first averages E and the radial
// momentum component over a ball around the core and the same period.
EinsteinReport einstein_relation_report(const BreatherSpec& spec, const PhysicalParams& params,
                                        EinsteinMode mode, const EinsteinOptions& options = {});

// The deviation alone.
double einstein_relation_check(const BreatherSpec& spec, const PhysicalParams& params,
                               EinsteinMode mode, const EinsteinOptions& options = {});

}  // namespace brth
