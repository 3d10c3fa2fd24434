#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "brth/characteristics.hpp"
#include "brth/params.hpp"
#include "brth/types.hpp"

// Two quantization mechanisms and the classical-orbit machinery behind them:
// periodicity compatibility on an interval (momentum lattice p_n = 2 pi n
// hbar / d) and the semiclassical loop integral (action quantized in units of
// 2 pi hbar). Orbit energies here are nonrelativistic and exclude the rest
// energy m c^2.
namespace brth {

struct QuantizationScan {
  double d = 0.0;                    // interval length
  std::vector<double> momenta;       // scanned p values
  std::vector<double> residuals;     // compatibility mismatch per p
  std::vector<double> quantized_p;   // refined residual zeros
  std::vector<int> quantum_numbers;  // matching n
};

// Distance of d p / (2 pi hbar) from the nearest integer, in [0, 0.5].
// Zero exactly when the de Broglie periodicity 2 pi hbar / p divides d.
double compatibility_residual(double d, double p, const PhysicalParams& params);

// Scans p in [0, p_max], locates the V-shaped residual minima and refines
// each to a quantized momentum. samples >= 100.
QuantizationScan scan_quantized_momenta(double d, double p_max, int samples,
                                        const PhysicalParams& params);

// One-dimensional bound orbit in a confining potential well, energy measured
// from the potential minimum (no rest energy).
struct ClassicalOrbit {
  std::function<double(double)> potential;
  double energy = 0.0;
  std::pair<double, double> turning_points{};
  double period = 0.0;
  Trajectory trajectory;  // one period, starting from the lower turning point
};

// Finds the turning points bracketing x = 0 by expansion + bisection, the
// period by turning-point-regular quadrature, and integrates one period of
// Newtonian motion with RK4.
ClassicalOrbit make_classical_orbit(const std::function<double(double)>& potential, double energy,
                                    const PhysicalParams& params, int samples_per_period = 4096);

// Hamilton's principal function S_c(t, x) = -E t + W(x) on the outgoing
// branch, with W(x) the momentum integral from the lower turning point.
// x must lie between the turning points and t within the integrated range.
double classical_action(const ClassicalOrbit& orbit, const PhysicalParams& params, double t,
                        double x);

// The Lagrangian integral of S_c along the orbit itself: int_0^t (m v^2/2 - U) dtau,
// accumulated on the stored trajectory by the trapezoid rule. Cross-checks
// classical_action on the first half-swing.
double accumulated_lagrangian(const ClassicalOrbit& orbit, const PhysicalParams& params, double t);

// Loop integral of p dx over one period, computed as int_0^T m v(t)^2 dt by
// the trapezoid rule on the integrated trajectory.
double loop_integral(const ClassicalOrbit& orbit, const PhysicalParams& params);

// Same loop integral by direct quadrature of 2 int sqrt(2m(E-U)) dx between
// the turning points (the smooth-substitution form); no trajectory needed.
double loop_integral_quadrature(const std::function<double(double)>& potential, double energy,
                                const PhysicalParams& params, int samples = 4096);

// Free particle on a ring of circumference d: the loop integral is just p d.
double ring_loop_integral(double p, double d);

// Solves loop integral(E_n) = 2 pi n hbar for each n in [n_min, n_max] by
// bisection on the monotone action map, to 1e-8 relative in E.
std::vector<std::pair<int, double>> bohr_sommerfeld_levels(
    const std::function<double(double)>& potential, const PhysicalParams& params, int n_min,
    int n_max);

}  // namespace brth
