#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "brth/params.hpp"
#include "brth/potentials.hpp"
#include "brth/special.hpp"
#include "brth/types.hpp"

namespace brth {

// Thrown when an action evaluation lands on (or winds through) a zero of the
// wave function, where ln psi has no value.
struct BranchPointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Closed-form breather family. The two-frequency rest solution is
//   psi = exp(-i w1 t) + alpha exp(-i w2 t) j_0(k r),
// with w1 = m c^2 / hbar the clock frequency; the free dispersion relation
// locks w2 = 2 w1 and k = sqrt(3) m c / hbar. omega_override replaces w2 with
// an arbitrary angular frequency to produce deliberately broken solutions for
// negative controls; everything else keeps the locked values.
struct BreatherSpec {
  cplx alpha{0.0, 0.0};
  ModeIndex mode{0, 0};
  Vec3 velocity{};  // |velocity| < c; nonzero boosts the rest solution
  std::optional<double> train_period_d;  // lattice period of a breather train
  std::optional<int> train_truncation_K;  // symmetric partial sum |k| <= K
  std::optional<double> omega_override;  // absolute angular frequency
  bool allow_unwrap = false;  // permit |alpha| >= 1 via tracked log branches

  bool is_train() const { return train_period_d.has_value(); }
  void validate(const PhysicalParams& params) const;
};

double breather_wavenumber(const PhysicalParams& params);  // sqrt(3) m c / hbar
double locked_omega(const PhysicalParams& params);         // 2 m c^2 / hbar

// Rest-frame two-term wave function; requires velocity = 0, mode (0,0), no train.
cplx psi_rest(const BreatherSpec& spec, const SpacetimeEvent& event,
              const PhysicalParams& params);

// One spinning mode: alpha exp(-2 i (m c^2/hbar) t + i n phi) j_l(k r) P_l^n(cos theta),
// theta measured from the z axis, phi in [0, 2 pi). Regular at r = 0.
cplx spinning_term(const ModeIndex& mode, cplx alpha, const SpacetimeEvent& event,
                   const PhysicalParams& params);

// Clock term plus the requested mode term (spinning for l > 0); nonzero
// velocity evaluates the rest form at the boosted event. Trains are rejected
// here (they are evaluated in action form by train_action).
cplx breather_psi(const BreatherSpec& spec, const SpacetimeEvent& event,
                  const PhysicalParams& params);

// S = -i hbar ln psi on the principal branch, or on the branch continuously
// connected to branch_anchor when supplied. psi = 0 is a branch-point error.
cplx action_from_psi(cplx psi, const PhysicalParams& params,
                     std::optional<cplx> branch_anchor = std::nullopt);

struct ActionSample {
  cplx value;
  bool unwrapped = false;  // set when a tracked branch (|alpha| >= 1) was used
};

// Log form of the rest breather, S = -m c^2 t - i hbar ln(1 + w) with
// w = alpha exp(-i (w2 - w1) t) j_0(k r).
cplx action_rest(const BreatherSpec& spec, const SpacetimeEvent& event,
                 const PhysicalParams& params);
ActionSample action_rest_sample(const BreatherSpec& spec, const SpacetimeEvent& event,
                                const PhysicalParams& params);

// Pure boost of coordinates: the event of the frame moving at velocity v
// expressed in that frame (t' = gamma (t - v.x/c^2), parallel component
// contracted, perpendicular untouched). Requires |v| < c.
SpacetimeEvent lorentz_boost(const SpacetimeEvent& event, Vec3 v,
                             const PhysicalParams& params);

// Action of the moving breather: the rest form evaluated at the boosted
// event. Its leading phase is -E t + p.x with E = gamma m c^2, p = gamma m v.
cplx action_boosted(const BreatherSpec& spec, const SpacetimeEvent& event,
                    const PhysicalParams& params);

struct TrainEval {
  cplx value;             // the action S at the requested event
  double tail_estimate;   // bound on the dropped |k| > K contribution to the sum
  bool k_too_small;       // tail estimate above 10% of |alpha|
};

// Periodic train of breather cores spaced d along the direction of motion
// (the x axis when at rest), evaluated as a symmetric partial sum |k| <= K.
TrainEval train_action(const BreatherSpec& spec, const SpacetimeEvent& event,
                       const PhysicalParams& params);

// Rest breather dressed by uniform external potentials:
// S = -(m c^2 + e U0) t + (e/c) A0.x - i hbar ln(1 + w).
cplx action_slow_field(const BreatherSpec& spec, const SpacetimeEvent& event,
                       const PhysicalParams& params, double U0, Vec3 A0 = {});

// Slowly varying classical background carrying a breather core along a
// trajectory x_p(t) with velocity v_of_t(t).
struct SemiclassicalContext {
  std::function<double(double t, Vec3 x)> S_c;
  std::function<Vec3(double t)> x_p;
  std::function<Vec3(double t)> v_of_t;

  // Checks v_of_t against finite differences of x_p on [t0, t1] (relative
  // tolerance 1e-6) and returns advisory warnings (e.g. speeds above 0.1 c).
  std::vector<std::string> validate(const PhysicalParams& params, double t0, double t1) const;
};

// Composite slow-field action:
// S = -m c^2 t + S_c - i hbar ln{1 + alpha exp(-i (m c^2/hbar) t)
//                                 exp(i m v.x / hbar) j_0(k |x - x_p(t)|)}.
cplx semiclassical_action(const SemiclassicalContext& ctx, const BreatherSpec& spec,
                          const SpacetimeEvent& event, const PhysicalParams& params);

// Pointwise samplers for one constructed solution, in the form the residual
// checks consume. `log_argument` returns 1 + w, the argument of the logarithm
// in the action; residual norms exclude points where it comes close to zero.
struct SolutionSampler {
  std::function<cplx(const SpacetimeEvent&)> psi;
  std::function<cplx(const SpacetimeEvent&)> action;
  std::function<cplx(const SpacetimeEvent&)> log_argument;
};

// Builds samplers for a single breather (rest, spinning, or boosted), dressed
// by uniform external potentials when `potentials` is non-zero. Non-uniform
// potentials and trains are rejected: neither has a closed form here.
SolutionSampler make_solution(const BreatherSpec& spec, const PhysicalParams& params,
                              const Potentials& potentials = {});

}  // namespace brth
