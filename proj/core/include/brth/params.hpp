#pragma once

#include <stdexcept>

namespace brth {

// Physical constants of the model. All solvers are written with m, c and hbar
// explicit, so any positive values work; the default set is the natural one
// (m = c = hbar = 1) in which every breather coefficient is O(1).
struct PhysicalParams {
  double m = 1.0;
  double c = 1.0;
  double hbar = 1.0;
  double e_charge = 0.0;

  double compton_length() const { return hbar / (m * c); }
  double compton_time() const { return hbar / (m * c * c); }
  // Angular frequency of the internal (de Broglie) clock, m c^2 / hbar.
  double clock_frequency() const { return m * c * c / hbar; }

  void validate() const {
    if (!(m > 0.0) || !(c > 0.0) || !(hbar > 0.0))
      throw std::invalid_argument("PhysicalParams: m, c, hbar must be positive");
  }
};

inline PhysicalParams natural_units() { return PhysicalParams{1.0, 1.0, 1.0, 0.0}; }

}  // namespace brth
