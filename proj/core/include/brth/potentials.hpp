#pragma once

#include <functional>

#include "brth/types.hpp"

namespace brth {

// External electromagnetic potentials as samplers of (t, x). Scalar U and
// vector A; both default to zero (the free case).
struct Potentials {
  std::function<double(double t, Vec3 x)> U;
  std::function<Vec3(double t, Vec3 x)> A;

  bool is_zero() const { return !U && !A; }
  double scalar(double t, Vec3 x) const { return U ? U(t, x) : 0.0; }
  Vec3 vector(double t, Vec3 x) const { return A ? A(t, x) : Vec3{}; }

  static Potentials zero() { return Potentials{}; }
  static Potentials uniform(double u0, Vec3 a0 = {}) {
    Potentials p;
    p.U = [u0](double, Vec3) { return u0; };
    p.A = [a0](double, Vec3) { return a0; };
    return p;
  }
};

}  // namespace brth
