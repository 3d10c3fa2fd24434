#pragma once

namespace brth {

// Angular mode of a spinning breather: orbital index l >= 0 and azimuthal
// index n with |n| <= l.
struct ModeIndex {
  int l = 0;
  int n = 0;
};

// Spherical Bessel function of the first kind, j_l(x) for x >= 0.
// Small arguments (x < 1e-2) use the ascending Taylor series; otherwise the
// value comes from Miller's downward recurrence normalized against the closed
// forms of j_0 and j_1 (whichever is larger in magnitude at x, so the
// normalization never divides by a near-zero).
double spherical_bessel_j(int l, double x);

// Associated Legendre P_l^n(u) on u in [-1, 1] WITHOUT the Condon-Shortley
// phase: P_n^n(u) = (2n-1)!! (1-u^2)^(n/2) with a plus sign, so e.g.
// P_1^1(u) = sqrt(1-u^2) and P_2^1(u) = 3u sqrt(1-u^2).
// Negative n is mapped through the factorial-ratio identity
// P_l^{-n}(u) = (l-n)!/(l+n)! * P_l^n(u) (again with no extra sign; any fixed
// convention only rescales the breather amplitude).
double associated_legendre(int l, int n, double u);

}  // namespace brth
