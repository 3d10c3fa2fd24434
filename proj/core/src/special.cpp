#include "brth/special.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace brth {

namespace {

// Ascending series j_l(x) = x^l/(2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1)).
// Converges for all x; used only for small x where few terms suffice.
double bessel_series(int l, double x) {
  double dfact = 1.0;  // (2l+1)!!
  for (int k = 3; k <= 2 * l + 1; k += 2) dfact *= k;
  const double x2 = x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 40; ++k) {
    term *= -x2 / (2.0 * k * (2.0 * l + 2.0 * k + 1.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return std::pow(x, l) / dfact * sum;
}

double j0_closed(double x) { return std::sin(x) / x; }
double j1_closed(double x) { return std::sin(x) / (x * x) - std::cos(x) / x; }

// Downward recurrence f_{k-1} = (2k+1)/x f_k - f_{k+1} from a start order
// safely above both l and the turning point at x. The spurious second
// solution decays on the way down, so the ratios are accurate; the overall
// constant comes from whichever of j_0, j_1 is farther from a zero at x.
double bessel_miller(int l, double x) {
  const int start = l + static_cast<int>(x + 16.0 * std::cbrt(x)) + 24;
  double fp = 0.0;    // f_{k+1}
  double fc = 1e-30;  // f_k, arbitrary seed at k = start
  double fl = 0.0;    // unnormalized value at the requested order
  double f1 = 0.0;
  for (int k = start; k >= 1; --k) {
    const double fm = (2.0 * k + 1.0) / x * fc - fp;  // f_{k-1}
    fp = fc;
    fc = fm;
    if (k - 1 == l) fl = fc;
    if (k - 1 == 1) f1 = fc;
    if (std::abs(fc) > 1e250) {  // keep the recurrence in range; ratios survive
      fc *= 1e-250;
      fp *= 1e-250;
      fl *= 1e-250;
      f1 *= 1e-250;
    }
  }
  const double f0 = fc;
  const double ref0 = j0_closed(x);
  const double ref1 = j1_closed(x);
  // Zeros of j_0 and j_1 interlace, so at least one reference is well away
  // from zero and gives a stable normalization.
  if (std::abs(ref0) >= std::abs(ref1)) return fl * (ref0 / f0);
  return fl * (ref1 / f1);
}

}  // namespace

double spherical_bessel_j(int l, double x) {
  if (l < 0) throw std::invalid_argument("spherical_bessel_j: order must be >= 0");
  if (x < 0.0) throw std::invalid_argument("spherical_bessel_j: argument must be >= 0");
  if (x < 1e-2) return bessel_series(l, x);  // includes j_0(0) = 1
  if (l == 0) return j0_closed(x);
  if (l == 1) return j1_closed(x);
  return bessel_miller(l, x);
}

double associated_legendre(int l, int n, double u) {
  if (l < 0) throw std::invalid_argument("associated_legendre: l must be >= 0");
  if (std::abs(n) > l)
    throw std::invalid_argument("associated_legendre: |n| = " + std::to_string(std::abs(n)) +
                                " exceeds l = " + std::to_string(l));
  if (!(u >= -1.0 && u <= 1.0))
    throw std::invalid_argument("associated_legendre: argument must lie in [-1, 1]");

  if (n < 0) {
    // (l-|n|)! / (l+|n|)! times the positive-order value.
    const int m = -n;
    double ratio = 1.0;
    for (int k = l - m + 1; k <= l + m; ++k) ratio /= k;
    return ratio * associated_legendre(l, m, u);
  }

  // Seed P_n^n = (2n-1)!! (1-u^2)^(n/2), then raise l with
  // (l-n) P_l^n = u (2l-1) P_{l-1}^n - (l+n-1) P_{l-2}^n.
  double pmm = 1.0;
  if (n > 0) {
    const double s = std::sqrt((1.0 - u) * (1.0 + u));
    double dfact = 1.0;
    for (int k = 1; k <= 2 * n - 1; k += 2) dfact *= k;
    pmm = dfact * std::pow(s, n);
  }
  if (l == n) return pmm;
  double pmm1 = u * (2.0 * n + 1.0) * pmm;  // P_{n+1}^n
  if (l == n + 1) return pmm1;
  double p = 0.0;
  for (int ll = n + 2; ll <= l; ++ll) {
    p = (u * (2.0 * ll - 1.0) * pmm1 - (ll + n - 1.0) * pmm) / (ll - n);
    pmm = pmm1;
    pmm1 = p;
  }
  return p;
}

}  // namespace brth
