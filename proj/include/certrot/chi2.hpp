#pragma once

// Quantile of the chi-square distribution with three degrees of freedom,
// used to derive the truncation threshold from a noise-model probability.
// Self-contained: for k = 3 the regularized lower incomplete gamma reduces to
//   CDF(x) = erf(sqrt(x/2)) - sqrt(2x/pi) * exp(-x/2),
// inverted by bracketing + bisection with a Newton polish.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace certrot {

inline double chi2_pdf3(double x) {
  if (x <= 0.0) return 0.0;
  return std::sqrt(x / (2.0 * M_PI)) * std::exp(-x / 2.0);
}

inline double chi2_cdf3(double x) {
  if (x <= 0.0) return 0.0;
  return std::erf(std::sqrt(x / 2.0)) - std::sqrt(2.0 * x / M_PI) * std::exp(-x / 2.0);
}

// x with P(chi2_3 <= x) = p, accurate to well below 1e-9.
inline double chi2_inv3(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("chi2_inv3: p must lie strictly inside (0, 1)");
  }
  double lo = 0.0, hi = 1.0;
  while (chi2_cdf3(hi) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) break;  // p this close to 1 is outside double resolution anyway
  }
  for (int it = 0; it < 90; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_cdf3(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 6; ++it) {
    const double f = chi2_cdf3(x) - p;
    const double d = chi2_pdf3(x);
    if (d <= 0.0) break;
    const double step = f / d;
    const double next = x - step;
    if (next <= lo || next >= hi) break;  // keep the bisection bracket authoritative
    x = next;
    if (std::abs(step) < 1e-14 * (1.0 + x)) break;
  }
  return x;
}

}  // namespace certrot
