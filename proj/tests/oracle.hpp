#pragma once

// Reference computations used only by the tests. They avoid the library's own
// quadrature and special functions so that agreement means something.

#include <cmath>
#include <cstddef>
#include <functional>

namespace oracle {

// Composite Simpson on [lo, hi] with n (even) panels, in long double.
inline double simpson(const std::function<long double(long double)>& f, double lo, double hi, std::size_t n = 20000) {
  if (n % 2) ++n;
  const long double h = (static_cast<long double>(hi) - lo) / n;
  long double s = f(lo) + f(hi);
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0L : 2.0L) * f(lo + h * static_cast<long double>(i));
  return static_cast<double>(s * h / 3.0L);
}

// erf by its Maclaurin series (long double); good for |z| <= 3.
inline long double erf_series(long double z) {
  long double term = z, sum = z;
  for (int n = 1; n < 200; ++n) {
    term *= -z * z / n;
    const long double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(add) < 1e-30L) break;
  }
  return sum * 2.0L / std::sqrt(3.14159265358979323846264338327950288L);
}

// erfc for z > 0 by the Laplace continued fraction (modified Lentz).
inline long double erfc_cf(long double z) {
  const long double tiny = 1e-300L;
  // erfc(z) = exp(-z^2)/sqrt(pi) * 1/(z + 1/2/(z + 1/(z + 3/2/(z + ...))))
  long double f = z, c = z, d = 0.0L;
  for (int n = 1; n < 500; ++n) {
    const long double an = n * 0.5L;
    d = z + an * d;
    d = std::fabs(d) < tiny ? tiny : d;
    c = z + an / c;
    c = std::fabs(c) < tiny ? tiny : c;
    d = 1.0L / d;
    const long double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0L) < 1e-22L) break;
  }
  return std::exp(-z * z) / std::sqrt(3.14159265358979323846264338327950288L) / f;
}

inline double erfc(double x) {
  const long double z = x;
  if (z < 0) return static_cast<double>(2.0L - (z > -3 ? 1.0L - erf_series(-z) : erfc_cf(-z)));
  if (z <= 3) return static_cast<double>(1.0L - erf_series(z));
  return static_cast<double>(erfc_cf(z));
}

} // namespace oracle
