#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mitoclock::quad {

// Adaptive 15-point Gauss-Kronrod on [lo, hi]. Interior breakpoints (kinks of
// the integrand) split the range so every panel sees a smooth function.
template <class F>
double integrate(F&& f, double lo, double hi, std::span<const double> breaks = {},
                 double rel_tol = 1e-13) {
  if (!(hi > lo)) return 0.0;
  std::vector<double> cuts{lo};
  for (double b : breaks)
    if (b > lo && b < hi) cuts.push_back(b);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    sum += GK::integrate(f, cuts[k], cuts[k + 1], 20, rel_tol);
  return sum;
}

// Single fixed 15-point Kronrod panel; used where thousands of short,
// smooth panels are integrated and adaptivity would only cost time.
template <class F>
double panel(F&& f, double lo, double hi) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  return GK::integrate(f, lo, hi, 0);
}

// Composite trapezoid for samples on a uniform grid of spacing h.
inline double trapezoid(std::span<const double> y, double h) {
  if (y.size() < 2) return 0.0;
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
  return s * h;
}

// Composite trapezoid on an arbitrary increasing grid.
inline double trapezoid(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return s;
}

} // namespace mitoclock::quad
