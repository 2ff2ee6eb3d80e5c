#include "mitoclock/special.hpp"

#include <cmath>
#include <numbers>

namespace mitoclock {

double erfc(double z) { return std::erfc(z); }

double erfc_primitive(double m, double sigma, double a) {
  // int_0^a erfc((m-s)/sigma) ds with u = (m-s)/sigma and
  // d/du [u erfc(u) - exp(-u^2)/sqrt(pi)] = erfc(u).
  const double k = sigma * std::numbers::inv_sqrtpi;
  const double u0 = m / sigma;
  const double ua = (m - a) / sigma;
  return m * std::erfc(u0) - k * std::exp(-u0 * u0) - (m - a) * std::erfc(ua) + k * std::exp(-ua * ua);
}

} // namespace mitoclock
