#pragma once

namespace mitoclock {

// Complementary error function, erfc(z) = 1 - 2/sqrt(pi) * int_0^z exp(-t^2) dt.
double erfc(double z);

// Closed-form int_0^a erfc((m - s) / sigma) ds. Requires sigma > 0.
double erfc_primitive(double m, double sigma, double a);

} // namespace mitoclock
