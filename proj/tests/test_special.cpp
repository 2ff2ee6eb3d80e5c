#include "doctest.h"
#include "oracle.hpp"

#include <random>

#include "mitoclock/special.hpp"

using namespace mitoclock;

TEST_CASE("erfc matches series and continued fraction on [-10, 10]") {
  double worst = 0.0;
  for (int k = -2000; k <= 2000; ++k) {
    const double z = 0.005 * k;
    worst = std::max(worst, std::abs(mitoclock::erfc(z) - oracle::erfc(z)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("erfc special values and reflection") {
  CHECK(mitoclock::erfc(0.0) == 1.0);
  CHECK(mitoclock::erfc(1.0) == doctest::Approx(0.15729920705028513).epsilon(1e-15));
  CHECK(mitoclock::erfc(40.0) == 0.0);
  CHECK(mitoclock::erfc(-40.0) == 2.0);
  for (double z : {0.1, 0.7, 1.3, 2.9, 5.5})
    CHECK(std::abs(mitoclock::erfc(-z) - (2.0 - mitoclock::erfc(z))) < 1e-15);
}

TEST_CASE("erfc_primitive vanishes at zero") {
  for (double m : {0.0, 3.0, 24.456})
    for (double s : {0.5, 3.3451}) CHECK(std::abs(erfc_primitive(m, s, 0.0)) < 1e-13);
}

TEST_CASE("erfc_primitive agrees with Simpson quadrature") {
  const double q = oracle::simpson([](long double a) { return static_cast<long double>(oracle::erfc(static_cast<double>(-a))); }, 0.0, 5.0);
  CHECK(std::abs(erfc_primitive(0.0, 1.0, 5.0) - q) < 1e-9);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> um(0.0, 30.0), us(0.5, 6.0), ua(0.0, 60.0);
  for (int k = 0; k < 40; ++k) {
    const double m = um(rng), s = us(rng), a = ua(rng);
    const double ref = oracle::simpson([&](long double x) { return oracle::erfc(static_cast<double>((m - x) / s)); }, 0.0, a);
    CHECK(std::abs(erfc_primitive(m, s, a) - ref) < 1e-9);
  }
}

TEST_CASE("erfc_primitive grows with slope 2 far beyond m") {
  const double m = 10.0, s = 2.0;
  CHECK(erfc_primitive(m, s, 101.0) - erfc_primitive(m, s, 100.0) == doctest::Approx(2.0).epsilon(1e-12));
}
