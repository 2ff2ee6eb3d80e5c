#include "doctest.h"
#include "oracle.hpp"

#include <cmath>
#include <random>

#include "mitoclock/error.hpp"
#include "mitoclock/imt_models.hpp"

using namespace mitoclock;

namespace {
const ErfcRate kNoDeathModel{0.14204, 24.456, 3.3451};
const ErfcRateDeath kDeathModel{0.17879, 25.007, 3.6141, 0.00333};

// int_0^a beta by Simpson, independent of the closed-form primitives.
double hazard_integral(const ModelFamily& model, double a) {
  // gamma rates have a kink at m; integrate from there
  double lo = 0.0;
  if (const auto* g = std::get_if<Gamma1>(&model)) lo = g->m;
  if (const auto* g = std::get_if<Gamma2>(&model)) lo = g->m;
  if (a <= lo) return 0.0;
  return oracle::simpson([&](long double x) { return eval_beta(model, static_cast<double>(x)); }, lo, a, 20000);
}
} // namespace

TEST_CASE("gamma rates") {
  const Gamma1 g{17.0, 2.0};
  CHECK(eval_beta(g, 17.0) == 0.0);
  CHECK(eval_beta(g, 10.0) == 0.0);
  CHECK(eval_beta(g, 19.0) == doctest::Approx(0.25));
  CHECK(eval_beta(g, 1e6) == doctest::Approx(0.5).epsilon(1e-5));
  const Gamma2 g2{17.0, 2.0};
  // (1/sigma) x^2 / (2 sigma^2 + 2 sigma x + x^2) at x = 2: 4 / (2 * 20)
  CHECK(eval_beta(g2, 19.0) == doctest::Approx(0.1));
  CHECK(eval_beta(g2, 1e6) == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("erfc rate at its midpoint is beta0") {
  CHECK(eval_beta(kNoDeathModel, kNoDeathModel.m) == doctest::Approx(0.14204).epsilon(1e-15));
  CHECK(eval_beta(kDeathModel, 1000.0) == doctest::Approx(2.0 * kDeathModel.beta0));
}

TEST_CASE("EMG has no closed-form rate") {
  CHECK_THROWS_AS(eval_beta(Emg{0.2, 22.0, 2.0}, 20.0), UnsupportedVariantError);
  CHECK_THROWS_AS(cumulative_beta(Emg{0.2, 22.0, 2.0}, 20.0), UnsupportedVariantError);
  CHECK_THROWS_AS(DivisionRate::closed_form(Emg{0.2, 22.0, 2.0}), UnsupportedVariantError);
}

TEST_CASE("every rate is nondecreasing in age") {
  for (const ModelFamily model : {ModelFamily{Gamma1{17.0, 2.0}}, ModelFamily{Gamma2{5.0, 4.0}}, ModelFamily{kNoDeathModel},
                                  ModelFamily{kDeathModel}}) {
    double prev = 0.0;
    for (double a = 0.0; a < 150.0; a += 0.1) {
      const double b = eval_beta(model, a);
      CHECK(b >= prev);
      prev = b;
    }
  }
}

TEST_CASE("densities without death have unit mass") {
  for (const ModelFamily model : {ModelFamily{Gamma1{17.0, 2.0}}, ModelFamily{Gamma2{17.0, 2.0}},
                                  ModelFamily{Emg{0.2, 22.0, 2.0}}, ModelFamily{kNoDeathModel}, ModelFamily{ErfcRate{0.05, 3.0, 1.0}}}) {
    const double hi = tail_horizon(model);
    const double m = oracle::simpson([&](long double a) { return eval_I_infinity(model, static_cast<double>(a)); }, 0.0, hi, 200000);
    CHECK(std::abs(m - 1.0) < 1e-8);
    CHECK(normalizing_constant(model) == 1.0);
  }
}

TEST_CASE("death model density is normalised by C_inf") {
  const double hi = tail_horizon(kDeathModel);
  const double m = oracle::simpson([&](long double a) { return eval_I_infinity(kDeathModel, static_cast<double>(a)); }, 0.0, hi, 200000);
  CHECK(std::abs(m - 1.0) < 1e-8);
  CHECK(normalizing_constant(kDeathModel) < 1.0);
  CHECK(normalizing_constant(kDeathModel) > 0.9);
}

TEST_CASE("I_inf equals beta times survival") {
  for (const ModelFamily model : {ModelFamily{Gamma1{17.0, 2.0}}, ModelFamily{Gamma2{17.0, 2.0}}, ModelFamily{kNoDeathModel}}) {
    for (double a = 0.5; a < 70.0; a += 2.5) {
      const double want = eval_beta(model, a) * std::exp(-hazard_integral(model, a));
      CHECK(std::abs(eval_I_infinity(model, a) - want) < 1e-8);
      CHECK(std::abs(cumulative_beta(model, a) - hazard_integral(model, a)) < 1e-8);
    }
  }
}

TEST_CASE("reweighted forms") {
  for (const ModelFamily model : {ModelFamily{Gamma1{17.0, 2.0}}, ModelFamily{Emg{0.2, 22.0, 2.0}}, ModelFamily{kNoDeathModel}}) {
    for (double a : {5.0, 20.0, 30.0}) CHECK(eval_I_tilde(model, 0.0, a) == doctest::Approx(2.0 * eval_I_infinity(model, a)));
    CHECK(integrate_I_tilde(model, 0.0) == doctest::Approx(2.0).epsilon(1e-9));
  }
  // Death model: 2 beta exp(-int beta - (mu + lambda) a), independent of C_inf.
  for (double a : {10.0, 25.0, 40.0}) {
    const double want = 2.0 * eval_beta(kDeathModel, a) * std::exp(-hazard_integral(kDeathModel, a) - (kDeathModel.mu + 0.022) * a);
    CHECK(eval_I_tilde(kDeathModel, 0.022, a) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("unit-mass diagnostic of the reference fits") {
  // Printed values are 1.0983 and 1.0132; the closed forms give 1.1003 and 1.0151.
  CHECK(integrate_I_tilde(kNoDeathModel, 0.022) == doctest::Approx(1.0983).epsilon(0.005));
  CHECK(integrate_I_tilde(kDeathModel, 0.022) == doctest::Approx(1.0132).epsilon(0.005));
  const double oracle5 = oracle::simpson([](long double a) { return eval_I_tilde(kNoDeathModel, 0.022, static_cast<double>(a)); }, 0.0, 200.0, 200000);
  CHECK(integrate_I_tilde(kNoDeathModel, 0.022) == doctest::Approx(oracle5).epsilon(1e-10));
}

TEST_CASE("EMG shape is unimodal and right-skewed") {
  const Emg e{0.2, 22.0, 2.0};
  double mode = 0.0, peak = 0.0, mean = 0.0;
  int turns = 0;
  double prev = 0.0;
  bool rising = true;
  for (double a = 0.0; a < 80.0; a += 0.01) {
    const double v = eval_I_infinity(e, a);
    CHECK(v >= 0.0);
    if (v > peak) peak = v, mode = a;
    if (rising && v < prev) rising = false, ++turns;
    if (!rising && v > prev + 1e-15) ++turns;
    mean += 0.01 * a * v;
    prev = v;
  }
  CHECK(turns == 1);
  CHECK(mean > mode);
}

TEST_CASE("family names, parameters and validation") {
  for (Family f : {Family::gamma1, Family::gamma2, Family::emg, Family::erfc, Family::erfc_mu}) {
    CHECK(parse_family(family_name(f)) == f);
    std::vector<double> p(parameter_count(f), 1.0);
    CHECK(family_of(from_params(f, p)) == f);
    CHECK(to_params(from_params(f, p)) == p);
  }
  CHECK_THROWS_AS(parse_family("lognormal"), ValidationError);
  CHECK_THROWS_AS(from_params(Family::erfc, std::vector<double>{1.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(validate(Gamma1{17.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(validate(ErfcRate{-0.1, 20.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(validate(ErfcRate{0.1, -1.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(validate(ErfcRateDeath{0.1, 20.0, 2.0, -0.001}), ValidationError);
  CHECK_NOTHROW(validate(kDeathModel));
  CHECK(death_rate(kDeathModel) == 0.00333);
  CHECK(death_rate(kNoDeathModel) == 0.0);
}

TEST_CASE("tabulated rate interpolates and integrates") {
  const auto r = DivisionRate::tabulated({0.0, 10.0, 20.0}, {0.0, 0.2, 0.4});
  CHECK(r.is_tabulated());
  CHECK(r(5.0) == doctest::Approx(0.1));
  CHECK(r(30.0) == doctest::Approx(0.4));
  CHECK(r.cumulative(10.0) == doctest::Approx(1.0));
  CHECK(r.cumulative(20.0) == doctest::Approx(4.0));
  CHECK(r.cumulative(25.0) == doctest::Approx(6.0));
  CHECK(r.cumulative(5.0) == doctest::Approx(0.25));
  CHECK(r.horizon(1e-12) > 20.0);
  CHECK_THROWS_AS(DivisionRate::tabulated({0.0, 0.0}, {1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(DivisionRate::tabulated({0.0, 1.0}, {1.0, -1.0}), ValidationError);
  CHECK_THROWS_AS(DivisionRate::tabulated({}, {}), ValidationError);
  CHECK_THROWS_AS(DivisionRate::constant(0.0).horizon(), NumericalError);
}

TEST_CASE("closed-form rate matches the model and its horizon") {
  const auto r = DivisionRate::closed_form(kDeathModel);
  CHECK(r(30.0) == eval_beta(kDeathModel, 30.0));
  CHECK(r.cumulative(30.0) == cumulative_beta(kDeathModel, 30.0));
  const double h = r.horizon(1e-12);
  CHECK(std::exp(-r.cumulative(h)) <= 1e-12 * 1.0001);
  CHECK(std::exp(-r.cumulative(0.99 * h)) > 1e-12);
}

TEST_CASE("ImtDensity agrees with the closed forms") {
  const ImtDensity d(DivisionRate::closed_form(kDeathModel), kDeathModel.mu);
  CHECK(d.normalizing_constant() == doctest::Approx(normalizing_constant(kDeathModel)).epsilon(1e-10));
  for (double a : {15.0, 25.0, 35.0}) CHECK(d(a) == doctest::Approx(eval_I_infinity(kDeathModel, a)).epsilon(1e-10));
  const ImtDensity g(DivisionRate::closed_form(Gamma2{17.0, 2.0}), 0.0);
  CHECK(g.normalizing_constant() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(g(21.0) == doctest::Approx(eval_I_infinity(Gamma2{17.0, 2.0}, 21.0)).epsilon(1e-10));
}
