#include "doctest.h"

#include <cmath>

#include "mitoclock/error.hpp"
#include "mitoclock/simulator.hpp"
#include "mitoclock/spectral.hpp"

using namespace mitoclock;

namespace {
const ErfcRate kDeathRate{0.17879, 25.007, 3.6141};
const double kMu = 0.00333;

SimConfig reference(double f = 0.0) {
  SimConfig c;
  c.beta = DivisionRate::closed_form(kDeathRate);
  c.mu = c.mu_q = kMu;
  c.f = f;
  return c;
}

bool nonnegative(const SimOutput& out) {
  for (std::size_t n = 0; n < out.times.size(); ++n)
    if (out.P[n] < 0.0 || out.Q[n] < 0.0) return false;
  for (double v : out.final_profile.values)
    if (v < 0.0) return false;
  return true;
}
} // namespace

TEST_CASE("pure transport conserves mass") {
  SimConfig c;
  c.beta = DivisionRate::constant(0.0);
  c.a_max = 220.0;
  c.t_end = 200.0;
  c.initial = initial::Custom{{0.0, 10.0}, {1.0, 1.0}};
  const auto out = simulate(c);
  for (double n : out.N) CHECK(std::abs(n / out.N.front() - 1.0) < 1e-12);
  CHECK(out.N.front() == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("output series are consistent") {
  auto c = reference(0.6);
  c.t_end = 30.0;
  const auto out = simulate(c);
  const std::size_t n = out.times.size();
  CHECK(n == 601);
  CHECK(out.P.size() == n);
  CHECK(out.Q.size() == n);
  CHECK(out.births.size() == n);
  CHECK(out.quiescence_influx.size() == n);
  for (std::size_t k = 0; k < n; ++k) {
    CHECK(out.N[k] == out.P[k] + out.Q[k]);
    CHECK(out.births[k] == doctest::Approx(2.0 * 0.4 * out.divisions[k]));
    CHECK(out.quiescence_influx[k] == doctest::Approx(2.0 * 0.6 * out.divisions[k]));
  }
  CHECK(nonnegative(out));
  CHECK(out.P.front() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("untreated equilibrium grows at the Malthus rate") {
  auto c = reference();
  c.t_end = 100.0;
  const auto out = simulate(c);
  const double lambda = solve_lambda(c.beta, c.mu);
  const double slope = (std::log(out.N[2000]) - std::log(out.N[1000])) / 50.0;
  CHECK(slope == doctest::Approx(lambda).epsilon(0.01));
}

TEST_CASE("full quiescence stops renewal") {
  auto c = reference(1.0);
  c.mu = c.mu_q = 0.0;
  c.t_end = 150.0;
  const auto out = simulate(c);
  CHECK(out.P.back() < 1e-6);
  double influx = 0.0;
  for (std::size_t n = 0; n + 1 < out.times.size(); ++n) influx += c.dt * out.quiescence_influx[n];
  CHECK(out.Q.back() == doctest::Approx(influx).epsilon(1e-12));
  CHECK(out.Q.back() == doctest::Approx(2.0).epsilon(1e-6));
  for (double b : out.births) CHECK(b == 0.0);
}

TEST_CASE("invalid configurations") {
  auto c = reference(2.0);
  CHECK_THROWS_AS(simulate(c), ValidationError);
  c.f = -0.1;
  CHECK_THROWS_AS(simulate(c), ValidationError);
  c = reference();
  c.dt = 0.0;
  CHECK_THROWS_AS(simulate(c), ValidationError);
  c = reference();
  c.initial = initial::Custom{{0.0, 1.0}, {1.0}};
  CHECK_THROWS_AS(simulate(c), ValidationError);
  c = reference();
  c.a_max = 30.0;
  c.initial = initial::Custom{{0.0, 10.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(simulate(c), NumericalError);
}

TEST_CASE("quiescent fraction without death equals f") {
  for (const ModelFamily m : {ModelFamily{kDeathRate}, ModelFamily{Gamma1{17.0, 2.0}}}) {
    SimConfig c;
    c.beta = DivisionRate::closed_form(m);
    for (double f : {0.0, 0.3, 0.6, 0.84}) {
      c.f = f;
      CHECK(std::abs(quiescent_fraction(c, 24.0) - f) < 1e-6);
      CHECK(std::abs(quiescent_fraction(c, 60.0) - f) < 1e-6);
    }
  }
  CHECK_THROWS_AS(quiescent_fraction(reference(), 0.0), ValidationError);
}

TEST_CASE("a small death rate perturbs F only slightly") {
  auto c = reference(0.84);
  const double F = quiescent_fraction(c, 24.0);
  CHECK(F < 0.84);
  CHECK(std::abs(F - 0.84) < 0.01);
}

TEST_CASE("step budget closes at first order") {
  auto residual = [](double dt) {
    auto c = reference(0.3);
    c.dt = dt;
    c.t_end = 40.0;
    const auto out = simulate(c);
    double worst = 0.0;
    for (std::size_t n = 0; n + 1 < out.times.size(); ++n) {
      const double model = dt * ((1.0 - 2.0 * c.f) * out.divisions[n] - c.mu * out.P[n]);
      worst = std::max(worst, std::abs(out.P[n + 1] - out.P[n] - model) / dt);
    }
    return worst;
  };
  const double coarse = residual(0.1), fine = residual(0.05);
  CHECK(fine < coarse / 1.5);
}

TEST_CASE("GRE functional is conserved from truncated initial data") {
  auto c = reference();
  c.t_end = 100.0;
  c.initial = initial::TruncatedEquilibrium{10.0};
  for (int k = 0; k <= 10; ++k) c.snapshot_times.push_back(10.0 * k);
  const auto out = simulate(c);
  REQUIRE(out.snapshots.size() == 11);
  const auto e = equilibrium(c.beta, c.mu, c.dt, out.final_profile.size());
  const double g0 = gre_functional(out.snapshots.front().profile, e.phi, e.lambda, 0.0);
  for (const auto& s : out.snapshots) CHECK(std::abs(gre_functional(s.profile, e.phi, e.lambda, s.t) / g0 - 1.0) < 5e-3);
  CHECK(nonnegative(out));
}

TEST_CASE("age profile relaxes towards equilibrium") {
  auto c = reference();
  const auto e = equilibrium(c.beta, c.mu, c.dt);
  c.a_max = static_cast<double>(e.p_hat.size()) * c.dt;
  c.t_end = 120.0;
  c.initial = initial::Custom{{0.0, 10.0}, {0.1, 0.1}};
  for (int k = 0; k <= 6; ++k) c.snapshot_times.push_back(20.0 * k);
  const auto out = simulate(c);
  const double rho0 = gre_functional(out.snapshots.front().profile, e.phi, e.lambda, 0.0);
  double prev = INFINITY;
  for (const auto& s : out.snapshots) {
    double gap = 0.0;
    for (std::size_t j = 0; j < e.p_hat.size(); ++j)
      gap += std::abs(s.profile.values[j] * std::exp(-e.lambda * s.t) / rho0 - e.p_hat.values[j]) * e.phi.values[j];
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("treatment is invisible until the first division") {
  SimConfig c;
  c.beta = DivisionRate::closed_form(Gamma1{17.0, 2.0});
  c.initial = initial::Custom{{0.0, 1.0}, {1.0, 1.0}};
  c.t_end = 40.0;
  const auto base = simulate(c);
  c.f = 0.84;
  const auto treated = simulate(c);
  for (std::size_t n = 0; n < base.times.size(); ++n) {
    if (base.times[n] < 15.9) CHECK(treated.N[n] == base.N[n]);
  }
  CHECK(std::abs(treated.N.back() - base.N.back()) > 0.01);
}

TEST_CASE("dose response of the reference model") {
  std::vector<SimOutput> runs;
  for (double f : {0.0, 0.6, 0.84}) {
    auto c = reference(f);
    c.t_end = 80.0;
    runs.push_back(simulate(c));
  }
  for (std::size_t n = 0; n < runs[0].times.size(); ++n) {
    const double t = runs[0].times[n];
    if (t <= 18.0) CHECK(std::abs(std::log(runs[2].N[n] / runs[0].N[n])) < 1e-4);
  }
  CHECK(runs[0].N.back() > runs[1].N.back());
  CHECK(runs[1].N.back() > runs[2].N.back());
}

TEST_CASE("silent age") {
  CHECK(silent_age(DivisionRate::closed_form(Gamma1{17.0, 2.0})) == doctest::Approx(17.0).epsilon(1e-3));
  CHECK(silent_age(DivisionRate::constant(0.5)) < 1e-5);
  const double s = silent_age(DivisionRate::closed_form(kDeathRate));
  CHECK(DivisionRate::closed_form(kDeathRate).cumulative(s) == doctest::Approx(1e-6).epsilon(1e-6));
}

TEST_CASE("labelled cohort IMT converges to I_inf") {
  const auto beta = DivisionRate::closed_form(kDeathRate);
  const double t0 = kDeathRate.m - 5.0 * kDeathRate.sigma;
  const double base = t0 + kDeathRate.m;
  const auto a = imt_experiment(beta, kMu, t0, base);
  const auto b = imt_experiment(beta, kMu, t0, base + 5.0 * kDeathRate.sigma);
  const auto c = imt_experiment(beta, kMu, t0, base + 20.0 * kDeathRate.sigma);
  CHECK(a.l1_gap > b.l1_gap);
  CHECK(b.l1_gap > c.l1_gap);
  CHECK(c.l1_gap < 0.01);
  double mass = 0.0;
  for (double v : c.density) mass += v * 0.05;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.c_T > 0.0);
  CHECK_THROWS_AS(imt_experiment(beta, kMu, kDeathRate.m, 100.0), ValidationError);
  CHECK_THROWS_AS(imt_experiment(beta, kMu, 5.0, 4.0), ValidationError);
}

TEST_CASE("a point cohort sees the truncated IMT density") {
  const Gamma1 g{10.0, 2.0};
  const auto beta = DivisionRate::closed_form(g);
  const double T = 16.0;
  const auto ex = imt_experiment(beta, 0.0, 0.0, T, 0.01);
  double norm = 0.0;
  for (double a = 0.0; a <= T; a += 0.001) norm += 0.001 * eval_I_infinity(g, a);
  double gap = 0.0;
  for (std::size_t k = 0; k < ex.ages.size(); ++k) {
    const double a = ex.ages[k];
    const double want = a <= T ? eval_I_infinity(g, a) / norm : 0.0;
    gap += 0.01 * std::abs(ex.density[k] - want);
  }
  CHECK(gap < 0.02);
  CHECK(ex.c_T == doctest::Approx(norm).epsilon(0.01));
}
