#include "mitoclock/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mitoclock/error.hpp"
#include "mitoclock/quadrature.hpp"
#include "mitoclock/spectral.hpp"

namespace mitoclock {

namespace {

// Per-cell transition of the lockstep scheme. A cell centred at age a_j moves
// to a_{j+1} in one step; the exact integrating factor of beta + mu along that
// characteristic gives the survivors, and the division share of the loss is
// beta/(beta+mu) with beta averaged over the step.
struct Transitions {
  std::vector<double> survive;
  std::vector<double> divide;
};

Transitions transitions(const DivisionRate& beta, double mu, double dt, std::size_t cells) {
  Transitions t;
  t.survive.resize(cells);
  t.divide.resize(cells);
  double h_prev = beta.cumulative(0.5 * dt);
  for (std::size_t j = 0; j < cells; ++j) {
    const double h_next = beta.cumulative((static_cast<double>(j) + 1.5) * dt);
    const double dh = std::max(h_next - h_prev, 0.0);
    const double total = dh + mu * dt;
    const double loss = -std::expm1(-total);
    t.survive[j] = 1.0 - loss;
    t.divide[j] = total > 0.0 ? loss * dh / total : 0.0;
    h_prev = h_next;
  }
  return t;
}

std::size_t step_count(double span, double dt) {
  return static_cast<std::size_t>(std::llround(span / dt));
}

void normalise(std::vector<double>& p, double dt) {
  double mass = 0.0;
  for (double v : p) mass += v;
  mass *= dt;
  if (!(mass > 0.0)) throw ValidationError("initial age profile has no mass");
  for (double& v : p) v /= mass;
}

} // namespace

void validate(const SimConfig& c) {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
  };
  check(std::isfinite(c.f) && c.f >= 0.0 && c.f <= 1.0, "f must lie in [0, 1]");
  check(std::isfinite(c.dt) && c.dt > 0.0, "dt must be > 0");
  check(std::isfinite(c.t_end) && c.t_end >= 0.0, "t_end must be >= 0");
  check(std::isfinite(c.mu) && c.mu >= 0.0, "mu must be >= 0");
  check(std::isfinite(c.mu_q) && c.mu_q >= 0.0, "mu_q must be >= 0");
  check(std::isfinite(c.q0) && c.q0 >= 0.0, "Q0 must be >= 0");
  check(std::isfinite(c.a_max) && c.a_max >= 0.0, "a_max must be >= 0");
  if (const auto* t = std::get_if<initial::TruncatedEquilibrium>(&c.initial))
    check(std::isfinite(t->t0) && t->t0 > 0.0, "truncation age t0 must be > 0");
  if (const auto* u = std::get_if<initial::Custom>(&c.initial)) {
    check(!u->ages.empty() && u->ages.size() == u->values.size(), "custom profile needs matching columns");
    for (std::size_t k = 0; k < u->ages.size(); ++k) {
      check(u->values[k] >= 0.0, "custom profile must be nonnegative");
      check(k == 0 || u->ages[k] > u->ages[k - 1], "custom profile ages must increase");
    }
  }
}

SimOutput simulate(const SimConfig& config) {
  validate(config);
  const double dt = config.dt;
  const bool needs_eigen = !std::holds_alternative<initial::Custom>(config.initial);

  double a_max = config.a_max;
  if (a_max == 0.0) a_max = config.beta.horizon(1e-12);
  std::size_t cells = static_cast<std::size_t>(std::ceil(a_max / dt - 1e-9));

  std::vector<double> p;
  if (needs_eigen) {
    const auto eigen = equilibrium(config.beta, config.mu, dt, cells);
    cells = eigen.p_hat.size();
    p = eigen.p_hat.values;
    if (const auto* t = std::get_if<initial::TruncatedEquilibrium>(&config.initial)) {
      for (std::size_t j = 0; j < cells; ++j)
        if (static_cast<double>(j + 1) * dt > t->t0 * (1.0 + 1e-12)) p[j] = 0.0;
    }
    normalise(p, dt);
  } else {
    const auto& u = std::get<initial::Custom>(config.initial);
    p.assign(cells, 0.0);
    for (std::size_t j = 0; j < cells; ++j) {
      const double a = (static_cast<double>(j) + 0.5) * dt;
      if (a < u.ages.front() || a > u.ages.back()) continue;
      const auto k = static_cast<std::size_t>(std::upper_bound(u.ages.begin(), u.ages.end(), a) - u.ages.begin());
      if (k == u.ages.size()) {
        p[j] = u.values.back();
        continue;
      }
      const double w = (a - u.ages[k - 1]) / (u.ages[k] - u.ages[k - 1]);
      p[j] = u.values[k - 1] + w * (u.values[k] - u.values[k - 1]);
    }
  }
  if (cells < 2) throw ValidationError("age grid needs at least two cells");

  const auto tr = transitions(config.beta, config.mu, dt, cells);
  const std::size_t steps = step_count(config.t_end, dt);
  std::vector<std::size_t> snapshot_steps;
  for (double t : config.snapshot_times) snapshot_steps.push_back(step_count(std::clamp(t, 0.0, config.t_end), dt));

  SimOutput out;
  out.times.reserve(steps + 1);
  double q = config.q0;
  double peak = 0.0;
  for (std::size_t n = 0;; ++n) {
    double mass = 0.0, divided = 0.0;
    for (std::size_t j = 0; j < cells; ++j) {
      mass += p[j];
      divided += p[j] * tr.divide[j];
    }
    mass *= dt;
    peak = std::max(peak, mass);
    const double flux = divided; // dt * sum(p * divide) / dt
    out.times.push_back(static_cast<double>(n) * dt);
    out.P.push_back(mass);
    out.Q.push_back(q);
    out.N.push_back(mass + q);
    out.divisions.push_back(flux);
    out.births.push_back(2.0 * (1.0 - config.f) * flux);
    out.quiescence_influx.push_back(2.0 * config.f * flux);
    for (std::size_t s = 0; s < snapshot_steps.size(); ++s)
      if (snapshot_steps[s] == n) out.snapshots.push_back({static_cast<double>(n) * dt, AgeProfile{dt, p}});
    if (n == steps) break;

    const double outflow = dt * p[cells - 1] * tr.survive[cells - 1];
    if (outflow > 1e-9 * peak) {
      std::ostringstream msg;
      msg << "age grid too small: mass " << outflow << " leaves a_max = " << static_cast<double>(cells) * dt
          << " at t = " << static_cast<double>(n) * dt;
      throw NumericalError(msg.str());
    }
    for (std::size_t j = cells - 1; j > 0; --j) p[j] = p[j - 1] * tr.survive[j - 1];
    p[0] = 2.0 * (1.0 - config.f) * flux;
    q += dt * (2.0 * config.f * flux - config.mu_q * q);
  }
  out.final_profile = AgeProfile{dt, std::move(p)};
  return out;
}

double quiescent_fraction(SimConfig config, double t0) {
  if (!(t0 > 0.0)) throw ValidationError("labelling time t0 must be > 0");
  config.t_end = t0;
  const auto out = simulate(config);
  // Newborns of step n enter the age-0 cell; their count over the window uses
  // the same rectangle rule as the Q update.
  double newborn = 0.0;
  for (std::size_t n = 0; n + 1 < out.times.size(); ++n) newborn += config.dt * out.births[n];
  const double q = out.Q.back();
  if (q + newborn <= 0.0) return 0.0;
  return q / (q + newborn);
}

double silent_age(const DivisionRate& beta, double tol) {
  if (beta.cumulative(0.0) > tol) return 0.0;
  double lo = 0.0, hi = beta.horizon(1e-12);
  if (beta.cumulative(hi) <= tol) return hi;
  for (int k = 0; k < 200 && hi - lo > 1e-12 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (beta.cumulative(mid) <= tol ? lo : hi) = mid;
  }
  return lo;
}

ImtExperiment imt_experiment(const DivisionRate& beta, double mu, double t0, double T, double dt) {
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  if (!(t0 >= 0.0)) throw ValidationError("t0 must be >= 0");
  if (!(T > t0)) throw ValidationError("observation window T must exceed t0");
  if (beta.cumulative(t0) > 1e-6)
    throw ValidationError("division rate must vanish on [0, t0]: int_0^t0 beta = " +
                          std::to_string(beta.cumulative(t0)));

  const double lambda = solve_lambda(beta, mu);
  const std::size_t steps = step_count(T, dt);
  const std::size_t cells = step_count(T + t0, dt) + 2;
  const auto tr = transitions(beta, mu, dt, cells);

  std::vector<double> p(cells, 0.0);
  if (t0 < dt) {
    p[0] = 1.0 / dt;
  } else {
    for (std::size_t j = 0; (static_cast<double>(j) + 1.0) * dt <= t0 * (1.0 + 1e-12); ++j) {
      const double a = (static_cast<double>(j) + 0.5) * dt;
      p[j] = std::exp(-beta.cumulative(a) - (mu + lambda) * a);
    }
    normalise(p, dt);
  }

  // divided[k]: mass dividing at ages around k*dt.
  std::vector<double> divided(cells + 1, 0.0);
  for (std::size_t n = 0; n < steps; ++n) {
    for (std::size_t j = 0; j < cells; ++j) divided[j + 1] += dt * p[j] * tr.divide[j];
    for (std::size_t j = cells - 1; j > 0; --j) p[j] = p[j - 1] * tr.survive[j - 1];
    p[0] = 0.0;
  }

  ImtExperiment out;
  for (double d : divided) out.c_T += d;
  if (!(out.c_T > 0.0)) throw NumericalError("no labelled cell divided within the window");
  const ImtDensity reference(beta, mu);
  out.ages.resize(divided.size());
  out.density.resize(divided.size());
  double gap = 0.0;
  for (std::size_t k = 0; k < divided.size(); ++k) {
    out.ages[k] = static_cast<double>(k) * dt;
    out.density[k] = divided[k] / (dt * out.c_T);
    gap += dt * std::abs(out.density[k] - reference(out.ages[k]));
  }
  const double grid_end = (static_cast<double>(divided.size()) - 0.5) * dt;
  gap += quad::integrate([&](double a) { return reference(a); }, grid_end,
                         std::max(grid_end, beta.horizon(1e-16)), beta.breakpoints());
  out.l1_gap = gap;
  return out;
}

} // namespace mitoclock
