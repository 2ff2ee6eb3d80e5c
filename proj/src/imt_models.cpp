#include "mitoclock/imt_models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "mitoclock/error.hpp"
#include "mitoclock/quadrature.hpp"
#include "mitoclock/special.hpp"

namespace mitoclock {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double erfc_rate(double beta0, double m, double sigma, double a) { return beta0 * erfc((m - a) / sigma); }

// exp(-int_0^a (beta + mu + lambda)) times 2 beta(a), erfc-rate families.
double erfc_tilde(double beta0, double m, double sigma, double decay, double a) {
  const double rate = erfc_rate(beta0, m, sigma, a);
  if (rate == 0.0) return 0.0;
  return 2.0 * rate * std::exp(-beta0 * erfc_primitive(m, sigma, a) - decay * a);
}

double emg_density(const Emg& e, double a) {
  const double tail = erfc((e.m - a) / e.sigma);
  if (tail == 0.0) return 0.0;
  return e.beta0 * tail * std::exp(-2.0 * e.beta0 * (0.5 * e.beta0 * e.sigma * e.sigma - e.m + a));
}

[[noreturn]] void emg_has_no_rate() {
  throw UnsupportedVariantError("the EMG family has no closed-form division rate; use invert_imt on sampled densities");
}

} // namespace

Family family_of(const ModelFamily& model) { return static_cast<Family>(model.index()); }

std::string_view family_name(Family f) {
  switch (f) {
  case Family::gamma1: return "gamma1";
  case Family::gamma2: return "gamma2";
  case Family::emg: return "emg";
  case Family::erfc: return "erfc";
  case Family::erfc_mu: return "erfc-mu";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (auto f : {Family::gamma1, Family::gamma2, Family::emg, Family::erfc, Family::erfc_mu})
    if (family_name(f) == name) return f;
  throw ValidationError("unknown model family '" + std::string(name) +
                        "' (expected gamma1, gamma2, emg, erfc or erfc-mu)");
}

std::size_t parameter_count(Family f) {
  switch (f) {
  case Family::gamma1:
  case Family::gamma2: return 2;
  case Family::emg:
  case Family::erfc: return 3;
  case Family::erfc_mu: return 4;
  }
  return 0;
}

std::vector<double> to_params(const ModelFamily& model) {
  return std::visit(overloaded{
                        [](const Gamma1& g) { return std::vector<double>{g.m, g.sigma}; },
                        [](const Gamma2& g) { return std::vector<double>{g.m, g.sigma}; },
                        [](const Emg& e) { return std::vector<double>{e.beta0, e.m, e.sigma}; },
                        [](const ErfcRate& e) { return std::vector<double>{e.beta0, e.m, e.sigma}; },
                        [](const ErfcRateDeath& e) { return std::vector<double>{e.beta0, e.m, e.sigma, e.mu}; },
                    },
                    model);
}

ModelFamily from_params(Family f, std::span<const double> p) {
  if (p.size() != parameter_count(f))
    throw ValidationError(std::string(family_name(f)) + " takes " + std::to_string(parameter_count(f)) +
                          " parameters");
  switch (f) {
  case Family::gamma1: return Gamma1{p[0], p[1]};
  case Family::gamma2: return Gamma2{p[0], p[1]};
  case Family::emg: return Emg{p[0], p[1], p[2]};
  case Family::erfc: return ErfcRate{p[0], p[1], p[2]};
  case Family::erfc_mu: return ErfcRateDeath{p[0], p[1], p[2], p[3]};
  }
  throw ValidationError("unknown family");
}

void validate(const ModelFamily& model) {
  const auto p = to_params(model);
  for (double v : p)
    if (!std::isfinite(v)) throw ValidationError("model parameters must be finite");
  auto check = [](bool ok, const char* msg) {
    if (!ok) throw ValidationError(msg);
  };
  std::visit(overloaded{
                 [&](const Gamma1& g) { check(g.sigma > 0, "sigma must be > 0"), check(g.m >= 0, "m must be >= 0"); },
                 [&](const Gamma2& g) { check(g.sigma > 0, "sigma must be > 0"), check(g.m >= 0, "m must be >= 0"); },
                 [&](const Emg& e) {
                   check(e.sigma > 0, "sigma must be > 0");
                   check(e.beta0 > 0, "beta0 must be > 0");
                   check(e.m >= 0, "m must be >= 0");
                 },
                 [&](const ErfcRate& e) {
                   check(e.sigma > 0, "sigma must be > 0");
                   check(e.beta0 > 0, "beta0 must be > 0");
                   check(e.m >= 0, "m must be >= 0");
                 },
                 [&](const ErfcRateDeath& e) {
                   check(e.sigma > 0, "sigma must be > 0");
                   check(e.beta0 > 0, "beta0 must be > 0");
                   check(e.m >= 0, "m must be >= 0");
                   check(e.mu >= 0, "mu must be >= 0");
                 },
             },
             model);
}

double death_rate(const ModelFamily& model) {
  if (const auto* e = std::get_if<ErfcRateDeath>(&model)) return e->mu;
  return 0.0;
}

double eval_beta(const ModelFamily& model, double a) {
  return std::visit(overloaded{
                        [a](const Gamma1& g) {
                          const double x = a - g.m;
                          return x <= 0.0 ? 0.0 : x / (g.sigma * (g.sigma + x));
                        },
                        [a](const Gamma2& g) {
                          const double x = a - g.m;
                          const double s = g.sigma;
                          return x <= 0.0 ? 0.0 : (x * x) / (s * (2.0 * s * s + 2.0 * s * x + x * x));
                        },
                        [](const Emg&) -> double { emg_has_no_rate(); },
                        [a](const ErfcRate& e) { return erfc_rate(e.beta0, e.m, e.sigma, a); },
                        [a](const ErfcRateDeath& e) { return erfc_rate(e.beta0, e.m, e.sigma, a); },
                    },
                    model);
}

double cumulative_beta(const ModelFamily& model, double a) {
  return std::visit(overloaded{
                        [a](const Gamma1& g) {
                          const double y = (a - g.m) / g.sigma;
                          return y <= 0.0 ? 0.0 : y - std::log1p(y);
                        },
                        [a](const Gamma2& g) {
                          const double y = (a - g.m) / g.sigma;
                          return y <= 0.0 ? 0.0 : y - std::log1p(y + 0.5 * y * y);
                        },
                        [](const Emg&) -> double { emg_has_no_rate(); },
                        [a](const ErfcRate& e) { return e.beta0 * erfc_primitive(e.m, e.sigma, a); },
                        [a](const ErfcRateDeath& e) { return e.beta0 * erfc_primitive(e.m, e.sigma, a); },
                    },
                    model);
}

std::vector<double> breakpoints(const ModelFamily& model) {
  return std::visit(overloaded{
                        [](const Gamma1& g) { return std::vector<double>{g.m}; },
                        [](const Gamma2& g) { return std::vector<double>{g.m}; },
                        [](const auto& e) {
                          return std::vector<double>{e.m - 6.0 * e.sigma, e.m, e.m + 6.0 * e.sigma};
                        },
                    },
                    model);
}

double tail_horizon(const ModelFamily& model) {
  return std::visit(overloaded{
                        [](const Gamma1& g) { return g.m + 60.0 * g.sigma; },
                        [](const Gamma2& g) { return g.m + 60.0 * g.sigma; },
                        [](const Emg& e) { return e.m + 8.0 * e.sigma + 40.0 / e.beta0; },
                        [](const ErfcRate& e) { return std::max(e.m + 40.0 * e.sigma, e.m + 6.0 * e.sigma + 40.0 / e.beta0); },
                        [](const ErfcRateDeath& e) {
                          return std::max(e.m + 40.0 * e.sigma, e.m + 6.0 * e.sigma + 40.0 / e.beta0);
                        },
                    },
                    model);
}

double normalizing_constant(const ModelFamily& model) {
  const auto* e = std::get_if<ErfcRateDeath>(&model);
  if (!e) return 1.0;
  // pointwise density evaluation asks for the same constant over and over
  thread_local std::array<double, 4> last_params{NAN, NAN, NAN, NAN};
  thread_local double last_value = 0.0;
  const std::array<double, 4> params{e->beta0, e->m, e->sigma, e->mu};
  if (params == last_params) return last_value;
  const auto cuts = breakpoints(model);
  last_value = quad::integrate([e](double a) { return 0.5 * erfc_tilde(e->beta0, e->m, e->sigma, e->mu, a); },
                               0.0, tail_horizon(model), cuts);
  last_params = params;
  return last_value;
}

double eval_I_infinity(const ModelFamily& model, double a) {
  if (a < 0.0) return 0.0;
  return std::visit(overloaded{
                        [a](const Gamma1& g) {
                          const double x = a - g.m;
                          return x <= 0.0 ? 0.0 : x / (g.sigma * g.sigma) * std::exp(-x / g.sigma);
                        },
                        [a](const Gamma2& g) {
                          const double x = a - g.m;
                          const double s = g.sigma;
                          return x <= 0.0 ? 0.0 : x * x / (2.0 * s * s * s) * std::exp(-x / s);
                        },
                        [a](const Emg& e) { return emg_density(e, a); },
                        [a](const ErfcRate& e) { return 0.5 * erfc_tilde(e.beta0, e.m, e.sigma, 0.0, a); },
                        [a, &model](const ErfcRateDeath& e) {
                          return 0.5 * erfc_tilde(e.beta0, e.m, e.sigma, e.mu, a) / normalizing_constant(model);
                        },
                    },
                    model);
}

double eval_I_tilde(const ModelFamily& model, double lambda, double a) {
  if (a < 0.0) return 0.0;
  if (const auto* e = std::get_if<ErfcRateDeath>(&model)) return erfc_tilde(e->beta0, e->m, e->sigma, e->mu + lambda, a);
  if (const auto* e = std::get_if<ErfcRate>(&model)) return erfc_tilde(e->beta0, e->m, e->sigma, lambda, a);
  return 2.0 * eval_I_infinity(model, a) * std::exp(-lambda * a);
}

double integrate_I_tilde(const ModelFamily& model, double lambda) {
  const auto cuts = breakpoints(model);
  return quad::integrate([&](double a) { return eval_I_tilde(model, lambda, a); }, 0.0, tail_horizon(model), cuts);
}

// ---------------------------------------------------------------------------

DivisionRate DivisionRate::closed_form(const ModelFamily& model) {
  if (std::holds_alternative<Emg>(model)) emg_has_no_rate();
  validate(model);
  return DivisionRate(model);
}

DivisionRate DivisionRate::tabulated(std::vector<double> ages, std::vector<double> values) {
  if (ages.empty() || ages.size() != values.size()) throw ValidationError("rate table needs matching, non-empty columns");
  if (!(ages.front() >= 0.0)) throw ValidationError("rate table ages must be >= 0");
  for (std::size_t k = 0; k < ages.size(); ++k) {
    if (!std::isfinite(ages[k]) || !std::isfinite(values[k])) throw ValidationError("rate table has non-finite entries");
    if (values[k] < 0.0) throw ValidationError("division rate must be >= 0");
    if (k > 0 && !(ages[k] > ages[k - 1])) throw ValidationError("rate table ages must be strictly increasing");
  }
  Table t{std::move(ages), std::move(values), {}};
  t.cumulative.resize(t.ages.size());
  t.cumulative[0] = t.ages[0] * t.values[0];
  for (std::size_t k = 1; k < t.ages.size(); ++k)
    t.cumulative[k] = t.cumulative[k - 1] + 0.5 * (t.values[k] + t.values[k - 1]) * (t.ages[k] - t.ages[k - 1]);
  return DivisionRate(std::move(t));
}

DivisionRate DivisionRate::constant(double rate) { return tabulated({0.0}, {rate}); }

double DivisionRate::operator()(double a) const {
  return std::visit(overloaded{
                        [a](const ModelFamily& m) { return a < 0.0 ? 0.0 : eval_beta(m, a); },
                        [a](const Table& t) {
                          if (a <= t.ages.front()) return t.values.front();
                          if (a >= t.ages.back()) return t.values.back();
                          const auto k = static_cast<std::size_t>(std::upper_bound(t.ages.begin(), t.ages.end(), a) -
                                                                  t.ages.begin()) - 1;
                          const double w = (a - t.ages[k]) / (t.ages[k + 1] - t.ages[k]);
                          return t.values[k] + w * (t.values[k + 1] - t.values[k]);
                        },
                    },
                    form_);
}

double DivisionRate::cumulative(double a) const {
  if (a <= 0.0) return 0.0;
  return std::visit(overloaded{
                        [a](const ModelFamily& m) { return cumulative_beta(m, a); },
                        [a](const Table& t) {
                          if (a <= t.ages.front()) return a * t.values.front();
                          if (a >= t.ages.back()) return t.cumulative.back() + (a - t.ages.back()) * t.values.back();
                          const auto k = static_cast<std::size_t>(std::upper_bound(t.ages.begin(), t.ages.end(), a) -
                                                                  t.ages.begin()) - 1;
                          const double h = t.ages[k + 1] - t.ages[k];
                          const double slope = (t.values[k + 1] - t.values[k]) / h;
                          const double x = a - t.ages[k];
                          return t.cumulative[k] + x * (t.values[k] + 0.5 * slope * x);
                        },
                    },
                    form_);
}

std::vector<double> DivisionRate::breakpoints() const {
  return std::visit(overloaded{
                        [](const ModelFamily& m) { return mitoclock::breakpoints(m); },
                        [](const Table& t) { return t.ages; },
                    },
                    form_);
}

double DivisionRate::horizon(double survival) const {
  const double target = -std::log(survival);
  double lo = 0.0;
  double hi = 1.0;
  for (double b : breakpoints()) hi = std::max(hi, b);
  while (cumulative(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e7) throw NumericalError("division rate is not divergent: survival never drops below threshold");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cumulative(mid) < target ? lo : hi) = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------

ImtDensity::ImtDensity(DivisionRate beta, double mu) : beta_(std::move(beta)), mu_(mu), c_inf_(0.0) {
  if (!(mu >= 0.0)) throw ValidationError("mu must be >= 0");
  const double end = beta_.horizon(1e-16);
  const auto cuts = beta_.breakpoints();
  c_inf_ = quad::integrate([this](double a) { return beta_(a) * std::exp(-beta_.cumulative(a) - mu_ * a); }, 0.0, end,
                           cuts);
  if (!(c_inf_ > 0.0)) throw NumericalError("IMT density has no mass");
}

double ImtDensity::operator()(double a) const {
  if (a < 0.0) return 0.0;
  return beta_(a) * std::exp(-beta_.cumulative(a) - mu_ * a) / c_inf_;
}

} // namespace mitoclock
