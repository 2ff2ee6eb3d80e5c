#include "mitoclock/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <boost/math/tools/roots.hpp>

#include "mitoclock/error.hpp"
#include "mitoclock/quadrature.hpp"

namespace mitoclock {

namespace {

// int_lo^hi f over ages. Tables are integrated panel by panel between nodes,
// where the interpolated rate is smooth.
template <class F>
double integrate_over_age(const DivisionRate& beta, F&& f, double lo, double hi) {
  if (!beta.is_tabulated()) return quad::integrate(f, lo, hi, beta.breakpoints());
  const auto nodes = beta.breakpoints();
  double sum = 0.0;
  double a = lo;
  for (double node : nodes) {
    if (node <= a) continue;
    if (node >= hi) break;
    sum += quad::panel(f, a, node);
    a = node;
  }
  return sum + quad::integrate(f, a, hi);
}

// Survival including the decay rate c: exp(-int_0^a beta - c a).
struct Discounted {
  const DivisionRate& beta;
  double c;
  double exponent(double a) const { return beta.cumulative(a) + c * a; }
};

// Smallest age where the increasing function g reaches target.
template <class G>
double first_age_reaching(G&& g, double target, double start) {
  double lo = 0.0, hi = std::max(start, 1.0);
  while (g(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e7) throw NumericalError("survival does not vanish; division rate is not divergent on the grid");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < target ? lo : hi) = mid;
  }
  return hi;
}

double characteristic_in_decay(const DivisionRate& beta, double decay, double horizon) {
  const auto integrand = [&](double a) { return beta(a) * std::exp(-beta.cumulative(a) - decay * a); };
  return 2.0 * integrate_over_age(beta, integrand, 0.0, horizon) - 1.0;
}

} // namespace

double characteristic(const DivisionRate& beta, double mu, double lambda) {
  return characteristic_in_decay(beta, mu + lambda, beta.horizon(1e-16));
}

double solve_lambda(const DivisionRate& beta, double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ValidationError("mu must be finite and >= 0");
  const double horizon = beta.horizon(1e-16);
  // The equation depends on mu + lambda only, so solve for the decay c = mu + lambda.
  // g(0) = 2 P(divide) - 1 = 1 for a divergent rate; g decreases in c.
  auto g = [&](double c) { return characteristic_in_decay(beta, c, horizon); };
  double lo = 0.0, hi = 0.05;
  const double c_max = 10.0 + mu;
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > c_max) throw NumericalError("no root of the characteristic equation for lambda in [-mu-1, 10]");
  }
  std::uintmax_t iters = 200;
  boost::math::tools::eps_tolerance<double> tol(52);
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, tol, iters);
  const double c = std::abs(g(a)) <= std::abs(g(b)) ? a : b;
  return c - mu;
}

double EigenPair::p_hat_at(double a) const {
  if (a < 0.0) return 0.0;
  return p_hat0 * std::exp(-beta.cumulative(a) - (mu + lambda) * a);
}

EigenPair equilibrium(const DivisionRate& beta, double mu, double width, std::size_t min_cells) {
  if (!(width > 0.0)) throw ValidationError("grid width must be > 0");
  EigenPair out;
  out.beta = beta;
  out.mu = mu;
  out.lambda = solve_lambda(beta, mu);
  const Discounted disc{beta, mu + out.lambda};
  const double c = disc.c;

  const double survival_end = beta.horizon(1e-16);
  out.p_hat0 = 1.0 / integrate_over_age(beta, [&](double a) { return std::exp(-disc.exponent(a)); }, 0.0,
                                         std::max(survival_end, 40.0 / c));

  const double a_end = first_age_reaching([&](double a) { return disc.exponent(a); }, -std::log(1e-12), survival_end);
  const auto cells = std::max(min_cells, static_cast<std::size_t>(std::ceil(a_end / width)));
  out.p_hat.width = width;
  out.phi.width = width;
  out.p_hat.values.resize(cells);
  out.phi.values.resize(cells);
  std::vector<double> exponent(cells);
  // p_hat as cell averages, so that width * sum is the exact mass of each cell.
  for (std::size_t j = 0; j < cells; ++j) {
    exponent[j] = disc.exponent(out.p_hat.age(j));
    const double lo = static_cast<double>(j) * width;
    out.p_hat.values[j] =
        out.p_hat0 * quad::panel([&](double a) { return std::exp(-disc.exponent(a)); }, lo, lo + width) / width;
  }

  // Adjoint: lambda phi - phi' + (beta + mu) phi = 2 phi(0) beta with phi(0) = 1,
  // integrated backwards from the bounded quasi-static value. Across a cell,
  //   phi(x) = e^{-(E(y)-E(x))} phi(y) + 2 int_x^y beta(s) e^{-(E(s)-E(x))} ds.
  auto step_back = [&](double x, double ex, double y, double ey, double phi_y) {
    const double forcing =
        quad::panel([&](double s) { return beta(s) * std::exp(-(disc.exponent(s) - ex)); }, x, y);
    return std::exp(-(ey - ex)) * phi_y + 2.0 * forcing;
  };
  {
    const double a_last = out.phi.age(cells - 1);
    const double b_last = beta(a_last);
    out.phi.values[cells - 1] = 2.0 * b_last / (b_last + c);
  }
  for (std::size_t j = cells - 1; j-- > 0;)
    out.phi.values[j] =
        step_back(out.phi.age(j), exponent[j], out.phi.age(j + 1), exponent[j + 1], out.phi.values[j + 1]);
  const double phi_at_zero = step_back(0.0, 0.0, out.phi.age(0), exponent[0], out.phi.values[0]);

  double pairing = 0.0;
  for (std::size_t j = 0; j < cells; ++j) pairing += out.p_hat.values[j] * out.phi.values[j];
  pairing *= width;
  for (double& v : out.phi.values) v /= pairing;
  out.phi0 = phi_at_zero / pairing;
  return out;
}

double gre_functional(const AgeProfile& p, const AgeProfile& phi, double lambda, double t) {
  if (p.size() != phi.size() || std::abs(p.width - phi.width) > 1e-12 * phi.width)
    throw ValidationError("profile and adjoint live on different age grids");
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) s += p.values[j] * phi.values[j];
  return std::exp(-lambda * t) * p.width * s;
}

} // namespace mitoclock
