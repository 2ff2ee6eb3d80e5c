#include "mitoclock/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

namespace mitoclock::opt {

namespace {

double safe(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::max(); }

} // namespace

Minimum nelder_mead(const Objective& f, std::vector<double> x0, std::span<const double> step,
                    const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double gamma = 1.0 + 2.0 / dn;
  const double rho = 0.75 - 1.0 / (2.0 * dn);
  const double shrink = 1.0 - 1.0 / dn;

  Minimum out;
  auto eval = [&](const std::vector<double>& x) {
    ++out.evaluations;
    return safe(f(x));
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step[i];
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  auto point = [&](const std::vector<double>& from, const std::vector<double>& to, double t, std::vector<double>& dst) {
    for (std::size_t j = 0; j < n; ++j) dst[j] = from[j] + t * (to[j] - from[j]);
  };

  for (out.iterations = 0; out.iterations < opts.max_iter; ++out.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]) / (1.0 + std::abs(simplex[best][j])));
    const double spread = fv[worst] - fv[best];
    if (spread <= opts.f_tol * std::abs(fv[best]) || diameter <= opts.x_tol) {
      out.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / dn;

    point(centroid, simplex[worst], -alpha, xr);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      point(centroid, simplex[worst], -alpha * gamma, xe);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    // Contraction, outside or inside.
    const bool outside = fr < fv[worst];
    point(centroid, simplex[worst], outside ? -alpha * rho : rho, xc);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      simplex[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      point(simplex[best], simplex[i], shrink, simplex[i]);
      fv[i] = eval(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  out.x = simplex[best];
  out.value = fv[best];
  return out;
}

Minimum levenberg_marquardt(const Residuals& r, std::size_t n_residuals, std::vector<double> x0,
                            const LevenbergMarquardtOptions& opts) {
  const std::size_t n = x0.size();
  Minimum out;
  std::vector<double> res(n_residuals), res_trial(n_residuals), xp(n), xm(n);
  std::vector<double> rp(n_residuals), rm(n_residuals);

  auto ssr = [&](const std::vector<double>& x, std::vector<double>& dst) {
    ++out.evaluations;
    r(x, dst);
    double s = 0.0;
    for (double v : dst) s += v * v;
    return safe(s);
  };

  double cost = ssr(x0, res);
  double damping = 1e-3;
  Eigen::MatrixXd J(n_residuals, n);

  for (out.iterations = 0; out.iterations < opts.max_iter; ++out.iterations) {
    for (std::size_t j = 0; j < n; ++j) {
      const double h = opts.fd_step * std::max(1.0, std::abs(x0[j]));
      xp = x0;
      xm = x0;
      xp[j] += h;
      xm[j] -= h;
      ssr(xp, rp);
      ssr(xm, rm);
      for (std::size_t i = 0; i < n_residuals; ++i) J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (rp[i] - rm[i]) / (2.0 * h);
    }
    const Eigen::Map<const Eigen::VectorXd> rv(res.data(), static_cast<Eigen::Index>(n_residuals));
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * rv;
    if (!A.allFinite() || !g.allFinite()) break;

    bool accepted = false;
    while (damping < 1e16) {
      Eigen::MatrixXd Ad = A;
      for (Eigen::Index k = 0; k < Ad.rows(); ++k) Ad(k, k) += damping * std::max(A(k, k), 1e-30);
      const Eigen::VectorXd delta = Ad.ldlt().solve(-g);
      std::vector<double> trial(n);
      for (std::size_t j = 0; j < n; ++j) trial[j] = x0[j] + delta(static_cast<Eigen::Index>(j));
      const double trial_cost = ssr(trial, res_trial);
      if (delta.allFinite() && trial_cost < cost) {
        const double gain = (cost - trial_cost) / std::max(cost, 1e-300);
        x0 = std::move(trial);
        res.swap(res_trial);
        cost = trial_cost;
        damping = std::max(damping / 3.0, 1e-12);
        accepted = true;
        if (gain < opts.rel_tol || cost == 0.0) out.converged = true;
        break;
      }
      damping *= 4.0;
    }
    if (!accepted) {
      // No descent direction left at machine precision: a stationary point.
      out.converged = true;
      break;
    }
    if (out.converged) break;
  }
  out.x = std::move(x0);
  out.value = cost;
  return out;
}

} // namespace mitoclock::opt
