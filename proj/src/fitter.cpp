#include "mitoclock/fitter.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mitoclock/optimize.hpp"

namespace mitoclock {

namespace {

// Optimiser coordinates: log for positive scales, identity (clamped at 0) for
// the shift m, square root for a free death rate.
struct Coding {
  Family family;
  std::optional<double> fixed_mu;

  bool has_beta0() const { return family != Family::gamma1 && family != Family::gamma2; }
  bool free_mu() const { return family == Family::erfc_mu && !fixed_mu; }
  std::size_t dim() const { return (has_beta0() ? 3 : 2) + (free_mu() ? 1 : 0); }

  ModelFamily decode(std::span<const double> u) const {
    std::vector<double> p;
    std::size_t k = 0;
    if (has_beta0()) p.push_back(std::exp(u[k++]));
    p.push_back(std::max(u[k++], 0.0));
    p.push_back(std::exp(u[k++]));
    if (family == Family::erfc_mu) p.push_back(fixed_mu ? *fixed_mu : u[k] * u[k]);
    return from_params(family, p);
  }

  std::vector<double> encode(const ModelFamily& model) const {
    const auto p = to_params(model);
    std::vector<double> u;
    std::size_t k = 0;
    if (has_beta0()) u.push_back(std::log(p[k++]));
    u.push_back(p[k++]);
    u.push_back(std::log(p[k++]));
    if (free_mu()) u.push_back(std::sqrt(std::max(p[k], 0.0)));
    return u;
  }
};

// Uniform in [0,1) from the raw 64-bit stream, identical on every platform.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double sum_of_squares(std::span<const double> r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

} // namespace

ModelFamily initial_guess(std::span<const double> ages, std::span<const double> heights, double lambda, Family family) {
  const double peak = *std::max_element(heights.begin(), heights.end());
  double m0 = ages.front();
  for (std::size_t i = 0; i < ages.size(); ++i)
    if (heights[i] > 0.05 * peak) {
      m0 = ages[i];
      break;
    }
  double w = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < ages.size(); ++i) {
    w += heights[i];
    mean += heights[i] * ages[i];
  }
  mean /= w;
  double var = 0.0;
  for (std::size_t i = 0; i < ages.size(); ++i) var += heights[i] * (ages[i] - mean) * (ages[i] - mean);
  const double sigma0 = std::max(0.5 * std::sqrt(var / w), 1e-3);

  std::vector<double> p;
  if (family == Family::gamma1 || family == Family::gamma2) return from_params(family, std::vector<double>{m0, sigma0});

  // beta0: best amplitude match on a log grid with m0, sigma0 held fixed.
  double best_beta0 = 2.0 / sigma0, best = INFINITY;
  for (int k = 0; k <= 80; ++k) {
    const double b0 = 1e-3 * std::pow(10.0, 3.5 * k / 80.0);
    p = {b0, m0, sigma0};
    if (family == Family::erfc_mu) p.push_back(0.001);
    const auto model = from_params(family, p);
    double ss = 0.0;
    for (std::size_t i = 0; i < ages.size(); ++i) {
      const double r = eval_I_tilde(model, lambda, ages[i]) - heights[i];
      ss += r * r;
    }
    if (ss < best) {
      best = ss;
      best_beta0 = b0;
    }
  }
  p = {best_beta0, m0, sigma0};
  if (family == Family::erfc_mu) p.push_back(0.001);
  return from_params(family, p);
}

FitResult fit_imt(const Histogram& reweighted, Family family, const std::optional<ModelFamily>& init,
                  const FitOptions& opts) {
  if (reweighted.kind() != HistogramKind::reweighted) throw StateError("fit_imt expects a reweighted histogram");
  const auto ages = reweighted.midpoints();
  return fit_imt(ages, reweighted.heights(), *reweighted.lambda_used(), family, init, opts);
}

FitResult fit_imt(std::span<const double> ages, std::span<const double> heights, double lambda, Family family,
                  const std::optional<ModelFamily>& init, const FitOptions& opts) {
  const Coding coding{family, family == Family::erfc_mu ? opts.fixed_mu : std::nullopt};
  const std::size_t n = ages.size();
  if (heights.size() != n) throw ValidationError("ages and heights differ in length");
  if (n <= coding.dim()) throw ValidationError("histogram has too few bins for this model");
  if (!std::isfinite(lambda)) throw ValidationError("lambda must be finite");
  if (opts.fixed_mu && !(*opts.fixed_mu >= 0.0)) throw ValidationError("fixed mu must be >= 0");
  if (*std::max_element(heights.begin(), heights.end()) <= 0.0) throw DegenerateInputError("histogram is identically zero");
  if (init) {
    if (family_of(*init) != family) throw ValidationError("init belongs to a different model family");
    validate(*init);
  }

  std::size_t evaluations = 0;
  auto residuals = [&](std::span<const double> u, std::span<double> r) {
    const auto model = coding.decode(u);
    for (std::size_t i = 0; i < n; ++i) r[i] = eval_I_tilde(model, lambda, ages[i]) - heights[i];
  };
  auto objective = [&](std::span<const double> u) {
    ++evaluations;
    std::vector<double> r(n);
    residuals(u, r);
    return sum_of_squares(r);
  };
  auto counted_residuals = [&](std::span<const double> u, std::span<double> r) {
    ++evaluations;
    residuals(u, r);
  };

  const ModelFamily start = init ? *init : initial_guess(ages, heights, lambda, family);
  const std::vector<double> u0 = coding.encode(start);
  const double sigma0 = to_params(start)[coding.has_beta0() ? 2 : 1];

  std::vector<double> step;
  if (coding.has_beta0()) step.push_back(0.2);
  step.push_back(std::max(1.0, sigma0));
  step.push_back(0.2);
  if (coding.free_mu()) step.push_back(0.03);

  std::mt19937_64 rng(opts.seed);
  std::vector<double> best_u;
  double best_value = INFINITY;
  bool any_converged = false;
  const std::size_t starts = std::max<std::size_t>(opts.starts, 1);

  for (std::size_t s = 0; s < starts; ++s) {
    std::vector<double> u = u0;
    if (s > 0) {
      std::size_t k = 0;
      if (coding.has_beta0()) u[k++] += 1.4 * unit(rng) - 0.7;
      u[k] += (2.0 * unit(rng) - 1.0) * 2.0 * sigma0;
      u[k] = std::max(u[k], 0.0);
      ++k;
      u[k++] += 1.4 * unit(rng) - 0.7;
      if (coding.free_mu()) u[k] = std::sqrt(0.01 * unit(rng));
    }
    opt::NelderMeadOptions nm_opts;
    nm_opts.max_iter = opts.max_iter;
    const auto nm = opt::nelder_mead(objective, u, step, nm_opts);
    const auto lm = opt::levenberg_marquardt(counted_residuals, n, nm.x);
    const bool lm_better = lm.value <= nm.value;
    const double value = lm_better ? lm.value : nm.value;
    any_converged = any_converged || nm.converged || lm.converged;
    // Strict comparison: ties keep the lowest start index.
    if (value < best_value) {
      best_value = value;
      best_u = lm_better ? lm.x : nm.x;
    }
  }

  FitResult result;
  result.model = coding.decode(best_u);
  result.lambda_used = lambda;
  result.residuals.resize(n);
  residuals(best_u, result.residuals);
  result.n_evaluations = evaluations;

  double mean = 0.0;
  for (double h : heights) mean += h;
  mean /= static_cast<double>(n);
  double ss_tot = 0.0;
  for (double h : heights) ss_tot += (h - mean) * (h - mean);
  const double ss_res = sum_of_squares(result.residuals);
  result.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  result.integral_I_tilde = integrate_I_tilde(result.model, lambda);

  const auto p = to_params(result.model);
  const std::size_t m_index = coding.has_beta0() ? 1 : 0;
  if (p[m_index] <= 0.0) result.warnings.push_back("m is pinned at its lower bound 0");
  if (coding.free_mu() && p[3] < 1e-10) result.warnings.push_back("mu is pinned at its lower bound 0");

  if (!any_converged || !std::isfinite(best_value)) {
    std::ostringstream msg;
    msg << "fit did not converge after " << starts << " starts x " << opts.max_iter << " iterations";
    throw FitError(msg.str(), std::move(result));
  }
  return result;
}

MassCheck mass_check(const FitResult& result, double tolerance) {
  const double deviation = std::abs(result.integral_I_tilde - 1.0);
  return {deviation <= tolerance, deviation};
}

} // namespace mitoclock
