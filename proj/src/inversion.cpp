#include "mitoclock/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mitoclock/error.hpp"
#include "mitoclock/optimize.hpp"
#include "mitoclock/special.hpp"

namespace mitoclock {

InvertedRate invert_imt(std::span<const double> ages, std::span<const double> density, const InversionOptions& opts) {
  const std::size_t n = ages.size();
  if (n < 2 || density.size() != n) throw ValidationError("IMT table needs at least two (age, density) rows");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(ages[i]) || !std::isfinite(density[i])) throw ValidationError("IMT table has non-finite entries");
    if (density[i] < 0.0) throw ValidationError("IMT density is negative at age " + std::to_string(ages[i]));
    if (i > 0 && !(ages[i] > ages[i - 1])) throw ValidationError("IMT ages must be strictly increasing");
  }

  InvertedRate out;
  const double peak = *std::max_element(density.begin(), density.end());
  if (!(peak > 0.0)) throw DegenerateInputError("IMT density is identically zero");

  // Mass beyond the table. With phi = -log I, integration by parts gives
  //   int_A^inf e^{-phi} ~ I(A)/phi'(A) * (1 - phi''(A)/phi'(A)^2),
  // derivatives taken from the quadratic through the last three log samples.
  double tail = 0.0;
  const double last = density[n - 1], prev = density[n - 2];
  if (last > 0.0) {
    if (prev > last) {
      tail = last * (ages[n - 1] - ages[n - 2]) / std::log(prev / last);
      if (n >= 3 && density[n - 3] > 0.0) {
        const double x0 = ages[n - 3], x1 = ages[n - 2], x2 = ages[n - 1];
        const double y0 = -std::log(density[n - 3]), y1 = -std::log(prev), y2 = -std::log(last);
        const double d01 = x0 - x1, d02 = x0 - x2, d12 = x1 - x2;
        const double slope = y0 * (-d12) / (d01 * d02) + y1 * (-d02) / (-d01 * d12) + y2 * (-d02 - d12) / (d02 * d12);
        const double curvature = 2.0 * (y0 / (d01 * d02) - y1 / (d01 * d12) + y2 / (d02 * d12));
        const double correction = curvature / (slope * slope);
        if (slope > 0.0 && std::abs(correction) < 0.5) tail = last / slope * (1.0 - correction);
      }
    } else {
      out.warnings.push_back("density is not decaying at the end of the table; no tail mass assumed");
    }
    if (last > 1e-6 * peak) {
      std::ostringstream msg;
      msg << "density at the last age is " << last / peak << " of its peak; the table may be too short";
      out.warnings.push_back(msg.str());
    }
  }

  // survival[i] = int_{a_i}^inf I
  std::vector<double> survival(n);
  survival[n - 1] = tail;
  for (std::size_t i = n - 1; i-- > 0;)
    survival[i] = survival[i + 1] + 0.5 * (density[i] + density[i + 1]) * (ages[i + 1] - ages[i]);
  const double floor = opts.floor_fraction * survival[0];

  out.ages.reserve(n);
  out.beta.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (survival[i] < floor || tail > opts.tail_share * survival[i]) {
      out.truncated = true;
      break;
    }
    out.ages.push_back(ages[i]);
    out.beta.push_back(density[i] / survival[i]);
  }
  if (out.ages.empty()) throw NumericalError("no age has a reliable survival integral");
  out.last_reliable_age = out.ages.back();
  if (out.truncated) {
    std::ostringstream msg;
    msg << "division rate truncated after age " << out.last_reliable_age
        << ": survival integral too small to resolve beyond it";
    out.warnings.push_back(msg.str());
  }
  return out;
}

ErfcDistance erfc_distance(const InvertedRate& rate, const ErfcRate& candidate) {
  if (!(candidate.sigma > 0.0)) throw ValidationError("candidate sigma must be > 0");
  if (rate.ages.empty()) throw ValidationError("recovered rate has an empty reliable range");
  double mean = 0.0;
  for (double b : rate.beta) mean += b;
  mean /= static_cast<double>(rate.beta.size());
  double ss_res = 0.0, ss_tot = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < rate.ages.size(); ++i) {
    const double model = candidate.beta0 * erfc((candidate.m - rate.ages[i]) / candidate.sigma);
    const double r = rate.beta[i] - model;
    ss_res += r * r;
    ss_tot += (rate.beta[i] - mean) * (rate.beta[i] - mean);
    worst = std::max(worst, std::abs(r));
  }
  return {ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0), worst};
}

ErfcRate best_erfc(const InvertedRate& rate) {
  if (rate.ages.size() < 4) throw ValidationError("need at least four rate samples to fit an erfc");
  const double plateau = *std::max_element(rate.beta.begin(), rate.beta.end());
  if (!(plateau > 0.0)) throw DegenerateInputError("recovered rate is identically zero");
  auto first_age_above = [&](double level) {
    for (std::size_t i = 0; i < rate.ages.size(); ++i)
      if (rate.beta[i] >= level) return rate.ages[i];
    return rate.ages.back();
  };
  // beta0 erfc(0) is half the plateau; erfc(1) ~ 0.157 fixes sigma.
  const double m0 = first_age_above(0.5 * plateau);
  const double sigma0 = std::max(m0 - first_age_above(0.0786 * plateau), 0.1);

  const auto& ages = rate.ages;
  const auto& beta = rate.beta;
  auto residuals = [&](std::span<const double> u, std::span<double> r) {
    const double b0 = std::exp(u[0]), s = std::exp(u[2]);
    for (std::size_t i = 0; i < ages.size(); ++i) r[i] = b0 * erfc((u[1] - ages[i]) / s) - beta[i];
  };
  auto objective = [&](std::span<const double> u) {
    std::vector<double> r(ages.size());
    residuals(u, r);
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
  };
  const std::vector<double> step{0.2, 0.5 * sigma0, 0.2};
  auto nm = opt::nelder_mead(objective, {std::log(0.5 * plateau), m0, std::log(sigma0)}, step);
  auto lm = opt::levenberg_marquardt(residuals, ages.size(), nm.x);
  const auto& u = lm.value <= nm.value ? lm.x : nm.x;
  return ErfcRate{std::exp(u[0]), u[1], std::exp(u[2])};
}

} // namespace mitoclock
