#include "mitoclock/growth_fit.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "mitoclock/csv.hpp"
#include "mitoclock/error.hpp"

namespace mitoclock {

void validate(const GrowthSeries& s) {
  if (s.times.size() != s.counts.size()) throw ValidationError("times and counts differ in length");
  if (s.times.size() < 3) throw ValidationError("growth fit needs at least 3 points");
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    if (!std::isfinite(s.times[k]) || !std::isfinite(s.counts[k]))
      throw ValidationError("non-finite sample at row " + std::to_string(k + 1));
    if (!(s.counts[k] > 0.0)) throw ValidationError("count at row " + std::to_string(k + 1) + " is not positive");
    if (k > 0 && !(s.times[k] > s.times[k - 1])) throw ValidationError("times must be strictly increasing");
  }
}

GrowthFit fit_growth(const GrowthSeries& s) {
  validate(s);
  const std::size_t n = s.times.size();
  const double log_n0 = std::log(s.counts.front());

  double t_mean = 0.0, y_mean = 0.0;
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = std::log(s.counts[k]) - log_n0;
    t_mean += s.times[k];
    y_mean += y[k];
  }
  t_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);

  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dt = s.times[k] - t_mean;
    const double dy = y[k] - y_mean;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }

  GrowthFit fit;
  fit.lambda = sty / stt;
  fit.intercept = y_mean - fit.lambda * t_mean;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = y[k] - (fit.intercept + fit.lambda * s.times[k]);
    ss_res += r * r;
  }
  // A flat series is fitted exactly by a zero slope.
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  if (fit.lambda > 0.0) fit.doubling_time = std::numbers::ln2 / fit.lambda;
  return fit;
}

GrowthSeries restrict_window(const GrowthSeries& s, double t_lo, double t_hi) {
  GrowthSeries out;
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    if (s.times[k] >= t_lo && s.times[k] <= t_hi) {
      out.times.push_back(s.times[k]);
      out.counts.push_back(s.counts[k]);
    }
  }
  return out;
}

GrowthSeries parse_growth_series(std::istream& in) {
  GrowthSeries s;
  for (const auto& row : read_numeric_csv(in, 2)) {
    s.times.push_back(row[0]);
    s.counts.push_back(row[1]);
  }
  return s;
}

GrowthSeries load_growth_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return parse_growth_series(in);
}

} // namespace mitoclock
