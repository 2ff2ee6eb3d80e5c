#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace mitoclock {

struct GrowthSeries {
  std::vector<double> times;  // hours, strictly increasing
  std::vector<double> counts; // cells, > 0
};

struct GrowthFit {
  double lambda = 0.0;    // 1/h
  double intercept = 0.0; // of ln(N/N0)
  double r_squared = 0.0;
  std::optional<double> doubling_time; // ln2/lambda, only when lambda > 0
};

void validate(const GrowthSeries& s);

// Least squares line through (t, ln(N(t)/N(t_0))).
GrowthFit fit_growth(const GrowthSeries& s);

// Keep the samples with t_lo <= t <= t_hi.
GrowthSeries restrict_window(const GrowthSeries& s, double t_lo, double t_hi);

// Two columns "t,N"; an optional non-numeric header line; '#' comments.
GrowthSeries parse_growth_series(std::istream& in);
GrowthSeries load_growth_series(const std::filesystem::path& path);

} // namespace mitoclock
