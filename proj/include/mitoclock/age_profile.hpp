#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

namespace mitoclock {

// Density over uniform age cells [j w, (j+1) w), represented at midpoints.
struct AgeProfile {
  double width = 0.05;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double age(std::size_t j) const { return (static_cast<double>(j) + 0.5) * width; }
  double integral() const { return width * std::accumulate(values.begin(), values.end(), 0.0); }
};

} // namespace mitoclock
