#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace mitoclock {

enum class HistogramKind { raw_counts, density, reweighted };

// Uniform-bin intermitotic-time histogram.
//
// Storage index k = 0..N-1 is bin i = k + 1, covering ages
// [i*da, (i+1)*da] with midpoint (i + 1/2)*da. Ages [0, da) are not covered.
class Histogram {
public:
  // Raw counts (or un-normalised densities). Heights must be finite and >= 0.
  Histogram(double bin_width, std::vector<double> heights);

  double bin_width() const { return bin_width_; }
  std::size_t size() const { return heights_.size(); }
  std::span<const double> heights() const { return heights_; }
  HistogramKind kind() const { return kind_; }
  std::optional<double> lambda_used() const { return lambda_; }

  double midpoint(std::size_t k) const { return (static_cast<double>(k) + 1.5) * bin_width_; }
  std::vector<double> midpoints() const;

  // da * sum(heights)
  double mass() const;

private:
  friend Histogram normalize(const Histogram&);
  friend Histogram reweight(const Histogram&, double);

  double bin_width_;
  std::vector<double> heights_;
  HistogramKind kind_ = HistogramKind::raw_counts;
  std::optional<double> lambda_;
};

// One height per line; blank lines and '#' comments are skipped.
Histogram parse_histogram(std::istream& in, double bin_width);
Histogram load_histogram(const std::filesystem::path& path, double bin_width);

// Raw counts -> density with da * sum(H) = 1.
Histogram normalize(const Histogram& h);

// Density -> lambda-reweighted histogram
//   Ht_i = 2 H_i exp(-lambda a_i) / (da * sum_j 2 H_j exp(-lambda a_j)).
Histogram reweight(const Histogram& h, double lambda);

} // namespace mitoclock
