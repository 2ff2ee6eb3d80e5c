#include "mitoclock/histogram.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "mitoclock/error.hpp"

namespace mitoclock {

namespace {

void check_bin_width(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("bin width must be positive and finite");
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace

Histogram::Histogram(double bin_width, std::vector<double> heights)
    : bin_width_(bin_width), heights_(std::move(heights)) {
  check_bin_width(bin_width_);
  if (heights_.empty()) throw ValidationError("histogram has no bins");
  for (std::size_t k = 0; k < heights_.size(); ++k) {
    if (!std::isfinite(heights_[k])) throw ValidationError("bin " + std::to_string(k + 1) + " is not finite");
    if (heights_[k] < 0.0) throw ValidationError("bin " + std::to_string(k + 1) + " is negative");
  }
}

std::vector<double> Histogram::midpoints() const {
  std::vector<double> a(size());
  for (std::size_t k = 0; k < size(); ++k) a[k] = midpoint(k);
  return a;
}

double Histogram::mass() const {
  return bin_width_ * std::accumulate(heights_.begin(), heights_.end(), 0.0);
}

Histogram parse_histogram(std::istream& in, double bin_width) {
  check_bin_width(bin_width);
  std::vector<double> heights;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ParseError(lineno, "expected a single number, got '" + std::string(s) + "'");
    if (!std::isfinite(v)) throw ParseError(lineno, "value is not finite");
    if (v < 0.0) throw ValidationError("line " + std::to_string(lineno) + ": negative bin height");
    heights.push_back(v);
  }
  if (heights.empty()) throw ValidationError("histogram file has no data rows");
  return Histogram(bin_width, std::move(heights));
}

Histogram load_histogram(const std::filesystem::path& path, double bin_width) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return parse_histogram(in, bin_width);
}

Histogram normalize(const Histogram& h) {
  if (h.kind() != HistogramKind::raw_counts) throw StateError("normalize expects raw counts");
  const double total = std::accumulate(h.heights_.begin(), h.heights_.end(), 0.0);
  if (!(total > 0.0)) throw DegenerateInputError("histogram is identically zero");
  Histogram out = h;
  const double scale = 1.0 / (h.bin_width() * total);
  for (double& v : out.heights_) v *= scale;
  out.kind_ = HistogramKind::density;
  return out;
}

Histogram reweight(const Histogram& h, double lambda) {
  if (h.kind() != HistogramKind::density) throw StateError("reweight expects a density histogram");
  if (!std::isfinite(lambda)) throw ValidationError("lambda must be finite");
  Histogram out = h;
  // Factor exp(-lambda a_0) out of every weight so large lambda does not underflow.
  const double a0 = h.midpoint(0);
  double total = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    out.heights_[k] = 2.0 * h.heights_[k] * std::exp(-lambda * (h.midpoint(k) - a0));
    total += out.heights_[k];
  }
  if (!(total > 0.0) || !std::isfinite(total)) throw DegenerateInputError("reweighted histogram has no mass");
  const double scale = 1.0 / (h.bin_width() * total);
  for (double& v : out.heights_) v *= scale;
  out.kind_ = HistogramKind::reweighted;
  out.lambda_ = lambda;
  return out;
}

} // namespace mitoclock
