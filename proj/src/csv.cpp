#include "mitoclock/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <string_view>

#include "mitoclock/error.hpp"

namespace mitoclock {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& v) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(v);
}

} // namespace

std::string format_number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::vector<std::vector<double>> read_numeric_csv(std::istream& in, std::size_t columns) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    std::vector<double> row;
    bool numeric = true;
    std::size_t start = 0;
    while (true) {
      const auto comma = s.find(',', start);
      const auto field = s.substr(start, comma == std::string_view::npos ? s.npos : comma - start);
      double v = 0.0;
      if (!parse_double(field, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!numeric) {
      if (!seen_content) {
        seen_content = true; // header
        continue;
      }
      throw ParseError(lineno, "non-numeric field in '" + std::string(s) + "'");
    }
    seen_content = true;
    if (row.size() != columns)
      throw ParseError(lineno, "expected " + std::to_string(columns) + " columns, got " +
                                   std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace mitoclock
