#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace mitoclock {

// Shortest round-trippable decimal for a double.
std::string format_number(double x);

// Rows of numbers from comma-separated text. A first non-numeric line is taken
// as a header; blank lines and '#' comments are skipped. Every data row must
// have exactly `columns` fields. Throws ParseError with the line number.
std::vector<std::vector<double>> read_numeric_csv(std::istream& in, std::size_t columns);

} // namespace mitoclock
