#pragma once

#include <span>
#include <string>
#include <vector>

#include "mitoclock/imt_models.hpp"

namespace mitoclock {

struct InversionOptions {
  // Rate is reported only where the survival integral exceeds this fraction of the total mass.
  double floor_fraction = 1e-10;
  // ... and where the extrapolated tail beyond the table is at most this share of it.
  double tail_share = 1e-4;
};

// Division rate recovered from a tabulated IMT density on the reliable range.
struct InvertedRate {
  std::vector<double> ages;
  std::vector<double> beta;
  double last_reliable_age = 0.0;
  bool truncated = false; // reliable range ends before the table does
  std::vector<std::string> warnings;

  DivisionRate as_rate() const { return DivisionRate::tabulated(ages, beta); }
};

// beta(a_i) = I(a_i) / int_{a_i}^inf I, assuming no death. The survival
// integral is a trapezoid over the table plus an exponential tail estimate
// from the last two positive samples.
InvertedRate invert_imt(std::span<const double> ages, std::span<const double> density,
                        const InversionOptions& opts = {});

struct ErfcDistance {
  double r_squared = 0.0;
  double max_abs_err = 0.0;
};

// Compare a recovered rate to beta0 erfc((m - a)/sigma) on its grid.
ErfcDistance erfc_distance(const InvertedRate& rate, const ErfcRate& candidate);

// Least-squares erfc rate closest to the recovered one.
ErfcRate best_erfc(const InvertedRate& rate);

} // namespace mitoclock
