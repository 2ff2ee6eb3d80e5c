#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mitoclock/error.hpp"
#include "mitoclock/histogram.hpp"
#include "mitoclock/imt_models.hpp"

namespace mitoclock {

struct FitOptions {
  std::size_t starts = 8;
  std::uint64_t seed = 20131104;
  std::size_t max_iter = 4000;
  // Pin the death rate of erfc-mu fits (e.g. a measured value, or 0).
  std::optional<double> fixed_mu;
};

struct FitResult {
  ModelFamily model;
  double r_squared = 0.0;
  double integral_I_tilde = 0.0;
  double lambda_used = 0.0;
  std::vector<double> residuals; // model - data, per bin
  std::size_t n_evaluations = 0;
  std::vector<std::string> warnings;
};

// Thrown when no start converged; carries the best point found.
class FitError : public NumericalError {
public:
  FitError(const std::string& what, FitResult best) : NumericalError(what), best_(std::move(best)) {}
  const FitResult& best() const { return best_; }

private:
  FitResult best_;
};

// Least squares of the reweighted model against a reweighted histogram.
FitResult fit_imt(const Histogram& reweighted, Family family,
                  const std::optional<ModelFamily>& init = std::nullopt, const FitOptions& opts = {});

// Same objective on explicit (age, height) samples.
FitResult fit_imt(std::span<const double> ages, std::span<const double> heights, double lambda,
                  Family family, const std::optional<ModelFamily>& init = std::nullopt,
                  const FitOptions& opts = {});

// Starting point used when no init is given.
ModelFamily initial_guess(std::span<const double> ages, std::span<const double> heights,
                          double lambda, Family family);

struct MassCheck {
  bool pass = false;
  double deviation = 0.0; // |int I_tilde - 1|
};

MassCheck mass_check(const FitResult& result, double tolerance = 0.12);

} // namespace mitoclock
