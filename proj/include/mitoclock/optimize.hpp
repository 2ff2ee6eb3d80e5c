#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mitoclock::opt {

using Objective = std::function<double(std::span<const double>)>;
// Writes residuals into the output span (size fixed by the caller).
using Residuals = std::function<void(std::span<const double>, std::span<double>)>;

struct Minimum {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  std::size_t max_iter = 4000;
  double f_tol = 1e-15; // relative spread of simplex values
  double x_tol = 1e-10; // simplex diameter
};

// Adaptive Nelder-Mead (dimension-dependent coefficients). `step` holds the
// initial simplex edge per coordinate.
Minimum nelder_mead(const Objective& f, std::vector<double> x0, std::span<const double> step,
                    const NelderMeadOptions& opts = {});

struct LevenbergMarquardtOptions {
  std::size_t max_iter = 200;
  double rel_tol = 1e-15;
  double fd_step = 1e-7;
};

// Sum-of-squares refinement with a central-difference Jacobian.
Minimum levenberg_marquardt(const Residuals& r, std::size_t n_residuals, std::vector<double> x0,
                            const LevenbergMarquardtOptions& opts = {});

} // namespace mitoclock::opt
