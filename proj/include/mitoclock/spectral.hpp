#pragma once

#include <cstddef>

#include "mitoclock/age_profile.hpp"
#include "mitoclock/imt_models.hpp"

namespace mitoclock {

// g(lambda) = 2 int_0^inf beta(a) exp(-int_0^a (beta + mu + lambda)) da - 1.
double characteristic(const DivisionRate& beta, double mu, double lambda);

// Malthus parameter: the unique root of characteristic(). Throws NumericalError
// if no bracket exists (rate not divergent).
double solve_lambda(const DivisionRate& beta, double mu);

// Principal eigenfunction p_hat (cell averages) and adjoint phi (cell midpoints).
struct EigenPair {
  double lambda = 0.0;
  double mu = 0.0;
  double p_hat0 = 0.0; // p_hat(0) = (int exp(-int(beta+mu+lambda)))^-1
  double phi0 = 0.0;   // phi(0) after normalisation int p_hat phi = 1
  AgeProfile p_hat;
  AgeProfile phi;
  DivisionRate beta = DivisionRate::constant(0.0);

  // Exact p_hat(a) from the closed form.
  double p_hat_at(double a) const;
};

// Uniform cells of width `width`; the grid is extended to at least
// `min_cells` and to the age where p_hat < 1e-12 p_hat(0).
EigenPair equilibrium(const DivisionRate& beta, double mu, double width = 0.05,
                      std::size_t min_cells = 0);

// exp(-lambda t) int p phi. p and phi must share cell width and count.
double gre_functional(const AgeProfile& p, const AgeProfile& phi, double lambda, double t);

} // namespace mitoclock
