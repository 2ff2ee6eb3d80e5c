#pragma once

#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace mitoclock {

// Shifted gamma IMT density (a-m)/sigma^2 exp(-(a-m)/sigma); rate (a-m)/(sigma(sigma+a-m)).
struct Gamma1 {
  double m = 0.0;
  double sigma = 1.0;
};

// Second shifted gamma (a-m)^2/(2 sigma^3) exp(-(a-m)/sigma).
struct Gamma2 {
  double m = 0.0;
  double sigma = 1.0;
};

// Exponentially modified Gaussian written with three parameters:
//   beta0 erfc((m-a)/sigma) exp(-2 beta0 (beta0 sigma^2/2 - m + a)).
// Its division rate has no closed form; use invert_imt.
struct Emg {
  double beta0 = 0.1;
  double m = 0.0;
  double sigma = 1.0;
};

// Division rate beta0 erfc((m-a)/sigma), no death.
struct ErfcRate {
  double beta0 = 0.1;
  double m = 0.0;
  double sigma = 1.0;
};

// Same rate with a constant death rate mu.
struct ErfcRateDeath {
  double beta0 = 0.1;
  double m = 0.0;
  double sigma = 1.0;
  double mu = 0.0;
};

using ModelFamily = std::variant<Gamma1, Gamma2, Emg, ErfcRate, ErfcRateDeath>;

enum class Family { gamma1, gamma2, emg, erfc, erfc_mu };

Family family_of(const ModelFamily& model);
std::string_view family_name(Family f);
Family parse_family(std::string_view name); // throws ValidationError
std::size_t parameter_count(Family f);

// Parameter vectors follow the struct field order.
std::vector<double> to_params(const ModelFamily& model);
ModelFamily from_params(Family f, std::span<const double> params);

// sigma > 0, beta0 > 0, m >= 0, mu >= 0 where present.
void validate(const ModelFamily& model);

// mu for ErfcRateDeath, 0 otherwise.
double death_rate(const ModelFamily& model);

// Division rate at age a. Throws UnsupportedVariantError for Emg.
double eval_beta(const ModelFamily& model, double a);

// int_0^a beta. Throws UnsupportedVariantError for Emg.
double cumulative_beta(const ModelFamily& model, double a);

// C_inf = int_0^inf beta exp(-int(beta + mu)); 1 for every family without death.
double normalizing_constant(const ModelFamily& model);

// IMT density I_inf(a).
double eval_I_infinity(const ModelFamily& model, double a);

// Reweighted density 2 I_inf(a) exp(-lambda a). For ErfcRateDeath this is
// 2 beta(a) exp(-int_0^a (beta + mu + lambda)), which does not involve C_inf.
double eval_I_tilde(const ModelFamily& model, double lambda, double a);

// Age beyond which the IMT density of the model is negligible (< ~1e-16 mass).
double tail_horizon(const ModelFamily& model);

// Quadrature of eval_I_tilde over [0, tail_horizon].
double integrate_I_tilde(const ModelFamily& model, double lambda);

// Kinks of the model functions in age (the shift m for gamma families).
std::vector<double> breakpoints(const ModelFamily& model);

// Age-dependent division rate: either a closed form from a fitted model, or a
// table (linear interpolation; constant extrapolation past the last age).
class DivisionRate {
public:
  struct Table {
    std::vector<double> ages;
    std::vector<double> values;
    std::vector<double> cumulative; // trapezoid prefix sums of values
  };

  // Emg is rejected (no closed-form rate). Death rate of ErfcRateDeath is ignored here.
  static DivisionRate closed_form(const ModelFamily& model);
  static DivisionRate tabulated(std::vector<double> ages, std::vector<double> values);
  static DivisionRate constant(double rate);

  double operator()(double a) const;
  // int_0^a beta
  double cumulative(double a) const;
  std::vector<double> breakpoints() const;
  // Smallest age where exp(-cumulative) < survival. Throws NumericalError when
  // the rate does not make the survival vanish (non-divergent cumulative rate).
  double horizon(double survival = 1e-12) const;

  bool is_tabulated() const { return std::holds_alternative<Table>(form_); }
  const std::variant<ModelFamily, Table>& form() const { return form_; }

private:
  explicit DivisionRate(std::variant<ModelFamily, Table> form) : form_(std::move(form)) {}
  std::variant<ModelFamily, Table> form_;
};

// I_inf(a) = C_inf^-1 beta(a) exp(-int_0^a (beta + mu)) for an arbitrary rate,
// with C_inf computed once by quadrature.
class ImtDensity {
public:
  ImtDensity(DivisionRate beta, double mu);
  double operator()(double a) const;
  double normalizing_constant() const { return c_inf_; }

private:
  DivisionRate beta_;
  double mu_;
  double c_inf_;
};

} // namespace mitoclock
