#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "mitoclock/age_profile.hpp"
#include "mitoclock/imt_models.hpp"

namespace mitoclock {

namespace initial {
struct Equilibrium {};
// Equilibrium profile cut at age t0 and rescaled to unit mass.
struct TruncatedEquilibrium {
  double t0 = 0.0;
};
// User profile; resampled onto the simulation cells by linear interpolation.
struct Custom {
  std::vector<double> ages;
  std::vector<double> values;
};
} // namespace initial

using InitialCondition = std::variant<initial::Equilibrium, initial::TruncatedEquilibrium, initial::Custom>;

struct SimConfig {
  DivisionRate beta = DivisionRate::constant(0.0);
  double mu = 0.0;   // death of proliferating cells
  double mu_q = 0.0; // death of quiescent cells
  double f = 0.0;    // fraction of daughters entering quiescence
  double dt = 0.05;  // also the age cell width
  double a_max = 0.0; // 0: take the survival horizon of beta
  double t_end = 100.0;
  double q0 = 0.0;
  InitialCondition initial = initial::Equilibrium{};
  // Profiles are recorded at the steps nearest to these times.
  std::vector<double> snapshot_times;
};

struct Snapshot {
  double t = 0.0;
  AgeProfile profile;
};

struct SimOutput {
  std::vector<double> times;
  std::vector<double> P;
  std::vector<double> Q;
  std::vector<double> N;
  std::vector<double> divisions;         // B^n: division flux
  std::vector<double> births;            // 2(1-f) B^n
  std::vector<double> quiescence_influx; // 2f B^n
  AgeProfile final_profile;
  std::vector<Snapshot> snapshots;
};

void validate(const SimConfig& config);

// Method of characteristics on a lockstep grid (age cell width = dt).
SimOutput simulate(const SimConfig& config);

// F = Q(t0) / (Q(t0) + int_0^t0 p(t,0) dt) from a run stopped at t0.
double quiescent_fraction(SimConfig config, double t0);

// Largest age a with int_0^a beta <= tol: how long a newborn is practically
// unable to divide. 0 when the rate is positive from birth.
double silent_age(const DivisionRate& beta, double tol = 1e-6);

struct ImtExperiment {
  std::vector<double> ages;    // division ages (nodes j*dt)
  std::vector<double> density; // I_T, unit mass on the grid
  double c_T = 0.0;            // divisions per unit initial mass
  double l1_gap = 0.0;         // int |I_T - I_inf|
};

// Label the truncated equilibrium cohort at age <= t0, follow it (daughters
// untracked) for a time T and histogram the ages at division.
ImtExperiment imt_experiment(const DivisionRate& beta, double mu, double t0, double T,
                             double dt = 0.05);

} // namespace mitoclock
