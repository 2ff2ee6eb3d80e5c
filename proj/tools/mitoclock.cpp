// mitoclock: command-line front end.
//
//   fit-growth   counts CSV (t,N)          -> growth rate JSON + fit-line CSV
//   fit-imt      histogram (one per line)  -> model JSON + fitted-curve CSV
//   invert       IMT table (age,density)   -> rate CSV + best erfc summary
//   simulate     model JSON or rate CSV    -> per-dose CSVs + SVG
//   verify       model JSON or rate CSV    -> pass/fail report
//   synth-histogram / synth-growth         -> seeded example data

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "mitoclock/csv.hpp"
#include "mitoclock/error.hpp"
#include "mitoclock/fitter.hpp"
#include "mitoclock/growth_fit.hpp"
#include "mitoclock/histogram.hpp"
#include "mitoclock/inversion.hpp"
#include "mitoclock/io.hpp"
#include "mitoclock/quadrature.hpp"
#include "mitoclock/simulator.hpp"
#include "mitoclock/spectral.hpp"
#include "mitoclock/svg.hpp"

namespace fs = std::filesystem;
using namespace mitoclock;

namespace {

constexpr std::uint64_t kDefaultSeed = 20131104;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MITOCLOCK_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError("MITOCLOCK_SEED must be a nonnegative integer");
    }
  }
  return kDefaultSeed;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

// A loaded model: the division rate used for simulation and its death rate.
struct RateSource {
  DivisionRate beta = DivisionRate::constant(0.0);
  double mu = 0.0;
  std::optional<ModelFamily> model;
};

// EMG has no closed-form rate; tabulate it by inversion on a fine grid.
DivisionRate rate_from_model(const ModelFamily& model) {
  if (family_of(model) != Family::emg) return DivisionRate::closed_form(model);
  const double h = 0.01;
  const double end = tail_horizon(model);
  std::vector<double> ages, dens;
  for (double a = 0.0; a <= end; a += h) {
    ages.push_back(a);
    dens.push_back(eval_I_infinity(model, a));
  }
  return invert_imt(ages, dens).as_rate();
}

// Model JSON (bare or inside a fit result) or a rate CSV `age,beta`.
RateSource load_rate_source(const fs::path& path) {
  RateSource src;
  if (path.extension() == ".csv") {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    src.beta = read_rate_csv(in).as_rate();
    return src;
  }
  const json j = read_json_file(path);
  const auto model = model_from_json(j.contains("model") ? j.at("model") : j);
  src.model = model;
  src.beta = rate_from_model(model);
  src.mu = death_rate(model);
  return src;
}

std::string dose_label(double f) {
  std::ostringstream s;
  s << f;
  return s.str();
}

// ---------------------------------------------------------------------------

int cmd_fit_growth(const fs::path& input, const std::vector<double>& window, const fs::path& out_dir) {
  auto series = load_growth_series(input);
  if (window.size() == 2) series = restrict_window(series, window[0], window[1]);
  const auto fit = fit_growth(series);
  const json j = growth_fit_to_json(fit);
  write_text_file(out_dir / "growth_fit.json", j.dump(2) + "\n");
  auto csv = open_out(out_dir / "growth_fit_line.csv");
  csv << "t,log_ratio,fitted\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    csv << format_number(t) << ',' << format_number(std::log(series.counts[i] / series.counts[0])) << ','
        << format_number(fit.intercept + fit.lambda * t) << '\n';
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_fit_imt(const fs::path& input, double dt, double lambda, const std::string& family_text,
                const FitOptions& opts, double mass_tol, const fs::path& out_dir) {
  const Family family = parse_family(family_text);
  const auto raw = load_histogram(input, dt);
  const auto target = reweight(normalize(raw), lambda);
  auto emit = [&](const FitResult& r) {
    const json j = fit_result_to_json(r, mass_tol);
    write_text_file(out_dir / "fit.json", j.dump(2) + "\n");
    auto csv = open_out(out_dir / "fit_curve.csv");
    csv << "age,observed,fitted\n";
    for (std::size_t k = 0; k < target.size(); ++k)
      csv << format_number(target.midpoint(k)) << ',' << format_number(target.heights()[k]) << ','
          << format_number(target.heights()[k] + r.residuals[k]) << '\n';
    std::cout << j.dump(2) << '\n';
  };
  try {
    const auto result = fit_imt(target, family, std::nullopt, opts);
    emit(result);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  } catch (const FitError& e) {
    emit(e.best());
    throw;
  }
  return 0;
}

int cmd_invert(const fs::path& input, const InversionOptions& opts, const fs::path& out_dir) {
  std::ifstream in(input);
  if (!in) throw ValidationError("cannot open " + input.string());
  const auto rows = read_numeric_csv(in, 2);
  std::vector<double> ages, dens;
  for (const auto& r : rows) {
    ages.push_back(r[0]);
    dens.push_back(r[1]);
  }
  const auto rate = invert_imt(ages, dens, opts);
  auto csv = open_out(out_dir / "rate.csv");
  write_rate_csv(csv, rate);

  json summary{{"points", rate.ages.size()},
               {"last_reliable_age", rate.last_reliable_age},
               {"truncated", rate.truncated},
               {"warnings", rate.warnings}};
  try {
    const auto best = best_erfc(rate);
    const auto d = erfc_distance(rate, best);
    summary["best_erfc"] = model_to_json(best);
    summary["best_erfc"]["r_squared"] = d.r_squared;
    summary["best_erfc"]["max_abs_err"] = d.max_abs_err;
  } catch (const NumericalError& e) {
    summary["best_erfc"] = nullptr;
    summary["warnings"].push_back(std::string("no erfc comparison: ") + e.what());
  }
  write_text_file(out_dir / "invert_summary.json", summary.dump(2) + "\n");
  for (const auto& w : rate.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << summary.dump(2) << '\n';
  return 0;
}

struct SimulateArgs {
  std::vector<double> doses{0.0};
  double t_end = 100.0;
  double dt = 0.05;
  std::optional<double> mu_q;
  std::optional<double> nu;
  std::string nu_role = "mu";
  double q0 = 0.0;
};

int cmd_simulate(const fs::path& input, const SimulateArgs& args, const fs::path& out_dir) {
  auto src = load_rate_source(input);
  double mu = src.mu;
  double mu_q = args.mu_q.value_or(mu);
  if (args.nu) {
    if (args.nu_role == "mu") {
      mu = *args.nu;
      if (!args.mu_q) mu_q = mu;
    } else {
      mu_q = *args.nu;
    }
  }
  const double lambda = solve_lambda(src.beta, mu);

  std::vector<svg::Series> curves;
  json runs = json::array();
  for (double f : args.doses) {
    SimConfig c;
    c.beta = src.beta;
    c.mu = mu;
    c.mu_q = mu_q;
    c.f = f;
    c.dt = args.dt;
    c.t_end = args.t_end;
    c.q0 = args.q0;
    const auto out = simulate(c);
    auto csv = open_out(out_dir / ("sim_f" + dose_label(f) + ".csv"));
    write_sim_csv(csv, out);
    svg::Series s{"f = " + dose_label(f), out.times, {}};
    for (double n : out.N) s.y.push_back(std::log(n));
    // Thin the polyline; one point per hour is plenty for display.
    const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / args.dt)));
    svg::Series thin{s.label, {}, {}};
    for (std::size_t i = 0; i < s.x.size(); i += stride) {
      thin.x.push_back(s.x[i]);
      thin.y.push_back(s.y[i]);
    }
    curves.push_back(std::move(thin));
    runs.push_back({{"f", f}, {"N_end", out.N.back()}, {"P_end", out.P.back()}, {"Q_end", out.Q.back()}});
  }
  svg::PlotSpec spec{"Total population under quiescence doses", "time (h)", "ln N(t)"};
  write_text_file(out_dir / "dose_response.svg", svg::line_plot(curves, spec));
  json summary{{"lambda", lambda}, {"mu", mu}, {"mu_q", mu_q}, {"dt", args.dt}, {"t_end", args.t_end}, {"runs", runs}};
  write_text_file(out_dir / "simulate_summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << '\n';
  return 0;
}

// verify ---------------------------------------------------------------------

struct Report {
  bool ok = true;
  void line(const std::string& name, bool pass, const std::string& detail) {
    ok = ok && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
  }
};

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(3) << v;
  return s.str();
}

void verify_eigen(const RateSource& src, Report& rep) {
  const double lambda = solve_lambda(src.beta, src.mu);
  const double g = characteristic(src.beta, src.mu, lambda);
  rep.line("characteristic residual", std::abs(g) < 1e-10, "lambda = " + sci(lambda) + ", |g| = " + sci(std::abs(g)));
  const double shifted = solve_lambda(src.beta, src.mu + 0.01);
  rep.line("mu shift", std::abs(shifted - (lambda - 0.01)) < 1e-10, "error " + sci(std::abs(shifted - lambda + 0.01)));
  const auto e = equilibrium(src.beta, src.mu, 0.05);
  const double mass = e.p_hat.integral();
  rep.line("p_hat mass", std::abs(mass - 1.0) < 1e-8, "int p_hat - 1 = " + sci(mass - 1.0));
  double pp = 0.0;
  for (std::size_t j = 0; j < e.p_hat.size(); ++j) pp += e.p_hat.values[j] * e.phi.values[j];
  pp *= e.p_hat.width;
  rep.line("p_hat phi normalisation", std::abs(pp - 1.0) < 1e-6, "int p_hat phi - 1 = " + sci(pp - 1.0));
  const double births = 2.0 * quad::integrate([&](double a) { return src.beta(a) * e.p_hat_at(a); }, 0.0,
                                              src.beta.horizon(1e-16), src.beta.breakpoints());
  rep.line("boundary condition", std::abs(e.p_hat0 - births) < 1e-6 * e.p_hat0,
           "|p_hat(0) - 2 int beta p_hat| / p_hat(0) = " + sci(std::abs(e.p_hat0 - births) / e.p_hat0));
}

void verify_gre(const RateSource& src, Report& rep) {
  SimConfig c;
  c.beta = src.beta;
  c.mu = src.mu;
  c.mu_q = src.mu;
  c.dt = 0.05;
  c.t_end = 100.0;
  c.initial = initial::TruncatedEquilibrium{std::max(silent_age(src.beta), 1.0)};
  for (int k = 0; k <= 10; ++k) c.snapshot_times.push_back(10.0 * k);
  const auto out = simulate(c);
  const auto e = equilibrium(src.beta, src.mu, c.dt, out.final_profile.size());
  AgeProfile phi = e.phi;
  phi.values.resize(out.final_profile.size(), phi.values.back());
  const double g0 = gre_functional(out.snapshots.front().profile, phi, e.lambda, 0.0);
  double drift = 0.0;
  for (const auto& s : out.snapshots) {
    const double g = gre_functional(s.profile, phi, e.lambda, s.t);
    drift = std::max(drift, std::abs(g / g0 - 1.0));
    std::cout << "  t = " << s.t << "  functional = " << std::setprecision(10) << g << '\n';
  }
  rep.line("GRE drift over 100 h", drift < 5e-3, "max relative drift " + sci(drift));
}

void verify_imt(const RateSource& src, Report& rep) {
  const double t0 = silent_age(src.beta);
  const double support = src.beta.horizon(1e-12);
  std::vector<double> gaps;
  for (double frac : {0.5, 0.75, 1.0}) {
    const double T = t0 + frac * support;
    const auto ex = imt_experiment(src.beta, src.mu, t0, T);
    gaps.push_back(ex.l1_gap);
    std::cout << "  T = " << T << "  l1 gap = " << sci(ex.l1_gap) << '\n';
  }
  rep.line("l1 gap decreasing", gaps[0] > gaps[1] && gaps[1] > gaps[2], "three windows");
  rep.line("l1 gap at largest T", gaps.back() < 0.02, sci(gaps.back()));
}

void verify_fraction(const RateSource& src, double t0, Report& rep) {
  SimConfig c;
  c.beta = src.beta;
  c.dt = 0.05;
  for (double f : {0.0, 0.3, 0.6, 0.84}) {
    c.f = f;
    c.mu = c.mu_q = 0.0;
    const double F = quiescent_fraction(c, t0);
    rep.line("F = f without death, f = " + dose_label(f), std::abs(F - f) < 1e-4, "|F - f| = " + sci(std::abs(F - f)));
  }
  if (src.mu > 0.0) {
    c.f = 0.84;
    c.mu = c.mu_q = src.mu;
    const double F = quiescent_fraction(c, t0);
    rep.line("F close to f with death", std::abs(F - c.f) < 0.01, "|F - f| = " + sci(std::abs(F - c.f)));
  }
}

int cmd_verify(const fs::path& input, const std::string& suite, double label_time) {
  const auto src = load_rate_source(input);
  Report rep;
  if (suite == "eigen")
    verify_eigen(src, rep);
  else if (suite == "gre")
    verify_gre(src, rep);
  else if (suite == "imt-convergence")
    verify_imt(src, rep);
  else
    verify_fraction(src, label_time, rep);
  return rep.ok ? 0 : 1;
}

// synthetic data ---------------------------------------------------------------

// Expected counts of `total` IMTs per bin with seeded multiplicative noise.
int cmd_synth_histogram(const fs::path& input, double dt, std::size_t bins, double noise, double total,
                        std::uint64_t seed) {
  const json j = read_json_file(input);
  const auto model = model_from_json(j.contains("model") ? j.at("model") : j);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::cout << "# synthetic IMT histogram, bin width " << dt << " h, first bin starts at " << dt << " h\n";
  std::cout << "# model " << model_to_json(model).dump() << ", noise " << noise << ", seed " << seed << '\n';
  for (std::size_t k = 0; k < bins; ++k) {
    const double a = (static_cast<double>(k) + 1.5) * dt;
    const double expected = total * dt * eval_I_infinity(model, a);
    const double value = std::max(0.0, expected * (1.0 + noise * gauss(rng)));
    std::cout << std::fixed << std::setprecision(3) << value << '\n';
  }
  return 0;
}

int cmd_synth_growth(double lambda, double t_end, double step, double n0, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::cout << "t,N\n";
  for (double t = 0.0; t <= t_end + 1e-9; t += step) {
    const double n = n0 * std::exp(lambda * t) * std::exp(noise * gauss(rng));
    std::cout << format_number(t) << ',' << std::llround(n) << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"mitoclock: intermitotic-time analysis of proliferating cell populations"};
  app.require_subcommand(1);
  std::string out_dir = ".";

  auto* growth = app.add_subcommand("fit-growth", "Fit the exponential growth rate of a count series");
  std::string growth_in;
  std::vector<double> window;
  growth->add_option("counts", growth_in, "CSV with columns t,N")->required();
  growth->add_option("--window", window, "Fit window t_lo t_hi")->expected(2);
  growth->add_option("-o,--out-dir", out_dir, "Output directory");

  auto* fit = app.add_subcommand("fit-imt", "Fit an IMT model to a reweighted histogram");
  std::string fit_in, family = "erfc";
  double fit_dt = 0.0, fit_lambda = 0.0, mass_tol = 0.12;
  FitOptions fit_opts;
  std::optional<std::uint64_t> seed;
  std::optional<double> fixed_mu;
  fit->add_option("histogram", fit_in, "One bin height per line")->required();
  fit->add_option("--dt", fit_dt, "Bin width (h)")->required()->check(CLI::PositiveNumber);
  fit->add_option("--lambda", fit_lambda, "Population growth rate (1/h)")->required();
  fit->add_option("--family", family, "gamma1 | gamma2 | emg | erfc | erfc-mu")->capture_default_str();
  fit->add_option("--seed", seed, "Multi-start seed (default: MITOCLOCK_SEED or 20131104)");
  fit->add_option("--starts", fit_opts.starts, "Number of starting points")->capture_default_str();
  fit->add_option("--max-iter", fit_opts.max_iter, "Simplex iterations per start")->capture_default_str();
  fit->add_option("--fixed-mu", fixed_mu, "Hold the death rate of erfc-mu at this value");
  fit->add_option("--mass-tol", mass_tol, "Tolerance of the mass check")->capture_default_str();
  fit->add_option("-o,--out-dir", out_dir, "Output directory");

  auto* inv = app.add_subcommand("invert", "Recover the division rate from an IMT density table");
  std::string inv_in;
  InversionOptions inv_opts;
  inv->add_option("table", inv_in, "CSV with columns age,density")->required();
  inv->add_option("--floor", inv_opts.floor_fraction, "Survival floor (fraction of mass)")->capture_default_str();
  inv->add_option("--tail-share", inv_opts.tail_share, "Largest tolerated tail share")->capture_default_str();
  inv->add_option("-o,--out-dir", out_dir, "Output directory");

  auto* sim = app.add_subcommand("simulate", "Simulate the population for one or more quiescence fractions");
  std::string sim_in;
  SimulateArgs sim_args;
  sim->add_option("model", sim_in, "Model JSON (or fit JSON) or rate CSV age,beta")->required();
  sim->add_option("--f", sim_args.doses, "Quiescence fractions, comma separated")->delimiter(',');
  sim->add_option("--t-end", sim_args.t_end, "Final time (h)")->capture_default_str();
  sim->add_option("--dt", sim_args.dt, "Time step = age cell (h)")->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--mu-q", sim_args.mu_q, "Death rate of quiescent cells (default: mu)");
  sim->add_option("--nu", sim_args.nu, "Alternative death rate");
  sim->add_option("--nu-role", sim_args.nu_role, "Where --nu applies: mu | mu-q")
      ->check(CLI::IsMember({"mu", "mu-q"}))
      ->capture_default_str();
  sim->add_option("--q0", sim_args.q0, "Initial quiescent population")->capture_default_str();
  sim->add_option("-o,--out-dir", out_dir, "Output directory");

  auto* ver = app.add_subcommand("verify", "Run a numerical self-check suite on a model");
  std::string ver_in, suite;
  ver->add_option("model", ver_in, "Model JSON (or fit JSON) or rate CSV age,beta")->required();
  ver->add_option("--suite", suite, "eigen | gre | imt-convergence | fraction")
      ->required()
      ->check(CLI::IsMember({"eigen", "gre", "imt-convergence", "fraction"}));
  double label_time = 24.0;
  ver->add_option("--t0", label_time, "Labelling period of the fraction suite (h)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto* synth_h = app.add_subcommand("synth-histogram", "Seeded noisy histogram from a model");
  std::string synth_in;
  double synth_dt = 1.25, synth_noise = 0.05, synth_total = 1000.0;
  std::size_t synth_bins = 63;
  synth_h->add_option("model", synth_in, "Model JSON")->required();
  synth_h->add_option("--dt", synth_dt, "Bin width (h)")->capture_default_str()->check(CLI::PositiveNumber);
  synth_h->add_option("--bins", synth_bins, "Number of bins")->capture_default_str();
  synth_h->add_option("--noise", synth_noise, "Relative noise level")->capture_default_str();
  synth_h->add_option("--total", synth_total, "Number of recorded cells")->capture_default_str();
  synth_h->add_option("--seed", seed, "Noise seed");

  auto* synth_g = app.add_subcommand("synth-growth", "Seeded noisy exponential count series");
  double g_lambda = 0.022, g_end = 96.0, g_step = 4.0, g_n0 = 1000.0, g_noise = 0.02;
  synth_g->add_option("--lambda", g_lambda, "Growth rate (1/h)")->capture_default_str();
  synth_g->add_option("--t-end", g_end, "Last time (h)")->capture_default_str();
  synth_g->add_option("--step", g_step, "Sampling step (h)")->capture_default_str()->check(CLI::PositiveNumber);
  synth_g->add_option("--n0", g_n0, "Initial count")->capture_default_str();
  synth_g->add_option("--noise", g_noise, "Log-normal noise sd")->capture_default_str();
  synth_g->add_option("--seed", seed, "Noise seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const fs::path out(out_dir);
    if (*growth) return cmd_fit_growth(growth_in, window, out);
    if (*fit) {
      fit_opts.seed = seed ? *seed : default_seed();
      fit_opts.fixed_mu = fixed_mu;
      return cmd_fit_imt(fit_in, fit_dt, fit_lambda, family, fit_opts, mass_tol, out);
    }
    if (*inv) return cmd_invert(inv_in, inv_opts, out);
    if (*sim) return cmd_simulate(sim_in, sim_args, out);
    if (*ver) return cmd_verify(ver_in, suite, label_time);
    if (*synth_h) return cmd_synth_histogram(synth_in, synth_dt, synth_bins, synth_noise, synth_total,
                                             seed ? *seed : default_seed());
    if (*synth_g) return cmd_synth_growth(g_lambda, g_end, g_step, g_n0, g_noise, seed ? *seed : default_seed());
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
