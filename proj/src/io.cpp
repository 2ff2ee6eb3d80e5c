#include "mitoclock/io.hpp"

#include <fstream>
#include <sstream>

#include "mitoclock/error.hpp"

namespace mitoclock {

namespace {

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) throw ValidationError(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

} // namespace

json model_to_json(const ModelFamily& model) {
  const auto p = to_params(model);
  const auto family = family_of(model);
  json j;
  j["family"] = std::string(family_name(family));
  std::size_t k = 0;
  if (family != Family::gamma1 && family != Family::gamma2) j["beta0"] = p[k++];
  j["m"] = p[k++];
  j["sigma"] = p[k++];
  j["mu"] = family == Family::erfc_mu ? p[k] : 0.0;
  return j;
}

ModelFamily model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
    throw ValidationError("model JSON needs a string 'family'");
  const auto family = parse_family(j.at("family").get<std::string>());
  std::vector<double> p;
  if (family != Family::gamma1 && family != Family::gamma2) p.push_back(number(j, "beta0"));
  p.push_back(number(j, "m"));
  p.push_back(number(j, "sigma"));
  if (family == Family::erfc_mu) p.push_back(number(j, "mu"));
  auto model = from_params(family, p);
  validate(model);
  return model;
}

json fit_result_to_json(const FitResult& r, double mass_tolerance) {
  const auto check = mass_check(r, mass_tolerance);
  return json{
      {"model", model_to_json(r.model)},
      {"r_squared", r.r_squared},
      {"integral_I_tilde", r.integral_I_tilde},
      {"lambda_used", r.lambda_used},
      {"residuals", r.residuals},
      {"n_evaluations", r.n_evaluations},
      {"warnings", r.warnings},
      {"mass_check", {{"tolerance", mass_tolerance}, {"pass", check.pass}, {"deviation", check.deviation}}},
  };
}

FitResult fit_result_from_json(const json& j) {
  try {
    FitResult r;
    r.model = model_from_json(j.at("model"));
    r.r_squared = j.at("r_squared").get<double>();
    r.integral_I_tilde = j.at("integral_I_tilde").get<double>();
    r.lambda_used = j.at("lambda_used").get<double>();
    r.residuals = j.at("residuals").get<std::vector<double>>();
    r.n_evaluations = j.at("n_evaluations").get<std::size_t>();
    r.warnings = j.value("warnings", std::vector<std::string>{});
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed fit result JSON: ") + e.what());
  }
}

json growth_fit_to_json(const GrowthFit& g) {
  json j{{"lambda", g.lambda}, {"intercept", g.intercept}, {"r_squared", g.r_squared}};
  j["doubling_time"] = g.doubling_time ? json(*g.doubling_time) : json(nullptr);
  return j;
}

GrowthFit growth_fit_from_json(const json& j) {
  GrowthFit g;
  g.lambda = number(j, "lambda");
  g.intercept = number(j, "intercept");
  g.r_squared = number(j, "r_squared");
  if (j.contains("doubling_time") && j.at("doubling_time").is_number()) g.doubling_time = j.at("doubling_time").get<double>();
  return g;
}

void write_rate_csv(std::ostream& out, const InvertedRate& rate) {
  out << "age,beta\n";
  for (std::size_t i = 0; i < rate.ages.size(); ++i) out << format_number(rate.ages[i]) << ',' << format_number(rate.beta[i]) << '\n';
}

InvertedRate read_rate_csv(std::istream& in) {
  InvertedRate r;
  for (const auto& row : read_numeric_csv(in, 2)) {
    r.ages.push_back(row[0]);
    r.beta.push_back(row[1]);
  }
  if (r.ages.empty()) throw ValidationError("rate table is empty");
  r.last_reliable_age = r.ages.back();
  return r;
}

void write_eigen_csv(std::ostream& out, const EigenPair& pair) {
  out << "age,p_hat,phi\n";
  for (std::size_t j = 0; j < pair.p_hat.size(); ++j)
    out << format_number(pair.p_hat.age(j)) << ',' << format_number(pair.p_hat.values[j]) << ','
        << format_number(pair.phi.values[j]) << '\n';
}

void write_sim_csv(std::ostream& out, const SimOutput& sim) {
  out << "t,P,Q,N,births\n";
  for (std::size_t n = 0; n < sim.times.size(); ++n)
    out << format_number(sim.times[n]) << ',' << format_number(sim.P[n]) << ',' << format_number(sim.Q[n]) << ','
        << format_number(sim.N[n]) << ',' << format_number(sim.births[n]) << '\n';
}

void write_profile_csv(std::ostream& out, const AgeProfile& profile) {
  out << "age,p\n";
  for (std::size_t j = 0; j < profile.size(); ++j)
    out << format_number(profile.age(j)) << ',' << format_number(profile.values[j]) << '\n';
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

} // namespace mitoclock
