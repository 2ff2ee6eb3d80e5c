#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "mitoclock/csv.hpp"
#include "mitoclock/fitter.hpp"
#include "mitoclock/growth_fit.hpp"
#include "mitoclock/imt_models.hpp"
#include "mitoclock/inversion.hpp"
#include "mitoclock/simulator.hpp"
#include "mitoclock/spectral.hpp"

namespace mitoclock {

using json = nlohmann::json;

json model_to_json(const ModelFamily& model);
ModelFamily model_from_json(const json& j);

json fit_result_to_json(const FitResult& r, double mass_tolerance = 0.12);
FitResult fit_result_from_json(const json& j);

json growth_fit_to_json(const GrowthFit& g);
GrowthFit growth_fit_from_json(const json& j);

void write_rate_csv(std::ostream& out, const InvertedRate& rate);         // age,beta
void write_eigen_csv(std::ostream& out, const EigenPair& pair);           // age,p_hat,phi
void write_sim_csv(std::ostream& out, const SimOutput& sim);              // t,P,Q,N,births
void write_profile_csv(std::ostream& out, const AgeProfile& profile);     // age,p
InvertedRate read_rate_csv(std::istream& in);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace mitoclock
