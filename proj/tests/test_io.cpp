#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "mitoclock/error.hpp"
#include "mitoclock/io.hpp"
#include "mitoclock/svg.hpp"

using namespace mitoclock;

TEST_CASE("model JSON round trip for every family") {
  const std::vector<ModelFamily> models{Gamma1{17.0, 2.0}, Gamma2{15.0, 3.0}, Emg{0.2, 22.0, 3.0},
                                        ErfcRate{0.17879, 25.007, 3.6141},
                                        ErfcRateDeath{0.17879, 25.007, 3.6141, 0.00333}};
  for (const auto& m : models) {
    const auto j = model_to_json(m);
    const auto back = model_from_json(json::parse(j.dump()));
    CHECK(family_of(back) == family_of(m));
    CHECK(to_params(back) == to_params(m));
  }
}

TEST_CASE("malformed model JSON is a validation error") {
  CHECK_THROWS_AS(model_from_json(json::parse(R"({"family":"weibull","m":1,"sigma":1})")), ValidationError);
  CHECK_THROWS_AS(model_from_json(json::parse(R"({"family":"erfc","beta0":"x","m":1,"sigma":1})")),
                  ValidationError);
  CHECK_THROWS_AS(model_from_json(json::parse(R"({"family":"erfc","beta0":0.1,"m":1,"sigma":-1})")),
                  ValidationError);
  CHECK_THROWS_AS(model_from_json(json::parse(R"({"family":"gamma1","sigma":1})")), ValidationError);
}

TEST_CASE("fit result JSON round trip") {
  FitResult r;
  r.model = ErfcRateDeath{0.178, 25.0, 3.6, 0.0038};
  r.r_squared = 0.987;
  r.integral_I_tilde = 1.0002;
  r.lambda_used = 0.022;
  r.residuals = {0.01, -0.02};
  r.warnings = {"something"};
  const auto j = fit_result_to_json(r);
  CHECK(j["mass_check"]["pass"].get<bool>());
  const auto back = fit_result_from_json(json::parse(j.dump()));
  CHECK(to_params(back.model) == to_params(r.model));
  CHECK(back.r_squared == r.r_squared);
  CHECK(back.integral_I_tilde == r.integral_I_tilde);
  CHECK(back.lambda_used == r.lambda_used);
  CHECK(back.residuals == r.residuals);
  CHECK(back.warnings == r.warnings);
  r.integral_I_tilde = 1.3;
  CHECK_FALSE(fit_result_to_json(r)["mass_check"]["pass"].get<bool>());
  CHECK_THROWS_AS(fit_result_from_json(json::parse(R"({"model":3})")), ValidationError);
}

TEST_CASE("growth fit JSON round trip") {
  GrowthFit g{0.022, -0.01, 0.999, std::log(2.0) / 0.022};
  auto back = growth_fit_from_json(json::parse(growth_fit_to_json(g).dump()));
  CHECK(back.lambda == g.lambda);
  CHECK(back.intercept == g.intercept);
  CHECK(back.r_squared == g.r_squared);
  REQUIRE(back.doubling_time);
  CHECK(*back.doubling_time == *g.doubling_time);
  GrowthFit shrinking{-0.01, 0.0, 0.9, std::nullopt};
  const auto j = growth_fit_to_json(shrinking);
  CHECK(j["doubling_time"].is_null());
  CHECK_FALSE(growth_fit_from_json(j).doubling_time);
}

TEST_CASE("rate CSV round trip") {
  InvertedRate r;
  r.ages = {0.0, 1.0, 2.0, 3.0};
  r.beta = {0.0, 0.01, 0.05, 0.125};
  std::stringstream s;
  write_rate_csv(s, r);
  const auto back = read_rate_csv(s);
  CHECK(back.ages == r.ages);
  CHECK(back.beta == r.beta);
  std::istringstream bad("age,beta\n0,1\nx,2\n");
  CHECK_THROWS(read_rate_csv(bad));
}

TEST_CASE("simulation and profile CSV layout") {
  SimOutput sim;
  sim.times = {0.0, 0.5};
  sim.P = {1.0, 1.1};
  sim.Q = {0.0, 0.2};
  sim.N = {1.0, 1.3};
  sim.births = {0.0, 0.4};
  std::ostringstream out;
  write_sim_csv(out, sim);
  std::istringstream lines(out.str());
  std::string header, row;
  std::getline(lines, header);
  CHECK(header == "t,P,Q,N,births");
  int rows = 0;
  while (std::getline(lines, row))
    if (!row.empty()) ++rows;
  CHECK(rows == 2);

  std::ostringstream prof;
  write_profile_csv(prof, AgeProfile{0.5, {1.0, 2.0}});
  CHECK(prof.str().rfind("age,p\n", 0) == 0);
  CHECK(prof.str().find("0.25,") != std::string::npos);
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "mitoclock_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  write_text_file(dir / "m.json", model_to_json(ErfcRate{0.2, 21.0, 2.0}).dump());
  const auto j = read_json_file(dir / "m.json");
  CHECK(j["family"] == "erfc");
  write_text_file(dir / "broken.json", "{not json");
  CHECK_THROWS_AS(read_json_file(dir / "broken.json"), ValidationError);
  CHECK_THROWS(read_json_file(dir / "missing.json"));
  std::filesystem::remove_all(dir.parent_path());
}

TEST_CASE("svg line plot") {
  svg::Series a{"f = 0 & <1>", {0.0, 1.0, 2.0}, {0.0, 0.5, 1.5}};
  svg::Series b{"f = 0.84", {0.0, 1.0, 2.0}, {0.0, 0.3, 0.4}};
  const auto doc = svg::line_plot({a, b}, {"growth", "t (h)", "ln N", 640, 400});
  CHECK(doc.rfind("<svg", 0) == 0);
  CHECK(doc.find("</svg>") != std::string::npos);
  std::size_t lines = 0;
  for (std::size_t pos = doc.find("<polyline"); pos != std::string::npos; pos = doc.find("<polyline", pos + 1))
    ++lines;
  CHECK(lines == 2);
  CHECK(doc.find("&amp;") != std::string::npos);
  CHECK(doc.find("&lt;1&gt;") != std::string::npos);
}
