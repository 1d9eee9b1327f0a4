#include "doctest.h"

#include "geoleo/experiment.hpp"

#include <algorithm>
#include <sstream>
#include <string>

using namespace geoleo;

namespace {

ScenarioConfig quick() {
  ScenarioConfig cfg;
  cfg.m2 = 100;
  return cfg;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

bool has_error(const ConfigError& e, const std::string& field) {
  return std::any_of(e.fields().begin(), e.fields().end(),
                     [&](const std::string& f) { return f.rfind(field + ":", 0) == 0; });
}

}  // namespace

TEST_CASE("default run is feasible") {
  const ExperimentRecord r = run(quick());
  CHECK(r.feasible);
  CHECK(r.objective > 0.0);
  CHECK(r.power <= 20.0 * (1.0 + 1e-9));
  CHECK(r.il_estimated <= 1.0 * (1.0 + 1e-9));
  CHECK(r.served.size() == 4);
}

TEST_CASE("zero demand gives zero objective and zero power") {
  ScenarioConfig cfg = quick();
  cfg.demands = {0.0, 0.0, 0.0, 0.0};
  const ExperimentRecord r = run(cfg);
  CHECK(r.objective == 0.0);
  CHECK(r.power == 0.0);
}

TEST_CASE("same seed, same CSV") {
  ScenarioConfig cfg = quick();
  cfg.seed = 11;
  const std::vector<SchemeId> schemes = {SchemeId::SpcRsmaTtm, SchemeId::SdmaTtm};
  std::string out[2];
  for (auto& o : out) {
    std::ostringstream s;
    write_csv(s, sweep_offboresight(cfg, {0.0, 2.0}, schemes, 2));
    o = s.str();
  }
  CHECK(out[0] == out[1]);

  const auto rows = lines(out[0]);
  REQUIRE(rows.size() == 1 + 2 * 2 * 2);
  CHECK(rows[0] ==
        "scheme,sweep_value,draw,r_total_1,r_total_2,r_total_3,r_total_4,served_1,served_2,served_3,served_4,"
        "objective,r_spc,r_c,il_est,il_true,power,iterations");
  CHECK(rows[1].rfind("SPC_RSMA_TTM,0,0,", 0) == 0);
  CHECK(rows[2].rfind("SPC_RSMA_TTM,0,1,", 0) == 0);
  CHECK(rows[3].rfind("SPC_RSMA_TTM,2,0,", 0) == 0);
  CHECK(rows[5].rfind("SDMA_TTM,0,0,", 0) == 0);
}

TEST_CASE("csv formatting") {
  ExperimentRecord r;
  r.scheme = SchemeId::RsmaTtm;
  r.sweep_value = -0.0;
  r.r_total = {1.0 / 3.0};
  r.served = {0.25};
  r.objective = 0.25;
  r.wall_time_s = 1.5;
  std::ostringstream s;
  write_csv(s, {r}, true);
  const auto rows = lines(s.str());
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].substr(rows[0].size() - 12) == ",wall_time_s");
  CHECK(rows[1] == "RSMA_TTM,0,0,0.333333333333,0.25,0.25,0,0,0,0,0,0,1.5");
}

TEST_CASE("config round trip") {
  ScenarioConfig cfg;
  cfg.gu_off_boresight_deg = -1.25;
  cfg.demands = {1.0, 2.0, 0.5, 3.0};
  cfg.scheme = SchemeId::BandSplitTtm;
  cfg.sweep.variable = "leo_separation_deg";
  cfg.sweep.draws = 7;
  std::ostringstream out;
  write_config(out, cfg);
  std::istringstream in(out.str());
  const ScenarioConfig back = load_config(in);
  std::ostringstream again;
  write_config(again, back);
  CHECK(again.str() == out.str());
  CHECK(back.demands == cfg.demands);
  CHECK(back.scheme == SchemeId::BandSplitTtm);
  CHECK(back.sweep.draws == 7);
}

TEST_CASE("empty config gives the defaults") {
  std::istringstream in("");
  const ScenarioConfig c = load_config(in);
  CHECK(c.carrier_frequency_hz == 20e9);
  CHECK(c.bandwidth_hz == 500e6);
  CHECK(c.leo_altitude_m == 600e3);
  CHECK(c.leo_tx_gain_dbi == 30.5);
  CHECK(c.geo_tx_gain_dbi == 50.5);
  CHECK(c.rx_gain_dbi == 39.7);
  CHECK(c.n_leo == 2);
  CHECK(c.k_lu == 4);
  CHECK(c.k_gu == 2);
  CHECK(c.demands == std::vector<double>{1.5, 1.0, 2.5, 1.5});
  CHECK(c.i_th == 1.0);
  CHECK(c.sigma_e2 == 0.05);
  CHECK(c.epsilon == 1e-6);
  CHECK(c.m1 == 20);
  CHECK(c.m2 == 5000);
}

TEST_CASE("config errors name every bad field") {
  std::istringstream in("p_leo_w = -3.0\nk_lu = 2\nbogus = 1\n");
  try {
    load_config(in);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(has_error(e, "p_leo_w"));
    CHECK(has_error(e, "demands"));
    CHECK(e.fields().size() >= 3);
  }
  ScenarioConfig bad;
  bad.sigma_e2 = -1.0;
  CHECK_THROWS_AS(run(bad), ConfigError);
}

TEST_CASE("invariant checks pass on a small case") {
  std::ostringstream out;
  CHECK(validate(quick(), out));
  CHECK(out.str().find("FAIL") == std::string::npos);
}

TEST_CASE("sweep points") {
  CHECK(sweep_points(-5.0, 5.0, 21).size() == 21);
  CHECK(sweep_points(-5.0, 5.0, 21)[10] == 0.0);
  CHECK(sweep_points(0.0, 20.0, 11)[3] == doctest::Approx(6.0));
  CHECK(sweep_points(2.0, 2.0, 1) == std::vector<double>{2.0});
}
