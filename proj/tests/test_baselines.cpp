#include "doctest.h"

#include "geoleo/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

using namespace geoleo;

namespace {

ScenarioConfig quick() {
  ScenarioConfig cfg;
  cfg.m2 = 100;
  return cfg;
}

double sum_total(const RateBreakdown& r) {
  double s = 0.0;
  for (double x : r.r_total) s += x;
  return s;
}

double min_total(const RateBreakdown& r) { return *std::min_element(r.r_total.begin(), r.r_total.end()); }

const std::vector<SchemeId> kAll(std::begin(kAllSchemes), std::end(kAllSchemes));

}  // namespace

TEST_CASE("scheme names round-trip") {
  for (SchemeId id : kAll) CHECK(scheme_from_string(to_string(id)) == id);
  CHECK_FALSE(scheme_from_string("NOMA_TTM").has_value());
}

TEST_CASE("structural zeros and feasibility") {
  const Snapshot s = make_snapshot(quick(), 21);
  const auto out = solve_schemes(s, kAll);
  REQUIRE(out.size() == kAll.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const SchemeOutcome& o = out[i];
    CHECK(o.scheme == kAll[i]);
    const FeasibilityReport f = check_feasibility(o, s.channels, s.config);
    CHECK_MESSAGE(f.ok, to_string(o.scheme), ": ", f.message);
    CHECK(o.rates.objective <= 6.5 + 1e-12);
  }
  const auto& rsma = out[1];
  CHECK(rsma.p.p_spc.norm() == 0.0);
  for (double c : rsma.p.c_spc) CHECK(c == 0.0);
  for (const SchemeOutcome* o : {&out[2], &out[3]}) {
    CHECK(o->p.p_spc.norm() == 0.0);
    CHECK(o->p.p_c.norm() == 0.0);
    for (double c : o->p.c) CHECK(c == 0.0);
    for (double c : o->p.c_spc) CHECK(c == 0.0);
  }
  // Nested warm start: each superset scheme scores at least its subset.
  CHECK(out[1].rates.objective >= out[2].rates.objective - 1e-9);
  CHECK(out[0].rates.objective >= out[1].rates.objective - 1e-9);
  CHECK(out[4].il_estimated == 0.0);
  CHECK(out[4].il_true == 0.0);
}

TEST_CASE("progressive pitch") {
  ScenarioConfig cfg = quick();
  const Snapshot s = make_snapshot(cfg, 5);
  CHECK(progressive_pitch_feeds(s.geometry, 2.0) == std::vector<int>{0});
  CHECK(progressive_pitch_feeds(s.geometry, 0.0).empty());
  CHECK(progressive_pitch_feeds(s.geometry, 10.0) == std::vector<int>{0, 1});

  const SchemeOutcome pp = solve_progressive_pitch(s);
  CHECK(pp.inactive_feeds == std::vector<int>{0});
  for (int i = 0; i < pp.p.k_lu() + 2; ++i) CHECK(pp.p.stream(i)[0] == 0.0);
  CHECK(check_feasibility(pp, s.channels, cfg).ok);
  // The surviving beam covers LU 3 and LU 4.
  CHECK(pp.rates.served[2] + pp.rates.served[3] > pp.rates.served[0] + pp.rates.served[1]);

  ScenarioConfig no_guard = cfg;
  no_guard.pp_guard_deg = 0.0;
  const Snapshot s0 = make_snapshot(no_guard, 5);
  const SchemeOutcome pp0 = solve_progressive_pitch(s0);
  CHECK(pp0.inactive_feeds.empty());
  CHECK(pp0.rates.objective == solve_sdma_ttm(s0).rates.objective);
}

TEST_CASE("band split at the full band matches RSMA without leakage limit") {
  ScenarioConfig cfg = quick();
  cfg.i_th = std::numeric_limits<double>::infinity();
  cfg.p_geo_w = 0.0;
  const Snapshot s = make_snapshot(cfg, 8);
  const SchemeOutcome band = solve_band_split(s, 1.0);
  const SchemeOutcome sdma = solve_sdma_ttm(s);
  const SchemeOutcome rsma = solve_rsma_ttm(s, {sdma.p});
  CHECK(band.rates.objective == doctest::Approx(rsma.rates.objective).epsilon(1e-12));
  CHECK_THROWS_AS(solve_band_split(s, 0.0), std::invalid_argument);
}

TEST_CASE("band split objective grows with the band share") {
  const Snapshot s = make_snapshot(quick(), 12);
  double prev = 0.0;
  for (double rho : {0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0}) {
    const SchemeOutcome o = solve_band_split(s, rho);
    CHECK(o.rates.objective >= prev - 1e-6);
    prev = o.rates.objective;
    for (double x : o.rates.il_at_gu) CHECK(x == 0.0);
  }
}

TEST_CASE("leakage limit only removes options") {
  ScenarioConfig cfg = quick();
  const Snapshot s = make_snapshot(cfg, 3);
  const SchemeOutcome sdma = solve_sdma_ttm(s);
  const SchemeOutcome tight = solve_rsma_ttm(s, {sdma.p});
  ScenarioConfig open = cfg;
  open.i_th = std::numeric_limits<double>::infinity();
  const Snapshot so = make_snapshot(open, 3);
  const SchemeOutcome loose = solve_rsma_ttm(so, {tight.p});
  CHECK(loose.rates.objective >= tight.rates.objective - 1e-9);
}

TEST_CASE("objective classes") {
  for (std::uint64_t seed : {31u, 32u, 33u}) {
    const Snapshot s = make_snapshot(quick(), seed);
    const auto out = solve_schemes(s, kAll);
    const RateBreakdown& ttm = out[0].rates;
    const RateBreakdown& stm = out[5].rates;
    const RateBreakdown& mmf = out[6].rates;
    CHECK(sum_total(stm) >= sum_total(ttm) - 1e-9);
    const double spread_stm = *std::max_element(stm.r_total.begin(), stm.r_total.end()) - min_total(stm);
    const double spread_mmf = *std::max_element(mmf.r_total.begin(), mmf.r_total.end()) - min_total(mmf);
    CHECK(spread_stm >= spread_mmf);
    for (const auto& o : out) CHECK(min_total(mmf) >= 0.95 * min_total(o.rates));
  }
}

TEST_CASE("equal binding demands: max-min and TTM agree") {
  ScenarioConfig cfg = quick();
  cfg.k_lu = 2;
  cfg.demands = {0.5, 0.5};
  const Snapshot s = make_snapshot(cfg, 4);
  const SchemeOutcome ttm = solve_spc_rsma_ttm(s);
  const SchemeOutcome mmf = solve_spc_mmf(s);
  CHECK(ttm.rates.objective == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::min(0.5, min_total(mmf.rates)) * 2.0 == doctest::Approx(ttm.rates.objective).epsilon(1e-9));
}
