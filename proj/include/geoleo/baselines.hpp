#pragma once

// The proposed design and the comparison schemes, all on top of the same
// optimizer. TTM schemes are chained SDMA -> RSMA -> SPC-RSMA, each stage
// warm-starting the next.

#include "geoleo/geometry.hpp"
#include "geoleo/optimizer.hpp"
#include "geoleo/scenario.hpp"
#include "geoleo/signal.hpp"

#include <map>
#include <vector>

namespace geoleo {

struct SchemeOutcome {
  SchemeId scheme = SchemeId::SpcRsmaTtm;
  PrecoderSolution p;  // portions recovered
  RateBreakdown rates;  // reported rates; band split scales them by ρ
  SolveTrace trace;
  std::vector<int> inactive_feeds;
  double il_estimated = 0.0;  // max over GUs
  double il_true = 0.0;
  double wall_time_s = 0.0;  // this stage only; chained predecessors excluded
};

/// Optimizer settings a scheme runs with.
DesignSpec scheme_spec(const ScenarioConfig& config, SchemeId scheme);

/// Everything a scheme needs about one snapshot.
struct Snapshot {
  ScenarioConfig config;
  ScenarioGeometry geometry;
  ChannelSet channels;
  std::vector<Eigen::VectorXcd> w;
};

/// Geometry, channels drawn with channel_seed, and GEO precoders.
Snapshot make_snapshot(const ScenarioConfig& config, std::uint64_t channel_seed);

SchemeOutcome solve_spc_rsma_ttm(const Snapshot& s, const std::vector<PrecoderSolution>& warm = {});
SchemeOutcome solve_rsma_ttm(const Snapshot& s, const std::vector<PrecoderSolution>& warm = {});
SchemeOutcome solve_sdma_ttm(const Snapshot& s);
SchemeOutcome solve_spc_stm(const Snapshot& s, const std::vector<PrecoderSolution>& warm = {});
SchemeOutcome solve_spc_mmf(const Snapshot& s, const std::vector<PrecoderSolution>& warm = {});
SchemeOutcome solve_progressive_pitch(const Snapshot& s);
/// rho in (0, 1].
SchemeOutcome solve_band_split(const Snapshot& s, double rho);

/// LEO feeds switched off by progressive pitch: those within guard_deg of a
/// GU direction plus the one nearest to the GUs. guard_deg == 0 keeps all.
std::vector<int> progressive_pitch_feeds(const ScenarioGeometry& g, double guard_deg);

/// Solves the requested schemes, sharing the SDMA/RSMA chain between them.
/// Results come back in the order requested.
std::vector<SchemeOutcome> solve_schemes(const Snapshot& s, const std::vector<SchemeId>& schemes);

struct FeasibilityReport {
  bool ok = true;
  double power = 0.0;
  double il = 0.0;  // design-channel IL, max over GUs
  std::string message;
};

/// ‖p‖² ≤ P_L and design-channel IL ≤ I_th, both to rel_tol relative.
/// Band split is exempt from the IL check.
FeasibilityReport check_feasibility(const SchemeOutcome& o, const ChannelSet& ch, const ScenarioConfig& config,
                                    double rel_tol = 1e-9);

}  // namespace geoleo
