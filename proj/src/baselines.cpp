#include "geoleo/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace geoleo {

namespace {

double max_il(const PrecoderSolution& p, const ChannelSet& ch, bool use_true) {
  double worst = 0.0;
  for (int g = 0; g < ch.k_gu(); ++g) worst = std::max(worst, interference_leakage(g, p, ch, use_true));
  return worst;
}

SchemeOutcome run_design(SchemeId id, const ChannelSet& ch, const std::vector<Eigen::VectorXcd>& w,
                         const DesignSpec& spec, const std::vector<PrecoderSolution>& warm) {
  SchemeOutcome o;
  o.scheme = id;
  o.p = design_precoders(ch, w, spec, o.trace, warm);
  o.rates = evaluate_design(o.p, ch, spec);
  o.il_estimated = max_il(o.p, ch, false);
  o.il_true = max_il(o.p, ch, true);
  return o;
}

Eigen::VectorXcd keep(const Eigen::VectorXcd& v, const std::vector<int>& feeds) {
  Eigen::VectorXcd out(feeds.size());
  for (std::size_t i = 0; i < feeds.size(); ++i) out[i] = v[feeds[i]];
  return out;
}

Eigen::VectorXcd embed(const Eigen::VectorXcd& v, const std::vector<int>& feeds, int n) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (std::size_t i = 0; i < feeds.size(); ++i) out[feeds[i]] = v[i];
  return out;
}

ChannelSet restrict_feeds(const ChannelSet& ch, const std::vector<int>& feeds) {
  ChannelSet r = ch;
  for (auto* family : {&r.h_hat, &r.z_hat, &r.true_h, &r.true_z, &r.h_second, &r.z_second})
    for (auto& v : *family) v = keep(v, feeds);
  return r;
}

ChannelSet band_channels(const ChannelSet& ch, double rho) {
  ChannelSet r = ch;
  const double s = 1.0 / std::sqrt(rho);
  for (auto* family : {&r.h_hat, &r.z_hat, &r.true_h, &r.true_z, &r.h_second, &r.z_second})
    for (auto& v : *family) v *= s;
  for (auto& v : r.g) v.setZero();
  return r;
}

DesignSpec band_spec(const ScenarioConfig& cfg, double rho) {
  DesignSpec spec = scheme_spec(cfg, SchemeId::BandSplitTtm);
  for (double& t : spec.demands) t /= rho;
  return spec;
}

void scale_rates(RateBreakdown& r, double rho, const std::vector<double>& demands) {
  for (auto* v : {&r.r_spc_at_lu, &r.r_spc_at_gu, &r.r_c_at_lu, &r.r_p, &r.r_total})
    for (double& x : *v) x *= rho;
  r.r_spc *= rho;
  r.r_c *= rho;
  r.objective = 0.0;
  for (std::size_t k = 0; k < r.r_total.size(); ++k) {
    r.served[k] = std::min(demands[k], r.r_total[k]);
    r.objective += r.served[k];
  }
  std::fill(r.il_at_gu.begin(), r.il_at_gu.end(), 0.0);
  std::fill(r.il_true_at_gu.begin(), r.il_true_at_gu.end(), 0.0);
}

/// SDMA -> RSMA chain on band-limited channels, reported on the full band.
SchemeOutcome band_split_from(const Snapshot& s, double rho) {
  const ChannelSet ch = band_channels(s.channels, rho);
  const DesignSpec spec = band_spec(s.config, rho);
  DesignSpec first = spec;
  first.common = false;
  SolveTrace scratch;
  const PrecoderSolution sdma = design_precoders(ch, s.w, first, scratch);
  SchemeOutcome o = run_design(SchemeId::BandSplitTtm, ch, s.w, spec, {sdma});
  scale_rates(o.rates, rho, s.config.demands);
  for (double& c : o.p.c_spc) c *= rho;
  for (double& c : o.p.c) c *= rho;
  o.il_estimated = 0.0;
  o.il_true = 0.0;
  return o;
}

}  // namespace

DesignSpec scheme_spec(const ScenarioConfig& cfg, SchemeId scheme) {
  DesignSpec spec;
  spec.demands = cfg.demands;
  spec.i_th = cfg.i_th;
  spec.p_leo = cfg.p_leo_w;
  spec.epsilon = cfg.epsilon;
  spec.m1 = cfg.m1;
  spec.m2 = cfg.m2;
  spec.il_rescale = cfg.il_rescale;
  spec.seed = cfg.seed;
  switch (scheme) {
    case SchemeId::SpcRsmaTtm: break;
    case SchemeId::RsmaTtm: spec.super_common = false; break;
    case SchemeId::SdmaTtm:
    case SchemeId::ProgressivePitchTtm:
      spec.super_common = false;
      spec.common = false;
      break;
    case SchemeId::BandSplitTtm:
      spec.super_common = false;
      spec.common = cfg.band_split_common;
      spec.enforce_il = false;
      break;
    case SchemeId::SpcRsmaStm: spec.objective = DesignObjective::Stm; break;
    case SchemeId::SpcRsmaMmf: spec.objective = DesignObjective::Mmf; break;
  }
  return spec;
}

Snapshot make_snapshot(const ScenarioConfig& config, std::uint64_t channel_seed) {
  Snapshot s;
  s.config = config;
  s.geometry = build_geometry(config);
  s.channels = build_channel_set(config, channel_seed);
  s.w = geo_precoders(config);
  return s;
}

SchemeOutcome solve_sdma_ttm(const Snapshot& s) {
  return run_design(SchemeId::SdmaTtm, s.channels, s.w, scheme_spec(s.config, SchemeId::SdmaTtm), {});
}

SchemeOutcome solve_rsma_ttm(const Snapshot& s, const std::vector<PrecoderSolution>& warm) {
  return run_design(SchemeId::RsmaTtm, s.channels, s.w, scheme_spec(s.config, SchemeId::RsmaTtm), warm);
}

SchemeOutcome solve_spc_rsma_ttm(const Snapshot& s, const std::vector<PrecoderSolution>& warm) {
  return run_design(SchemeId::SpcRsmaTtm, s.channels, s.w, scheme_spec(s.config, SchemeId::SpcRsmaTtm), warm);
}

SchemeOutcome solve_spc_stm(const Snapshot& s, const std::vector<PrecoderSolution>& warm) {
  return run_design(SchemeId::SpcRsmaStm, s.channels, s.w, scheme_spec(s.config, SchemeId::SpcRsmaStm), warm);
}

SchemeOutcome solve_spc_mmf(const Snapshot& s, const std::vector<PrecoderSolution>& warm) {
  return run_design(SchemeId::SpcRsmaMmf, s.channels, s.w, scheme_spec(s.config, SchemeId::SpcRsmaMmf), warm);
}

std::vector<int> progressive_pitch_feeds(const ScenarioGeometry& g, double guard_deg) {
  std::vector<int> off;
  if (!(guard_deg > 0.0) || g.gu_positions.empty()) return off;
  const double guard = deg_to_rad(guard_deg);
  const int n = static_cast<int>(g.leo_beam_centers.size());
  int nearest = -1;
  double nearest_angle = std::numeric_limits<double>::infinity();
  for (int b = 0; b < n; ++b) {
    double closest = std::numeric_limits<double>::infinity();
    for (const auto& gu : g.gu_positions)
      closest = std::min(closest, angle_between(g.leo_beam_centers[b] - g.leo, gu - g.leo));
    if (closest <= guard) off.push_back(b);
    if (closest < nearest_angle - 1e-12) {
      nearest_angle = closest;
      nearest = b;
    }
  }
  if (std::find(off.begin(), off.end(), nearest) == off.end()) off.push_back(nearest);
  std::sort(off.begin(), off.end());
  return off;
}

SchemeOutcome solve_progressive_pitch(const Snapshot& s) {
  const int n = s.channels.n_leo();
  const std::vector<int> off = progressive_pitch_feeds(s.geometry, s.config.pp_guard_deg);
  std::vector<int> on;
  for (int b = 0; b < n; ++b)
    if (std::find(off.begin(), off.end(), b) == off.end()) on.push_back(b);

  const DesignSpec spec = scheme_spec(s.config, SchemeId::ProgressivePitchTtm);
  SchemeOutcome o;
  o.scheme = SchemeId::ProgressivePitchTtm;
  o.inactive_feeds = off;
  if (on.empty()) {
    o.p = PrecoderSolution::zeros(n, s.channels.k_lu(), s.w);
    o.trace.convergence = "degenerate";
    o.trace.objectives = {0.0};
  } else if (off.empty()) {
    o = run_design(SchemeId::ProgressivePitchTtm, s.channels, s.w, spec, {});
  } else {
    const ChannelSet reduced = restrict_feeds(s.channels, on);
    const PrecoderSolution small = design_precoders(reduced, s.w, spec, o.trace);
    o.p = PrecoderSolution::zeros(n, s.channels.k_lu(), s.w);
    for (int i = 0; i < small.k_lu() + 2; ++i) o.p.stream(i) = embed(small.stream(i), on, n);
  }
  o.inactive_feeds = off;
  o.rates = evaluate_design(o.p, s.channels, spec);
  o.il_estimated = max_il(o.p, s.channels, false);
  o.il_true = max_il(o.p, s.channels, true);
  return o;
}

SchemeOutcome solve_band_split(const Snapshot& s, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("solve_band_split: fraction must lie in (0, 1]");
  return band_split_from(s, rho);
}

std::vector<SchemeOutcome> solve_schemes(const Snapshot& s, const std::vector<SchemeId>& schemes) {
  std::map<SchemeId, SchemeOutcome> done;
  auto timed = [](auto&& solve) {
    const auto t0 = std::chrono::steady_clock::now();
    SchemeOutcome o = solve();
    o.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return o;
  };
  auto need = [&](SchemeId id) { return std::find(schemes.begin(), schemes.end(), id) != schemes.end(); };
  const bool chain = need(SchemeId::SdmaTtm) || need(SchemeId::RsmaTtm) || need(SchemeId::SpcRsmaTtm) ||
                     need(SchemeId::SpcRsmaStm) || need(SchemeId::SpcRsmaMmf);
  if (chain) {
    done[SchemeId::SdmaTtm] = timed([&] { return solve_sdma_ttm(s); });
    const PrecoderSolution sdma = done[SchemeId::SdmaTtm].p;
    done[SchemeId::RsmaTtm] = timed([&] { return solve_rsma_ttm(s, {sdma}); });
    const PrecoderSolution rsma = done[SchemeId::RsmaTtm].p;
    const bool spc = need(SchemeId::SpcRsmaTtm) || need(SchemeId::SpcRsmaStm) || need(SchemeId::SpcRsmaMmf);
    if (spc) {
      done[SchemeId::SpcRsmaTtm] = timed([&] { return solve_spc_rsma_ttm(s, {rsma}); });
      const PrecoderSolution ttm = done[SchemeId::SpcRsmaTtm].p;
      if (need(SchemeId::SpcRsmaStm)) done[SchemeId::SpcRsmaStm] = timed([&] { return solve_spc_stm(s, {rsma, ttm}); });
      if (need(SchemeId::SpcRsmaMmf)) done[SchemeId::SpcRsmaMmf] = timed([&] { return solve_spc_mmf(s, {rsma, ttm}); });
    }
  }
  if (need(SchemeId::ProgressivePitchTtm))
    done[SchemeId::ProgressivePitchTtm] = timed([&] { return solve_progressive_pitch(s); });
  if (need(SchemeId::BandSplitTtm))
    done[SchemeId::BandSplitTtm] = timed([&] { return solve_band_split(s, s.config.band_split_fraction); });
  std::vector<SchemeOutcome> out;
  for (SchemeId id : schemes) out.push_back(done.at(id));
  return out;
}

FeasibilityReport check_feasibility(const SchemeOutcome& o, const ChannelSet& ch, const ScenarioConfig& cfg,
                                    double rel_tol) {
  FeasibilityReport r;
  const PrecoderSolution& p = o.p;
  std::vector<const Eigen::VectorXcd*> streams = {&p.p_spc, &p.p_c};
  for (const auto& v : p.p_priv) streams.push_back(&v);
  for (const auto* v : streams) {
    for (Eigen::Index i = 0; i < v->size(); ++i) r.power += std::norm((*v)[i]);
  }
  std::ostringstream msg;
  if (r.power > cfg.p_leo_w * (1.0 + rel_tol)) {
    r.ok = false;
    msg << "power " << r.power << " > " << cfg.p_leo_w << "; ";
  }
  if (o.scheme != SchemeId::BandSplitTtm) {
    for (int g = 0; g < ch.k_gu(); ++g) {
      double il = 0.0;
      for (const auto* v : streams) {
        if (v == &p.p_spc) continue;
        il += std::norm(ch.z_hat[g].dot(*v));
      }
      if (ch.has_second_leo())
        for (const auto* v : streams) il += std::norm(ch.z_second[g].dot(*v));
      r.il = std::max(r.il, il);
    }
    if (std::isfinite(cfg.i_th) && r.il > cfg.i_th * (1.0 + rel_tol)) {
      r.ok = false;
      msg << "leakage " << r.il << " > " << cfg.i_th << "; ";
    }
  }
  for (int i = 0; i < p.k_lu() + 2; ++i)
    for (int f : o.inactive_feeds)
      if (p.stream(i)[f] != 0.0) {
        r.ok = false;
        msg << "inactive feed " << f << " carries power; ";
      }
  r.message = msg.str();
  return r;
}

}  // namespace geoleo
