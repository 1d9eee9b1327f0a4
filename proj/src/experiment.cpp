#include "geoleo/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>
#include <tuple>

namespace geoleo {

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

double demand_total(const std::vector<double>& demands) {
  double s = 0.0;
  for (double t : demands) s += t;
  return s;
}

// Exhaustive search over per-stream powers for single-feed instances.
// Portions are pooled: any user may take super-common or common capacity.
double single_feed_grid_optimum(const ScenarioConfig& cfg, const ChannelSet& ch, const std::vector<Eigen::VectorXcd>& w,
                                int steps) {
  const int kl = ch.k_lu();
  const double step = cfg.p_leo_w / steps;
  std::vector<double> hh(kl), geo_lu(kl);
  for (int k = 0; k < kl; ++k) {
    hh[k] = std::norm(ch.h_hat[k][0]);
    geo_lu[k] = std::norm(ch.g[k].dot(w[ch.mu_lu[k]]));
  }
  const double zz = std::norm(ch.z_hat[0][0]);
  const double geo_gu = std::norm(ch.f[0].dot(w[ch.mu_gu[0]]));
  const int ns = kl + 2;  // privates, common, super-common
  std::vector<int> units(ns, 0);
  double best = 0.0;
  auto evaluate = [&] {
    std::vector<double> pw(ns);
    for (int i = 0; i < ns; ++i) pw[i] = units[i] * step;
    double priv = 0.0;
    for (int k = 0; k < kl; ++k) priv += pw[k];
    const double pc = pw[kl];
    const double ps = pw[kl + 1];
    if (zz * (pc + priv) > cfg.i_th) return;
    double r_spc = std::log2(1.0 + zz * ps / (geo_gu + zz * (pc + priv) + 1.0));
    double r_c = 1e300;
    double served = 0.0;
    double residual = 0.0;
    for (int k = 0; k < kl; ++k) {
      const double floor = geo_lu[k] + 1.0;
      r_spc = std::min(r_spc, std::log2(1.0 + hh[k] * ps / (floor + hh[k] * (pc + priv))));
      r_c = std::min(r_c, std::log2(1.0 + hh[k] * pc / (floor + hh[k] * priv)));
      const double rp = std::log2(1.0 + hh[k] * pw[k] / (floor + hh[k] * (priv - pw[k])));
      served += std::min(cfg.demands[k], rp);
      residual += std::max(0.0, cfg.demands[k] - rp);
    }
    best = std::max(best, served + std::min(r_spc + r_c, residual));
  };
  // Enumerate compositions with Σ units ≤ steps.
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == ns) {
      evaluate();
      return;
    }
    for (int u = 0; u <= left; ++u) {
      units[i] = u;
      self(self, i + 1, left - u);
    }
    units[i] = 0;
  };
  rec(rec, 0, steps);
  return best;
}

double log2_ratio(const BlockDiagonal& num_m, const BlockDiagonal& den_m, const PrecoderSolution& p) {
  return std::log2(num_m.form(p) / den_m.form(p));
}

}  // namespace

std::uint64_t draw_seed(std::uint64_t base, int draw) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(draw)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

ExperimentRecord make_record(const SchemeOutcome& o, double sweep_value, int draw) {
  ExperimentRecord r;
  r.scheme = o.scheme;
  r.sweep_value = sweep_value;
  r.draw = draw;
  r.r_total = o.rates.r_total;
  r.served = o.rates.served;
  r.objective = o.rates.objective;
  r.r_spc = o.rates.r_spc;
  r.r_c = o.rates.r_c;
  r.il_estimated = o.il_estimated;
  r.il_true = o.il_true;
  r.power = o.p.leo_power();
  r.iterations = o.trace.iterations();
  r.wall_time_s = o.wall_time_s;
  return r;
}

std::vector<ExperimentRecord> run_point(const ScenarioConfig& cfg, const std::vector<SchemeId>& schemes,
                                        double sweep_value, int draws) {
  std::vector<ExperimentRecord> out;
  for (int d = 0; d < draws; ++d) {
    ScenarioConfig c = cfg;
    c.seed = draw_seed(cfg.seed, d);
    const Snapshot s = make_snapshot(c, c.seed);
    for (const SchemeOutcome& o : solve_schemes(s, schemes)) {
      ExperimentRecord r = make_record(o, sweep_value, d);
      r.feasible = check_feasibility(o, s.channels, c).ok;
      out.push_back(std::move(r));
    }
  }
  return out;
}

ExperimentRecord run(const ScenarioConfig& cfg) {
  validate_config(cfg);
  const Snapshot s = make_snapshot(cfg, cfg.seed);
  const SchemeOutcome o = solve_schemes(s, {cfg.scheme}).front();
  ExperimentRecord r = make_record(o, cfg.gu_off_boresight_deg, 0);
  r.feasible = check_feasibility(o, s.channels, cfg).ok;
  return r;
}

std::vector<double> sweep_points(double min, double max, int steps) {
  std::vector<double> v;
  if (steps <= 1) return {min};
  for (int i = 0; i < steps; ++i) v.push_back(min + (max - min) * i / (steps - 1));
  return v;
}

std::vector<ExperimentRecord> sweep_offboresight(const ScenarioConfig& cfg, const std::vector<double>& angles_deg,
                                                 const std::vector<SchemeId>& schemes, int draws) {
  std::vector<ExperimentRecord> out;
  for (double a : angles_deg) {
    ScenarioConfig c = cfg;
    c.gu_off_boresight_deg = a;
    auto rows = run_point(c, schemes, a, draws);
    out.insert(out.end(), rows.begin(), rows.end());
  }
  sort_records(out);
  return out;
}

std::vector<ExperimentRecord> bar_demand(const ScenarioConfig& cfg, const std::vector<SchemeId>& schemes, int draws) {
  auto out = run_point(cfg, schemes, cfg.gu_off_boresight_deg, draws);
  sort_records(out);
  return out;
}

std::vector<ExperimentRecord> sweep_separation(const ScenarioConfig& cfg, const std::vector<double>& separations_deg,
                                               const std::vector<SchemeId>& schemes, int draws) {
  std::vector<ExperimentRecord> out;
  for (double s : separations_deg) {
    ScenarioConfig c = cfg;
    c.leo_separation_deg = s;
    auto rows = run_point(c, schemes, s, draws);
    out.insert(out.end(), rows.begin(), rows.end());
  }
  sort_records(out);
  return out;
}

void sort_records(std::vector<ExperimentRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const ExperimentRecord& a, const ExperimentRecord& b) {
    return std::make_tuple(static_cast<int>(a.scheme), a.sweep_value, a.draw) <
           std::make_tuple(static_cast<int>(b.scheme), b.sweep_value, b.draw);
  });
}

void write_csv(std::ostream& out, std::vector<ExperimentRecord> records, bool with_wall_time) {
  sort_records(records);
  std::size_t k = 0;
  for (const auto& r : records) k = std::max(k, r.r_total.size());
  out << "scheme,sweep_value,draw";
  for (std::size_t i = 1; i <= k; ++i) out << ",r_total_" << i;
  for (std::size_t i = 1; i <= k; ++i) out << ",served_" << i;
  out << ",objective,r_spc,r_c,il_est,il_true,power,iterations";
  if (with_wall_time) out << ",wall_time_s";
  out << '\n';
  for (const auto& r : records) {
    out << to_string(r.scheme) << ',' << num(r.sweep_value) << ',' << r.draw;
    for (std::size_t i = 0; i < k; ++i) out << ',' << (i < r.r_total.size() ? num(r.r_total[i]) : "");
    for (std::size_t i = 0; i < k; ++i) out << ',' << (i < r.served.size() ? num(r.served[i]) : "");
    out << ',' << num(r.objective) << ',' << num(r.r_spc) << ',' << num(r.r_c) << ',' << num(r.il_estimated) << ','
        << num(r.il_true) << ',' << num(r.power) << ',' << r.iterations;
    if (with_wall_time) out << ',' << num(r.wall_time_s);
    out << '\n';
  }
}

std::vector<PointSummary> summarize(const std::vector<ExperimentRecord>& records, const std::vector<double>& demands) {
  std::map<std::pair<int, double>, std::vector<const ExperimentRecord*>> groups;
  for (const auto& r : records) groups[{static_cast<int>(r.scheme), r.sweep_value}].push_back(&r);
  const double total = demand_total(demands);
  std::vector<PointSummary> out;
  for (const auto& [key, rows] : groups) {
    PointSummary s;
    s.scheme = rows.front()->scheme;
    s.sweep_value = key.second;
    s.draws = static_cast<int>(rows.size());
    s.mean_served.assign(rows.front()->served.size(), 0.0);
    for (const auto* r : rows) {
      s.mean_objective += r->objective;
      for (std::size_t i = 0; i < s.mean_served.size() && i < r->served.size(); ++i) s.mean_served[i] += r->served[i];
    }
    s.mean_objective /= s.draws;
    for (double& x : s.mean_served) x /= s.draws;
    double var = 0.0;
    for (const auto* r : rows) var += (r->objective - s.mean_objective) * (r->objective - s.mean_objective);
    s.stderr_objective = s.draws > 1 ? std::sqrt(var / (s.draws - 1) / s.draws) : 0.0;
    s.mean_satisfaction = total > 0.0 ? s.mean_objective / total : 0.0;
    out.push_back(std::move(s));
  }
  return out;
}

void print_summary(std::ostream& out, const std::vector<PointSummary>& summary) {
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %10s %6s %10s %9s %8s  %s\n", "scheme", "sweep", "draws", "objective",
                "stderr", "satisf.", "mean served per LU");
  out << line;
  for (const auto& s : summary) {
    std::snprintf(line, sizeof line, "%-22s %10.3f %6d %10.4f %9.4f %7.1f%% ", to_string(s.scheme), s.sweep_value,
                  s.draws, s.mean_objective, s.stderr_objective, 100.0 * s.mean_satisfaction);
    out << line;
    for (double x : s.mean_served) {
      std::snprintf(line, sizeof line, " %.3f", x);
      out << line;
    }
    out << '\n';
  }
}

bool validate(const ScenarioConfig& cfg, std::ostream& out) {
  validate_config(cfg);
  bool all = true;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    all = all && ok;
  };

  // Lifting identity.
  {
    const ChannelSet ch = build_channel_set(cfg, cfg.seed);
    const auto w = geo_precoders(cfg);
    const LiftedMatrices m = build_lifted_matrices(ch, w);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      PrecoderSolution p = PrecoderSolution::zeros(ch.n_leo(), ch.k_lu(), w);
      for (int i = 0; i < ch.k_lu() + 2; ++i)
        for (int j = 0; j < ch.n_leo(); ++j) p.stream(i)[j] = {nd(rng), nd(rng)};
      const double s = std::sqrt(cfg.p_leo_w / p.leo_power());
      for (int i = 0; i < ch.k_lu() + 2; ++i) p.stream(i) *= s;
      auto rel = [&](double a, double b) { worst = std::max(worst, std::abs(a - b) / std::abs(b)); };
      for (int g = 0; g < ch.k_gu(); ++g) rel(log2_ratio(m.A[g], m.B[g], p), std::log2(1.0 + sinr_spc_gu(g, p, ch)));
      for (int k = 0; k < ch.k_lu(); ++k) {
        rel(log2_ratio(m.D[k], m.F[k], p), std::log2(1.0 + sinr_spc_lu(k, p, ch)));
        rel(log2_ratio(m.F[k], m.Q[k], p), std::log2(1.0 + sinr_common(k, p, ch)));
        rel(log2_ratio(m.Q[k], m.V[k], p), std::log2(1.0 + sinr_private(k, p, ch)));
      }
    }
    report("lifting-identity", worst <= 1e-10, "max relative error " + num(worst));
  }

  // CCCP monotonicity and feasibility of every scheme on a few draws.
  {
    ScenarioConfig c = cfg;
    c.m2 = std::min(cfg.m2, 200);
    double worst_drop = 0.0;
    int max_iter = 0;
    bool feasible = true;
    std::string why;
    for (int d = 0; d < 3; ++d) {
      c.seed = draw_seed(cfg.seed, d);
      const Snapshot s = make_snapshot(c, c.seed);
      std::vector<SchemeId> all_schemes(std::begin(kAllSchemes), std::end(kAllSchemes));
      for (const auto& o : solve_schemes(s, all_schemes)) {
        const auto& h = o.trace.objectives;
        for (std::size_t i = 1; i < h.size(); ++i) worst_drop = std::max(worst_drop, h[i - 1] - h[i]);
        max_iter = std::max(max_iter, o.trace.iterations());
        const auto f = check_feasibility(o, s.channels, c);
        if (!f.ok) {
          feasible = false;
          why += std::string(to_string(o.scheme)) + ": " + f.message;
        }
      }
    }
    report("cccp-monotone", worst_drop <= 10.0 * cfg.epsilon && max_iter <= cfg.m1,
           "largest drop " + num(worst_drop) + ", most iterations " + std::to_string(max_iter));
    report("feasibility", feasible, feasible ? "power and leakage within budget" : why);
  }

  // Single-feed oracle.
  {
    ScenarioConfig c = cfg;
    c.n_leo = 1;
    c.k_lu = 1;
    c.k_gu = 1;
    c.sigma_e2 = 0.0;
    c.demands = {cfg.demands.front()};
    c.gu_off_boresight_deg = 2.0;
    c.leo_separation_deg = 0.0;
    const Snapshot s = make_snapshot(c, c.seed);
    const SchemeOutcome o = solve_spc_rsma_ttm(s);
    const double oracle = single_feed_grid_optimum(c, s.channels, s.w, 200);
    const bool ok = std::abs(o.rates.objective - oracle) <= 0.05 * std::max(oracle, 1e-12);
    report("oracle", ok, "pipeline " + num(o.rates.objective) + " vs grid " + num(oracle));
  }
  return all;
}

}  // namespace geoleo
