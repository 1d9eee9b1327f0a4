// geoleo_cli: run | sweep-angle | bar-demand | sweep-separation | validate

#include "geoleo/experiment.hpp"
#include "geoleo/optimizer.hpp"
#include "geoleo/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace geoleo;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string scheme;
  std::optional<int> draws;
  bool wall_time = false;
};

ScenarioConfig load(const Options& o) {
  ScenarioConfig cfg = o.config.empty() ? ScenarioConfig{} : load_config_file(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.scheme.empty() && o.scheme != "all") {
    const auto id = scheme_from_string(o.scheme);
    if (!id) throw ConfigError({"scheme: unknown scheme '" + o.scheme + "'"});
    cfg.scheme = *id;
  }
  if (o.draws) cfg.sweep.draws = *o.draws;
  validate_config(cfg);
  return cfg;
}

std::vector<SchemeId> schemes_for(const Options& o, const ScenarioConfig& cfg, bool all_by_default) {
  if (o.scheme == "all" || (o.scheme.empty() && all_by_default))
    return {std::begin(kAllSchemes), std::end(kAllSchemes)};
  return {cfg.scheme};
}

int emit(const Options& o, const ScenarioConfig& cfg, const std::vector<ExperimentRecord>& records) {
  if (!o.out.empty()) {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) {
      std::cerr << "cannot write " << o.out << '\n';
      return 1;
    }
    write_csv(f, records, o.wall_time);
  }
  print_summary(std::cout, summarize(records, cfg.demands));
  int bad = 0;
  for (const auto& r : records) bad += !r.feasible;
  if (bad) {
    std::cerr << bad << " record(s) failed the feasibility check\n";
    return 1;
  }
  return 0;
}

std::vector<double> points(const ScenarioConfig& cfg, const std::string& variable, double lo, double hi, int steps) {
  if (cfg.sweep.variable == variable) return sweep_points(cfg.sweep.min, cfg.sweep.max, cfg.sweep.steps);
  return sweep_points(lo, hi, steps);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GEO-LEO coexistence precoder design and experiments"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "TOML scenario file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "CSV output path");
    sub->add_option("--seed", o.seed, "base seed");
    sub->add_option("--scheme", o.scheme, "scheme name or 'all'");
    sub->add_option("--draws", o.draws, "channel draws per point")->check(CLI::PositiveNumber);
    sub->add_flag("--wall-time", o.wall_time, "append a wall_time_s column (breaks byte stability)");
  };
  auto* run_cmd = app.add_subcommand("run", "one draw of one scheme");
  auto* angle_cmd = app.add_subcommand("sweep-angle", "throughput versus GU off-boresight angle");
  auto* bar_cmd = app.add_subcommand("bar-demand", "per-LU served throughput at the configured angle");
  auto* sep_cmd = app.add_subcommand("sweep-separation", "throughput versus separation of two LEO satellites");
  auto* val_cmd = app.add_subcommand("validate", "invariant checks");
  for (auto* sub : {run_cmd, angle_cmd, bar_cmd, sep_cmd, val_cmd}) common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    const ScenarioConfig cfg = load(o);
    if (*run_cmd) return emit(o, cfg, {run(cfg)});
    if (*angle_cmd) {
      const auto angles = points(cfg, "gu_off_boresight_deg", -5.0, 5.0, 21);
      return emit(o, cfg, sweep_offboresight(cfg, angles, schemes_for(o, cfg, true), cfg.sweep.draws));
    }
    if (*bar_cmd) return emit(o, cfg, bar_demand(cfg, schemes_for(o, cfg, true), cfg.sweep.draws));
    if (*sep_cmd) {
      const auto seps = points(cfg, "leo_separation_deg", 0.0, 20.0, 11);
      return emit(o, cfg, sweep_separation(cfg, seps, schemes_for(o, cfg, false), cfg.sweep.draws));
    }
    if (*val_cmd) return validate(cfg, std::cout) ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration:\n";
    for (const auto& f : e.fields()) std::cerr << "  " << f << '\n';
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
