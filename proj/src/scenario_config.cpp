#include "geoleo/scenario.hpp"

#include <toml.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace geoleo {

namespace {

constexpr const char* kSchemeNames[] = {
    "SPC_RSMA_TTM", "RSMA_TTM", "SDMA_TTM", "PROGRESSIVE_PITCH_TTM", "BAND_SPLIT_TTM", "SPC_RSMA_STM", "SPC_RSMA_MMF",
};

std::string join(const std::vector<std::string>& parts) {
  std::string out = "invalid configuration";
  for (const auto& p : parts) out += "\n  " + p;
  return out;
}

// Each entry reads one TOML node into the config, appending an error on type mismatch.
using Reader = std::function<void(const toml::node&, ScenarioConfig&, std::vector<std::string>&, const std::string&)>;

template <typename T>
Reader number(T ScenarioConfig::*field) {
  return [field](const toml::node& n, ScenarioConfig& c, std::vector<std::string>& errs, const std::string& key) {
    if constexpr (std::is_integral_v<T>) {
      if (auto v = n.value_exact<int64_t>()) {
        c.*field = static_cast<T>(*v);
        return;
      }
      errs.push_back(key + ": expected an integer");
    } else {
      if (auto v = n.value<double>()) {
        c.*field = *v;
        return;
      }
      errs.push_back(key + ": expected a number");
    }
  };
}

Reader sweep_number(double SweepSpec::*field) {
  return [field](const toml::node& n, ScenarioConfig& c, std::vector<std::string>& errs, const std::string& key) {
    if (auto v = n.value<double>())
      c.sweep.*field = *v;
    else
      errs.push_back(key + ": expected a number");
  };
}

Reader sweep_int(int SweepSpec::*field) {
  return [field](const toml::node& n, ScenarioConfig& c, std::vector<std::string>& errs, const std::string& key) {
    if (auto v = n.value_exact<int64_t>())
      c.sweep.*field = static_cast<int>(*v);
    else
      errs.push_back(key + ": expected an integer");
  };
}

const std::map<std::string, Reader>& readers() {
  static const std::map<std::string, Reader> table = [] {
    std::map<std::string, Reader> r;
    r["carrier_frequency_hz"] = number(&ScenarioConfig::carrier_frequency_hz);
    r["bandwidth_hz"] = number(&ScenarioConfig::bandwidth_hz);
    r["leo_altitude_m"] = number(&ScenarioConfig::leo_altitude_m);
    r["geo_altitude_m"] = number(&ScenarioConfig::geo_altitude_m);
    r["leo_tx_gain_dbi"] = number(&ScenarioConfig::leo_tx_gain_dbi);
    r["geo_tx_gain_dbi"] = number(&ScenarioConfig::geo_tx_gain_dbi);
    r["rx_gain_dbi"] = number(&ScenarioConfig::rx_gain_dbi);
    r["noise_temperature_k"] = number(&ScenarioConfig::noise_temperature_k);
    r["n_leo"] = number(&ScenarioConfig::n_leo);
    r["n_geo"] = number(&ScenarioConfig::n_geo);
    r["k_lu"] = number(&ScenarioConfig::k_lu);
    r["k_gu"] = number(&ScenarioConfig::k_gu);
    r["leo_beam_radius_m"] = number(&ScenarioConfig::leo_beam_radius_m);
    r["geo_beam_radius_m"] = number(&ScenarioConfig::geo_beam_radius_m);
    r["lu_spacing_m"] = number(&ScenarioConfig::lu_spacing_m);
    r["geo_elevation_deg"] = number(&ScenarioConfig::geo_elevation_deg);
    r["gu_off_boresight_deg"] = number(&ScenarioConfig::gu_off_boresight_deg);
    r["gu_d_over_lambda"] = number(&ScenarioConfig::gu_d_over_lambda);
    r["leo_separation_deg"] = number(&ScenarioConfig::leo_separation_deg);
    r["i_th"] = number(&ScenarioConfig::i_th);
    r["p_leo_w"] = number(&ScenarioConfig::p_leo_w);
    r["p_geo_w"] = number(&ScenarioConfig::p_geo_w);
    r["sigma_e2"] = number(&ScenarioConfig::sigma_e2);
    r["epsilon"] = number(&ScenarioConfig::epsilon);
    r["m1"] = number(&ScenarioConfig::m1);
    r["m2"] = number(&ScenarioConfig::m2);
    r["pp_guard_deg"] = number(&ScenarioConfig::pp_guard_deg);
    r["band_split_fraction"] = number(&ScenarioConfig::band_split_fraction);
    r["seed"] = [](const toml::node& n, ScenarioConfig& c, std::vector<std::string>& errs, const std::string& key) {
      auto v = n.value_exact<int64_t>();
      if (v && *v >= 0)
        c.seed = static_cast<std::uint64_t>(*v);
      else
        errs.push_back(key + ": expected a non-negative integer");
    };
    r["band_split_common"] = [](const toml::node& n, ScenarioConfig& c, std::vector<std::string>& errs,
                                const std::string& key) {
      if (auto v = n.value_exact<bool>())
        c.band_split_common = *v;
      else
        errs.push_back(key + ": expected true or false");
    };
    r["scheme"] = [](const toml::node& n, ScenarioConfig& c, std::vector<std::string>& errs, const std::string& key) {
      auto v = n.value_exact<std::string>();
      auto id = v ? scheme_from_string(*v) : std::nullopt;
      if (id)
        c.scheme = *id;
      else
        errs.push_back(key + ": unknown scheme");
    };
    r["il_rescale"] = [](const toml::node& n, ScenarioConfig& c, std::vector<std::string>& errs,
                         const std::string& key) {
      auto v = n.value_exact<std::string>();
      if (v && *v == "estimated")
        c.il_rescale = IlRescale::Estimated;
      else if (v && *v == "true")
        c.il_rescale = IlRescale::True;
      else if (v && *v == "both")
        c.il_rescale = IlRescale::Both;
      else
        errs.push_back(key + ": expected \"estimated\", \"true\" or \"both\"");
    };
    r["demands"] = [](const toml::node& n, ScenarioConfig& c, std::vector<std::string>& errs,
                      const std::string& key) {
      const auto* arr = n.as_array();
      if (!arr) {
        errs.push_back(key + ": expected an array of numbers");
        return;
      }
      std::vector<double> out;
      for (const auto& e : *arr) {
        auto v = e.value<double>();
        if (!v) {
          errs.push_back(key + ": expected an array of numbers");
          return;
        }
        out.push_back(*v);
      }
      c.demands = std::move(out);
    };
    r["sweep.variable"] = [](const toml::node& n, ScenarioConfig& c, std::vector<std::string>& errs,
                             const std::string& key) {
      if (auto v = n.value_exact<std::string>())
        c.sweep.variable = *v;
      else
        errs.push_back(key + ": expected a string");
    };
    r["sweep.min"] = sweep_number(&SweepSpec::min);
    r["sweep.max"] = sweep_number(&SweepSpec::max);
    r["sweep.steps"] = sweep_int(&SweepSpec::steps);
    r["sweep.draws"] = sweep_int(&SweepSpec::draws);
    return r;
  }();
  return table;
}

void read_table(const toml::table& t, const std::string& prefix, ScenarioConfig& c, std::vector<std::string>& errs) {
  for (const auto& [k, node] : t) {
    const std::string key = prefix + std::string(k.str());
    if (const auto* sub = node.as_table()) {
      read_table(*sub, key + ".", c, errs);
      continue;
    }
    const auto it = readers().find(key);
    if (it == readers().end()) {
      errs.push_back(key + ": unknown key");
      continue;
    }
    it->second(node, c, errs, key);
  }
}

}  // namespace

const char* to_string(SchemeId id) { return kSchemeNames[static_cast<int>(id)]; }

std::optional<SchemeId> scheme_from_string(std::string_view name) {
  for (SchemeId id : kAllSchemes)
    if (name == to_string(id)) return id;
  return std::nullopt;
}

const char* to_string(IlRescale mode) {
  switch (mode) {
    case IlRescale::Estimated: return "estimated";
    case IlRescale::True: return "true";
    case IlRescale::Both: return "both";
  }
  return "?";
}

ConfigError::ConfigError(std::vector<std::string> fields) : std::runtime_error(join(fields)), fields_(std::move(fields)) {}

void validate_config(const ScenarioConfig& c) {
  std::vector<std::string> errs;
  auto positive = [&](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) errs.push_back(std::string(name) + ": must be positive and finite");
  };
  positive("carrier_frequency_hz", c.carrier_frequency_hz);
  positive("bandwidth_hz", c.bandwidth_hz);
  positive("leo_altitude_m", c.leo_altitude_m);
  positive("geo_altitude_m", c.geo_altitude_m);
  positive("noise_temperature_k", c.noise_temperature_k);
  positive("leo_beam_radius_m", c.leo_beam_radius_m);
  positive("geo_beam_radius_m", c.geo_beam_radius_m);
  positive("p_leo_w", c.p_leo_w);
  positive("epsilon", c.epsilon);
  if (!(c.leo_altitude_m < c.geo_altitude_m)) errs.push_back("leo_altitude_m: must be below geo_altitude_m");
  for (auto [name, v] : {std::pair{"leo_tx_gain_dbi", c.leo_tx_gain_dbi}, std::pair{"geo_tx_gain_dbi", c.geo_tx_gain_dbi},
                         std::pair{"rx_gain_dbi", c.rx_gain_dbi}})
    if (!std::isfinite(v)) errs.push_back(std::string(name) + ": must be finite");
  if (c.n_leo < 1) errs.push_back("n_leo: must be at least 1");
  if (c.n_geo < 1) errs.push_back("n_geo: must be at least 1");
  if (c.k_lu < 1) errs.push_back("k_lu: must be at least 1");
  if (c.k_gu < 1) errs.push_back("k_gu: must be at least 1");
  if (!(c.lu_spacing_m >= 0.0)) errs.push_back("lu_spacing_m: must be non-negative");
  if (!(c.geo_elevation_deg > 0.0 && c.geo_elevation_deg <= 90.0)) errs.push_back("geo_elevation_deg: must lie in (0, 90]");
  if (!(std::abs(c.gu_off_boresight_deg) <= 30.0)) errs.push_back("gu_off_boresight_deg: must lie in [-30, 30]");
  if (!(c.gu_d_over_lambda >= 0.0)) errs.push_back("gu_d_over_lambda: must be non-negative (0 derives it)");
  if (!(c.leo_separation_deg >= 0.0 && c.leo_separation_deg < 90.0))
    errs.push_back("leo_separation_deg: must lie in [0, 90)");
  if (static_cast<int>(c.demands.size()) != c.k_lu) errs.push_back("demands: need exactly k_lu entries");
  for (double t : c.demands)
    if (!(t >= 0.0) || !std::isfinite(t)) {
      errs.push_back("demands: entries must be finite and non-negative");
      break;
    }
  if (!(c.i_th > 0.0)) errs.push_back("i_th: must be positive (inf disables the leakage limit)");
  if (!(c.p_geo_w >= 0.0) || !std::isfinite(c.p_geo_w)) errs.push_back("p_geo_w: must be finite and non-negative");
  if (!(c.sigma_e2 >= 0.0) || !std::isfinite(c.sigma_e2)) errs.push_back("sigma_e2: must be finite and non-negative");
  if (c.m1 < 1) errs.push_back("m1: must be at least 1");
  if (c.m2 < 0) errs.push_back("m2: must be non-negative");
  if (!(c.pp_guard_deg >= 0.0)) errs.push_back("pp_guard_deg: must be non-negative");
  if (!(c.band_split_fraction > 0.0 && c.band_split_fraction <= 1.0))
    errs.push_back("band_split_fraction: must lie in (0, 1]");
  if (!c.sweep.variable.empty() && c.sweep.variable != "gu_off_boresight_deg" &&
      c.sweep.variable != "leo_separation_deg")
    errs.push_back("sweep.variable: expected gu_off_boresight_deg or leo_separation_deg");
  if (c.sweep.steps < 1) errs.push_back("sweep.steps: must be at least 1");
  if (c.sweep.draws < 1) errs.push_back("sweep.draws: must be at least 1");
  if (!(c.sweep.min <= c.sweep.max)) errs.push_back("sweep.min: must not exceed sweep.max");
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

ScenarioConfig load_config(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  toml::table doc;
  try {
    doc = toml::parse(buf.str());
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "line " << e.source().begin.line << ": " << e.description();
    throw ConfigError({msg.str()});
  }
  ScenarioConfig c;
  std::vector<std::string> errs;
  read_table(doc, "", c, errs);
  try {
    validate_config(c);
  } catch (const ConfigError& e) {
    errs.insert(errs.end(), e.fields().begin(), e.fields().end());
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return c;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open " + path});
  return load_config(in);
}

namespace {

std::string shortest(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

void write_config(std::ostream& out, const ScenarioConfig& c) {
  auto num = [&](const char* k, double v) { out << k << " = " << shortest(v) << '\n'; };
  num("carrier_frequency_hz", c.carrier_frequency_hz);
  num("bandwidth_hz", c.bandwidth_hz);
  num("leo_altitude_m", c.leo_altitude_m);
  num("geo_altitude_m", c.geo_altitude_m);
  num("leo_tx_gain_dbi", c.leo_tx_gain_dbi);
  num("geo_tx_gain_dbi", c.geo_tx_gain_dbi);
  num("rx_gain_dbi", c.rx_gain_dbi);
  num("noise_temperature_k", c.noise_temperature_k);
  out << "n_leo = " << c.n_leo << "\nn_geo = " << c.n_geo << "\nk_lu = " << c.k_lu << "\nk_gu = " << c.k_gu << '\n';
  num("leo_beam_radius_m", c.leo_beam_radius_m);
  num("geo_beam_radius_m", c.geo_beam_radius_m);
  num("lu_spacing_m", c.lu_spacing_m);
  num("geo_elevation_deg", c.geo_elevation_deg);
  num("gu_off_boresight_deg", c.gu_off_boresight_deg);
  num("gu_d_over_lambda", c.gu_d_over_lambda);
  num("leo_separation_deg", c.leo_separation_deg);
  out << "demands = [";
  for (std::size_t i = 0; i < c.demands.size(); ++i) out << (i ? ", " : "") << shortest(c.demands[i]);
  out << "]\n";
  num("i_th", c.i_th);
  num("p_leo_w", c.p_leo_w);
  num("p_geo_w", c.p_geo_w);
  num("sigma_e2", c.sigma_e2);
  num("epsilon", c.epsilon);
  out << "m1 = " << c.m1 << "\nm2 = " << c.m2 << "\nseed = " << c.seed << '\n';
  out << "scheme = \"" << to_string(c.scheme) << "\"\nil_rescale = \"" << to_string(c.il_rescale) << "\"\n";
  num("pp_guard_deg", c.pp_guard_deg);
  num("band_split_fraction", c.band_split_fraction);
  out << "band_split_common = " << (c.band_split_common ? "true" : "false") << '\n';
  out << "\n[sweep]\nvariable = \"" << c.sweep.variable << "\"\n";
  num("min", c.sweep.min);
  num("max", c.sweep.max);
  out << "steps = " << c.sweep.steps << "\ndraws = " << c.sweep.draws << '\n';
}

}  // namespace geoleo
