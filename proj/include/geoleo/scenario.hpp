#pragma once

// Parameterization of one GEO-LEO coexistence snapshot plus the knobs for
// the optimizer, the comparison schemes and the sweeps.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace geoleo {

enum class SchemeId {
  SpcRsmaTtm,
  RsmaTtm,
  SdmaTtm,
  ProgressivePitchTtm,
  BandSplitTtm,
  SpcRsmaStm,
  SpcRsmaMmf,
};

inline constexpr SchemeId kAllSchemes[] = {
    SchemeId::SpcRsmaTtm,          SchemeId::RsmaTtm,      SchemeId::SdmaTtm,    SchemeId::ProgressivePitchTtm,
    SchemeId::BandSplitTtm,        SchemeId::SpcRsmaStm,   SchemeId::SpcRsmaMmf,
};

const char* to_string(SchemeId id);
std::optional<SchemeId> scheme_from_string(std::string_view name);

/// Which GU channel the final leakage rescale protects.
enum class IlRescale { Estimated, True, Both };

const char* to_string(IlRescale mode);

struct SweepSpec {
  std::string variable;  // "gu_off_boresight_deg" or "leo_separation_deg"
  double min = -5.0;
  double max = 5.0;
  int steps = 21;
  int draws = 20;
};

struct ScenarioConfig {
  // Radio and orbit
  double carrier_frequency_hz = 20e9;
  double bandwidth_hz = 500e6;
  double leo_altitude_m = 600e3;
  double geo_altitude_m = 35786e3;
  double leo_tx_gain_dbi = 30.5;
  double geo_tx_gain_dbi = 50.5;
  double rx_gain_dbi = 39.7;
  double noise_temperature_k = 300.0;

  // Dimensions
  int n_leo = 2;  // LEO feeds (= beams), N_L
  int n_geo = 2;  // GEO feeds, N_G
  int k_lu = 4;
  int k_gu = 2;

  // Layout
  double leo_beam_radius_m = 35e3;
  double geo_beam_radius_m = 180e3;
  double lu_spacing_m = 10e3;
  double geo_elevation_deg = 90.0;
  double gu_off_boresight_deg = 0.2;
  double gu_d_over_lambda = 0.0;    // 0 derives it from rx_gain_dbi
  double leo_separation_deg = 0.0;  // 0 disables the second LEO satellite

  // Traffic and budgets
  std::vector<double> demands = {1.5, 1.0, 2.5, 1.5};  // bits/s/Hz per LU
  double i_th = 1.0;
  double p_leo_w = 20.0;
  double p_geo_w = 2.0;
  double sigma_e2 = 0.05;

  // Algorithm
  double epsilon = 1e-6;
  int m1 = 20;
  int m2 = 5000;
  std::uint64_t seed = 1;
  SchemeId scheme = SchemeId::SpcRsmaTtm;
  IlRescale il_rescale = IlRescale::Both;

  // Baselines
  double pp_guard_deg = 2.0;
  double band_split_fraction = 0.5;
  bool band_split_common = true;

  SweepSpec sweep;
};

/// Field-level configuration problems, one message per offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> fields);
  const std::vector<std::string>& fields() const { return fields_; }

 private:
  std::vector<std::string> fields_;
};

/// Throws ConfigError listing every invalid field.
void validate_config(const ScenarioConfig& config);

/// Reads a TOML document. Keys mirror the ScenarioConfig member names;
/// sweep settings live in a [sweep] table. Unknown keys are errors.
ScenarioConfig load_config(std::istream& in);
ScenarioConfig load_config_file(const std::string& path);

/// Writes every field back in the same TOML layout.
void write_config(std::ostream& out, const ScenarioConfig& config);

}  // namespace geoleo
