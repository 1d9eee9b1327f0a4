#pragma once

// Link geometry, antenna patterns and channel realizations for the GEO and
// LEO downlinks. Channels are normalized by the receiver noise power.

#include "geoleo/scenario.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace geoleo {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEarthRadius = 6371e3;
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kSpeedOfLight = 299792458.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// (λ / 4πd)². Throws std::invalid_argument for non-positive inputs.
double free_space_gain(double wavelength, double distance);

/// Bessel multibeam pattern, G_T_max·[J1(u)/(2u) + 36·J3(u)/u³]² with
/// u = 2.07123·sin φ / sin φ_3dB.
double beam_gain(double phi, double phi_3db, double g_t_max);

/// D/λ consistent with a peak gain, from G_max = 20·log10(D/λ) + 7.7 dBi.
double default_d_over_lambda(double g_r_max_dbi);

/// ITU-R S.1428-1 off-axis receive envelope, linear. The mainlobe is pinned
/// to g_r_max so that gu_rx_gain(0, g, ·) == g.
double gu_rx_gain(double theta, double g_r_max, double d_over_lambda);

enum class RxPattern { BoresightTracking, OffAxisItu };

struct AntennaParams {
  double g_t_max = 1.0;
  double g_r_max = 1.0;
  double phi_3db = 0.1;
  RxPattern rx_pattern = RxPattern::BoresightTracking;
};

struct LinkGeometry {
  double satellite_altitude = 0.0;
  Eigen::Vector2d user_ground_position = Eigen::Vector2d::Zero();
  double slant_distance = 0.0;
  std::vector<double> boresight_angles;  // one per satellite beam
  double gu_off_boresight_angle = 0.0;
  double leo_separation_angle = 0.0;
};

/// Positions in a local Cartesian frame: origin on the surface below the
/// GUs, z up, Earth center at (0, 0, -R_E).
struct ScenarioGeometry {
  Eigen::Vector3d geo;
  Eigen::Vector3d leo;
  std::optional<Eigen::Vector3d> leo2;
  std::vector<Eigen::Vector3d> leo_beam_centers;
  std::vector<Eigen::Vector3d> leo2_beam_centers;
  std::vector<Eigen::Vector3d> geo_beam_centers;
  std::vector<Eigen::Vector3d> lu_positions;
  std::vector<Eigen::Vector3d> gu_positions;
  std::vector<int> mu_lu;  // GEO beam serving each LU's location
  std::vector<int> mu_gu;
  std::vector<LinkGeometry> leo_to_lu;
  std::vector<LinkGeometry> leo_to_gu;
  double theta_g = 0.0;  // realized off-boresight angle at GU 0
  AntennaParams leo_antenna;
  AntennaParams geo_antenna;
  double d_over_lambda = 0.0;
};

/// Point on the spherical surface above ground coordinates (x, y).
Eigen::Vector3d surface_point(double x, double y);

/// Angle between two vectors, radians in [0, π].
double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

/// Throws ConfigError when the layout is not realizable.
ScenarioGeometry build_geometry(const ScenarioConfig& config);

struct ChannelSet {
  std::vector<Eigen::VectorXcd> h_hat;   // LEO -> LU, N_L each
  std::vector<Eigen::VectorXcd> z_hat;   // LEO -> GU
  std::vector<Eigen::VectorXcd> f;       // GEO -> GU, N_G each
  std::vector<Eigen::VectorXcd> g;       // GEO -> LU
  std::vector<Eigen::VectorXcd> true_h;
  std::vector<Eigen::VectorXcd> true_z;
  std::vector<Eigen::VectorXcd> h_second;  // second LEO -> LU, empty without it
  std::vector<Eigen::VectorXcd> z_second;  // second LEO -> GU
  std::vector<int> mu_lu;
  std::vector<int> mu_gu;
  double sigma_e2 = 0.0;
  double noise_variance = 1.0;

  int n_leo() const { return h_hat.empty() ? 0 : static_cast<int>(h_hat.front().size()); }
  int n_geo() const { return f.empty() ? 0 : static_cast<int>(f.front().size()); }
  int k_lu() const { return static_cast<int>(h_hat.size()); }
  int k_gu() const { return static_cast<int>(z_hat.size()); }
  bool has_second_leo() const { return !h_second.empty(); }
};

/// All link families for one snapshot; every random draw comes from a
/// std::mt19937_64 seeded with rng_seed.
ChannelSet build_channel_set(const ScenarioConfig& config, std::uint64_t rng_seed);

/// Fixed GEO precoders: unit direction matched to the phase-free channel at
/// each beam center, scaled to P_G / N_G per beam.
std::vector<Eigen::VectorXcd> geo_precoders(const ScenarioConfig& config);

}  // namespace geoleo
