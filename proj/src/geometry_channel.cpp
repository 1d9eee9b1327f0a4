#include "geoleo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace geoleo {

namespace {

const Eigen::Vector3d kEarthCenter(0.0, 0.0, -kEarthRadius);

// Point where the ray origin + s*dir (s > 0) meets the shell of radius R_E + altitude.
Eigen::Vector3d satellite_along(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir, double altitude) {
  const Eigen::Vector3d o = origin - kEarthCenter;
  const Eigen::Vector3d d = dir.normalized();
  const double r = kEarthRadius + altitude;
  const double b = 2.0 * o.dot(d);
  const double c = o.squaredNorm() - r * r;
  const double s = 0.5 * (-b + std::sqrt(b * b - 4.0 * c));
  return origin + s * d;
}

Eigen::Matrix3d rotation_x(double angle) {
  return Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitX()).toRotationMatrix();
}

Eigen::Vector3d rotate_about_center(const Eigen::Vector3d& p, double angle) {
  return kEarthCenter + rotation_x(angle) * (p - kEarthCenter);
}

double elevation(const Eigen::Vector3d& ground, const Eigen::Vector3d& sat) {
  const Eigen::Vector3d up = (ground - kEarthCenter).normalized();
  return kPi / 2.0 - angle_between(up, sat - ground);
}

LinkGeometry link(const Eigen::Vector3d& sat, double altitude, const std::vector<Eigen::Vector3d>& centers,
                  const Eigen::Vector3d& user) {
  LinkGeometry lg;
  lg.satellite_altitude = altitude;
  lg.user_ground_position = user.head<2>();
  lg.slant_distance = (sat - user).norm();
  for (const auto& c : centers) lg.boresight_angles.push_back(angle_between(c - sat, user - sat));
  return lg;
}

int nearest(const std::vector<Eigen::Vector3d>& centers, const Eigen::Vector3d& p) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(centers.size()); ++i)
    if ((centers[i] - p).norm() < (centers[best] - p).norm()) best = i;
  return best;
}

struct Radio {
  double wavelength;
  double kbt;
};

// Per-feed amplitudes of one satellite -> user link.
Eigen::VectorXd amplitudes(const Radio& radio, const Eigen::Vector3d& sat, const std::vector<Eigen::Vector3d>& centers,
                           const AntennaParams& ant, double g_rx, const Eigen::Vector3d& user) {
  const double d = (sat - user).norm();
  const double common = free_space_gain(radio.wavelength, d) * g_rx / radio.kbt;
  Eigen::VectorXd a(centers.size());
  for (std::size_t n = 0; n < centers.size(); ++n)
    a[n] = std::sqrt(common * beam_gain(angle_between(centers[n] - sat, user - sat), ant.phi_3db, ant.g_t_max));
  return a;
}

Eigen::VectorXcd with_phases(const Eigen::VectorXd& amp, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  Eigen::VectorXcd v(amp.size());
  for (Eigen::Index i = 0; i < amp.size(); ++i) v[i] = std::polar(amp[i], phase(rng));
  return v;
}

Eigen::VectorXcd cn_vector(int n, double variance, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) {
    const double re = nd(rng);
    const double im = nd(rng);
    v[i] = {re, im};
  }
  return v;
}

}  // namespace

double free_space_gain(double wavelength, double distance) {
  if (!(wavelength > 0.0) || !(distance > 0.0))
    throw std::invalid_argument("free_space_gain: wavelength and distance must be positive");
  const double r = wavelength / (4.0 * kPi * distance);
  return r * r;
}

double beam_gain(double phi, double phi_3db, double g_t_max) {
  if (!(phi >= 0.0 && phi < kPi / 2.0)) throw std::invalid_argument("beam_gain: phi outside [0, pi/2)");
  if (!(phi_3db > 0.0 && phi_3db < kPi / 2.0)) throw std::invalid_argument("beam_gain: phi_3db outside (0, pi/2)");
  const double u = 2.07123 * std::sin(phi) / std::sin(phi_3db);
  double bracket;
  if (u < 1e-4) {
    // J1(u)/(2u) = 1/4 - u^2/32 + ..., 36 J3(u)/u^3 = 3/4 - 3u^2/64 + ...
    bracket = 1.0 - 5.0 * u * u / 64.0;
  } else {
    bracket = std::cyl_bessel_j(1.0, u) / (2.0 * u) + 36.0 * std::cyl_bessel_j(3.0, u) / (u * u * u);
  }
  return g_t_max * bracket * bracket;
}

double default_d_over_lambda(double g_r_max_dbi) { return std::pow(10.0, (g_r_max_dbi - 7.7) / 20.0); }

double gu_rx_gain(double theta, double g_r_max, double d_over_lambda) {
  const double phi = rad_to_deg(std::abs(theta));
  const double gmax = 10.0 * std::log10(g_r_max);
  const double dl = d_over_lambda;
  double g;
  if (dl > 100.0) {
    const double g1 = -1.0 + 15.0 * std::log10(dl);
    const double phi_m = 20.0 / dl * std::sqrt(std::max(gmax - g1, 0.0));
    const double phi_r = 15.85 * std::pow(dl, -0.6);
    if (phi < phi_m)
      g = gmax - 2.5e-3 * (dl * phi) * (dl * phi);
    else if (phi < phi_r)
      g = g1;
    else if (phi < 10.0)
      g = 29.0 - 25.0 * std::log10(phi);
    else if (phi < 34.1)
      g = 34.0 - 30.0 * std::log10(phi);
    else if (phi < 80.0)
      g = -12.0;
    else if (phi < 120.0)
      g = -7.0;
    else
      g = -12.0;
  } else {
    const double g1 = 2.0 + 15.0 * std::log10(dl);
    const double phi_m = 20.0 / dl * std::sqrt(std::max(gmax - g1, 0.0));
    if (phi < phi_m)
      g = gmax - 2.5e-3 * (dl * phi) * (dl * phi);
    else if (phi < 95.0 / dl)
      g = g1;
    else if (phi < 33.1)
      g = 29.0 - 25.0 * std::log10(phi);
    else if (phi < 80.0)
      g = -9.0;
    else if (phi < 120.0)
      g = -4.0;
    else
      g = -9.0;
  }
  // The envelope never exceeds the mainlobe peak.
  return db_to_linear(std::min(g, gmax));
}

Eigen::Vector3d surface_point(double x, double y) {
  return Eigen::Vector3d(x, y, kEarthRadius).normalized() * kEarthRadius + kEarthCenter;
}

double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double c = a.dot(b) / (a.norm() * b.norm());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

ScenarioGeometry build_geometry(const ScenarioConfig& cfg) {
  validate_config(cfg);
  ScenarioGeometry geo;
  const Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  const double el = deg_to_rad(cfg.geo_elevation_deg);
  const Eigen::Vector3d to_geo(0.0, std::cos(el), std::sin(el));
  geo.geo = satellite_along(origin, to_geo, cfg.geo_altitude_m);
  geo.leo = satellite_along(origin, rotation_x(deg_to_rad(cfg.gu_off_boresight_deg)) * to_geo, cfg.leo_altitude_m);

  const int nl = cfg.n_leo;
  for (int n = 0; n < nl; ++n)
    geo.leo_beam_centers.push_back(surface_point((n - 0.5 * (nl - 1)) * 2.0 * cfg.leo_beam_radius_m, 0.0));
  for (int n = 0; n < cfg.n_geo; ++n) geo.geo_beam_centers.push_back(surface_point(0.0, 2.0 * cfg.geo_beam_radius_m * n));

  // LUs fill the beams in order, spaced symmetrically about each beam center.
  const int per_beam = (cfg.k_lu + nl - 1) / nl;
  for (int k = 0; k < cfg.k_lu; ++k) {
    const int beam = k / per_beam;
    const int slot = k % per_beam;
    const double cx = (beam - 0.5 * (nl - 1)) * 2.0 * cfg.leo_beam_radius_m;
    const double off = (slot - 0.5 * (per_beam - 1)) * 2.0 * cfg.lu_spacing_m;
    geo.lu_positions.push_back(surface_point(cx + off, 0.0));
  }
  for (int k = 0; k < cfg.k_gu; ++k) geo.gu_positions.push_back(origin);

  if (cfg.leo_separation_deg > 0.0) {
    const double sep = deg_to_rad(cfg.leo_separation_deg);
    geo.leo2 = rotate_about_center(geo.leo, sep);
    for (const auto& c : geo.leo_beam_centers) geo.leo2_beam_centers.push_back(rotate_about_center(c, sep));
  }

  geo.leo_antenna = {db_to_linear(cfg.leo_tx_gain_dbi), db_to_linear(cfg.rx_gain_dbi),
                     std::atan(cfg.leo_beam_radius_m / cfg.leo_altitude_m), RxPattern::BoresightTracking};
  geo.geo_antenna = {db_to_linear(cfg.geo_tx_gain_dbi), db_to_linear(cfg.rx_gain_dbi),
                     std::atan(cfg.geo_beam_radius_m / cfg.geo_altitude_m), RxPattern::BoresightTracking};
  geo.d_over_lambda = cfg.gu_d_over_lambda > 0.0 ? cfg.gu_d_over_lambda : default_d_over_lambda(cfg.rx_gain_dbi);

  std::vector<std::string> errs;
  for (const auto& p : geo.lu_positions) {
    geo.mu_lu.push_back(nearest(geo.geo_beam_centers, p));
    geo.leo_to_lu.push_back(link(geo.leo, cfg.leo_altitude_m, geo.leo_beam_centers, p));
    if (elevation(p, geo.leo) <= 0.0) errs.push_back("lu_spacing_m: an LU does not see the LEO satellite");
  }
  for (const auto& p : geo.gu_positions) {
    geo.mu_gu.push_back(nearest(geo.geo_beam_centers, p));
    auto lg = link(geo.leo, cfg.leo_altitude_m, geo.leo_beam_centers, p);
    lg.gu_off_boresight_angle = angle_between(geo.geo - p, geo.leo - p);
    if (geo.leo2) lg.leo_separation_angle = deg_to_rad(cfg.leo_separation_deg);
    geo.leo_to_gu.push_back(lg);
  }
  for (const auto& lg : geo.leo_to_lu)
    for (double a : lg.boresight_angles)
      if (!(a < kPi / 2.0)) errs.push_back("leo_beam_radius_m: beam boresight angle reaches 90 degrees");
  if (!errs.empty()) throw ConfigError(errs);
  geo.theta_g = geo.leo_to_gu.front().gu_off_boresight_angle;
  return geo;
}

ChannelSet build_channel_set(const ScenarioConfig& cfg, std::uint64_t rng_seed) {
  const ScenarioGeometry geo = build_geometry(cfg);
  const Radio radio{kSpeedOfLight / cfg.carrier_frequency_hz, kBoltzmann * cfg.bandwidth_hz * cfg.noise_temperature_k};
  const double g_r = db_to_linear(cfg.rx_gain_dbi);
  std::mt19937_64 rng(rng_seed);

  ChannelSet ch;
  ch.sigma_e2 = cfg.sigma_e2;
  ch.mu_lu = geo.mu_lu;
  ch.mu_gu = geo.mu_gu;
  for (const auto& p : geo.lu_positions)
    ch.h_hat.push_back(with_phases(amplitudes(radio, geo.leo, geo.leo_beam_centers, geo.leo_antenna, g_r, p), rng));
  for (std::size_t k = 0; k < geo.gu_positions.size(); ++k) {
    const double g_rx = gu_rx_gain(geo.leo_to_gu[k].gu_off_boresight_angle, g_r, geo.d_over_lambda);
    ch.z_hat.push_back(
        with_phases(amplitudes(radio, geo.leo, geo.leo_beam_centers, geo.leo_antenna, g_rx, geo.gu_positions[k]), rng));
  }
  for (const auto& p : geo.gu_positions)
    ch.f.push_back(with_phases(amplitudes(radio, geo.geo, geo.geo_beam_centers, geo.geo_antenna, g_r, p), rng));
  for (const auto& p : geo.lu_positions)
    ch.g.push_back(with_phases(amplitudes(radio, geo.geo, geo.geo_beam_centers, geo.geo_antenna, g_r, p), rng));

  for (const auto& h : ch.h_hat)
    ch.true_h.push_back(cfg.sigma_e2 > 0.0 ? Eigen::VectorXcd(h + cn_vector(cfg.n_leo, cfg.sigma_e2, rng)) : h);
  for (const auto& z : ch.z_hat)
    ch.true_z.push_back(cfg.sigma_e2 > 0.0 ? Eigen::VectorXcd(z + cn_vector(cfg.n_leo, cfg.sigma_e2, rng)) : z);

  if (geo.leo2) {
    const Eigen::Vector3d& leo2 = *geo.leo2;
    for (const auto& p : geo.lu_positions) {
      // LUs keep tracking the first LEO; the second one arrives off-axis.
      if (elevation(p, leo2) <= 0.0) {
        ch.h_second.push_back(Eigen::VectorXcd::Zero(cfg.n_leo));
        continue;
      }
      const double g_rx = gu_rx_gain(angle_between(geo.leo - p, leo2 - p), g_r, geo.d_over_lambda);
      ch.h_second.push_back(with_phases(amplitudes(radio, leo2, geo.leo2_beam_centers, geo.leo_antenna, g_rx, p), rng));
    }
    for (const auto& p : geo.gu_positions) {
      if (elevation(p, leo2) <= 0.0) {
        ch.z_second.push_back(Eigen::VectorXcd::Zero(cfg.n_leo));
        continue;
      }
      const double g_rx = gu_rx_gain(angle_between(geo.geo - p, leo2 - p), g_r, geo.d_over_lambda);
      ch.z_second.push_back(with_phases(amplitudes(radio, leo2, geo.leo2_beam_centers, geo.leo_antenna, g_rx, p), rng));
    }
  }
  return ch;
}

std::vector<Eigen::VectorXcd> geo_precoders(const ScenarioConfig& cfg) {
  const ScenarioGeometry geo = build_geometry(cfg);
  const Radio radio{kSpeedOfLight / cfg.carrier_frequency_hz, kBoltzmann * cfg.bandwidth_hz * cfg.noise_temperature_k};
  const double g_r = db_to_linear(cfg.rx_gain_dbi);
  const double per_beam = std::sqrt(cfg.p_geo_w / cfg.n_geo);
  std::vector<Eigen::VectorXcd> w;
  for (const auto& c : geo.geo_beam_centers) {
    const Eigen::VectorXd a = amplitudes(radio, geo.geo, geo.geo_beam_centers, geo.geo_antenna, g_r, c);
    w.push_back((per_beam * a.normalized()).cast<std::complex<double>>());
  }
  return w;
}

}  // namespace geoleo
