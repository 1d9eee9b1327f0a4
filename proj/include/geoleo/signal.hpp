#pragma once

// RSMA signal algebra: SINRs of the super-common, common and private streams
// under imperfect CSI, interference leakage at GUs and rate accounting.
// Rates are in bits/s/Hz; the noise power is 1.

#include "geoleo/geometry.hpp"

#include <Eigen/Dense>

#include <vector>

namespace geoleo {

struct PrecoderSolution {
  Eigen::VectorXcd p_spc;
  Eigen::VectorXcd p_c;
  std::vector<Eigen::VectorXcd> p_priv;
  std::vector<Eigen::VectorXcd> w;  // GEO beam precoders
  std::vector<double> c_spc;
  std::vector<double> c;

  /// All-zero LEO precoders and portions.
  static PrecoderSolution zeros(int n_leo, int k_lu, std::vector<Eigen::VectorXcd> w);

  int k_lu() const { return static_cast<int>(p_priv.size()); }
  int n_leo() const { return static_cast<int>(p_spc.size()); }
  double leo_power() const;

  /// Stream i in the stacking order [p_1 .. p_K, p_c, p_spc].
  const Eigen::VectorXcd& stream(int i) const;
  Eigen::VectorXcd& stream(int i);
};

struct RateBreakdown {
  std::vector<double> r_spc_at_lu;
  std::vector<double> r_spc_at_gu;
  std::vector<double> r_c_at_lu;
  std::vector<double> r_p;
  double r_spc = 0.0;
  double r_c = 0.0;
  std::vector<double> r_total;
  std::vector<double> served;  // min(T_k, R_total[k])
  double objective = 0.0;      // sum of served
  std::vector<double> il_at_gu;       // estimated channel
  std::vector<double> il_true_at_gu;  // true channel
};

/// |g^H w_mu|² + σ_e²·Σ‖p‖² plus second-LEO interference when present.
double effective_error_floor_lu(int k_l, const PrecoderSolution& p, const ChannelSet& ch);
/// GU counterpart with |f^H w_mu|².
double effective_error_floor_gu(int k_g, const PrecoderSolution& p, const ChannelSet& ch);

double sinr_spc_lu(int k_l, const PrecoderSolution& p, const ChannelSet& ch);
double sinr_spc_gu(int k_g, const PrecoderSolution& p, const ChannelSet& ch);
double sinr_common(int k_l, const PrecoderSolution& p, const ChannelSet& ch);
double sinr_private(int k_l, const PrecoderSolution& p, const ChannelSet& ch);

/// |z^H p_c|² + Σ_j |z^H p_j|², plus everything the second LEO radiates
/// toward the GU. The super-common stream of the serving LEO is excluded.
double interference_leakage(int k_g, const PrecoderSolution& p, const ChannelSet& ch, bool use_true);

/// Per-stream rates on the estimated channels, portions from p.c_spc / p.c.
RateBreakdown rates(const PrecoderSolution& p, const ChannelSet& ch, const std::vector<double>& demands);

}  // namespace geoleo
