#include "geoleo/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace geoleo {

namespace {

double quad(const Eigen::VectorXcd& ch, const Eigen::VectorXcd& p) { return std::norm(ch.dot(p)); }

double second_leo(const Eigen::VectorXcd* ch2, const PrecoderSolution& p) {
  if (!ch2) return 0.0;
  double s = quad(*ch2, p.p_spc) + quad(*ch2, p.p_c);
  for (const auto& v : p.p_priv) s += quad(*ch2, v);
  return s;
}

double geo_term(const Eigen::VectorXcd& link, int mu, const PrecoderSolution& p) {
  if (p.w.empty()) return 0.0;
  return quad(link, p.w.at(mu));
}

double private_sum(const Eigen::VectorXcd& ch, const PrecoderSolution& p) {
  double s = 0.0;
  for (const auto& v : p.p_priv) s += quad(ch, v);
  return s;
}

}  // namespace

PrecoderSolution PrecoderSolution::zeros(int n_leo, int k_lu, std::vector<Eigen::VectorXcd> w) {
  PrecoderSolution s;
  s.p_spc = Eigen::VectorXcd::Zero(n_leo);
  s.p_c = Eigen::VectorXcd::Zero(n_leo);
  s.p_priv.assign(k_lu, Eigen::VectorXcd::Zero(n_leo));
  s.w = std::move(w);
  s.c_spc.assign(k_lu, 0.0);
  s.c.assign(k_lu, 0.0);
  return s;
}

double PrecoderSolution::leo_power() const {
  double s = p_spc.squaredNorm() + p_c.squaredNorm();
  for (const auto& v : p_priv) s += v.squaredNorm();
  return s;
}

const Eigen::VectorXcd& PrecoderSolution::stream(int i) const {
  if (i < k_lu()) return p_priv[i];
  return i == k_lu() ? p_c : p_spc;
}

Eigen::VectorXcd& PrecoderSolution::stream(int i) {
  if (i < k_lu()) return p_priv[i];
  return i == k_lu() ? p_c : p_spc;
}

double effective_error_floor_lu(int k, const PrecoderSolution& p, const ChannelSet& ch) {
  return geo_term(ch.g[k], ch.mu_lu[k], p) + ch.sigma_e2 * p.leo_power() +
         second_leo(ch.has_second_leo() ? &ch.h_second[k] : nullptr, p);
}

double effective_error_floor_gu(int k, const PrecoderSolution& p, const ChannelSet& ch) {
  return geo_term(ch.f[k], ch.mu_gu[k], p) + ch.sigma_e2 * p.leo_power() +
         second_leo(ch.has_second_leo() ? &ch.z_second[k] : nullptr, p);
}

double sinr_spc_lu(int k, const PrecoderSolution& p, const ChannelSet& ch) {
  const auto& h = ch.h_hat[k];
  const double den = effective_error_floor_lu(k, p, ch) + quad(h, p.p_c) + private_sum(h, p) + ch.noise_variance;
  return quad(h, p.p_spc) / den;
}

double sinr_spc_gu(int k, const PrecoderSolution& p, const ChannelSet& ch) {
  const auto& z = ch.z_hat[k];
  const double den = effective_error_floor_gu(k, p, ch) + quad(z, p.p_c) + private_sum(z, p) + ch.noise_variance;
  return quad(z, p.p_spc) / den;
}

double sinr_common(int k, const PrecoderSolution& p, const ChannelSet& ch) {
  const auto& h = ch.h_hat[k];
  const double den = effective_error_floor_lu(k, p, ch) + private_sum(h, p) + ch.noise_variance;
  return quad(h, p.p_c) / den;
}

double sinr_private(int k, const PrecoderSolution& p, const ChannelSet& ch) {
  const auto& h = ch.h_hat[k];
  const double own = quad(h, p.p_priv[k]);
  const double den = effective_error_floor_lu(k, p, ch) + private_sum(h, p) - own + ch.noise_variance;
  return own / den;
}

double interference_leakage(int k, const PrecoderSolution& p, const ChannelSet& ch, bool use_true) {
  const auto& z = use_true ? ch.true_z[k] : ch.z_hat[k];
  double il = quad(z, p.p_c) + private_sum(z, p);
  if (ch.has_second_leo()) il += second_leo(&ch.z_second[k], p);
  return il;
}

RateBreakdown rates(const PrecoderSolution& p, const ChannelSet& ch, const std::vector<double>& demands) {
  const int kl = ch.k_lu();
  const int kg = ch.k_gu();
  if (p.k_lu() != kl || static_cast<int>(demands.size()) != kl)
    throw std::invalid_argument("rates: user count mismatch");
  RateBreakdown r;
  r.r_spc = std::numeric_limits<double>::infinity();
  r.r_c = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kl; ++k) {
    r.r_spc_at_lu.push_back(std::log2(1.0 + sinr_spc_lu(k, p, ch)));
    r.r_c_at_lu.push_back(std::log2(1.0 + sinr_common(k, p, ch)));
    r.r_p.push_back(std::log2(1.0 + sinr_private(k, p, ch)));
    r.r_spc = std::min(r.r_spc, r.r_spc_at_lu.back());
    r.r_c = std::min(r.r_c, r.r_c_at_lu.back());
  }
  for (int k = 0; k < kg; ++k) {
    r.r_spc_at_gu.push_back(std::log2(1.0 + sinr_spc_gu(k, p, ch)));
    r.r_spc = std::min(r.r_spc, r.r_spc_at_gu.back());
    r.il_at_gu.push_back(interference_leakage(k, p, ch, false));
    r.il_true_at_gu.push_back(interference_leakage(k, p, ch, true));
  }
  for (int k = 0; k < kl; ++k) {
    const double cs = k < static_cast<int>(p.c_spc.size()) ? p.c_spc[k] : 0.0;
    const double cc = k < static_cast<int>(p.c.size()) ? p.c[k] : 0.0;
    r.r_total.push_back(cs + cc + r.r_p[k]);
    r.served.push_back(std::min(demands[k], r.r_total.back()));
    r.objective += r.served.back();
  }
  return r;
}

}  // namespace geoleo
