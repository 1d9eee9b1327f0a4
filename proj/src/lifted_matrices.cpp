#include "geoleo/optimizer.hpp"

namespace geoleo {

double BlockDiagonal::form(const std::vector<Eigen::MatrixXcd>& x) const {
  double s = scalar;
  for (std::size_t i = 0; i < blocks.size() && i < x.size(); ++i) s += (blocks[i] * x[i]).trace().real();
  return s;
}

double BlockDiagonal::form(const PrecoderSolution& p) const {
  double s = scalar;
  const int k = p.k_lu();
  for (int i = 0; i < k + 2 && i < static_cast<int>(blocks.size()); ++i) {
    const auto& v = p.stream(i);
    s += v.dot(blocks[i] * v).real();
  }
  return s;
}

Eigen::MatrixXcd BlockDiagonal::dense(bool with_scalar) const {
  Eigen::Index n = with_scalar ? 1 : 0;
  for (const auto& b : blocks) n += b.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  Eigen::Index off = 0;
  if (with_scalar) out(0, 0) = scalar, off = 1;
  for (const auto& b : blocks) {
    out.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return out;
}

LiftedMatrices build_lifted_matrices(const ChannelSet& ch, const std::vector<Eigen::VectorXcd>& w) {
  const int n = ch.n_leo();
  const int kl = ch.k_lu();
  const int nb = kl + 2;
  const int spc = kl + 1;
  const int com = kl;
  for (const auto& v : ch.h_hat)
    if (v.size() != n) throw std::invalid_argument("build_lifted_matrices: LU channel size mismatch");
  for (const auto& v : ch.z_hat)
    if (v.size() != n) throw std::invalid_argument("build_lifted_matrices: GU channel size mismatch");

  const Eigen::MatrixXcd floor = ch.sigma_e2 * Eigen::MatrixXcd::Identity(n, n);
  auto geo = [&](const Eigen::VectorXcd& link, int mu) {
    return w.empty() ? 0.0 : std::norm(link.dot(w.at(mu)));
  };

  LiftedMatrices m;
  for (int g = 0; g < ch.k_gu(); ++g) {
    Eigen::MatrixXcd base = floor;
    if (ch.has_second_leo()) base += ch.z_second[g] * ch.z_second[g].adjoint();
    const Eigen::MatrixXcd zz = ch.z_hat[g] * ch.z_hat[g].adjoint();
    BlockDiagonal a{geo(ch.f[g], ch.mu_gu[g]) + ch.noise_variance, std::vector<Eigen::MatrixXcd>(nb, base + zz)};
    BlockDiagonal b = a;
    b.blocks[spc] = base;
    BlockDiagonal bbar{0.0, std::vector<Eigen::MatrixXcd>(nb, base + zz)};
    bbar.blocks[spc] = base;
    m.A.push_back(std::move(a));
    m.B.push_back(std::move(b));
    m.Bbar.push_back(std::move(bbar));
  }
  for (int k = 0; k < kl; ++k) {
    Eigen::MatrixXcd base = floor;
    if (ch.has_second_leo()) base += ch.h_second[k] * ch.h_second[k].adjoint();
    const Eigen::MatrixXcd hh = ch.h_hat[k] * ch.h_hat[k].adjoint();
    BlockDiagonal d{geo(ch.g[k], ch.mu_lu[k]) + ch.noise_variance, std::vector<Eigen::MatrixXcd>(nb, base + hh)};
    BlockDiagonal f = d;
    f.blocks[spc] = base;
    BlockDiagonal q = f;
    q.blocks[com] = base;
    BlockDiagonal v = q;
    v.blocks[k] = base;
    m.D.push_back(std::move(d));
    m.F.push_back(std::move(f));
    m.Q.push_back(std::move(q));
    m.V.push_back(std::move(v));
  }
  return m;
}

}  // namespace geoleo
