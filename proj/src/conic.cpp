#include "geoleo/conic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace geoleo::conic {

int ConicProblem::add_scalar(double lower, double upper, std::string name) {
  if (lower > upper) throw std::invalid_argument("scalar '" + name + "': lower bound exceeds upper bound");
  scalars_.push_back({lower, upper, std::move(name)});
  return static_cast<int>(scalars_.size()) - 1;
}

void ConicProblem::set_psd_blocks(std::vector<int> sizes) {
  for (int s : sizes)
    if (s <= 0) throw std::invalid_argument("PSD block sizes must be positive");
  psd_blocks_ = std::move(sizes);
}

int ConicProblem::psd_side() const {
  int side = 0;
  for (int s : psd_blocks_) side += s;
  return side;
}

void ConicProblem::add_less_equal(AffineExpr lhs, std::string label) {
  linear_rows_.push_back({std::move(lhs), RowSense::LessEqual, std::move(label)});
}

void ConicProblem::add_equal(AffineExpr lhs, std::string label) {
  linear_rows_.push_back({std::move(lhs), RowSense::Equal, std::move(label)});
}

void ConicProblem::add_exp_cone(AffineExpr exponent, AffineExpr bound, std::string label) {
  exp_rows_.push_back({std::move(exponent), std::move(bound), std::move(label)});
}

namespace {

void check_expr(const ConicProblem& p, const AffineExpr& e, const std::string& where) {
  const int ns = static_cast<int>(p.scalars().size());
  const int nb = static_cast<int>(p.psd_blocks().size());
  if (!std::isfinite(e.constant)) throw std::invalid_argument(where + ": non-finite constant");
  for (const auto& [idx, coef] : e.scalar_terms) {
    if (idx < 0 || idx >= ns) throw std::invalid_argument(where + ": undeclared scalar " + std::to_string(idx));
    if (!std::isfinite(coef)) throw std::invalid_argument(where + ": non-finite coefficient");
  }
  for (const auto& [blk, c] : e.psd_terms) {
    if (blk < 0 || blk >= nb) throw std::invalid_argument(where + ": undeclared PSD block " + std::to_string(blk));
    const int n = p.psd_blocks()[blk];
    if (c.rows() != n || c.cols() != n) throw std::invalid_argument(where + ": PSD coefficient shape mismatch");
    if ((c - c.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, c.cwiseAbs().maxCoeff()))
      throw std::invalid_argument(where + ": PSD coefficient is not Hermitian");
  }
}

}  // namespace

void ConicProblem::validate() const {
  check_expr(*this, objective_, "objective");
  for (std::size_t i = 0; i < linear_rows_.size(); ++i)
    check_expr(*this, linear_rows_[i].expr, "row " + std::to_string(i) + " " + linear_rows_[i].label);
  for (std::size_t i = 0; i < exp_rows_.size(); ++i) {
    const auto where = "exp row " + std::to_string(i) + " " + exp_rows_[i].label;
    check_expr(*this, exp_rows_[i].exponent, where);
    check_expr(*this, exp_rows_[i].bound, where);
  }
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::NearOptimal: return "near-optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

Eigen::MatrixXd real_embed_hermitian(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("real_embed_hermitian: matrix is not square");
  if (h.size() > 0 && (h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("real_embed_hermitian: matrix is not Hermitian");
  const Eigen::Index n = h.rows();
  Eigen::MatrixXd out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  out.bottomRightCorner(n, n) = h.real();
  return out;
}

double evaluate(const AffineExpr& expr, const ConicPoint& point) {
  double v = expr.constant;
  for (const auto& [idx, coef] : expr.scalar_terms) v += coef * point.scalars.at(idx);
  for (const auto& [blk, c] : expr.psd_terms) v += (c * point.blocks.at(blk)).trace().real();
  return v;
}

// ---------------------------------------------------------------------------
// Barrier machinery over a flat real parameter vector.
// ---------------------------------------------------------------------------
namespace {

struct SparseAffine {
  double constant = 0.0;
  std::vector<int> idx;
  std::vector<double> val;

  double at(const Eigen::VectorXd& x) const {
    double v = constant;
    for (std::size_t k = 0; k < idx.size(); ++k) v += val[k] * x[idx[k]];
    return v;
  }
};

struct Triplet {
  int row, col;
  double value;
};

/// Flat layout: scalars, then per block n diagonal entries followed by
/// (re, im) pairs of the strict upper triangle.
class Layout {
 public:
  explicit Layout(const ConicProblem& p) : sizes_(p.psd_blocks()) {
    int off = static_cast<int>(p.scalars().size());
    for (int n : sizes_) {
      offsets_.push_back(off);
      off += n * n;
    }
    dim_ = off;
  }

  int dim() const { return dim_; }
  int block_count() const { return static_cast<int>(sizes_.size()); }
  int block_size(int b) const { return sizes_[b]; }
  int offset(int b) const { return offsets_[b]; }

  // Parameter index of the (i,j) entry: diagonal, or real/imag part for i<j.
  int diag(int b, int i) const { return offsets_[b] + i; }
  int offdiag_re(int b, int i, int j) const { return offsets_[b] + sizes_[b] + 2 * pair_index(b, i, j); }
  int offdiag_im(int b, int i, int j) const { return offdiag_re(b, i, j) + 1; }

  Eigen::MatrixXcd block(const Eigen::VectorXd& x, int b) const {
    const int n = sizes_[b];
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i) {
      m(i, i) = x[diag(b, i)];
      for (int j = i + 1; j < n; ++j) {
        const std::complex<double> v(x[offdiag_re(b, i, j)], x[offdiag_im(b, i, j)]);
        m(i, j) = v;
        m(j, i) = std::conj(v);
      }
    }
    return m;
  }

  void store(Eigen::VectorXd& x, int b, const Eigen::MatrixXcd& m) const {
    const int n = sizes_[b];
    for (int i = 0; i < n; ++i) {
      x[diag(b, i)] = m(i, i).real();
      for (int j = i + 1; j < n; ++j) {
        x[offdiag_re(b, i, j)] = m(i, j).real();
        x[offdiag_im(b, i, j)] = m(i, j).imag();
      }
    }
  }

  /// Real-embedded basis matrices of block b, as sparse triplets, one per
  /// parameter (in flat order starting at offset(b)).
  std::vector<std::vector<Triplet>> embedded_basis(int b) const {
    const int n = sizes_[b];
    std::vector<std::vector<Triplet>> basis(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) basis[i] = {{i, i, 1.0}, {n + i, n + i, 1.0}};
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const int re = offdiag_re(b, i, j) - offsets_[b];
        basis[re] = {{i, j, 1.0}, {j, i, 1.0}, {n + i, n + j, 1.0}, {n + j, n + i, 1.0}};
        // Hermitian E with E(i,j) = i, E(j,i) = -i.
        basis[re + 1] = {{i, n + j, -1.0}, {j, n + i, 1.0}, {n + i, j, 1.0}, {n + j, i, -1.0}};
      }
    return basis;
  }

 private:
  int pair_index(int b, int i, int j) const {
    const int n = sizes_[b];
    // strict upper triangle, row-major
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }

  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int dim_ = 0;
};

SparseAffine compile(const Layout& layout, const AffineExpr& e) {
  std::map<int, double> acc;
  for (const auto& [idx, coef] : e.scalar_terms) acc[idx] += coef;
  for (const auto& [b, c] : e.psd_terms) {
    const int n = layout.block_size(b);
    for (int i = 0; i < n; ++i) {
      acc[layout.diag(b, i)] += c(i, i).real();
      for (int j = i + 1; j < n; ++j) {
        acc[layout.offdiag_re(b, i, j)] += 2.0 * c(i, j).real();
        acc[layout.offdiag_im(b, i, j)] += 2.0 * c(i, j).imag();
      }
    }
  }
  SparseAffine out;
  out.constant = e.constant;
  for (const auto& [idx, v] : acc)
    if (v != 0.0) {
      out.idx.push_back(idx);
      out.val.push_back(v);
    }
  return out;
}

SparseAffine negate(SparseAffine a) {
  a.constant = -a.constant;
  for (auto& v : a.val) v = -v;
  return a;
}

SparseAffine single(int idx, double coef, double constant) {
  SparseAffine a;
  a.constant = constant;
  a.idx = {idx};
  a.val = {coef};
  return a;
}

struct PsdAtom {
  int block;
  std::vector<std::vector<Triplet>> basis;  // embedded basis per block parameter
};

/// Inequality system in "slack > 0" form plus linear equalities.
struct Barrier {
  const Layout* layout = nullptr;
  std::vector<SparseAffine> linear;               // slack = a.x + c > 0
  std::vector<std::pair<SparseAffine, SparseAffine>> exps;  // (u, y): log y - u > 0, y > 0
  std::vector<PsdAtom> psd;
  int shift = -1;  // phase-I variable index, or -1
  int dim = 0;

  double nu() const {
    double v = static_cast<double>(linear.size()) + 2.0 * static_cast<double>(exps.size());
    for (const auto& a : psd) v += layout->block_size(a.block);
    return v;
  }

  double shift_of(const Eigen::VectorXd& x) const { return shift >= 0 ? x[shift] : 0.0; }

  Eigen::MatrixXd embedded_block(const Eigen::VectorXd& x, int b) const {
    Eigen::MatrixXcd m = layout->block(x, b);
    if (shift >= 0) m += x[shift] * Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    Eigen::MatrixXd out(2 * m.rows(), 2 * m.rows());
    const Eigen::Index n = m.rows();
    out.topLeftCorner(n, n) = m.real();
    out.topRightCorner(n, n) = -m.imag();
    out.bottomLeftCorner(n, n) = m.imag();
    out.bottomRightCorner(n, n) = m.real();
    return out;
  }

  bool in_domain(const Eigen::VectorXd& x) const {
    const double s = shift_of(x);
    for (const auto& a : linear)
      if (!(a.at(x) + s > 0.0)) return false;
    for (const auto& [u, y] : exps) {
      const double yv = y.at(x) + s;
      if (!(yv > 0.0)) return false;
      if (!(std::log(yv) - u.at(x) > 0.0)) return false;
    }
    for (const auto& a : psd) {
      Eigen::LLT<Eigen::MatrixXd> llt(embedded_block(x, a.block));
      if (llt.info() != Eigen::Success) return false;
      if (llt.matrixLLT().diagonal().minCoeff() <= 0.0) return false;
    }
    return true;
  }

  /// Barrier value only; assumes in_domain(x).
  double value(const Eigen::VectorXd& x) const {
    const double s = shift_of(x);
    double f = 0.0;
    for (const auto& a : linear) f -= std::log(a.at(x) + s);
    for (const auto& [u, y] : exps) {
      const double yv = y.at(x) + s;
      f -= std::log(std::log(yv) - u.at(x)) + std::log(yv);
    }
    for (const auto& a : psd) {
      Eigen::LLT<Eigen::MatrixXd> llt(embedded_block(x, a.block));
      // -0.5 log det(embed X) == -log det X
      f -= llt.matrixLLT().diagonal().array().log().sum();
    }
    return f;
  }

  void add_grad(Eigen::VectorXd& g, const SparseAffine& a, double w, double s_coef) const {
    for (std::size_t k = 0; k < a.idx.size(); ++k) g[a.idx[k]] += w * a.val[k];
    if (shift >= 0) g[shift] += w * s_coef;
  }

  // H += w * (a (+ shift e)) (b (+ shift e))^T symmetric outer contribution
  void add_outer(Eigen::MatrixXd& h, const SparseAffine& a, double sa, const SparseAffine& b, double sb,
                 double w) const {
    auto for_each = [&](const SparseAffine& v, double sv, auto&& fn) {
      for (std::size_t k = 0; k < v.idx.size(); ++k) fn(v.idx[k], v.val[k]);
      if (shift >= 0 && sv != 0.0) fn(shift, sv);
    };
    for_each(a, sa, [&](int i, double ai) { for_each(b, sb, [&](int j, double bj) { h(i, j) += w * ai * bj; }); });
  }

  void derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& g, Eigen::MatrixXd& h) const {
    g.setZero(dim);
    h.setZero(dim, dim);
    const double s = shift_of(x);
    const double sc = shift >= 0 ? 1.0 : 0.0;
    for (const auto& a : linear) {
      const double v = a.at(x) + s;
      add_grad(g, a, -1.0 / v, sc);
      add_outer(h, a, sc, a, sc, 1.0 / (v * v));
    }
    for (const auto& [u, y] : exps) {
      const double yv = y.at(x) + s;
      const double r = std::log(yv) - u.at(x);
      // psi = -log r - log y, r = log y - u
      const double du = 1.0 / r;
      const double dy = -1.0 / (yv * r) - 1.0 / yv;
      const double huu = 1.0 / (r * r);
      const double huy = -1.0 / (yv * r * r);
      const double hyy = 1.0 / (yv * yv * r * r) + 1.0 / (yv * yv * r) + 1.0 / (yv * yv);
      for (std::size_t k = 0; k < u.idx.size(); ++k) g[u.idx[k]] += du * u.val[k];
      add_grad(g, y, dy, sc);
      add_outer(h, u, 0.0, u, 0.0, huu);
      add_outer(h, u, 0.0, y, sc, huy);
      add_outer(h, y, sc, u, 0.0, huy);
      add_outer(h, y, sc, y, sc, hyy);
    }
    for (const auto& a : psd) {
      const Eigen::MatrixXd emb = embedded_block(x, a.block);
      const Eigen::MatrixXd ginv = emb.llt().solve(Eigen::MatrixXd::Identity(emb.rows(), emb.cols()));
      const int off = layout->offset(a.block);
      // Parameter list: block parameters plus (optionally) the phase-I shift.
      std::vector<std::pair<int, const std::vector<Triplet>*>> params;
      for (std::size_t k = 0; k < a.basis.size(); ++k) params.emplace_back(off + static_cast<int>(k), &a.basis[k]);
      std::vector<Triplet> identity;
      if (shift >= 0) {
        for (int i = 0; i < emb.rows(); ++i) identity.push_back({i, i, 1.0});
        params.emplace_back(shift, &identity);
      }
      std::vector<Eigen::MatrixXd> m(params.size());
      for (std::size_t p = 0; p < params.size(); ++p) {
        double tr = 0.0;
        Eigen::MatrixXd mp = Eigen::MatrixXd::Zero(emb.rows(), emb.cols());
        for (const auto& t : *params[p].second) {
          tr += t.value * ginv(t.col, t.row);
          mp.noalias() += t.value * ginv.col(t.row) * ginv.row(t.col);
        }
        g[params[p].first] -= 0.5 * tr;
        m[p] = std::move(mp);
      }
      for (std::size_t p = 0; p < params.size(); ++p)
        for (std::size_t q = 0; q < params.size(); ++q) {
          double tr = 0.0;
          for (const auto& t : *params[q].second) tr += t.value * m[p](t.col, t.row);
          h(params[p].first, params[q].first) += 0.5 * tr;
        }
    }
  }
};

struct CenteringResult {
  bool converged = false;
  bool stalled = false;
  int steps = 0;
};

/// Orthonormal basis of {d : a d = 0}.
Eigen::MatrixXd null_basis(const Eigen::MatrixXd& a, int n) {
  if (a.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.transpose());
  qr.setThreshold(1e-12);
  const Eigen::Index rank = qr.rank();
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return q.rightCols(n - rank);
}

/// Minimizes t * c.x + barrier(x) from a strictly feasible x, moving only
/// inside the column span of `basis`.
CenteringResult center(const Barrier& bar, const Eigen::MatrixXd& basis, const Eigen::VectorXd& cost, double t,
                       Eigen::VectorXd& x, int max_steps, double* decrement_out = nullptr) {
  CenteringResult res;
  const int n = bar.dim;
  const bool full = basis.cols() == n;
  Eigen::VectorXd g(n);
  Eigen::MatrixXd h(n, n);
  auto merit = [&](const Eigen::VectorXd& v) { return t * cost.dot(v) + bar.value(v); };
  for (int it = 0; it < max_steps; ++it) {
    bar.derivatives(x, g, h);
    g += t * cost;
    Eigen::MatrixXd hr = full ? h : Eigen::MatrixXd(basis.transpose() * h * basis);
    const Eigen::VectorXd gr = full ? g : Eigen::VectorXd(basis.transpose() * g);
    const double scale = std::max(1.0, hr.diagonal().cwiseAbs().maxCoeff());
    hr.diagonal().array() += 1e-14 * scale;
    Eigen::VectorXd dz = hr.ldlt().solve(-gr);
    if (!dz.allFinite()) {
      hr.diagonal().array() += 1e-8 * scale;
      dz = hr.ldlt().solve(-gr);
    }
    ++res.steps;
    if (!dz.allFinite()) {
      res.stalled = true;
      return res;
    }
    const Eigen::VectorXd dx = full ? dz : Eigen::VectorXd(basis * dz);
    const double decrement = -gr.dot(dz);
    if (decrement_out) *decrement_out = decrement;
    if (decrement * 0.5 <= 1e-11) {
      res.converged = true;
      return res;
    }
    double alpha = 1.0;
    while (alpha > 1e-16 && !bar.in_domain(x + alpha * dx)) alpha *= 0.5;
    const double f0 = merit(x);
    const double slope = g.dot(dx);
    while (alpha > 1e-16 && merit(x + alpha * dx) > f0 + 0.25 * alpha * slope) alpha *= 0.5;
    if (alpha <= 1e-16) {
      // Merit can no longer be resolved in double precision.
      res.stalled = true;
      return res;
    }
    x += alpha * dx;
  }
  return res;
}

double psd_min_eig(const Layout& layout, const Eigen::VectorXd& x, int b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(layout.block(x, b), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const Tolerances& tol, const ConicPoint* warm_start) {
  problem.validate();
  const Layout layout(problem);
  const int ns = static_cast<int>(problem.scalars().size());

  Barrier bar;
  bar.layout = &layout;
  bar.dim = layout.dim();
  std::vector<SparseAffine> equalities;
  for (const auto& row : problem.linear_rows()) {
    SparseAffine a = compile(layout, row.expr);
    if (row.sense == RowSense::Equal)
      equalities.push_back(std::move(a));
    else
      bar.linear.push_back(negate(std::move(a)));
  }
  for (int i = 0; i < ns; ++i) {
    const auto& v = problem.scalars()[i];
    if (std::isfinite(v.lower)) bar.linear.push_back(single(i, 1.0, -v.lower));
    if (std::isfinite(v.upper)) bar.linear.push_back(single(i, -1.0, v.upper));
  }
  for (const auto& row : problem.exp_rows())
    bar.exps.emplace_back(compile(layout, row.exponent), compile(layout, row.bound));
  for (int b = 0; b < layout.block_count(); ++b) bar.psd.push_back({b, layout.embedded_basis(b)});

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(layout.dim());
  const SparseAffine obj = compile(layout, problem.objective());
  for (std::size_t k = 0; k < obj.idx.size(); ++k) cost[obj.idx[k]] = -obj.val[k];  // minimize -objective

  // Starting point.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(layout.dim());
  if (warm_start) {
    for (int i = 0; i < ns && i < static_cast<int>(warm_start->scalars.size()); ++i) x[i] = warm_start->scalars[i];
    for (int b = 0; b < layout.block_count() && b < static_cast<int>(warm_start->blocks.size()); ++b)
      if (warm_start->blocks[b].rows() == layout.block_size(b)) layout.store(x, b, warm_start->blocks[b]);
  }
  for (int i = 0; i < ns; ++i) {
    const auto& v = problem.scalars()[i];
    if (std::isfinite(v.lower) && std::isfinite(v.upper))
      x[i] = std::clamp(x[i], v.lower, v.upper);
  }
  for (auto& v : x)
    if (!std::isfinite(v)) v = 0.0;

  ConicSolution sol;
  std::ostringstream diag;

  // Equality rows live in the flat space.
  const int m_eq = static_cast<int>(equalities.size());
  Eigen::MatrixXd eq_a = Eigen::MatrixXd::Zero(m_eq, layout.dim());
  Eigen::VectorXd eq_b(m_eq);
  for (int r = 0; r < m_eq; ++r) {
    for (std::size_t k = 0; k < equalities[r].idx.size(); ++k) eq_a(r, equalities[r].idx[k]) = equalities[r].val[k];
    eq_b[r] = -equalities[r].constant;
  }

  if (m_eq > 0) {
    const Eigen::VectorXd r = eq_b - eq_a * x;
    x += eq_a.transpose() * (eq_a * eq_a.transpose()).completeOrthogonalDecomposition().solve(r);
  }

  // ---- Phase I: minimize a uniform shift s until every inequality holds strictly.
  if (!bar.in_domain(x)) {
    Barrier p1 = bar;
    p1.dim = layout.dim() + 1;
    p1.shift = layout.dim();
    Eigen::MatrixXd a1 = Eigen::MatrixXd::Zero(m_eq, p1.dim);
    a1.leftCols(layout.dim()) = eq_a;
    const Eigen::MatrixXd basis1 = null_basis(a1, p1.dim);
    double need = 0.0;
    for (const auto& a : bar.linear) need = std::max(need, -a.at(x));
    for (const auto& [u, y] : bar.exps) need = std::max(need, std::exp(std::min(u.at(x), 600.0)) - y.at(x));
    for (int b = 0; b < layout.block_count(); ++b) need = std::max(need, -psd_min_eig(layout, x, b));
    // Keeps the phase-I problem bounded below. The row is shifted like every
    // other one, so it reads 2s + 1 > 0.
    p1.linear.push_back(single(p1.shift, 1.0, 1.0));
    Eigen::VectorXd y(p1.dim);
    y << x, need + 1.0;
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(p1.dim);
    c1[p1.shift] = 1.0;
    double t = 1.0;
    bool feasible = false;
    for (int outer = 0; outer < 60; ++outer) {
      const auto cr = center(p1, basis1, c1, t, y, 200);
      sol.newton_steps += cr.steps;
      if (y[p1.shift] < 0.0) {
        feasible = true;
        break;
      }
      if (p1.nu() / t < 1e-12 || cr.stalled) break;
      t *= 10.0;
    }
    if (!feasible) {
      sol.status = SolveStatus::Infeasible;
      diag << "phase I terminated with shift " << y[p1.shift];
      sol.diagnostics = diag.str();
      return sol;
    }
    x = y.head(layout.dim());
  }

  const Eigen::MatrixXd basis = null_basis(eq_a, layout.dim());
  if (!bar.in_domain(x)) {
    sol.status = SolveStatus::NumericalFailure;
    sol.diagnostics = "phase I returned a point outside the barrier domain";
    return sol;
  }

  // ---- Phase II: path following on t * (-objective) + barrier.
  const double nu = bar.nu();
  double t = 1.0;
  bool stalled = false;
  double decrement = 0.0;
  for (int outer = 0; outer < 80; ++outer) {
    const auto cr = center(bar, basis, cost, t, x, 200, &decrement);
    sol.newton_steps += cr.steps;
    const double objv = -cost.dot(x) + obj.constant;
    if (!std::isfinite(objv) || std::abs(objv) > 1e15 || x.cwiseAbs().maxCoeff() > 1e15) {
      sol.status = SolveStatus::Unbounded;
      sol.diagnostics = "objective or iterate diverged";
      return sol;
    }
    if (cr.stalled) {
      stalled = true;
      diag << "centering stalled at t=" << t << "; ";
    }
    if (stalled || nu / t <= tol.gap * std::max(1.0, std::abs(objv)) || sol.newton_steps > tol.max_newton_steps)
      break;
    t *= 10.0;
  }

  // ---- Extraction and residuals.
  sol.point.scalars.assign(x.data(), x.data() + ns);
  for (int b = 0; b < layout.block_count(); ++b) sol.point.blocks.push_back(layout.block(x, b));
  sol.objective = -cost.dot(x) + obj.constant;

  sol.residuals.gap = nu / t;
  // Distance of the implied dual point from the central path, in the local norm.
  sol.residuals.dual = std::sqrt(std::max(0.0, decrement)) / t;
  double primal = 0.0;
  if (m_eq > 0) primal = (eq_a * x - eq_b).cwiseAbs().maxCoeff();
  for (const auto& a : bar.linear) primal = std::max(primal, -a.at(x));
  for (const auto& [u, y] : bar.exps) primal = std::max(primal, std::exp(u.at(x)) - y.at(x));
  for (int b = 0; b < layout.block_count(); ++b) primal = std::max(primal, -psd_min_eig(layout, x, b));
  sol.residuals.primal = std::max(0.0, primal);

  const double scale = std::max(1.0, std::abs(sol.objective));
  const bool gap_ok = sol.residuals.gap <= tol.gap * scale;
  const bool primal_ok = sol.residuals.primal <= tol.primal;
  const bool dual_ok = sol.residuals.dual <= tol.dual * scale;
  if (gap_ok && primal_ok && dual_ok && !stalled)
    sol.status = SolveStatus::Optimal;
  else if (sol.residuals.gap <= 1e-5 * scale && primal_ok)
    sol.status = SolveStatus::NearOptimal;
  else
    sol.status = SolveStatus::NumericalFailure;
  diag << "gap=" << sol.residuals.gap << " dual=" << sol.residuals.dual << " primal=" << sol.residuals.primal
       << " newton=" << sol.newton_steps;
  sol.diagnostics = diag.str();
  return sol;
}

void write_problem(std::ostream& out, const ConicProblem& problem) {
  auto expr = [&](const AffineExpr& e) {
    std::ostringstream s;
    s.precision(17);
    s << e.constant;
    for (const auto& [i, c] : e.scalar_terms) s << " +" << c << "*x" << i;
    for (const auto& [b, c] : e.psd_terms) {
      s << " +tr(X" << b << ",[";
      for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < c.cols(); ++j)
          s << (i || j ? " " : "") << c(i, j).real() << (c(i, j).imag() < 0 ? "" : "+") << c(i, j).imag() << "i";
      s << "])";
    }
    return s.str();
  };
  out.precision(17);
  out << "conic 1\n";
  for (std::size_t i = 0; i < problem.scalars().size(); ++i) {
    const auto& v = problem.scalars()[i];
    out << "var x" << i << ' ' << v.lower << ' ' << v.upper << ' ' << (v.name.empty() ? "-" : v.name) << '\n';
  }
  for (std::size_t b = 0; b < problem.psd_blocks().size(); ++b)
    out << "psd X" << b << ' ' << problem.psd_blocks()[b] << '\n';
  out << "max " << expr(problem.objective()) << '\n';
  for (const auto& r : problem.linear_rows())
    out << (r.sense == RowSense::Equal ? "eq " : "le ") << (r.label.empty() ? "-" : r.label) << ' ' << expr(r.expr)
        << '\n';
  for (const auto& r : problem.exp_rows())
    out << "exp " << (r.label.empty() ? "-" : r.label) << ' ' << expr(r.exponent) << " | " << expr(r.bound) << '\n';
}

}  // namespace geoleo::conic
