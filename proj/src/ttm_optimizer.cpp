#include "geoleo/optimizer.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace geoleo {

namespace {

using conic::AffineExpr;

constexpr double kLn2 = std::numbers::ln2;
constexpr double kAuxBound = 40.0;
constexpr double kPortionBound = 60.0;
constexpr double kRateFloor = -200.0;
constexpr double kRateCap = 200.0;

bool stream_enabled(int i, int k_lu, const DesignSpec& spec) {
  if (i < k_lu) return true;
  return i == k_lu ? spec.common : spec.super_common;
}

bool leakage_enforced(const DesignSpec& spec) { return spec.enforce_il && std::isfinite(spec.i_th); }

AffineExpr trace_expr(const BlockDiagonal& m, const Subproblem& sp) {
  AffineExpr e;
  e.offset(m.scalar);
  for (std::size_t b = 0; b < sp.block_stream.size(); ++b)
    e.add_trace(static_cast<int>(b), m.blocks[sp.block_stream[b]]);
  return e;
}

// tr(M X) - e^{anchor}(aux - anchor + 1) <= 0
AffineExpr linearized(const BlockDiagonal& m, const Subproblem& sp, int aux, double anchor) {
  const double a = std::clamp(anchor, -kAuxBound, kAuxBound);
  const double ea = std::exp(a);
  AffineExpr e = trace_expr(m, sp);
  e.add(aux, -ea);
  e.offset(ea * (a - 1.0));
  return e;
}

std::vector<double> values_of(const conic::ConicSolution& sol, const std::vector<int>& idx) {
  std::vector<double> out;
  for (int i : idx) out.push_back(i >= 0 ? sol.point.scalars[i] : 0.0);
  return out;
}

conic::ConicPoint warm_point(const CccpState& s, const Subproblem& sp, const DesignSpec& spec) {
  conic::ConicPoint pt;
  pt.scalars.assign(sp.problem.scalars().size(), 0.0);
  auto put = [&](const std::vector<int>& idx, const std::vector<double>& v) {
    for (std::size_t i = 0; i < idx.size() && i < v.size(); ++i)
      if (idx[i] >= 0) pt.scalars[idx[i]] = v[i];
  };
  put(sp.a, s.a);
  put(sp.b, s.b);
  put(sp.d, s.d);
  put(sp.f1, s.f1);
  put(sp.f2, s.f2);
  put(sp.q1, s.q1);
  put(sp.q2, s.q2);
  put(sp.v, s.v);
  put(sp.c_spc, s.c_spc);
  put(sp.c, s.c);
  const int kl = static_cast<int>(spec.demands.size());
  std::vector<double> rate(kl);
  for (int k = 0; k < kl; ++k) {
    double r = 0.0;
    if (k < static_cast<int>(s.c_spc.size())) r += s.c_spc[k];
    if (k < static_cast<int>(s.c.size())) r += s.c[k];
    if (k < static_cast<int>(s.q2.size()) && k < static_cast<int>(s.v.size())) r += (s.q2[k] - s.v[k]) / kLn2;
    rate[k] = r;
  }
  if (spec.objective == DesignObjective::Mmf) {
    pt.scalars[sp.t[0]] = *std::min_element(rate.begin(), rate.end());
  } else {
    for (int k = 0; k < kl; ++k)
      pt.scalars[sp.t[k]] = spec.objective == DesignObjective::Ttm ? std::min(rate[k], spec.demands[k]) : rate[k];
  }
  for (int s_idx : sp.block_stream) pt.blocks.push_back(s.x.at(s_idx));
  return pt;
}

CccpState state_from(const conic::ConicSolution& sol, const Subproblem& sp, int k_lu, int n) {
  CccpState s;
  s.x.assign(k_lu + 2, Eigen::MatrixXcd::Zero(n, n));
  for (std::size_t b = 0; b < sp.block_stream.size(); ++b) {
    const Eigen::MatrixXcd& xb = sol.point.blocks[b];
    s.x[sp.block_stream[b]] = 0.5 * (xb + xb.adjoint());
  }
  s.a = values_of(sol, sp.a);
  s.b = values_of(sol, sp.b);
  s.d = values_of(sol, sp.d);
  s.f1 = values_of(sol, sp.f1);
  s.f2 = values_of(sol, sp.f2);
  s.q1 = values_of(sol, sp.q1);
  s.q2 = values_of(sol, sp.q2);
  s.v = values_of(sol, sp.v);
  s.c_spc = values_of(sol, sp.c_spc);
  s.c = values_of(sol, sp.c);
  s.objective = sol.objective;
  return s;
}

std::vector<Eigen::MatrixXcd> outer_blocks(const PrecoderSolution& p, const DesignSpec& spec) {
  std::vector<Eigen::MatrixXcd> x;
  const int kl = p.k_lu();
  for (int i = 0; i < kl + 2; ++i) {
    const auto& v = p.stream(i);
    x.push_back(stream_enabled(i, kl, spec) ? Eigen::MatrixXcd(v * v.adjoint())
                                            : Eigen::MatrixXcd::Zero(v.size(), v.size()));
  }
  return x;
}

double max_design_leakage(const PrecoderSolution& p, const LiftedMatrices& m) {
  double worst = 0.0;
  for (const auto& bb : m.Bbar) worst = std::max(worst, bb.form(p));
  return worst;
}

void scale(PrecoderSolution& p, double factor) {
  for (int i = 0; i < p.k_lu() + 2; ++i) p.stream(i) *= factor;
}

void zero_disabled(PrecoderSolution& p, const DesignSpec& spec) {
  for (int i = 0; i < p.k_lu() + 2; ++i)
    if (!stream_enabled(i, p.k_lu(), spec)) p.stream(i).setZero();
}

}  // namespace

int Subproblem::aux_count() const {
  auto count = [](const std::vector<int>& v) { return static_cast<int>(std::count_if(v.begin(), v.end(), [](int i) { return i >= 0; })); };
  return count(a) + count(b) + count(d) + count(f1) + count(f2) + count(q1) + count(q2) + count(v);
}

double design_value(const RateBreakdown& r, const DesignSpec& spec) {
  switch (spec.objective) {
    case DesignObjective::Ttm: return r.objective;
    case DesignObjective::Stm: {
      double s = 0.0;
      for (double x : r.r_total) s += x;
      return s;
    }
    case DesignObjective::Mmf: return r.r_total.empty() ? 0.0 : *std::min_element(r.r_total.begin(), r.r_total.end());
  }
  return 0.0;
}

Subproblem assemble_subproblem(const CccpState& anchors, const LiftedMatrices& m, const DesignSpec& spec) {
  const int kl = static_cast<int>(spec.demands.size());
  const int kg = static_cast<int>(m.A.size());
  if (static_cast<int>(m.D.size()) != kl) throw std::invalid_argument("assemble_subproblem: demand count mismatch");
  const int n = static_cast<int>(m.D.front().blocks.front().rows());
  const bool spc = spec.super_common;
  const bool com = spec.common;
  auto anchor = [](const std::vector<double>& v, int i) {
    if (i >= static_cast<int>(v.size()) || !std::isfinite(v[i]))
      throw SolverError("assemble_subproblem: missing or non-finite anchor");
    return v[i];
  };

  Subproblem sp;
  auto& p = sp.problem;
  for (int i = 0; i < kl + 2; ++i)
    if (stream_enabled(i, kl, spec)) sp.block_stream.push_back(i);
  p.set_psd_blocks(std::vector<int>(sp.block_stream.size(), n));

  auto vars = [&](std::vector<int>& idx, int count, bool on, double lo, double hi, const char* name) {
    idx.assign(count, -1);
    if (!on) return;
    for (int i = 0; i < count; ++i) idx[i] = p.add_scalar(lo, hi, std::string(name) + std::to_string(i));
  };
  vars(sp.a, kg, spc, -kAuxBound, kAuxBound, "a");
  vars(sp.b, kg, spc, -kAuxBound, kAuxBound, "b");
  vars(sp.d, kl, spc, -kAuxBound, kAuxBound, "d");
  vars(sp.f1, kl, spc, -kAuxBound, kAuxBound, "f1_");
  vars(sp.f2, kl, com, -kAuxBound, kAuxBound, "f2_");
  vars(sp.q1, kl, com, -kAuxBound, kAuxBound, "q1_");
  vars(sp.q2, kl, true, -kAuxBound, kAuxBound, "q2_");
  vars(sp.v, kl, true, -kAuxBound, kAuxBound, "v");
  vars(sp.c_spc, kl, spc, 0.0, kPortionBound, "cspc");
  vars(sp.c, kl, com, 0.0, kPortionBound, "c");
  if (spec.objective == DesignObjective::Mmf) {
    sp.t = {p.add_scalar(kRateFloor, kRateCap, "t")};
  } else {
    for (int k = 0; k < kl; ++k) {
      const double cap = spec.objective == DesignObjective::Ttm ? spec.demands[k] : kRateCap;
      sp.t.push_back(p.add_scalar(kRateFloor, cap, "t" + std::to_string(k)));
    }
  }

  AffineExpr obj;
  for (int t : sp.t) obj.add(t, 1.0);
  p.set_objective(obj);

  auto portion_sum = [&](const std::vector<int>& idx, double scale) {
    AffineExpr e;
    for (int i : idx) e.add(i, scale);
    return e;
  };

  if (spc) {
    for (int g = 0; g < kg; ++g) {
      p.add_exp_cone(AffineExpr{}.add(sp.a[g], 1.0), trace_expr(m.A[g], sp), "expA" + std::to_string(g));
      p.add_less_equal(linearized(m.B[g], sp, sp.b[g], anchor(anchors.b, g)), "linB" + std::to_string(g));
      p.add_less_equal(portion_sum(sp.c_spc, kLn2).add(sp.a[g], -1.0).add(sp.b[g], 1.0), "spc_gu" + std::to_string(g));
    }
  }
  for (int k = 0; k < kl; ++k) {
    const std::string ks = std::to_string(k);
    if (spc) {
      p.add_exp_cone(AffineExpr{}.add(sp.d[k], 1.0), trace_expr(m.D[k], sp), "expD" + ks);
      p.add_less_equal(linearized(m.F[k], sp, sp.f1[k], anchor(anchors.f1, k)), "linF" + ks);
      p.add_less_equal(portion_sum(sp.c_spc, kLn2).add(sp.d[k], -1.0).add(sp.f1[k], 1.0), "spc_lu" + ks);
    }
    if (com) {
      p.add_exp_cone(AffineExpr{}.add(sp.f2[k], 1.0), trace_expr(m.F[k], sp), "expF" + ks);
      p.add_less_equal(linearized(m.Q[k], sp, sp.q1[k], anchor(anchors.q1, k)), "linQ" + ks);
      p.add_less_equal(portion_sum(sp.c, kLn2).add(sp.f2[k], -1.0).add(sp.q1[k], 1.0), "common" + ks);
    }
    p.add_exp_cone(AffineExpr{}.add(sp.q2[k], 1.0), trace_expr(m.Q[k], sp), "expQ" + ks);
    p.add_less_equal(linearized(m.V[k], sp, sp.v[k], anchor(anchors.v, k)), "linV" + ks);

    AffineExpr rate;
    rate.add(spec.objective == DesignObjective::Mmf ? sp.t[0] : sp.t[k], 1.0);
    if (spc) rate.add(sp.c_spc[k], -1.0);
    if (com) rate.add(sp.c[k], -1.0);
    rate.add(sp.q2[k], -1.0 / kLn2).add(sp.v[k], 1.0 / kLn2);
    p.add_less_equal(rate, "rate" + ks);
  }
  if (leakage_enforced(spec)) {
    for (int g = 0; g < kg; ++g) {
      AffineExpr il = trace_expr(m.Bbar[g], sp);
      il.offset(-spec.i_th);
      p.add_less_equal(il, "leak" + std::to_string(g));
    }
  }
  AffineExpr power;
  for (std::size_t b = 0; b < sp.block_stream.size(); ++b)
    power.add_trace(static_cast<int>(b), Eigen::MatrixXcd::Identity(n, n));
  power.offset(-spec.p_leo);
  p.add_less_equal(power, "power");
  return sp;
}

Portions recover_rate_portions(double r_spc, double r_c, const std::vector<double>& r_p,
                               const std::vector<double>& demands, DesignObjective objective) {
  const int kl = static_cast<int>(r_p.size());
  Portions out{std::vector<double>(kl, 0.0), std::vector<double>(kl, 0.0)};
  if (kl == 0) return out;
  const double spc_cap = std::max(r_spc, 0.0);
  double cap = spc_cap + std::max(r_c, 0.0);
  std::vector<double> add(kl, 0.0);
  switch (objective) {
    case DesignObjective::Ttm:
      for (int j = 0; j < kl; ++j) {
        const double a = std::min(std::max(demands[j] - r_p[j], 0.0), cap);
        add[j] = a;
        cap -= a;
      }
      add[0] += cap;
      break;
    case DesignObjective::Stm:
      add[0] = cap;
      break;
    case DesignObjective::Mmf: {
      // Water level L with Σ max(L - r_p, 0) = cap.
      std::vector<double> sorted = r_p;
      std::sort(sorted.begin(), sorted.end());
      int top = 0;
      double used = 0.0;
      while (top + 1 < kl) {
        const double next = used + (top + 1) * (sorted[top + 1] - sorted[top]);
        if (next > cap) break;
        used = next;
        ++top;
      }
      const double level = sorted[top] + (cap - used) / (top + 1);
      double total = 0.0;
      for (int j = 0; j < kl; ++j) total += add[j] = std::max(level - r_p[j], 0.0);
      if (total > cap && total > 0.0)
        for (double& a : add) a *= cap / total;
      break;
    }
  }
  double spc_left = spc_cap;
  for (int j = 0; j < kl; ++j) {
    const double from_spc = std::min(add[j], spc_left);
    out.c_spc[j] = from_spc;
    spc_left -= from_spc;
    out.c[j] = std::max(add[j] - from_spc, 0.0);
  }
  return out;
}

Portions recover_rate_portions(const PrecoderSolution& p, const ChannelSet& ch, const std::vector<double>& demands,
                               DesignObjective objective) {
  PrecoderSolution q = p;
  q.c_spc.assign(p.k_lu(), 0.0);
  q.c.assign(p.k_lu(), 0.0);
  const RateBreakdown r = rates(q, ch, demands);
  return recover_rate_portions(r.r_spc, r.r_c, r.r_p, demands, objective);
}

RateBreakdown evaluate_design(PrecoderSolution& p, const ChannelSet& ch, const DesignSpec& spec) {
  p.c_spc.assign(p.k_lu(), 0.0);
  p.c.assign(p.k_lu(), 0.0);
  RateBreakdown r = rates(p, ch, spec.demands);
  const Portions q = recover_rate_portions(r.r_spc, r.r_c, r.r_p, spec.demands, spec.objective);
  p.c_spc = q.c_spc;
  p.c = q.c;
  r.objective = 0.0;
  for (int k = 0; k < p.k_lu(); ++k) {
    r.r_total[k] = q.c_spc[k] + q.c[k] + r.r_p[k];
    r.served[k] = std::min(spec.demands[k], r.r_total[k]);
    r.objective += r.served[k];
  }
  return r;
}

double lifted_value(const std::vector<Eigen::MatrixXcd>& x, const LiftedMatrices& m, const DesignSpec& spec) {
  const int kl = static_cast<int>(m.D.size());
  auto lr = [&](const BlockDiagonal& num, const BlockDiagonal& den) { return std::log2(num.form(x) / den.form(x)); };
  double r_spc = 0.0;
  double r_c = 0.0;
  if (spec.super_common) {
    r_spc = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < m.A.size(); ++g) r_spc = std::min(r_spc, lr(m.A[g], m.B[g]));
    for (int k = 0; k < kl; ++k) r_spc = std::min(r_spc, lr(m.D[k], m.F[k]));
  }
  if (spec.common) {
    r_c = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kl; ++k) r_c = std::min(r_c, lr(m.F[k], m.Q[k]));
  }
  RateBreakdown r;
  r.r_p.resize(kl);
  for (int k = 0; k < kl; ++k) r.r_p[k] = lr(m.Q[k], m.V[k]);
  const Portions q = recover_rate_portions(r_spc, r_c, r.r_p, spec.demands, spec.objective);
  r.r_total.resize(kl);
  for (int k = 0; k < kl; ++k) {
    r.r_total[k] = q.c_spc[k] + q.c[k] + r.r_p[k];
    r.objective += std::min(spec.demands[k], r.r_total[k]);
  }
  return design_value(r, spec);
}

std::pair<CccpState, std::vector<PrecoderSolution>> initial_state(const ChannelSet& ch,
                                                                  const std::vector<Eigen::VectorXcd>& w,
                                                                  const LiftedMatrices& m, const DesignSpec& spec,
                                                                  const std::vector<PrecoderSolution>& warm) {
  const int n = ch.n_leo();
  const int kl = ch.k_lu();
  PrecoderSolution p0 = PrecoderSolution::zeros(n, kl, w);

  Eigen::MatrixXcd hs = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& h : ch.h_hat) hs += h * h.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hs);
  const Eigen::VectorXcd dominant = es.eigenvectors().col(n - 1);
  if (spec.super_common) p0.p_spc = std::sqrt(0.6 * spec.p_leo) * dominant;
  if (spec.common) p0.p_c = std::sqrt(0.2 * spec.p_leo) * dominant;
  for (int k = 0; k < kl; ++k) {
    const double norm = ch.h_hat[k].norm();
    if (norm > 0.0) p0.p_priv[k] = std::sqrt(0.2 * spec.p_leo / kl) * ch.h_hat[k] / norm;
  }
  if (leakage_enforced(spec)) {
    const double il = max_design_leakage(p0, m);
    if (il > spec.i_th) scale(p0, std::sqrt(0.5 * spec.i_th / il));
  }
  double best = design_value(evaluate_design(p0, ch, spec), spec);

  std::vector<PrecoderSolution> considered;
  for (const PrecoderSolution& cand : warm) {
    PrecoderSolution pw = cand;
    pw.w = w;
    zero_disabled(pw, spec);
    const double pwr = pw.leo_power();
    if (pwr > spec.p_leo) scale(pw, std::sqrt(spec.p_leo / pwr));
    if (leakage_enforced(spec)) {
      const double il = max_design_leakage(pw, m);
      if (il > spec.i_th) scale(pw, std::sqrt(spec.i_th / il) * (1.0 - 1e-9));
    }
    const double v = design_value(evaluate_design(pw, ch, spec), spec);
    if (v > best) {
      best = v;
      p0 = std::move(pw);
    }
    considered.push_back(cand);
  }
  considered.insert(considered.begin(), p0);

  CccpState s;
  s.x = outer_blocks(p0, spec);
  auto logs = [&](const std::vector<BlockDiagonal>& mats, bool on) {
    std::vector<double> out;
    if (!on) return out;
    for (const auto& mat : mats) out.push_back(std::log(mat.form(s.x)));
    return out;
  };
  s.a = logs(m.A, spec.super_common);
  s.b = logs(m.B, spec.super_common);
  s.d = logs(m.D, spec.super_common);
  s.f1 = logs(m.F, spec.super_common);
  s.f2 = logs(m.F, spec.common);
  s.q1 = logs(m.Q, spec.common);
  s.q2 = logs(m.Q, true);
  s.v = logs(m.V, true);
  if (spec.super_common) s.c_spc = p0.c_spc;
  if (spec.common) s.c = p0.c;
  s.objective = best;
  return {s, considered};
}

CccpState cccp_solve(const LiftedMatrices& m, const DesignSpec& spec, const CccpState& init, SolveTrace& trace) {
  const int kl = static_cast<int>(spec.demands.size());
  const int n = static_cast<int>(m.D.front().blocks.front().rows());
  CccpState state = init;
  trace.objectives.push_back(init.objective);
  trace.convergence = "max-iterations";
  double prev = init.objective;
  for (int it = 1; it <= spec.m1; ++it) {
    const Subproblem sp = assemble_subproblem(state, m, spec);
    const conic::ConicPoint warm = warm_point(state, sp, spec);
    const conic::ConicSolution sol = conic::solve(sp.problem, {}, &warm);
    trace.solver_status.push_back(conic::to_string(sol.status));
    if (sol.status != conic::SolveStatus::Optimal && sol.status != conic::SolveStatus::NearOptimal) {
      if (it == 1) {
        std::ostringstream msg;
        msg << "CCCP subproblem 1 returned " << conic::to_string(sol.status) << " (" << sol.diagnostics
            << "); anchors b/f1/q1/v:";
        for (const auto* v : {&state.b, &state.f1, &state.q1, &state.v})
          for (double x : *v) msg << ' ' << x;
        throw SolverError(msg.str());
      }
      trace.convergence = "solver-failure";
      break;
    }
    state = state_from(sol, sp, kl, n);
    state.iteration = it;
    trace.objectives.push_back(state.objective);
    if (std::abs(state.objective - prev) <= spec.epsilon) {
      trace.convergence = "tolerance";
      break;
    }
    prev = state.objective;
  }
  return state;
}

PrecoderSolution randomize_and_rescale(const CccpState& state, const ChannelSet& ch,
                                       const std::vector<Eigen::VectorXcd>& w, const DesignSpec& spec,
                                       const std::vector<PrecoderSolution>& extra, SolveTrace& trace) {
  const int n = ch.n_leo();
  const int kl = ch.k_lu();
  std::vector<int> active;
  for (int i = 0; i < kl + 2; ++i)
    if (stream_enabled(i, kl, spec)) active.push_back(i);

  std::vector<Eigen::MatrixXcd> roots(kl + 2, Eigen::MatrixXcd::Zero(n, n));
  PrecoderSolution dominant = PrecoderSolution::zeros(n, kl, w);
  for (int i : active) {
    const Eigen::MatrixXcd x = 0.5 * (state.x[i] + state.x[i].adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(x);
    const Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(0.0);
    roots[i] = es.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
    dominant.stream(i) = roots[i].col(n - 1);
  }

  const bool il_on = leakage_enforced(spec);
  const LiftedMatrices m = build_lifted_matrices(ch, w);
  auto rescale = [&](PrecoderSolution& p) {
    double factor = 1.0;
    const double pw = p.leo_power();
    if (pw > spec.p_leo) factor = std::min(factor, std::sqrt(spec.p_leo / pw));
    if (il_on) {
      // The relaxed problem's own leakage rows always apply as well.
      double worst = max_design_leakage(p, m);
      for (int g = 0; g < ch.k_gu(); ++g) {
        if (spec.il_rescale != IlRescale::True) worst = std::max(worst, interference_leakage(g, p, ch, false));
        if (spec.il_rescale != IlRescale::Estimated) worst = std::max(worst, interference_leakage(g, p, ch, true));
      }
      if (worst > spec.i_th) factor = std::min(factor, std::sqrt(spec.i_th / worst));
    }
    if (factor < 1.0) scale(p, factor);
    return factor;
  };

  PrecoderSolution best;
  double best_value = -std::numeric_limits<double>::infinity();
  int index = 0;
  auto consider = [&](PrecoderSolution cand) {
    cand.w = w;
    zero_disabled(cand, spec);
    const double factor = rescale(cand);
    const double v = design_value(evaluate_design(cand, ch, spec), spec);
    if (v > best_value) {
      best_value = v;
      best = std::move(cand);
      trace.best_candidate = index;
      trace.rescale_factor = factor;
    }
    ++index;
  };

  consider(dominant);
  for (const auto& e : extra) consider(e);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  PrecoderSolution cand = PrecoderSolution::zeros(n, kl, w);
  Eigen::VectorXcd f(n);
  for (int draw = 0; draw < spec.m2; ++draw) {
    for (int i : active) {
      for (int j = 0; j < n; ++j) {
        const double re = nd(rng);
        const double im = nd(rng);
        f[j] = {re, im};
      }
      cand.stream(i) = roots[i] * f;
    }
    consider(cand);
  }

  trace.candidates = index;
  trace.power = best.leo_power();
  trace.il_estimated = 0.0;
  trace.il_true = 0.0;
  for (int g = 0; g < ch.k_gu(); ++g) {
    trace.il_estimated = std::max(trace.il_estimated, interference_leakage(g, best, ch, false));
    trace.il_true = std::max(trace.il_true, interference_leakage(g, best, ch, true));
  }
  trace.extracted_objective = best_value;
  return best;
}

PrecoderSolution design_precoders(const ChannelSet& ch, const std::vector<Eigen::VectorXcd>& w, const DesignSpec& spec,
                                  SolveTrace& trace, const std::vector<PrecoderSolution>& warm) {
  const int n = ch.n_leo();
  const int kl = ch.k_lu();
  if (static_cast<int>(spec.demands.size()) != kl) throw std::invalid_argument("design_precoders: demand count");
  const bool no_demand = std::all_of(spec.demands.begin(), spec.demands.end(), [](double t) { return t <= 0.0; });
  if (spec.objective == DesignObjective::Ttm && no_demand) {
    trace.convergence = "degenerate";
    trace.objectives = {0.0};
    return PrecoderSolution::zeros(n, kl, w);
  }
  const LiftedMatrices m = build_lifted_matrices(ch, w);
  auto [init, starts] = initial_state(ch, w, m, spec, warm);
  const CccpState state = cccp_solve(m, spec, init, trace);
  trace.relaxed_exact_objective = lifted_value(state.x, m, spec);
  double mass = 0.0;
  for (const auto& x : state.x) mass += x.trace().real();
  if (mass <= 1e-12) {
    trace.convergence = "degenerate";
    PrecoderSolution zero = PrecoderSolution::zeros(n, kl, w);
    evaluate_design(zero, ch, spec);
    return zero;
  }
  return randomize_and_rescale(state, ch, w, spec, starts, trace);
}

}  // namespace geoleo
