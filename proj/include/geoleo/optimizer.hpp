#pragma once

// Traffic-aware precoder design: lifted quadratic forms, the convex
// subproblem solved at every CCCP step, Gaussian randomization with
// feasibility rescaling, and rate-portion recovery.
//
// Streams are stacked [p_1 .. p_K, p_c, p_spc]; the lifted variable is
// X = blkdiag(X_1, .., X_{K+2}) with X_i standing in for p_i p_i^H.

#include "geoleo/conic.hpp"
#include "geoleo/scenario.hpp"
#include "geoleo/signal.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoleo {

/// scalar ⊕ blocks; the scalar sits in front of the blocks when densified.
struct BlockDiagonal {
  double scalar = 0.0;
  std::vector<Eigen::MatrixXcd> blocks;

  /// scalar + Σ Re tr(M_i X_i)
  double form(const std::vector<Eigen::MatrixXcd>& x) const;
  /// Same with X_i = p_i p_i^H.
  double form(const PrecoderSolution& p) const;
  /// blkdiag(scalar, blocks) when with_scalar, else blkdiag(blocks).
  Eigen::MatrixXcd dense(bool with_scalar = true) const;
};

struct LiftedMatrices {
  std::vector<BlockDiagonal> A, B, Bbar;  // per GU; Bbar has no scalar
  std::vector<BlockDiagonal> D, F, Q, V;  // per LU
};

LiftedMatrices build_lifted_matrices(const ChannelSet& ch, const std::vector<Eigen::VectorXcd>& w);

enum class DesignObjective { Ttm, Stm, Mmf };

struct DesignSpec {
  std::vector<double> demands;
  double i_th = 1.0;
  double p_leo = 20.0;
  double epsilon = 1e-6;
  int m1 = 20;
  int m2 = 5000;
  DesignObjective objective = DesignObjective::Ttm;
  bool super_common = true;
  bool common = true;
  bool enforce_il = true;
  IlRescale il_rescale = IlRescale::Both;
  std::uint64_t seed = 1;
};

/// Value of the design objective for precoders whose portions were recovered.
double design_value(const RateBreakdown& r, const DesignSpec& spec);

struct CccpState {
  std::vector<Eigen::MatrixXcd> x;  // K+2 blocks; disabled streams stay zero
  std::vector<double> a, b;          // per GU
  std::vector<double> d, f1, f2, q1, q2, v;  // per LU
  std::vector<double> c_spc, c;
  double objective = 0.0;
  int iteration = 0;
};

struct SolveTrace {
  std::vector<double> objectives;  // D^(0), D^(1), ...
  std::string convergence;         // tolerance | max-iterations | solver-failure | degenerate
  std::vector<std::string> solver_status;
  int candidates = 0;
  int best_candidate = -1;
  double rescale_factor = 1.0;
  double il_estimated = 0.0;
  double il_true = 0.0;
  double power = 0.0;
  double extracted_objective = 0.0;
  double relaxed_exact_objective = 0.0;  // lifted_value at the final X

  int iterations() const { return objectives.empty() ? 0 : static_cast<int>(objectives.size()) - 1; }
  double relaxed_objective() const { return objectives.empty() ? 0.0 : objectives.back(); }
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Conic program of one CCCP step plus the scalar index map.
struct Subproblem {
  conic::ConicProblem problem;
  std::vector<int> block_stream;  // PSD block -> stream index
  std::vector<int> a, b, d, f1, f2, q1, q2, v, c_spc, c, t;

  /// Aux count, 2K_G + 6K_L with every stream enabled.
  int aux_count() const;
};

/// Builds the subproblem linearized at the anchors b, f1, q1, v of `anchors`.
/// Anchors are clamped to [-40, 40] before exponentiation.
Subproblem assemble_subproblem(const CccpState& anchors, const LiftedMatrices& m, const DesignSpec& spec);

/// Heuristic feasible starting point; the best-scoring `warm` precoder
/// (fitted to the budgets) replaces it when it scores higher. Returns the
/// state, then the chosen start followed by the raw warm precoders.
std::pair<CccpState, std::vector<PrecoderSolution>> initial_state(const ChannelSet& ch,
                                                                  const std::vector<Eigen::VectorXcd>& w,
                                                                  const LiftedMatrices& m, const DesignSpec& spec,
                                                                  const std::vector<PrecoderSolution>& warm = {});

/// CCCP iterations until |D^(m) - D^(m-1)| <= ε or m >= M1.
CccpState cccp_solve(const LiftedMatrices& m, const DesignSpec& spec, const CccpState& init, SolveTrace& trace);

/// Best of the dominant-eigenvector candidate, `extra` candidates and M2
/// Gaussian draws, each rescaled for power and leakage.
PrecoderSolution randomize_and_rescale(const CccpState& state, const ChannelSet& ch,
                                       const std::vector<Eigen::VectorXcd>& w, const DesignSpec& spec,
                                       const std::vector<PrecoderSolution>& extra, SolveTrace& trace);

struct Portions {
  std::vector<double> c_spc;
  std::vector<double> c;
};

/// Splits R_spc and R_c among users for a fixed precoder.
Portions recover_rate_portions(double r_spc, double r_c, const std::vector<double>& r_p,
                               const std::vector<double>& demands, DesignObjective objective = DesignObjective::Ttm);
Portions recover_rate_portions(const PrecoderSolution& p, const ChannelSet& ch, const std::vector<double>& demands,
                               DesignObjective objective = DesignObjective::Ttm);

/// Design objective of a lifted point with exact log-ratio rates and
/// recovered portions.
double lifted_value(const std::vector<Eigen::MatrixXcd>& x, const LiftedMatrices& m, const DesignSpec& spec);

/// Rates with recovered portions written back into p.
RateBreakdown evaluate_design(PrecoderSolution& p, const ChannelSet& ch, const DesignSpec& spec);

/// Whole pipeline: initialization, CCCP, randomization. Every starting
/// precoder also competes as a randomization candidate.
PrecoderSolution design_precoders(const ChannelSet& ch, const std::vector<Eigen::VectorXcd>& w, const DesignSpec& spec,
                                  SolveTrace& trace, const std::vector<PrecoderSolution>& warm = {});

}  // namespace geoleo
