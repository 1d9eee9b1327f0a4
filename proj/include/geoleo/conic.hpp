#pragma once

// Small dense conic programs: bounded scalars, one block-diagonal Hermitian
// PSD variable, linear rows and exponential-cone rows. Solved in-tree with a
// primal log-barrier path-following method.

#include <Eigen/Dense>

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace geoleo::conic {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// constant + sum(coef * scalar) + sum Re tr(C_b X_b)
struct AffineExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> scalar_terms;
  std::vector<std::pair<int, Eigen::MatrixXcd>> psd_terms;

  AffineExpr& add(int scalar, double coef) {
    scalar_terms.emplace_back(scalar, coef);
    return *this;
  }
  AffineExpr& add_trace(int block, Eigen::MatrixXcd coef) {
    psd_terms.emplace_back(block, std::move(coef));
    return *this;
  }
  AffineExpr& offset(double c) {
    constant += c;
    return *this;
  }
};

enum class RowSense { LessEqual, Equal };

/// expr <= 0 or expr == 0.
struct LinearRow {
  AffineExpr expr;
  RowSense sense = RowSense::LessEqual;
  std::string label;
};

/// exp(exponent) <= bound
struct ExpConeRow {
  AffineExpr exponent;
  AffineExpr bound;
  std::string label;
};

struct ScalarVar {
  double lower = -kInf;
  double upper = kInf;
  std::string name;
};

class ConicProblem {
 public:
  int add_scalar(double lower, double upper, std::string name = {});

  /// Partitions the PSD variable into Hermitian diagonal blocks. Entries
  /// outside the blocks are structurally zero.
  void set_psd_blocks(std::vector<int> sizes);

  void set_objective(AffineExpr objective) { objective_ = std::move(objective); }

  void add_less_equal(AffineExpr lhs, std::string label = {});
  void add_equal(AffineExpr lhs, std::string label = {});
  void add_exp_cone(AffineExpr exponent, AffineExpr bound, std::string label = {});

  const std::vector<ScalarVar>& scalars() const { return scalars_; }
  const std::vector<int>& psd_blocks() const { return psd_blocks_; }
  int psd_side() const;
  const AffineExpr& objective() const { return objective_; }
  const std::vector<LinearRow>& linear_rows() const { return linear_rows_; }
  const std::vector<ExpConeRow>& exp_rows() const { return exp_rows_; }

  /// Throws std::invalid_argument on undeclared references, shape mismatch
  /// or non-Hermitian coefficients.
  void validate() const;

 private:
  std::vector<ScalarVar> scalars_;
  std::vector<int> psd_blocks_;
  AffineExpr objective_;
  std::vector<LinearRow> linear_rows_;
  std::vector<ExpConeRow> exp_rows_;
};

enum class SolveStatus { Optimal, NearOptimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(SolveStatus status);

struct Tolerances {
  double primal = 1e-8;
  double dual = 1e-8;
  double gap = 1e-8;
  int max_newton_steps = 2000;
};

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

struct ConicPoint {
  std::vector<double> scalars;
  std::vector<Eigen::MatrixXcd> blocks;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  ConicPoint point;
  double objective = 0.0;
  Residuals residuals;
  int newton_steps = 0;
  std::string diagnostics;
};

/// Maximizes the objective. `warm_start`, when given, seeds the feasibility
/// phase; it need not be feasible.
ConicSolution solve(const ConicProblem& problem, const Tolerances& tolerances = {},
                    const ConicPoint* warm_start = nullptr);

/// Evaluates an affine expression at a point.
double evaluate(const AffineExpr& expr, const ConicPoint& point);

/// [[Re H, -Im H], [Im H, Re H]]. Rejects inputs that are not Hermitian to 1e-12.
Eigen::MatrixXd real_embed_hermitian(const Eigen::MatrixXcd& h);

/// Plain-text dump, one line per variable or row, for cross-checking with an
/// external solver. Format documented in docs/conic_format.md.
void write_problem(std::ostream& out, const ConicProblem& problem);

}  // namespace geoleo::conic
