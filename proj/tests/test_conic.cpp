#include "doctest.h"

#include "geoleo/conic.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <sstream>

using namespace geoleo::conic;
using cd = std::complex<double>;

namespace {

Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cd(nd(rng), nd(rng));
  return 0.5 * (a + a.adjoint());
}

}  // namespace

TEST_CASE("single exponential-cone row") {
  ConicProblem p;
  const int t = p.add_scalar(-kInf, kInf, "t");
  p.set_objective(AffineExpr{}.add(t, 1.0));
  p.add_exp_cone(AffineExpr{}.add(t, 1.0), AffineExpr{}.offset(5.0));
  const auto sol = solve(p);
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.point.scalars[0] == doctest::Approx(std::log(5.0)).epsilon(1e-7));
}

TEST_CASE("PSD variational characterization") {
  ConicProblem p;
  p.set_psd_blocks({2});
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2, 2);
  c(0, 0) = 3.0;
  c(1, 1) = 1.0;
  p.set_objective(AffineExpr{}.add_trace(0, c));
  p.add_less_equal(AffineExpr{}.add_trace(0, Eigen::MatrixXcd::Identity(2, 2)).offset(-1.0), "trace");
  const auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(sol.point.blocks[0](0, 0).real() == doctest::Approx(1.0).epsilon(1e-6));

  SUBCASE("complex Hermitian cost") {
    ConicProblem q;
    q.set_psd_blocks({3});
    std::mt19937_64 rng(7);
    const Eigen::MatrixXcd h = random_hermitian(rng, 3);
    q.set_objective(AffineExpr{}.add_trace(0, h));
    q.add_less_equal(AffineExpr{}.add_trace(0, Eigen::MatrixXcd::Identity(3, 3)).offset(-1.0));
    const auto s = solve(q);
    REQUIRE(s.status == SolveStatus::Optimal);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    CHECK(s.objective == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-7));
  }
}

TEST_CASE("linear program with an equality row") {
  ConicProblem p;
  const int x = p.add_scalar(-10, 10, "x");
  const int y = p.add_scalar(-10, 10, "y");
  p.set_objective(AffineExpr{}.add(x, 1.0));
  p.add_equal(AffineExpr{}.add(x, 1.0).add(y, 1.0).offset(-1.0), "sum");
  p.add_less_equal(AffineExpr{}.add(y, -1.0).offset(0.25), "y>=0.25");
  const auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.point.scalars[x] == doctest::Approx(0.75).epsilon(1e-7));
  CHECK(sol.point.scalars[x] + sol.point.scalars[y] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("infeasible rows are reported") {
  ConicProblem p;
  const int x = p.add_scalar(-10, 10, "x");
  p.set_objective(AffineExpr{}.add(x, 1.0));
  p.add_less_equal(AffineExpr{}.add(x, 1.0).offset(1.0));   // x <= -1
  p.add_less_equal(AffineExpr{}.add(x, -1.0).offset(1.0));  // x >= 1
  CHECK(solve(p).status == SolveStatus::Infeasible);
}

TEST_CASE("scaling the objective keeps the maximizer") {
  auto build = [](double scale) {
    ConicProblem p;
    p.set_psd_blocks({2});
    const int a = p.add_scalar(-20, 20, "a");
    Eigen::MatrixXcd q(2, 2);
    q << 2.0, cd(0.5, 0.3), cd(0.5, -0.3), 1.0;
    // exp(a) <= 1 + tr(Q X), tr X <= 2, maximize a - 0.1 tr X
    p.add_exp_cone(AffineExpr{}.add(a, 1.0), AffineExpr{}.offset(1.0).add_trace(0, q));
    p.add_less_equal(AffineExpr{}.add_trace(0, Eigen::MatrixXcd::Identity(2, 2)).offset(-2.0));
    p.set_objective(AffineExpr{}.add(a, scale).add_trace(0, -0.1 * scale * Eigen::MatrixXcd::Identity(2, 2)));
    return p;
  };
  const auto s1 = solve(build(1.0));
  const auto s7 = solve(build(7.0));
  REQUIRE(s1.status == SolveStatus::Optimal);
  REQUIRE(s7.status == SolveStatus::Optimal);
  CHECK(s1.point.scalars[0] == doctest::Approx(s7.point.scalars[0]).epsilon(1e-6));
  CHECK((s1.point.blocks[0] - s7.point.blocks[0]).norm() < 1e-5);
  CHECK(s7.objective == doctest::Approx(7.0 * s1.objective).epsilon(1e-7));

  SUBCASE("warm restart from the solution does not degrade") {
    const auto again = solve(build(1.0), {}, &s1.point);
    REQUIRE(again.status == SolveStatus::Optimal);
    CHECK(again.objective >= s1.objective - 1e-7);
  }
}

TEST_CASE("malformed problems are rejected") {
  ConicProblem p;
  p.set_psd_blocks({2});
  Eigen::MatrixXcd bad(2, 2);
  bad << 1.0, 2.0, 0.0, 1.0;
  p.set_objective(AffineExpr{}.add_trace(0, bad));
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  ConicProblem q;
  q.set_objective(AffineExpr{}.add(3, 1.0));
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("real embedding of Hermitian matrices") {
  CHECK(real_embed_hermitian(Eigen::MatrixXcd::Identity(2, 2)).isApprox(Eigen::MatrixXd::Identity(4, 4)));

  Eigen::MatrixXcd h(2, 2);
  h << 0.0, cd(0, 1), cd(0, -1), 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(real_embed_hermitian(h));
  const Eigen::Vector4d ev = es.eigenvalues();
  CHECK(ev[0] == doctest::Approx(-1.0));
  CHECK(ev[1] == doctest::Approx(-1.0));
  CHECK(ev[2] == doctest::Approx(1.0));
  CHECK(ev[3] == doctest::Approx(1.0));

  Eigen::MatrixXcd skew(2, 2);
  skew << 1.0, 2.0, 3.0, 1.0;
  CHECK_THROWS_AS(real_embed_hermitian(skew), std::invalid_argument);

  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 5;
    const Eigen::MatrixXcd a = random_hermitian(rng, n);
    const Eigen::MatrixXcd x = random_hermitian(rng, n);
    const double lhs = (real_embed_hermitian(a) * real_embed_hermitian(x)).trace();
    const double rhs = 2.0 * (a * x).trace().real();
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("debug dump lists every row") {
  ConicProblem p;
  const int t = p.add_scalar(-1, 1, "t");
  p.set_psd_blocks({1});
  p.set_objective(AffineExpr{}.add(t, 1.0));
  p.add_exp_cone(AffineExpr{}.add(t, 1.0), AffineExpr{}.offset(2.0), "cap");
  p.add_less_equal(AffineExpr{}.add_trace(0, Eigen::MatrixXcd::Identity(1, 1)).offset(-1.0), "trace");
  std::ostringstream out;
  write_problem(out, p);
  const std::string s = out.str();
  CHECK(s.find("var x0 -1 1 t") != std::string::npos);
  CHECK(s.find("psd X0 1") != std::string::npos);
  CHECK(s.find("exp cap") != std::string::npos);
  CHECK(s.find("le trace") != std::string::npos);
}
