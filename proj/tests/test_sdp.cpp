#include <cmath>

#include "doctest.h"
#include "qsr/error.hpp"
#include "qsr/registers.hpp"
#include "qsr/sdp.hpp"

using namespace qsr;
using sdp::Problem;
using sdp::Status;

namespace {

/// min Tr X s.t. X >= rho.
Problem dominating_trace(const Matrix& rho, sdp::Var* x) {
  Problem p;
  *x = p.hermitian(rho.rows());
  const int blk = p.add_block(rho.rows());
  p.add_term(blk, *x, 0, 0);
  p.add_constant(blk, -rho, 0, 0);
  p.minimize(p.trace(*x));
  return p;
}

/// max Re Tr Y s.t. [[a, Y], [Y^dagger, b]] >= 0, whose optimum is the fidelity.
Problem fidelity_program(const Matrix& a, const Matrix& b) {
  Problem p;
  const Index n = a.rows();
  const auto y = p.complex(n, n);
  const int blk = p.add_block(2 * n);
  p.add_constant(blk, a, 0, 0);
  p.add_constant(blk, b, n, n);
  p.add_term(blk, y, 0, n);
  p.minimize(-1.0 * p.trace(y));
  return p;
}

}  // namespace

TEST_CASE("smallest dominating PSD matrix of a projector") {
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1;
  sdp::Var x;
  const auto p = dominating_trace(rho, &x);
  const auto sol = p.solve();
  REQUIRE(sol.status == Status::optimal);
  CHECK(sol.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK((p.value(x, sol.y) - rho).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("scalar bound equals the largest eigenvalue") {
  const Matrix u = haar_unitary_matrix(3, 2);
  Eigen::Vector2d w(0.7, 0.3);
  const Matrix rho = u * w.cast<cplx>().asDiagonal() * u.adjoint();
  Problem p;
  const auto t = p.scalar();
  const int blk = p.add_block(2);
  p.add_term(blk, t, 0, 0, 1.0, Matrix::Identity(2, 2));
  p.add_constant(blk, -rho, 0, 0);
  p.minimize(p.trace(t));
  const auto sol = p.solve();
  REQUIRE(sol.status == Status::optimal);
  CHECK(sol.primal_objective == doctest::Approx(linalg::lambda_max(rho)).epsilon(1e-7));
  CHECK(sol.primal_objective == doctest::Approx(0.7).epsilon(1e-7));
}

TEST_CASE("contradictory constraints are reported infeasible") {
  Problem p;
  const auto x = p.hermitian(2);
  const int blk = p.add_block(2);
  p.add_term(blk, x, 0, 0);
  p.add_constant(blk, -Matrix::Identity(2, 2), 0, 0);
  p.add_nonnegative(sdp::LinearExpr(0.5) - p.trace(x));
  p.minimize(p.trace(x));
  const auto sol = p.solve();
  CHECK(sol.status == Status::infeasible);
  CHECK(sol.certificate_residual <= 1e-8);
}

TEST_CASE("unbounded programs are detected") {
  Problem p;
  const auto t = p.scalar();
  const int blk = p.add_block(1, true);
  p.add_term(blk, t, 0, 0);
  p.minimize(-1.0 * p.trace(t));
  CHECK(p.solve().status == Status::unbounded);
}

TEST_CASE("complex off-diagonal blocks reproduce the fidelity") {
  const SystemLayout l{{"A", 3}};
  for (std::uint64_t k = 0; k < 5; ++k) {
    const auto a = random_mixed_state(100 + k, l, 3);
    const auto b = random_mixed_state(200 + k, l, 3);
    const auto sol = fidelity_program(a.matrix(), b.matrix()).solve();
    REQUIRE(sol.status == Status::optimal);
    CHECK(-sol.primal_objective == doctest::Approx(fidelity(a, b)).epsilon(1e-6));
  }
}

TEST_CASE("rank-deficient data without a strict interior still yields an accurate best iterate") {
  const SystemLayout l{{"A", 3}};
  const auto a = random_mixed_state(300, l, 2);
  const auto b = random_mixed_state(301, l, 3);
  const auto sol = fidelity_program(a.matrix(), b.matrix()).solve();
  CHECK(std::abs(-sol.primal_objective - fidelity(a, b)) < 1e-6);
}

TEST_CASE("equality constraints: minimum eigenvalue program") {
  const auto c = random_mixed_state(7, {{"A", 4}}, 4).matrix();
  Problem p;
  const auto x = p.hermitian(4);
  const int blk = p.add_block(4);
  p.add_term(blk, x, 0, 0);
  p.add_equality(p.trace(x) - sdp::LinearExpr(1.0));
  p.minimize(p.trace_with(c, x));
  const auto sol = p.solve();
  REQUIRE(sol.status == Status::optimal);
  CHECK(sol.primal_objective == doctest::Approx(linalg::eigh(c).values(0)).epsilon(1e-7));
  const auto rep = p.check_feasibility(sol.y);
  CHECK(rep.max_equality_residual <= 1e-8);
}

TEST_CASE("feasibility report") {
  Problem p;
  const auto x = p.hermitian(2);
  const int blk = p.add_block(2);
  p.add_term(blk, x, 0, 0);
  p.add_constant(blk, -Matrix::Identity(2, 2), 0, 0);
  p.minimize(p.trace(x));
  const RealVector zero = RealVector::Zero(p.num_coordinates());
  CHECK(p.check_feasibility(zero).max_eigenvalue_violation == doctest::Approx(1.0));

  const auto sol = p.solve();
  REQUIRE(sol.status == Status::optimal);
  CHECK(p.check_feasibility(sol.y).max_eigenvalue_violation <= 1e-8);
  // shrinking the optimum towards zero increases the violation monotonically
  double last = -1;
  for (double s : {0.0, 0.01, 0.1, 0.3, 0.6}) {
    const double v = p.check_feasibility((1.0 - s) * sol.y).max_eigenvalue_violation;
    CHECK(v >= last - 1e-12);
    last = v;
  }
  CHECK(last > 0.5);
  CHECK_THROWS_AS(p.check_feasibility(RealVector::Zero(1)), DomainError);
}

TEST_CASE("weak duality and bit-for-bit reproducibility") {
  const auto rho = random_mixed_state(9, {{"A", 2}, {"B", 2}}, 3);
  Problem p;
  const auto x = p.hermitian(2);
  const int blk = p.add_block(4);
  p.add_term(blk, x, 0, 0, 1.0, Matrix::Identity(2, 2));
  p.add_constant(blk, -rho.matrix(), 0, 0);
  p.minimize(p.trace(x));
  const auto s1 = p.solve();
  const auto s2 = p.solve();
  REQUIRE(s1.status == Status::optimal);
  CHECK(s1.primal_objective >= s1.dual_objective - 1e-8);
  CHECK(s1.primal_objective == s2.primal_objective);
  CHECK((s1.y - s2.y).norm() == 0.0);
}

TEST_CASE("variable round trip through coordinates") {
  Problem p;
  const auto h = p.hermitian(3);
  const auto g = p.complex(2, 3);
  const Matrix hm = random_mixed_state(1, {{"A", 3}}, 3).matrix();
  const Matrix gm = haar_unitary_matrix(2, 3).topRows(2);
  const RealVector y = p.coordinates({{h, hm}, {g, gm}});
  CHECK((p.value(h, y) - hm).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((p.value(g, y) - gm).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(p.trace_with(hm, h).evaluate(y) == doctest::Approx((hm * hm).trace().real()));
  CHECK(p.imag_entry(h, 2, 0).evaluate(y) == doctest::Approx(hm(2, 0).imag()));
}

TEST_CASE("non-Hermitian diagonal terms are rejected") {
  Problem p;
  const auto g = p.complex(2, 2);
  const int blk = p.add_block(2);
  p.add_term(blk, g, 0, 0);
  p.minimize(p.trace(g));
  CHECK_THROWS_AS(p.solve(), DomainError);
}

TEST_CASE("SDPA dump lists every block and coordinate") {
  Problem p;
  const auto x = p.hermitian(2);
  const int blk = p.add_block(2);
  p.add_term(blk, x, 0, 0);
  p.add_equality(p.trace(x) - sdp::LinearExpr(1.0));
  p.minimize(p.trace(x));
  const std::string dump = p.to_sdpa();
  CHECK(dump.find("\n4\n2\n4 -2\n") != std::string::npos);
}
