#include "hsd/divergence.hpp"
#include "hsd/error.hpp"
#include "hsd/sdp.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace hsd;
using namespace hsd::sdp;

namespace {

HermitianOperator one() { return HermitianOperator::identity(1); }

HermitianOperator diag2(double a, double b) {
  RealVector v(2);
  v << a, b;
  return HermitianOperator::diagonal(v);
}

}  // namespace

TEST_CASE("problem validation") {
  ProblemBuilder ok;
  ok.variable("x", 1).objective(one(), "x").constraint("hi", constant(one()) - var("x"));
  CHECK_NOTHROW(ok.build());

  ProblemBuilder undeclared;
  undeclared.variable("x", 1).objective(one(), "x").constraint("c", var("y"));
  CHECK_THROWS_AS(undeclared.build(), InputError);

  ProblemBuilder duplicate;
  duplicate.variable("x", 1).variable("x", 2);
  CHECK_THROWS_AS(duplicate.build(), InputError);

  ProblemBuilder mismatch;
  mismatch.variable("x", 4).variable("y", 2).constraint("c", var("x") + var("y"));
  CHECK_THROWS_AS(mismatch.build(), InputError);

  ProblemBuilder bad_chain;
  bad_chain.variable("x", 3).constraint("c", var("x").partial_transpose_b(2));
  CHECK_THROWS_AS(bad_chain.build(), InputError);

  ProblemBuilder bad_weight;
  bad_weight.variable("x", 2).objective(one(), "x");
  CHECK_THROWS_AS(bad_weight.build(), InputError);

  ProblemBuilder bad_constant;
  bad_constant.variable("x", 2).constraint("c", var("x") - constant(HermitianOperator::identity(3)));
  CHECK_THROWS_AS(bad_constant.build(), InputError);
}

TEST_CASE("problem listings") {
  const Problem p = ppt_primal_problem(werner_state({1.0, 2}).op() - werner_state({0.0, 2}).op());
  CHECK(p.constraints().size() == 4);
  CHECK(p.variables().size() == 1);
  const std::string dump = p.dump();
  for (const char* s : {"maximize", "M : 4x4 free", "Y1", "Y2", "Y3", "Y4", "partial_transpose_b[2](M)"}) {
    CHECK(dump.find(s) != std::string::npos);
  }
}

TEST_CASE("small problems with known optima") {
  ProblemBuilder lp;
  lp.variable("x", 1).objective(one(), "x").constraint("lo", var("x")).constraint("hi", constant(one()) - var("x"));
  Solution s = solve(lp.build());
  REQUIRE(s.optimal());
  CHECK(s.primal_value == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.dual_value == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.gap <= 1e-7);

  ProblemBuilder box;
  box.variable("X", 2).objective(diag2(1, -1), "X").constraint("lo", var("X")).constraint(
      "hi", constant(HermitianOperator::identity(2)) - var("X"));
  s = solve(box.build());
  REQUIRE(s.optimal());
  CHECK(s.primal_value == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(oracle::max_abs_diff(s.primal("X").matrix(), diag2(1, 0).matrix()) < 1e-5);

  const Solution w = solve(ppt_primal_problem(werner_state({1.0, 2}).op() - werner_state({0.0, 2}).op()));
  REQUIRE(w.optimal());
  CHECK(w.primal_value == doctest::Approx(2.0 / 3.0).epsilon(1e-7));
}

TEST_CASE("complex instances against eigenvalue oracles") {
  oracle::Rng rng(31);
  for (int k = 0; k < 20; ++k) {
    const HermitianOperator c(oracle::random_hermitian(rng, 2));
    // max Tr[CX], 0 <= X <= I: sum of positive eigenvalues.
    ProblemBuilder box;
    box.variable("X", 2).objective(c, "X").constraint("lo", var("X")).constraint(
        "hi", constant(HermitianOperator::identity(2)) - var("X"));
    SolverOptions tight;
    tight.tolerance = 1e-10;
    const Solution s = solve(box.build(), tight);
    REQUIRE(s.optimal());
    CHECK(std::abs(s.primal_value - oracle::positive_sum(c.matrix())) <= 1e-8 * (1 + std::abs(s.primal_value)));

    // max Tr[CX], X >= 0, Tr X = 1 (equality path): largest eigenvalue.
    ProblemBuilder simplex;
    simplex.variable("X", 2, Cone::psd).objective(c, "X").constraint(
        "t", var("X").partial_trace_b(2) - constant(one()), Relation::zero);
    const Solution t = solve(simplex.build());
    REQUIRE(t.optimal());
    CHECK(std::abs(t.primal_value - oracle::max_eig(c.matrix())) <= 1e-7);
    // Dual of the trace constraint is the optimal value itself.
    // Multiplier of Tr X - 1 = 0 is minus the optimal value.
    CHECK(std::abs(t.dual("t").matrix()(0, 0).real() + t.primal_value) <= 1e-6);

    // Same as a minimization of -C: value is -max eig.
    ProblemBuilder mini;
    mini.sense(Sense::minimize).variable("X", 2, Cone::psd).objective(-c, "X").constraint(
        "t", var("X").partial_trace_b(2) - constant(one()), Relation::zero);
    const Solution m = solve(mini.build());
    REQUIRE(m.optimal());
    CHECK(std::abs(m.primal_value + oracle::max_eig(c.matrix())) <= 1e-7);
    CHECK(m.dual_value <= m.primal_value + 1e-6);
  }
}

TEST_CASE("weak duality and determinism") {
  oracle::Rng rng(32);
  for (int k = 0; k < 10; ++k) {
    const DensityMatrix r = oracle::random_state(rng, 2, 2), s = oracle::random_state(rng, 2, 2);
    const Problem p = ppt_primal_problem(r.op() - 1.5 * s.op());
    const SolverOptions opt;
    const Solution a = solve(p, opt), b = solve(p, opt);
    REQUIRE(a.optimal());
    CHECK(a.dual_value >= a.primal_value - 10 * opt.tolerance);
    CHECK(a.iterations == b.iterations);
    CHECK(a.primal_value == b.primal_value);
    CHECK(a.dual_value == b.dual_value);
  }
}

TEST_CASE("infeasible and unbounded problems") {
  ProblemBuilder infeasible;
  infeasible.variable("x", 1).objective(one(), "x").constraint("lo", var("x")).constraint(
      "hi", constant(-1.0 * one()) - var("x"));
  CHECK(solve(infeasible.build()).status == Status::infeasible);

  ProblemBuilder unbounded;
  unbounded.variable("x", 1).objective(one(), "x").constraint("lo", var("x"));
  CHECK(solve(unbounded.build()).status == Status::infeasible);

  ProblemBuilder tiny;
  tiny.variable("x", 1).objective(one(), "x").constraint("hi", constant(one()) - var("x"));
  SolverOptions bad;
  bad.tolerance = 1e-2;
  CHECK_THROWS_AS(solve(tiny.build(), bad), InputError);
  bad.tolerance = 1e-12;
  CHECK_THROWS_AS(solve(tiny.build(), bad), InputError);
}

TEST_CASE("iteration limit reports numerical_limit") {
  SolverOptions opt;
  opt.max_iterations = 1;
  const Solution s = solve(ppt_primal_problem(werner_state({1.0, 3}).op() - werner_state({0.0, 3}).op()), opt);
  CHECK(s.status == Status::numerical_limit);
}

TEST_CASE("adjoint chains") {
  CHECK(adjoint_of({SuperOp::partial_transpose_b(2)}) == SuperOpChain{SuperOp::partial_transpose_b(2)});
  CHECK(adjoint_of({SuperOp::partial_trace_b(3)}) == SuperOpChain{SuperOp::tensor_identity_right(3)});
  CHECK(adjoint_of({SuperOp::scale(2.5)}) == SuperOpChain{SuperOp::scale(2.5)});

  oracle::Rng rng(33);
  const std::vector<SuperOpChain> chains = {
      {SuperOp::partial_transpose_b(2), SuperOp::scale(-0.7)},
      {SuperOp::partial_trace_b(2), SuperOp::tensor_identity_right(3), SuperOp::negate()},
      {SuperOp::tensor_identity_right(2), SuperOp::partial_transpose_b(2), SuperOp::partial_trace_b(3)},
  };
  for (const SuperOpChain& chain : chains) {
    for (int k = 0; k < 5; ++k) {
      const ComplexMatrix x = oracle::gaussian(rng, 6, 6);
      const std::size_t m = output_size(chain, 6);
      const ComplexMatrix y = oracle::gaussian(rng, static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
      const Complex lhs = (sdp::apply(chain, x).adjoint() * y).trace();
      const Complex rhs = (x.adjoint() * sdp::apply(adjoint_of(chain), y)).trace();
      CHECK(std::abs(lhs - rhs) < 1e-10);
    }
  }
}

TEST_CASE("literal PPT dual program matches the primal") {
  oracle::Rng rng(34);
  for (int k = 0; k < 5; ++k) {
    const DensityMatrix r = oracle::random_state(rng, 2, 2), s = oracle::random_state(rng, 2, 2);
    const HermitianOperator delta = (r.op() - 1.2 * s.op()).with_shape(BipartiteShape{2, 2});
    const Solution p = solve(ppt_primal_problem(delta));
    const Solution d = solve(ppt_dual_problem(delta));
    REQUIRE(p.optimal());
    REQUIRE(d.optimal());
    CHECK(std::abs(p.primal_value - d.primal_value) < 1e-6);
    // The dual's own multiplier for its single constraint is a primal optimum M.
    const HermitianOperator m = d.dual("M").with_shape(BipartiteShape{2, 2});
    CHECK(std::abs(inner(m, delta) - p.primal_value) < 1e-6);
  }
}

TEST_CASE("conic form solved directly") {
  // max y s.t. [1 - y] >= 0 and [y] >= 0 as two 1x1 blocks.
  ConicProblem cp;
  cp.b = RealVector::Ones(1);
  ConicBlock upper{RealMatrix::Ones(1, 1), {{Entry{0, 0, 1.0}}}};
  ConicBlock lower{RealMatrix::Zero(1, 1), {{Entry{0, 0, -1.0}}}};
  cp.blocks = {upper, lower};
  const ConicResult r = solve_conic(cp, SolverOptions{});
  REQUIRE(r.status == Status::optimal);
  CHECK(r.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.dual_objective == doctest::Approx(1.0).epsilon(1e-7));
}
