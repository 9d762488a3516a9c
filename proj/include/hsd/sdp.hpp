#pragma once

// Semidefinite programs over complex Hermitian matrix variables.
//
// A problem is a list of Hermitian variables, a linear objective
// sum_i Tr[C_i X_i], and affine Hermitian constraints that are either
// "expression >= 0" (PSD) or "expression == 0". Affine expressions are sums
// of superoperator chains applied to variables plus a constant.
//
// solve() works on the real embedding of every Hermitian block and runs an
// infeasible primal-dual interior-point method (HKM search direction with
// Mehrotra predictor-corrector). It always returns both objective values so
// the duality gap can be checked by the caller.

#include "hsd/hermlin.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hsd::sdp {

enum class SuperOpKind {
  identity,
  scale,
  partial_transpose_b,
  partial_trace_b,
  tensor_identity_right,
  negate,
};

/// One linear map on square matrices. dim_b is the size of the second
/// tensor factor for the three bipartite maps; the first factor is
/// inferred from the input.
struct SuperOp {
  SuperOpKind kind = SuperOpKind::identity;
  double coefficient = 1.0;
  std::size_t dim_b = 1;

  static SuperOp identity() { return {SuperOpKind::identity, 1.0, 1}; }
  static SuperOp scale(double c) { return {SuperOpKind::scale, c, 1}; }
  static SuperOp negate() { return {SuperOpKind::negate, 1.0, 1}; }
  static SuperOp partial_transpose_b(std::size_t dim_b) {
    return {SuperOpKind::partial_transpose_b, 1.0, dim_b};
  }
  static SuperOp partial_trace_b(std::size_t dim_b) {
    return {SuperOpKind::partial_trace_b, 1.0, dim_b};
  }
  static SuperOp tensor_identity_right(std::size_t dim_b) {
    return {SuperOpKind::tensor_identity_right, 1.0, dim_b};
  }

  /// Throws InputError if the map cannot act on an input of this size.
  std::size_t output_size(std::size_t input_size) const;

  friend bool operator==(const SuperOp&, const SuperOp&) = default;
};

/// Applied front to back.
using SuperOpChain = std::vector<SuperOp>;

ComplexMatrix apply(const SuperOp& op, const ComplexMatrix& x);
ComplexMatrix apply(const SuperOpChain& chain, const ComplexMatrix& x);
std::size_t output_size(const SuperOpChain& chain, std::size_t input_size);

/// Hilbert-Schmidt adjoint: Tr[chain(X)^dagger Y] = Tr[X^dagger adjoint(Y)].
SuperOpChain adjoint_of(const SuperOpChain& chain);

std::string to_string(SuperOpKind kind);

struct Term {
  std::string variable;
  SuperOpChain chain;
};

/// sum_k chain_k(variable_k) + constant.
class Expression {
 public:
  Expression() = default;

  static Expression variable(std::string id);
  static Expression constant(const HermitianOperator& c);

  const std::vector<Term>& terms() const { return terms_; }
  const std::optional<ComplexMatrix>& constant_part() const { return constant_; }

  /// Appends op to every term chain and applies it to the constant.
  Expression then(const SuperOp& op) const;
  Expression partial_transpose_b(std::size_t dim_b) const;
  Expression partial_trace_b(std::size_t dim_b) const;
  Expression tensor_identity_right(std::size_t dim_b) const;

  Expression operator-() const;
  friend Expression operator+(Expression lhs, const Expression& rhs);
  friend Expression operator-(Expression lhs, const Expression& rhs);
  friend Expression operator*(double c, const Expression& e);

 private:
  std::vector<Term> terms_;
  std::optional<ComplexMatrix> constant_;
};

inline Expression var(std::string id) { return Expression::variable(std::move(id)); }
inline Expression constant(const HermitianOperator& c) { return Expression::constant(c); }

enum class Cone { psd, free };
enum class Relation { psd, zero };
enum class Sense { maximize, minimize };

struct Variable {
  std::string id;
  std::size_t size = 1;
  Cone cone = Cone::free;
};

struct ObjectiveTerm {
  HermitianOperator weight;
  std::string variable;
};

struct Constraint {
  std::string name;
  Expression expression;
  Relation relation = Relation::psd;
};

struct ProblemDescription {
  std::vector<Variable> variables;
  std::vector<ObjectiveTerm> objective;
  std::vector<Constraint> constraints;
  Sense sense = Sense::maximize;
};

/// Validated, immutable problem.
class Problem {
 public:
  /// Throws InputError on undeclared variables, duplicate names,
  /// non-Hermitian constants or dimension mismatches along a chain.
  static Problem build(ProblemDescription description);

  const std::vector<Variable>& variables() const { return desc_.variables; }
  const std::vector<ObjectiveTerm>& objective() const { return desc_.objective; }
  const std::vector<Constraint>& constraints() const { return desc_.constraints; }
  Sense sense() const { return desc_.sense; }

  const Variable& variable(const std::string& id) const;
  std::size_t constraint_size(std::size_t index) const { return constraint_sizes_[index]; }

  /// Plain-text listing of variables, objective blocks and constraints.
  std::string dump() const;

 private:
  explicit Problem(ProblemDescription d) : desc_(std::move(d)) {}
  ProblemDescription desc_;
  std::vector<std::size_t> constraint_sizes_;
};

/// Fluent helper for assembling a ProblemDescription.
class ProblemBuilder {
 public:
  ProblemBuilder& variable(std::string id, std::size_t size, Cone cone = Cone::free);
  ProblemBuilder& objective(const HermitianOperator& weight, std::string variable);
  ProblemBuilder& constraint(std::string name, Expression e, Relation r = Relation::psd);
  ProblemBuilder& sense(Sense s);
  Problem build() const;
  const ProblemDescription& description() const { return desc_; }

 private:
  ProblemDescription desc_;
};

enum class Status { optimal, infeasible, numerical_limit };

std::string to_string(Status status);

/// 1e-7 unless the HSD_TOL environment variable holds a value in
/// [1e-10, 1e-4].
double default_tolerance();

struct SolverOptions {
  double tolerance = default_tolerance();
  int max_iterations = 200;
};

struct Solution {
  Status status = Status::numerical_limit;
  std::string detail;
  /// Objective value of the problem as posed (at the returned point).
  double primal_value = 0.0;
  /// Objective value of the Lagrangian dual (at the returned multipliers).
  double dual_value = 0.0;
  /// |primal - dual| / (1 + |primal| + |dual|).
  double gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  std::map<std::string, HermitianOperator> primal_vars;
  /// Keyed by constraint name; a PSD-cone variable contributes "psd:<id>".
  /// Multipliers are normalized so that dual_value equals
  /// sum over constraints of Tr[multiplier * constant part] (sign-adjusted
  /// for the problem sense).
  std::map<std::string, HermitianOperator> dual_vars;

  bool optimal() const { return status == Status::optimal; }
  const HermitianOperator& primal(const std::string& id) const;
  const HermitianOperator& dual(const std::string& name) const;
};

/// Throws InputError if tolerance is outside [1e-10, 1e-4].
Solution solve(const Problem& problem, const SolverOptions& options = {});

// ---------------------------------------------------------------------------
// Real conic form used internally by solve(); exposed for testing.
//
//   maximize b^T y  subject to  C_k - sum_i y_i A_{k,i} >= 0  for each block k
//
// with Lagrangian dual
//
//   minimize sum_k <C_k, X_k>  subject to  sum_k <A_{k,i}, X_k> = b_i, X_k >= 0.

struct Entry {
  int row;
  int col;
  double value;
};

struct ConicBlock {
  RealMatrix c;
  /// coefficients[i] lists the non-zero entries of A_{k,i} (both triangles).
  std::vector<std::vector<Entry>> coefficients;
};

struct ConicProblem {
  RealVector b;
  std::vector<ConicBlock> blocks;
};

struct ConicResult {
  Status status = Status::numerical_limit;
  std::string detail;
  RealVector y;
  std::vector<RealMatrix> x;
  std::vector<RealMatrix> z;
  double primal_objective = 0.0;  // b^T y
  double dual_objective = 0.0;    // sum <C, X>
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
};

ConicResult solve_conic(const ConicProblem& problem, const SolverOptions& options);

}  // namespace hsd::sdp
