#include "hsd/sdp.hpp"

#include "hsd/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

namespace hsd::sdp {

std::size_t SuperOp::output_size(std::size_t input_size) const {
  switch (kind) {
    case SuperOpKind::identity:
    case SuperOpKind::scale:
    case SuperOpKind::negate:
      return input_size;
    case SuperOpKind::partial_transpose_b:
      if (dim_b == 0 || input_size % dim_b != 0) {
        throw InputError("partial_transpose_b(" + std::to_string(dim_b) +
                         ") cannot act on a matrix of side " + std::to_string(input_size));
      }
      return input_size;
    case SuperOpKind::partial_trace_b:
      if (dim_b == 0 || input_size % dim_b != 0) {
        throw InputError("partial_trace_b(" + std::to_string(dim_b) +
                         ") cannot act on a matrix of side " + std::to_string(input_size));
      }
      return input_size / dim_b;
    case SuperOpKind::tensor_identity_right:
      if (dim_b == 0) throw InputError("tensor_identity_right needs a positive dimension");
      return input_size * dim_b;
  }
  throw InputError("unknown superoperator kind");
}

ComplexMatrix apply(const SuperOp& op, const ComplexMatrix& x) {
  const auto n = static_cast<std::size_t>(x.rows());
  op.output_size(n);
  switch (op.kind) {
    case SuperOpKind::identity:
      return x;
    case SuperOpKind::scale:
      return op.coefficient * x;
    case SuperOpKind::negate:
      return -x;
    case SuperOpKind::partial_transpose_b:
      return hsd::partial_transpose_b(x, op.dim_b);
    case SuperOpKind::partial_trace_b:
      return hsd::partial_trace_b(x, op.dim_b);
    case SuperOpKind::tensor_identity_right:
      return kron(x, ComplexMatrix::Identity(op.dim_b, op.dim_b));
  }
  throw InputError("unknown superoperator kind");
}

ComplexMatrix apply(const SuperOpChain& chain, const ComplexMatrix& x) {
  ComplexMatrix out = x;
  for (const SuperOp& op : chain) out = sdp::apply(op, out);
  return out;
}

std::size_t output_size(const SuperOpChain& chain, std::size_t input_size) {
  std::size_t n = input_size;
  for (const SuperOp& op : chain) n = op.output_size(n);
  return n;
}

SuperOpChain adjoint_of(const SuperOpChain& chain) {
  SuperOpChain out;
  out.reserve(chain.size());
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    SuperOp op = *it;
    if (op.kind == SuperOpKind::partial_trace_b) {
      op.kind = SuperOpKind::tensor_identity_right;
    } else if (op.kind == SuperOpKind::tensor_identity_right) {
      op.kind = SuperOpKind::partial_trace_b;
    }
    out.push_back(op);
  }
  return out;
}

std::string to_string(SuperOpKind kind) {
  switch (kind) {
    case SuperOpKind::identity: return "identity";
    case SuperOpKind::scale: return "scale";
    case SuperOpKind::partial_transpose_b: return "partial_transpose_b";
    case SuperOpKind::partial_trace_b: return "partial_trace_b";
    case SuperOpKind::tensor_identity_right: return "tensor_identity_right";
    case SuperOpKind::negate: return "negate";
  }
  return "?";
}

std::string to_string(Status status) {
  switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::numerical_limit: return "numerical_limit";
  }
  return "?";
}

double default_tolerance() {
  if (const char* env = std::getenv("HSD_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v >= 1e-10 && v <= 1e-4) return v;
  }
  return 1e-7;
}

// ---------------------------------------------------------------------------

Expression Expression::variable(std::string id) {
  Expression e;
  e.terms_.push_back(Term{std::move(id), {}});
  return e;
}

Expression Expression::constant(const HermitianOperator& c) {
  Expression e;
  e.constant_ = c.matrix();
  return e;
}

Expression Expression::then(const SuperOp& op) const {
  Expression e = *this;
  for (Term& t : e.terms_) t.chain.push_back(op);
  if (e.constant_) e.constant_ = sdp::apply(op, *e.constant_);
  return e;
}

Expression Expression::partial_transpose_b(std::size_t dim_b) const {
  return then(SuperOp::partial_transpose_b(dim_b));
}

Expression Expression::partial_trace_b(std::size_t dim_b) const {
  return then(SuperOp::partial_trace_b(dim_b));
}

Expression Expression::tensor_identity_right(std::size_t dim_b) const {
  return then(SuperOp::tensor_identity_right(dim_b));
}

Expression Expression::operator-() const { return then(SuperOp::negate()); }

Expression operator+(Expression lhs, const Expression& rhs) {
  lhs.terms_.insert(lhs.terms_.end(), rhs.terms_.begin(), rhs.terms_.end());
  if (rhs.constant_) {
    if (!lhs.constant_) {
      lhs.constant_ = rhs.constant_;
    } else if (lhs.constant_->rows() != rhs.constant_->rows()) {
      throw InputError("constant size mismatch in expression sum");
    } else {
      *lhs.constant_ += *rhs.constant_;
    }
  }
  return lhs;
}

Expression operator-(Expression lhs, const Expression& rhs) { return std::move(lhs) + (-rhs); }

Expression operator*(double c, const Expression& e) { return e.then(SuperOp::scale(c)); }

// ---------------------------------------------------------------------------

Problem Problem::build(ProblemDescription description) {
  Problem p(std::move(description));
  const ProblemDescription& d = p.desc_;

  std::map<std::string, std::size_t> sizes;
  for (const Variable& v : d.variables) {
    if (v.id.empty()) throw InputError("variable id must not be empty");
    if (v.size == 0) throw InputError("variable '" + v.id + "' has zero size");
    if (!sizes.emplace(v.id, v.size).second) {
      throw InputError("variable '" + v.id + "' declared twice");
    }
  }
  auto size_of = [&](const std::string& id, const std::string& where) {
    auto it = sizes.find(id);
    if (it == sizes.end()) throw InputError("undeclared variable '" + id + "' in " + where);
    return it->second;
  };

  for (const ObjectiveTerm& t : d.objective) {
    const std::size_t n = size_of(t.variable, "objective");
    if (t.weight.size() != n) {
      throw InputError("objective weight for '" + t.variable + "' has side " +
                       std::to_string(t.weight.size()) + ", expected " + std::to_string(n));
    }
  }

  std::set<std::string> names;
  for (const Constraint& c : d.constraints) {
    if (!names.insert(c.name).second) throw InputError("constraint '" + c.name + "' declared twice");
    const std::string where = "constraint '" + c.name + "'";
    std::optional<std::size_t> out;
    for (const Term& t : c.expression.terms()) {
      const std::size_t n = output_size(t.chain, size_of(t.variable, where));
      if (out && *out != n) {
        throw InputError("dimension mismatch in " + where + ": terms map to sides " +
                         std::to_string(*out) + " and " + std::to_string(n));
      }
      out = n;
    }
    if (const auto& k = c.expression.constant_part()) {
      if (k->rows() != k->cols()) throw InputError("non-square constant in " + where);
      if (out && *out != static_cast<std::size_t>(k->rows())) {
        throw InputError("dimension mismatch in " + where + ": constant has side " +
                         std::to_string(k->rows()) + ", terms have side " + std::to_string(*out));
      }
      const double scale = 1.0 + (k->size() ? k->cwiseAbs().maxCoeff() : 0.0);
      if (hermiticity_deviation(*k) > kHermiticityTolerance * scale) {
        throw InputError("non-Hermitian constant in " + where);
      }
      out = static_cast<std::size_t>(k->rows());
    }
    if (!out) throw InputError(where + " is empty");
    p.constraint_sizes_.push_back(*out);
  }
  return p;
}

const Variable& Problem::variable(const std::string& id) const {
  for (const Variable& v : desc_.variables) {
    if (v.id == id) return v;
  }
  throw InputError("undeclared variable '" + id + "'");
}

std::string Problem::dump() const {
  std::ostringstream os;
  os << (desc_.sense == Sense::maximize ? "maximize" : "minimize") << "\n";
  os << "variables:\n";
  for (const Variable& v : desc_.variables) {
    os << "  " << v.id << " : " << v.size << "x" << v.size
       << (v.cone == Cone::psd ? " psd" : " free") << "\n";
  }
  os << "objective:\n";
  for (const ObjectiveTerm& t : desc_.objective) {
    os << "  Tr[C * " << t.variable << "] with C =\n";
    const ComplexMatrix& c = t.weight.matrix();
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      os << "   ";
      for (Eigen::Index j = 0; j < c.cols(); ++j) {
        os << " (" << c(i, j).real() << "," << c(i, j).imag() << ")";
      }
      os << "\n";
    }
  }
  os << "constraints:\n";
  for (std::size_t k = 0; k < desc_.constraints.size(); ++k) {
    const Constraint& c = desc_.constraints[k];
    os << "  " << c.name << " [" << constraint_sizes_[k] << "x" << constraint_sizes_[k] << "] : ";
    bool first = true;
    for (const Term& t : c.expression.terms()) {
      if (!first) os << " + ";
      first = false;
      std::string s = t.variable;
      for (const SuperOp& op : t.chain) {
        s = to_string(op.kind) + (op.kind == SuperOpKind::scale ? "[" + std::to_string(op.coefficient) + "]"
                                  : op.kind == SuperOpKind::partial_transpose_b ||
                                            op.kind == SuperOpKind::partial_trace_b ||
                                            op.kind == SuperOpKind::tensor_identity_right
                                      ? "[" + std::to_string(op.dim_b) + "]"
                                      : "") +
            "(" + s + ")";
      }
      os << s;
    }
    if (c.expression.constant_part()) {
      os << (first ? "" : " + ") << "K(trace=" << c.expression.constant_part()->trace().real() << ")";
    }
    os << (c.relation == Relation::psd ? " >= 0" : " == 0") << "\n";
  }
  return os.str();
}

ProblemBuilder& ProblemBuilder::variable(std::string id, std::size_t size, Cone cone) {
  desc_.variables.push_back(Variable{std::move(id), size, cone});
  return *this;
}

ProblemBuilder& ProblemBuilder::objective(const HermitianOperator& weight, std::string variable) {
  desc_.objective.push_back(ObjectiveTerm{weight, std::move(variable)});
  return *this;
}

ProblemBuilder& ProblemBuilder::constraint(std::string name, Expression e, Relation r) {
  desc_.constraints.push_back(Constraint{std::move(name), std::move(e), r});
  return *this;
}

ProblemBuilder& ProblemBuilder::sense(Sense s) {
  desc_.sense = s;
  return *this;
}

Problem ProblemBuilder::build() const { return Problem::build(desc_); }

const HermitianOperator& Solution::primal(const std::string& id) const {
  auto it = primal_vars.find(id);
  if (it == primal_vars.end()) throw InputError("no primal variable '" + id + "'");
  return it->second;
}

const HermitianOperator& Solution::dual(const std::string& name) const {
  auto it = dual_vars.find(name);
  if (it == dual_vars.end()) throw InputError("no dual variable for '" + name + "'");
  return it->second;
}

}  // namespace hsd::sdp
