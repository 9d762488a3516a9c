#include "hsd/qobjects.hpp"

#include "hsd/error.hpp"

#include <cmath>
#include <sstream>

namespace hsd {

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InputError(std::string(what) + " must lie in [0, 1], got " + std::to_string(p));
  }
}

}  // namespace

DensityMatrix::DensityMatrix(HermitianOperator op, const ValidationTolerances& tol)
    : op_(std::move(op)) {
  const double tr = op_.trace();
  if (!(std::abs(tr - 1.0) <= tol.trace)) {
    throw InputError("density matrix trace is " + std::to_string(tr) + ", expected 1");
  }
  const double lo = min_eigenvalue(op_);
  if (!(lo >= -tol.psd)) {
    throw InputError("density matrix has negative eigenvalue " + fmt_double(lo));
  }
}

DensityMatrix DensityMatrix::with_shape(std::optional<BipartiteShape> shape) const {
  return DensityMatrix(Trusted{}, op_.with_shape(shape));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t n, std::optional<BipartiteShape> shape) {
  return DensityMatrix(Trusted{},
                       (1.0 / static_cast<double>(n)) * HermitianOperator::identity(n, shape));
}

ChoiOperator::ChoiOperator(HermitianOperator op, std::size_t input_dim, std::size_t output_dim,
                           std::optional<BipartiteShape> output_shape,
                           const ValidationTolerances& tol)
    : op_(op.with_shape(BipartiteShape{input_dim, output_dim})),
      input_dim_(input_dim),
      output_dim_(output_dim),
      output_shape_(output_shape) {
  if (output_shape_ && output_shape_->size() != output_dim_) {
    throw InputError("output shape does not match output dimension");
  }
  const double lo = min_eigenvalue(op_);
  if (!(lo >= -tol.psd)) {
    throw InputError("Choi operator is not positive semidefinite (min eigenvalue " +
                     fmt_double(lo) + ")");
  }
  const ComplexMatrix reduced = partial_trace_b(op_.matrix(), output_dim_);
  const double residual =
      (reduced - ComplexMatrix::Identity(input_dim_, input_dim_)).cwiseAbs().maxCoeff();
  if (!(residual <= tol.trace_preservation)) {
    throw InputError("Choi operator is not trace preserving (trace-preservation residual " +
                     fmt_double(residual) + ")");
  }
}

ChoiOperator ChoiOperator::with_output_shape(std::optional<BipartiteShape> shape) const {
  ChoiOperator out = *this;
  if (shape && shape->size() != output_dim_) {
    throw InputError("output shape does not match output dimension");
  }
  out.output_shape_ = shape;
  return out;
}

DensityMatrix werner_state(const WernerParams& params) {
  check_probability(params.p, "Werner parameter p");
  if (params.d < 2) throw InputError("Werner states need d >= 2");
  const double d = static_cast<double>(params.d);
  const auto [sym, asym] = sym_asym_projectors(params.d);
  // Theta = 2 Pi_sym / (d(d+1)), Theta_perp = 2 Pi_asym / (d(d-1)).
  HermitianOperator w = (params.p * 2.0 / (d * (d + 1.0))) * sym +
                        ((1.0 - params.p) * 2.0 / (d * (d - 1.0))) * asym;
  return DensityMatrix(std::move(w));
}

DensityMatrix isotropic_state(const IsotropicParams& params) {
  check_probability(params.p, "isotropic parameter p");
  if (params.d < 2) throw InputError("isotropic states need d >= 2");
  const std::size_t n = params.d * params.d;
  const HermitianOperator phi = max_entangled(params.d, true);
  const HermitianOperator id = HermitianOperator::identity(n, BipartiteShape{params.d, params.d});
  HermitianOperator z =
      params.p * phi + ((1.0 - params.p) / static_cast<double>(n - 1)) * (id - phi);
  return DensityMatrix(std::move(z));
}

ChoiOperator depolarizing_choi(double p, std::size_t d) {
  check_probability(p, "depolarizing parameter p");
  if (d < 1) throw InputError("dimension must be at least 1");
  HermitianOperator gamma = max_entangled(d, false);
  HermitianOperator c = (1.0 - p) * gamma +
                        (p / static_cast<double>(d)) * HermitianOperator::identity(d * d);
  return ChoiOperator(std::move(c), d, d);
}

ChoiOperator identity_choi(std::size_t d, std::optional<BipartiteShape> output_shape) {
  return ChoiOperator(max_entangled(d, false), d, d, output_shape);
}

ChoiOperator choi_from_kraus(const std::vector<ComplexMatrix>& kraus,
                             std::optional<BipartiteShape> output_shape,
                             const ValidationTolerances& tol) {
  if (kraus.empty()) throw InputError("at least one Kraus operator is required");
  const auto dout = static_cast<std::size_t>(kraus.front().rows());
  const auto din = static_cast<std::size_t>(kraus.front().cols());
  if (din == 0 || dout == 0) throw InputError("Kraus operators must be non-empty");
  ComplexMatrix choi = ComplexMatrix::Zero(din * dout, din * dout);
  ComplexMatrix completeness = ComplexMatrix::Zero(din, din);
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    const ComplexMatrix& op = kraus[k];
    if (static_cast<std::size_t>(op.rows()) != dout || static_cast<std::size_t>(op.cols()) != din) {
      throw InputError("Kraus operator " + std::to_string(k) + " has inconsistent dimensions");
    }
    completeness += op.adjoint() * op;
    // (I (x) K)|Gamma> = sum_i |i> (x) K|i>.
    Eigen::VectorXcd v(din * dout);
    for (std::size_t i = 0; i < din; ++i) v.segment(i * dout, dout) = op.col(i);
    choi += v * v.adjoint();
  }
  const double residual =
      (completeness - ComplexMatrix::Identity(din, din)).cwiseAbs().maxCoeff();
  if (!(residual <= tol.trace_preservation)) {
    throw InputError("Kraus operators are not trace preserving (trace-preservation residual " +
                     fmt_double(residual) + ")");
  }
  return ChoiOperator(make_hermitian_unchecked(std::move(choi)), din, dout, output_shape, tol);
}

ComplexMatrix apply_choi(const ComplexMatrix& choi, std::size_t input_dim,
                         std::size_t output_dim, const ComplexMatrix& x) {
  if (static_cast<std::size_t>(x.rows()) != input_dim ||
      static_cast<std::size_t>(x.cols()) != input_dim) {
    throw InputError("channel input dimension " + std::to_string(input_dim) +
                     " does not match operator of size " + std::to_string(x.rows()));
  }
  // N(X) = sum_ij X_ij N(|i><j|), and N(|i><j|) is block (i, j) of the Choi matrix.
  ComplexMatrix out = ComplexMatrix::Zero(output_dim, output_dim);
  for (std::size_t i = 0; i < input_dim; ++i) {
    for (std::size_t j = 0; j < input_dim; ++j) {
      if (x(i, j) == Complex(0.0)) continue;
      out += x(i, j) * choi.block(i * output_dim, j * output_dim, output_dim, output_dim);
    }
  }
  return out;
}

namespace {

ComplexMatrix apply_choi_on_second(const ComplexMatrix& choi, std::size_t input_dim,
                                   std::size_t output_dim, const ComplexMatrix& x,
                                   std::size_t dim_r) {
  ComplexMatrix out = ComplexMatrix::Zero(dim_r * output_dim, dim_r * output_dim);
  for (std::size_t r = 0; r < dim_r; ++r) {
    for (std::size_t s = 0; s < dim_r; ++s) {
      const ComplexMatrix block = x.block(r * input_dim, s * input_dim, input_dim, input_dim);
      out.block(r * output_dim, s * output_dim, output_dim, output_dim) =
          apply_choi(choi, input_dim, output_dim, block);
    }
  }
  return out;
}

}  // namespace

DensityMatrix apply_channel(const ChoiOperator& choi, const DensityMatrix& rho) {
  if (rho.size() != choi.input_dim()) {
    throw InputError("state dimension " + std::to_string(rho.size()) +
                     " does not match channel input dimension " +
                     std::to_string(choi.input_dim()));
  }
  ComplexMatrix out = apply_choi(choi.matrix(), choi.input_dim(), choi.output_dim(), rho.matrix());
  return DensityMatrix(make_hermitian_unchecked(std::move(out), choi.output_shape()));
}

DensityMatrix apply_channel_to_bipartite(const ChoiOperator& choi, const DensityMatrix& rho_ra) {
  const BipartiteShape& s = rho_ra.op().require_shape();
  if (s.dim_b != choi.input_dim()) {
    throw InputError("channel input dimension " + std::to_string(choi.input_dim()) +
                     " does not match the A factor of dimension " + std::to_string(s.dim_b));
  }
  ComplexMatrix out = apply_choi_on_second(choi.matrix(), choi.input_dim(), choi.output_dim(),
                                           rho_ra.matrix(), s.dim_a);
  return DensityMatrix(make_hermitian_unchecked(std::move(out),
                                                BipartiteShape{s.dim_a, choi.output_dim()}));
}

ChoiOperator compose_channels(const ChoiOperator& first, const ChoiOperator& second) {
  if (first.output_dim() != second.input_dim()) {
    throw InputError("cannot compose channels: output dimension " +
                     std::to_string(first.output_dim()) + " != input dimension " +
                     std::to_string(second.input_dim()));
  }
  ComplexMatrix out = apply_choi_on_second(second.matrix(), second.input_dim(),
                                           second.output_dim(), first.matrix(), first.input_dim());
  return ChoiOperator(make_hermitian_unchecked(std::move(out)), first.input_dim(),
                      second.output_dim(), second.output_shape());
}

DensityMatrix choi_state(const ChoiOperator& choi) {
  const double scale = 1.0 / static_cast<double>(choi.input_dim());
  return DensityMatrix(scale * choi.op());
}

PptCheck is_ppt_measurement(const HermitianOperator& m, double tol) {
  PptCheck check;
  const RealVector ev = eigenvalues(m);
  const RealVector evt = eigenvalues(partial_transpose(m, Subsystem::B));
  check.min_eig = ev.minCoeff();
  check.max_eig = ev.maxCoeff();
  check.min_eig_transposed = evt.minCoeff();
  check.max_eig_transposed = evt.maxCoeff();
  if (check.min_eig < -tol) check.violations.push_back("M >= 0 (min eig " + fmt_double(check.min_eig) + ")");
  if (check.max_eig > 1.0 + tol) check.violations.push_back("M <= I (max eig " + fmt_double(check.max_eig) + ")");
  if (check.min_eig_transposed < -tol) {
    check.violations.push_back("T_B(M) >= 0 (min eig " + fmt_double(check.min_eig_transposed) + ")");
  }
  if (check.max_eig_transposed > 1.0 + tol) {
    check.violations.push_back("T_B(M) <= I (max eig " + fmt_double(check.max_eig_transposed) + ")");
  }
  check.ok = check.violations.empty();
  return check;
}

bool is_measurement_operator(const HermitianOperator& m, double tol) {
  const RealVector ev = eigenvalues(m);
  return ev.minCoeff() >= -tol && ev.maxCoeff() <= 1.0 + tol;
}

}  // namespace hsd
