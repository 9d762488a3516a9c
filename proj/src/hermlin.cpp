#include "hsd/hermlin.hpp"

#include "hsd/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace hsd {

namespace {

void check_shape(std::size_t n, const std::optional<BipartiteShape>& shape) {
  if (n == 0) throw InputError("operator side length must be positive");
  if (shape) {
    if (shape->dim_a == 0 || shape->dim_b == 0) {
      throw InputError("bipartite dimensions must be positive");
    }
    if (shape->size() != n) {
      throw InputError("bipartite shape " + std::to_string(shape->dim_a) + "x" +
                       std::to_string(shape->dim_b) + " does not match side length " +
                       std::to_string(n));
    }
  }
}

}  // namespace

HermitianOperator::HermitianOperator(Trusted, ComplexMatrix matrix,
                                     std::optional<BipartiteShape> shape)
    : matrix_(std::move(matrix)), shape_(shape) {}

HermitianOperator::HermitianOperator(const ComplexMatrix& matrix,
                                     std::optional<BipartiteShape> shape)
    : shape_(shape) {
  if (matrix.rows() != matrix.cols()) {
    throw InputError("Hermitian operator must be square, got " + std::to_string(matrix.rows()) +
                     "x" + std::to_string(matrix.cols()));
  }
  check_shape(static_cast<std::size_t>(matrix.rows()), shape);
  const double scale = 1.0 + matrix.cwiseAbs().maxCoeff();
  const double deviation = hermiticity_deviation(matrix);
  if (!(deviation <= kHermiticityTolerance * scale)) {
    throw InputError("matrix is not Hermitian (max |H - H^dagger| = " +
                     std::to_string(deviation) + ")");
  }
  matrix_ = 0.5 * (matrix + matrix.adjoint());
}

HermitianOperator make_hermitian_unchecked(ComplexMatrix matrix,
                                           std::optional<BipartiteShape> shape) {
  if (matrix.rows() != matrix.cols()) throw InputError("Hermitian operator must be square");
  check_shape(static_cast<std::size_t>(matrix.rows()), shape);
  ComplexMatrix sym = 0.5 * (matrix + matrix.adjoint());
  return HermitianOperator(HermitianOperator::Trusted{}, std::move(sym), shape);
}

HermitianOperator HermitianOperator::identity(std::size_t n, std::optional<BipartiteShape> shape) {
  check_shape(n, shape);
  return HermitianOperator(Trusted{}, ComplexMatrix::Identity(n, n), shape);
}

HermitianOperator HermitianOperator::zero(std::size_t n, std::optional<BipartiteShape> shape) {
  check_shape(n, shape);
  return HermitianOperator(Trusted{}, ComplexMatrix::Zero(n, n), shape);
}

HermitianOperator HermitianOperator::diagonal(const RealVector& entries,
                                              std::optional<BipartiteShape> shape) {
  const auto n = static_cast<std::size_t>(entries.size());
  check_shape(n, shape);
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  m.diagonal() = entries.cast<Complex>();
  return HermitianOperator(Trusted{}, std::move(m), shape);
}

const BipartiteShape& HermitianOperator::require_shape() const {
  if (!shape_) throw InputError("operator has no bipartite shape");
  return *shape_;
}

HermitianOperator HermitianOperator::with_shape(std::optional<BipartiteShape> shape) const {
  check_shape(size(), shape);
  return HermitianOperator(Trusted{}, matrix_, shape);
}

double HermitianOperator::trace() const { return matrix_.diagonal().real().sum(); }

double HermitianOperator::max_abs() const { return matrix_.cwiseAbs().maxCoeff(); }

HermitianOperator HermitianOperator::operator-() const {
  return HermitianOperator(Trusted{}, -matrix_, shape_);
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& other) {
  if (other.size() != size()) throw InputError("operator size mismatch in addition");
  matrix_ += other.matrix_;
  return *this;
}

HermitianOperator& HermitianOperator::operator-=(const HermitianOperator& other) {
  if (other.size() != size()) throw InputError("operator size mismatch in subtraction");
  matrix_ -= other.matrix_;
  return *this;
}

HermitianOperator& HermitianOperator::operator*=(double scale) {
  matrix_ *= scale;
  return *this;
}

HermitianOperator operator+(HermitianOperator lhs, const HermitianOperator& rhs) {
  lhs += rhs;
  return lhs;
}

HermitianOperator operator-(HermitianOperator lhs, const HermitianOperator& rhs) {
  lhs -= rhs;
  return lhs;
}

HermitianOperator operator*(double scale, HermitianOperator op) {
  op *= scale;
  return op;
}

HermitianOperator operator*(HermitianOperator op, double scale) {
  op *= scale;
  return op;
}

double inner(const HermitianOperator& x, const HermitianOperator& y) {
  if (x.size() != y.size()) throw InputError("operator size mismatch in inner product");
  // Tr[XY] = sum_ij X_ij Y_ji = sum_ij X_ij conj(Y_ij) for Hermitian Y.
  return (x.matrix().array() * y.matrix().conjugate().array()).sum().real();
}

double hermiticity_deviation(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

ComplexMatrix kron(const ComplexMatrix& x, const ComplexMatrix& y) {
  ComplexMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    }
  }
  return out;
}

HermitianOperator tensor(const HermitianOperator& x, const HermitianOperator& y) {
  return make_hermitian_unchecked(kron(x.matrix(), y.matrix()),
                                  BipartiteShape{x.size(), y.size()});
}

ComplexMatrix partial_trace_b(const ComplexMatrix& x, std::size_t dim_b) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (dim_b == 0 || n % dim_b != 0) throw InputError("partial trace: dim_b does not divide size");
  const std::size_t dim_a = n / dim_b;
  ComplexMatrix out = ComplexMatrix::Zero(dim_a, dim_a);
  for (std::size_t i = 0; i < dim_a; ++i) {
    for (std::size_t k = 0; k < dim_a; ++k) {
      Complex acc = 0.0;
      for (std::size_t j = 0; j < dim_b; ++j) acc += x(i * dim_b + j, k * dim_b + j);
      out(i, k) = acc;
    }
  }
  return out;
}

ComplexMatrix partial_transpose_b(const ComplexMatrix& x, std::size_t dim_b) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (dim_b == 0 || n % dim_b != 0) {
    throw InputError("partial transpose: dim_b does not divide size");
  }
  const std::size_t dim_a = n / dim_b;
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < dim_a; ++i) {
    for (std::size_t k = 0; k < dim_a; ++k) {
      out.block(i * dim_b, k * dim_b, dim_b, dim_b) =
          x.block(i * dim_b, k * dim_b, dim_b, dim_b).transpose();
    }
  }
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& x, Subsystem over) {
  const BipartiteShape& s = x.require_shape();
  const ComplexMatrix& m = x.matrix();
  if (over == Subsystem::B) return make_hermitian_unchecked(partial_trace_b(m, s.dim_b));
  ComplexMatrix out = ComplexMatrix::Zero(s.dim_b, s.dim_b);
  for (std::size_t i = 0; i < s.dim_a; ++i) out += m.block(i * s.dim_b, i * s.dim_b, s.dim_b, s.dim_b);
  return make_hermitian_unchecked(std::move(out));
}

HermitianOperator partial_transpose(const HermitianOperator& x, Subsystem on) {
  const BipartiteShape& s = x.require_shape();
  if (on == Subsystem::B) {
    return make_hermitian_unchecked(partial_transpose_b(x.matrix(), s.dim_b), s);
  }
  // T_A swaps the block indices and keeps each block as is.
  const ComplexMatrix& m = x.matrix();
  ComplexMatrix out(s.size(), s.size());
  for (std::size_t i = 0; i < s.dim_a; ++i) {
    for (std::size_t k = 0; k < s.dim_a; ++k) {
      out.block(i * s.dim_b, k * s.dim_b, s.dim_b, s.dim_b) =
          m.block(k * s.dim_b, i * s.dim_b, s.dim_b, s.dim_b);
    }
  }
  return make_hermitian_unchecked(std::move(out), s);
}

EigenDecomposition hermitian_eig(const HermitianOperator& x) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(x.matrix());
  if (solver.info() != Eigen::Success) throw SolverError("Hermitian eigensolver failed");
  EigenDecomposition out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

EigenDecomposition hermitian_eig(const ComplexMatrix& x) {
  return hermitian_eig(HermitianOperator(x));
}

RealVector eigenvalues(const HermitianOperator& x) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(x.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SolverError("Hermitian eigensolver failed");
  return solver.eigenvalues().reverse();
}

double min_eigenvalue(const HermitianOperator& x) { return eigenvalues(x).minCoeff(); }

double max_eigenvalue(const HermitianOperator& x) { return eigenvalues(x).maxCoeff(); }

HermitianOperator positive_part(const HermitianOperator& x) {
  const EigenDecomposition eig = hermitian_eig(x);
  RealVector kept = eig.values;
  for (Eigen::Index k = 0; k < kept.size(); ++k) {
    if (kept[k] <= kZeroEigenvalue) kept[k] = 0.0;
  }
  ComplexMatrix m = eig.vectors * kept.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return make_hermitian_unchecked(std::move(m), x.shape());
}

HermitianOperator positive_projector(const HermitianOperator& x) {
  const EigenDecomposition eig = hermitian_eig(x);
  RealVector indicator = RealVector::Zero(eig.values.size());
  for (Eigen::Index k = 0; k < indicator.size(); ++k) {
    if (eig.values[k] > kZeroEigenvalue) indicator[k] = 1.0;
  }
  ComplexMatrix m = eig.vectors * indicator.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return make_hermitian_unchecked(std::move(m), x.shape());
}

double trace_norm(const HermitianOperator& x) { return eigenvalues(x).cwiseAbs().sum(); }

HermitianOperator swap_operator(std::size_t d) {
  if (d == 0) throw InputError("dimension must be at least 1");
  const std::size_t n = d * d;
  ComplexMatrix f = ComplexMatrix::Zero(n, n);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) f(j * d + i, i * d + j) = 1.0;
  }
  return make_hermitian_unchecked(std::move(f), BipartiteShape{d, d});
}

SymAsymProjectors sym_asym_projectors(std::size_t d) {
  const HermitianOperator f = swap_operator(d);
  const HermitianOperator id = HermitianOperator::identity(d * d, BipartiteShape{d, d});
  return {0.5 * (id + f), 0.5 * (id - f)};
}

HermitianOperator max_entangled(std::size_t d, bool normalized) {
  if (d == 0) throw InputError("dimension must be at least 1");
  const std::size_t n = d * d;
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  const double w = normalized ? 1.0 / static_cast<double>(d) : 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(i * d + i, j * d + j) = w;
  }
  return make_hermitian_unchecked(std::move(m), BipartiteShape{d, d});
}

RealMatrix real_embedding(const ComplexMatrix& x) {
  const Eigen::Index n = x.rows();
  RealMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = x.real();
  out.topRightCorner(n, n) = -x.imag();
  out.bottomLeftCorner(n, n) = x.imag();
  out.bottomRightCorner(n, n) = x.real();
  return out;
}

RealMatrix real_embedding(const HermitianOperator& x) { return real_embedding(x.matrix()); }

HermitianOperator from_real_embedding(const RealMatrix& y) {
  if (y.rows() != y.cols() || y.rows() % 2 != 0) {
    throw InputError("real embedding must be square with even side");
  }
  const Eigen::Index n = y.rows() / 2;
  const RealMatrix re = 0.5 * (y.topLeftCorner(n, n) + y.bottomRightCorner(n, n));
  const RealMatrix im = 0.5 * (y.bottomLeftCorner(n, n) - y.topRightCorner(n, n));
  ComplexMatrix m(n, n);
  m.real() = re;
  m.imag() = im;
  return make_hermitian_unchecked(std::move(m));
}

}  // namespace hsd
