#pragma once

// Dense complex Hermitian linear algebra on (optionally) bipartite spaces.
//
// Basis convention: |i>_A (x) |j>_B maps to the flat index i * dim_b + j.
// Every routine here is a pure function of its arguments.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>

namespace hsd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Tolerance applied to (H - H^dagger) before symmetrization, relative to
/// 1 + max |H_ij|.
inline constexpr double kHermiticityTolerance = 1e-8;

/// Eigenvalues with |lambda| <= this are treated as zero by positive_part.
inline constexpr double kZeroEigenvalue = 1e-12;

struct BipartiteShape {
  std::size_t dim_a = 1;
  std::size_t dim_b = 1;

  std::size_t size() const { return dim_a * dim_b; }
  friend bool operator==(const BipartiteShape&, const BipartiteShape&) = default;
};

enum class Subsystem { A, B };

/// Square complex matrix that is Hermitian by construction.
///
/// The constructor rejects inputs whose anti-Hermitian part exceeds
/// kHermiticityTolerance and stores (H + H^dagger) / 2, so the stored
/// matrix is exactly Hermitian.
class HermitianOperator {
 public:
  explicit HermitianOperator(const ComplexMatrix& matrix,
                             std::optional<BipartiteShape> shape = std::nullopt);

  static HermitianOperator identity(std::size_t n,
                                    std::optional<BipartiteShape> shape = std::nullopt);
  static HermitianOperator zero(std::size_t n,
                                std::optional<BipartiteShape> shape = std::nullopt);
  static HermitianOperator diagonal(const RealVector& entries,
                                    std::optional<BipartiteShape> shape = std::nullopt);

  const ComplexMatrix& matrix() const { return matrix_; }
  std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }
  const std::optional<BipartiteShape>& shape() const { return shape_; }
  const BipartiteShape& require_shape() const;

  HermitianOperator with_shape(std::optional<BipartiteShape> shape) const;

  double trace() const;
  double max_abs() const;

  HermitianOperator operator-() const;
  HermitianOperator& operator+=(const HermitianOperator& other);
  HermitianOperator& operator-=(const HermitianOperator& other);
  HermitianOperator& operator*=(double scale);

 private:
  struct Trusted {};
  HermitianOperator(Trusted, ComplexMatrix matrix, std::optional<BipartiteShape> shape);

  ComplexMatrix matrix_;
  std::optional<BipartiteShape> shape_;

  friend HermitianOperator make_hermitian_unchecked(ComplexMatrix,
                                                    std::optional<BipartiteShape>);
};

HermitianOperator operator+(HermitianOperator lhs, const HermitianOperator& rhs);
HermitianOperator operator-(HermitianOperator lhs, const HermitianOperator& rhs);
HermitianOperator operator*(double scale, HermitianOperator op);
HermitianOperator operator*(HermitianOperator op, double scale);

/// Symmetrizes without the deviation check. For results that are Hermitian
/// mathematically but carry rounding noise (products of Hermitian factors).
HermitianOperator make_hermitian_unchecked(ComplexMatrix matrix,
                                           std::optional<BipartiteShape> shape = std::nullopt);

/// Re Tr[X Y].
double inner(const HermitianOperator& x, const HermitianOperator& y);

/// Largest |H - H^dagger| entry of a general matrix.
double hermiticity_deviation(const ComplexMatrix& m);

HermitianOperator tensor(const HermitianOperator& x, const HermitianOperator& y);
ComplexMatrix kron(const ComplexMatrix& x, const ComplexMatrix& y);

HermitianOperator partial_trace(const HermitianOperator& x, Subsystem over);
HermitianOperator partial_transpose(const HermitianOperator& x, Subsystem on);

// Raw-matrix kernels, used by the SDP layer on non-Hermitian intermediates.
ComplexMatrix partial_trace_b(const ComplexMatrix& x, std::size_t dim_b);
ComplexMatrix partial_transpose_b(const ComplexMatrix& x, std::size_t dim_b);

struct EigenDecomposition {
  RealVector values;      // descending
  ComplexMatrix vectors;  // column k pairs with values[k]
};

EigenDecomposition hermitian_eig(const HermitianOperator& x);
/// Throws InputError when the matrix is not square or not Hermitian.
EigenDecomposition hermitian_eig(const ComplexMatrix& x);

RealVector eigenvalues(const HermitianOperator& x);
double min_eigenvalue(const HermitianOperator& x);
double max_eigenvalue(const HermitianOperator& x);

HermitianOperator positive_part(const HermitianOperator& x);
/// Projector onto the span of eigenvectors with eigenvalue > kZeroEigenvalue.
HermitianOperator positive_projector(const HermitianOperator& x);
double trace_norm(const HermitianOperator& x);

/// F = sum_ij |i><j| (x) |j><i| on C^d (x) C^d.
HermitianOperator swap_operator(std::size_t d);

struct SymAsymProjectors {
  HermitianOperator sym;
  HermitianOperator asym;
};
SymAsymProjectors sym_asym_projectors(std::size_t d);

/// normalized: Phi = |Gamma><Gamma| / d; otherwise |Gamma><Gamma| with
/// |Gamma> = sum_i |i>|i>.
HermitianOperator max_entangled(std::size_t d, bool normalized);

/// [[Re X, -Im X], [Im X, Re X]].
RealMatrix real_embedding(const HermitianOperator& x);
RealMatrix real_embedding(const ComplexMatrix& x);
/// Inverse of real_embedding on its range; orthogonal projection onto it
/// for a general symmetric input.
HermitianOperator from_real_embedding(const RealMatrix& y);

}  // namespace hsd
