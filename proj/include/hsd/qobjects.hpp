#pragma once

// States, channels (stored as Choi operators) and the concrete families
// used throughout: Werner, isotropic, depolarizing.

#include "hsd/hermlin.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hsd {

struct ValidationTolerances {
  double psd = 1e-9;
  double trace = 1e-9;
  double trace_preservation = 1e-8;
};

/// Positive semidefinite, unit-trace operator.
class DensityMatrix {
 public:
  /// Throws InputError naming the violated bound.
  explicit DensityMatrix(HermitianOperator op, const ValidationTolerances& tol = {});

  const HermitianOperator& op() const { return op_; }
  const ComplexMatrix& matrix() const { return op_.matrix(); }
  std::size_t size() const { return op_.size(); }
  const std::optional<BipartiteShape>& shape() const { return op_.shape(); }

  DensityMatrix with_shape(std::optional<BipartiteShape> shape) const;

  static DensityMatrix maximally_mixed(std::size_t n,
                                       std::optional<BipartiteShape> shape = std::nullopt);

 private:
  struct Trusted {};
  DensityMatrix(Trusted, HermitianOperator op) : op_(std::move(op)) {}
  HermitianOperator op_;
};

/// Choi operator sum_ij |i><j| (x) N(|i><j|) on R (x) B with R ~ A.
class ChoiOperator {
 public:
  ChoiOperator(HermitianOperator op, std::size_t input_dim, std::size_t output_dim,
               std::optional<BipartiteShape> output_shape = std::nullopt,
               const ValidationTolerances& tol = {});

  const HermitianOperator& op() const { return op_; }
  const ComplexMatrix& matrix() const { return op_.matrix(); }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }
  /// Factorization of the output space, needed for PPT audits of outputs.
  const std::optional<BipartiteShape>& output_shape() const { return output_shape_; }

  ChoiOperator with_output_shape(std::optional<BipartiteShape> shape) const;

 private:
  HermitianOperator op_;
  std::size_t input_dim_;
  std::size_t output_dim_;
  std::optional<BipartiteShape> output_shape_;
};

struct WernerParams {
  double p = 0.0;
  std::size_t d = 2;
};

struct IsotropicParams {
  double p = 0.0;
  std::size_t d = 2;
};

/// p * Theta + (1 - p) * Theta_perp with Theta = (I + F) / (d(d+1)) and
/// Theta_perp = (I - F) / (d(d-1)).
DensityMatrix werner_state(const WernerParams& params);

/// p * Phi + (1 - p) * (I - Phi) / (d^2 - 1).
DensityMatrix isotropic_state(const IsotropicParams& params);

/// (1 - p) |Gamma><Gamma| + (p / d) I: p is the weight of full depolarization.
ChoiOperator depolarizing_choi(double p, std::size_t d);

ChoiOperator identity_choi(std::size_t d,
                           std::optional<BipartiteShape> output_shape = std::nullopt);

/// Choi operator of rho -> sum_k K rho K^dagger. Throws InputError when
/// the Kraus operators are not trace preserving.
ChoiOperator choi_from_kraus(const std::vector<ComplexMatrix>& kraus,
                             std::optional<BipartiteShape> output_shape = std::nullopt,
                             const ValidationTolerances& tol = {});

/// Applies the linear map encoded by a Choi matrix to an arbitrary operator
/// on the input space.
ComplexMatrix apply_choi(const ComplexMatrix& choi, std::size_t input_dim,
                         std::size_t output_dim, const ComplexMatrix& x);

DensityMatrix apply_channel(const ChoiOperator& choi, const DensityMatrix& rho);

/// (id_R (x) N)(rho_RA); the result has shape (dim_R, output_dim).
DensityMatrix apply_channel_to_bipartite(const ChoiOperator& choi, const DensityMatrix& rho_ra);

/// Choi operator of second o first.
ChoiOperator compose_channels(const ChoiOperator& first, const ChoiOperator& second);

/// Normalized Choi state (id (x) N)(Phi) = Choi / input_dim.
DensityMatrix choi_state(const ChoiOperator& choi);

struct PptCheck {
  bool ok = false;
  double min_eig = 0.0;
  double max_eig = 0.0;
  double min_eig_transposed = 0.0;
  double max_eig_transposed = 0.0;
  std::vector<std::string> violations;
};

/// 0 <= M <= I and 0 <= T_B(M) <= I, each within tol.
PptCheck is_ppt_measurement(const HermitianOperator& m, double tol = 1e-8);

/// 0 <= M <= I within tol.
bool is_measurement_operator(const HermitianOperator& m, double tol = 1e-8);

}  // namespace hsd
