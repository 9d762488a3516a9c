#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's own kernels for the quantity being checked: loops over indices
// instead of block arithmetic, general (non-Hermitian) eigensolvers instead
// of the self-adjoint one.

#include "hsd/hermlin.hpp"
#include "hsd/qobjects.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using hsd::Complex;
using hsd::ComplexMatrix;
using Rng = std::mt19937_64;

inline ComplexMatrix naive_kron(const ComplexMatrix& x, const ComplexMatrix& y) {
  const auto a = x.rows(), b = y.rows();
  ComplexMatrix out(a * b, a * b);
  for (Eigen::Index i = 0; i < a; ++i)
    for (Eigen::Index j = 0; j < b; ++j)
      for (Eigen::Index k = 0; k < a; ++k)
        for (Eigen::Index l = 0; l < b; ++l) out(i * b + j, k * b + l) = x(i, k) * y(j, l);
  return out;
}

// <i j| X |k l> summed over the traced index.
inline ComplexMatrix naive_trace_b(const ComplexMatrix& x, int da, int db) {
  ComplexMatrix out = ComplexMatrix::Zero(da, da);
  for (int i = 0; i < da; ++i)
    for (int k = 0; k < da; ++k)
      for (int j = 0; j < db; ++j) out(i, k) += x(i * db + j, k * db + j);
  return out;
}

inline ComplexMatrix naive_trace_a(const ComplexMatrix& x, int da, int db) {
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (int j = 0; j < db; ++j)
    for (int l = 0; l < db; ++l)
      for (int i = 0; i < da; ++i) out(j, l) += x(i * db + j, i * db + l);
  return out;
}

// <i j| T_B(X) |k l> = <i l| X |k j>.
inline ComplexMatrix naive_transpose_b(const ComplexMatrix& x, int da, int db) {
  ComplexMatrix out(da * db, da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j)
      for (int k = 0; k < da; ++k)
        for (int l = 0; l < db; ++l) out(i * db + j, k * db + l) = x(i * db + l, k * db + j);
  return out;
}

/// Real parts of the spectrum from the general complex eigensolver, sorted
/// descending.
inline std::vector<double> spectrum(const ComplexMatrix& x) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(x, false);
  std::vector<double> v;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) v.push_back(es.eigenvalues()[k].real());
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

inline double min_eig(const ComplexMatrix& x) { return spectrum(x).back(); }
inline double max_eig(const ComplexMatrix& x) { return spectrum(x).front(); }

inline double positive_sum(const ComplexMatrix& x) {
  double s = 0.0;
  for (double v : spectrum(x)) s += std::max(0.0, v);
  return s;
}

inline double trace_re(const ComplexMatrix& x) { return x.trace().real(); }

inline double max_abs_diff(const ComplexMatrix& x, const ComplexMatrix& y) {
  return (x - y).cwiseAbs().maxCoeff();
}

inline ComplexMatrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = Complex(n(rng), n(rng));
  return g;
}

inline ComplexMatrix random_hermitian(Rng& rng, Eigen::Index n) {
  const ComplexMatrix g = gaussian(rng, n, n);
  return 0.5 * (g + g.adjoint());
}

/// Ginibre-distributed density matrix of full rank (rank = n).
inline ComplexMatrix random_density(Rng& rng, Eigen::Index n) {
  const ComplexMatrix g = gaussian(rng, n, n);
  ComplexMatrix r = g * g.adjoint();
  return r / r.trace().real();
}

inline hsd::DensityMatrix random_state(Rng& rng, std::size_t da, std::size_t db) {
  return hsd::DensityMatrix(
      hsd::make_hermitian_unchecked(random_density(rng, static_cast<Eigen::Index>(da * db)),
                                    hsd::BipartiteShape{da, db}));
}

inline ComplexMatrix random_unitary(Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<ComplexMatrix> qr(gaussian(rng, n, n));
  ComplexMatrix q = qr.householderQ();
  return q;
}

/// Kraus operators of a random channel C^din -> C^dout with `count` terms,
/// cut from a random isometry.
inline std::vector<ComplexMatrix> random_kraus(Rng& rng, int din, int dout, int count) {
  Eigen::HouseholderQR<ComplexMatrix> qr(gaussian(rng, dout * count, din));
  const ComplexMatrix v = ComplexMatrix(qr.householderQ()).leftCols(din);
  std::vector<ComplexMatrix> k;
  for (int c = 0; c < count; ++c) k.push_back(v.middleRows(c * dout, dout));
  return k;
}

inline ComplexMatrix apply_kraus(const std::vector<ComplexMatrix>& kraus, const ComplexMatrix& x) {
  ComplexMatrix out = ComplexMatrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (const ComplexMatrix& k : kraus) out += k * x * k.adjoint();
  return out;
}

inline std::vector<double> random_distribution(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (double& v : p) s += (v = u(rng));
  for (double& v : p) v /= s;
  return p;
}

// Closed forms for the state and channel families, written out termwise.
inline double werner_all(double p, double q, double g) {
  return std::max({0.0, q - g * p, (1 - q) - g * (1 - p)});
}
inline double werner_ppt(double p, double q, double d, double g) {
  const double t = 2 * (q - g * p) / (d + 1);
  return std::max({0.0, t, 1 - g - t});
}
inline double isotropic_ppt(double p, double q, double d, double g) {
  const double r = 1 - q - g * (1 - p);
  return std::max({0.0, q - g * p + r / (d + 1), d / (d + 1) * r});
}
inline double depolarizing_all(double q, double p, double d, double g) {
  const double t = q - g * p;
  return std::max({0.0, (1 - q) - g * (1 - p) + t / (d * d), t - t / (d * d)});
}
inline double depolarizing_ppt(double q, double p, double d, double g) {
  const double t = q - g * p;
  return std::max({0.0, 1 - q - g * (1 - p) + t / d, (d - 1) / d * t});
}

/// Classical formula evaluated directly from the definition.
inline double classical(const std::vector<double>& p, const std::vector<double>& q, double g) {
  double s = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) s += std::max(0.0, p[x] - g * q[x]);
  return s - std::max(0.0, 1 - g);
}

}  // namespace oracle
