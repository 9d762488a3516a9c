#include "hsd/sdp.hpp"

#include "hsd/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hsd::sdp {

namespace {

constexpr double kInfiniteStep = 1e30;

// ---------------------------------------------------------------------------
// Conic interior-point method.

double frob_dot(const RealMatrix& a, const RealMatrix& b) { return (a.array() * b.array()).sum(); }

RealMatrix symmetrize(const RealMatrix& a) { return 0.5 * (a + a.transpose()); }

/// Largest alpha with x + alpha * dx >= 0, given a Cholesky factor of x.
double max_step(const Eigen::LLT<RealMatrix>& chol, const RealMatrix& dx) {
  const RealMatrix l = chol.matrixL();
  RealMatrix s = l.triangularView<Eigen::Lower>().solve(dx);
  s = l.triangularView<Eigen::Lower>().solve(s.transpose()).transpose();
  s = symmetrize(s);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(s, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return lo >= 0.0 ? kInfiniteStep : -1.0 / lo;
}

class ConicSolver {
 public:
  ConicSolver(const ConicProblem& problem, const SolverOptions& options)
      : p_(problem), opt_(options), m_(static_cast<int>(problem.b.size())) {
    for (std::size_t k = 0; k < p_.blocks.size(); ++k) {
      const ConicBlock& blk = p_.blocks[k];
      std::vector<int> active;
      for (int i = 0; i < m_; ++i) {
        if (!blk.coefficients[i].empty()) active.push_back(i);
      }
      active_.push_back(std::move(active));
      total_size_ += static_cast<double>(blk.c.rows());
    }
  }

  ConicResult run() {
    ConicResult r;
    initialize();
    double norm_b = p_.b.norm();
    double norm_c = 0.0;
    for (const ConicBlock& blk : p_.blocks) norm_c += blk.c.squaredNorm();
    norm_c = std::sqrt(norm_c);

    int stalled = 0;
    for (int iter = 0;; ++iter) {
      r.iterations = iter;
      // Residuals.
      RealVector rp = p_.b - apply_adjoint(x_);
      std::vector<RealMatrix> rd(blocks());
      double rd_norm = 0.0;
      for (std::size_t k = 0; k < blocks(); ++k) {
        rd[k] = p_.blocks[k].c - z_[k] - apply_block(k, y_);
        rd_norm += rd[k].squaredNorm();
      }
      rd_norm = std::sqrt(rd_norm);
      const double pobj = p_.b.dot(y_);
      double dobj = 0.0;
      double xz = 0.0;
      for (std::size_t k = 0; k < blocks(); ++k) {
        dobj += frob_dot(p_.blocks[k].c, x_[k]);
        xz += frob_dot(x_[k], z_[k]);
      }
      const double pinf = rd_norm / (1.0 + norm_c);
      const double dinf = rp.norm() / (1.0 + norm_b);
      const double gap = std::abs(dobj - pobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      r.primal_objective = pobj;
      r.dual_objective = dobj;
      r.primal_infeasibility = pinf;
      r.dual_infeasibility = dinf;

      if (pinf <= opt_.tolerance && dinf <= opt_.tolerance && gap <= opt_.tolerance) {
        r.status = Status::optimal;
        break;
      }
      if (detect_infeasibility(r, rp, rd, pobj, dobj)) break;
      if (iter >= opt_.max_iterations) {
        r.status = Status::numerical_limit;
        r.detail = "iteration limit reached";
        break;
      }

      const double mu = xz / total_size_;
      if (!(mu > 0.0) || !std::isfinite(mu)) {
        r.status = Status::numerical_limit;
        r.detail = "complementarity measure degenerated";
        break;
      }

      // Factorizations shared by predictor and corrector.
      std::vector<RealMatrix> zinv(blocks());
      std::vector<Eigen::LLT<RealMatrix>> xchol(blocks()), zchol(blocks());
      bool ok = true;
      for (std::size_t k = 0; k < blocks() && ok; ++k) {
        xchol[k].compute(x_[k]);
        zchol[k].compute(z_[k]);
        if (xchol[k].info() != Eigen::Success || zchol[k].info() != Eigen::Success) {
          ok = false;
          break;
        }
        zinv[k] = zchol[k].solve(RealMatrix::Identity(z_[k].rows(), z_[k].cols()));
        zinv[k] = symmetrize(zinv[k]);
      }
      if (!ok) {
        r.status = Status::numerical_limit;
        r.detail = "iterate lost positive definiteness";
        break;
      }
      Eigen::LLT<RealMatrix> schur;
      if (!factor_schur(zinv, schur)) {
        r.status = Status::numerical_limit;
        r.detail = "Schur complement is singular";
        break;
      }

      // Predictor (affine scaling).
      Direction pred = direction(schur, zinv, rp, rd, 0.0, nullptr);
      double ap = kInfiniteStep, ad = kInfiniteStep;
      for (std::size_t k = 0; k < blocks(); ++k) {
        ap = std::min(ap, max_step(xchol[k], pred.dx[k]));
        ad = std::min(ad, max_step(zchol[k], pred.dz[k]));
      }
      ap = std::min(1.0, ap);
      ad = std::min(1.0, ad);
      double xz_aff = 0.0;
      for (std::size_t k = 0; k < blocks(); ++k) {
        xz_aff += frob_dot(x_[k] + ap * pred.dx[k], z_[k] + ad * pred.dz[k]);
      }
      double sigma = std::pow(std::max(0.0, xz_aff) / xz, 3.0);
      sigma = std::clamp(sigma, 0.0, 1.0);

      // Corrector.
      Direction corr = direction(schur, zinv, rp, rd, sigma * mu, &pred);
      double ap_max = kInfiniteStep, ad_max = kInfiniteStep;
      for (std::size_t k = 0; k < blocks(); ++k) {
        ap_max = std::min(ap_max, max_step(xchol[k], corr.dx[k]));
        ad_max = std::min(ad_max, max_step(zchol[k], corr.dz[k]));
      }
      const double tau = 0.9 + 0.09 * std::min({1.0, ap_max, ad_max});
      const double alpha_p = std::min(1.0, tau * ap_max);
      const double alpha_d = std::min(1.0, tau * ad_max);

      for (std::size_t k = 0; k < blocks(); ++k) {
        x_[k] = symmetrize(x_[k] + alpha_p * corr.dx[k]);
        z_[k] = symmetrize(z_[k] + alpha_d * corr.dz[k]);
      }
      y_ += alpha_d * corr.dy;

      stalled = (alpha_p < 1e-10 && alpha_d < 1e-10) ? stalled + 1 : 0;
      if (stalled >= 5) {
        r.status = Status::numerical_limit;
        r.detail = "step length stalled";
        r.iterations = iter + 1;
        break;
      }
    }
    r.y = y_;
    r.x = x_;
    r.z = z_;
    return r;
  }

 private:
  struct Direction {
    RealVector dy;
    std::vector<RealMatrix> dx;
    std::vector<RealMatrix> dz;
  };

  std::size_t blocks() const { return p_.blocks.size(); }

  void initialize() {
    y_ = RealVector::Zero(m_);
    x_.clear();
    z_.clear();
    for (std::size_t k = 0; k < blocks(); ++k) {
      const ConicBlock& blk = p_.blocks[k];
      const double n = static_cast<double>(blk.c.rows());
      double xi = std::max(10.0, std::sqrt(n));
      double eta = std::max({10.0, std::sqrt(n), blk.c.norm()});
      for (int i : active_[k]) {
        double a_norm = 0.0;
        for (const Entry& e : blk.coefficients[i]) a_norm += e.value * e.value;
        a_norm = std::sqrt(a_norm);
        xi = std::max(xi, n * (1.0 + std::abs(p_.b[i])) / (1.0 + a_norm));
        eta = std::max(eta, a_norm);
      }
      x_.push_back(xi * RealMatrix::Identity(blk.c.rows(), blk.c.cols()));
      z_.push_back(eta * RealMatrix::Identity(blk.c.rows(), blk.c.cols()));
    }
  }

  /// sum_i y_i A_{k,i}.
  RealMatrix apply_block(std::size_t k, const RealVector& y) const {
    const ConicBlock& blk = p_.blocks[k];
    RealMatrix out = RealMatrix::Zero(blk.c.rows(), blk.c.cols());
    for (int i : active_[k]) {
      const double yi = y[i];
      if (yi == 0.0) continue;
      for (const Entry& e : blk.coefficients[i]) out(e.row, e.col) += yi * e.value;
    }
    return out;
  }

  /// (sum_k <A_{k,i}, W_k>)_i.
  RealVector apply_adjoint(const std::vector<RealMatrix>& w) const {
    RealVector out = RealVector::Zero(m_);
    for (std::size_t k = 0; k < blocks(); ++k) {
      const ConicBlock& blk = p_.blocks[k];
      for (int i : active_[k]) {
        double acc = 0.0;
        for (const Entry& e : blk.coefficients[i]) acc += e.value * w[k](e.row, e.col);
        out[i] += acc;
      }
    }
    return out;
  }

  /// M_ij = sum_k Tr[A_ki X_k A_kj Z_k^{-1}].
  bool factor_schur(const std::vector<RealMatrix>& zinv, Eigen::LLT<RealMatrix>& schur) const {
    RealMatrix m = RealMatrix::Zero(m_, m_);
    for (std::size_t k = 0; k < blocks(); ++k) {
      const ConicBlock& blk = p_.blocks[k];
      const RealMatrix& x = x_[k];
      const RealMatrix& zi = zinv[k];
      const std::vector<int>& act = active_[k];
      for (std::size_t a = 0; a < act.size(); ++a) {
        const auto& ai = blk.coefficients[act[a]];
        for (std::size_t b = a; b < act.size(); ++b) {
          const auto& aj = blk.coefficients[act[b]];
          double acc = 0.0;
          // Tr[A_i X A_j Zinv] = sum A_i(r,c) X(c,r') A_j(r',c') Zinv(c',r).
          for (const Entry& ei : ai) {
            double inner_acc = 0.0;
            for (const Entry& ej : aj) inner_acc += ej.value * x(ei.col, ej.row) * zi(ej.col, ei.row);
            acc += ei.value * inner_acc;
          }
          m(act[a], act[b]) += acc;
        }
      }
    }
    m.triangularView<Eigen::StrictlyLower>() = m.transpose().triangularView<Eigen::StrictlyLower>();
    schur.compute(m);
    if (schur.info() == Eigen::Success) return true;
    const double diag = std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
    double shift = 1e-14 * diag;
    for (int attempt = 0; attempt < 6; ++attempt, shift *= 100.0) {
      RealMatrix reg = m;
      reg.diagonal().array() += shift;
      schur.compute(reg);
      if (schur.info() == Eigen::Success) return true;
    }
    return false;
  }

  /// Solves the HKM Newton system. target is sigma*mu; pred supplies the
  /// second-order correction dX_pred dZ_pred when non-null.
  Direction direction(const Eigen::LLT<RealMatrix>& schur, const std::vector<RealMatrix>& zinv,
                      const RealVector& rp, const std::vector<RealMatrix>& rd, double target,
                      const Direction* pred) const {
    std::vector<RealMatrix> kmat(blocks());
    for (std::size_t k = 0; k < blocks(); ++k) {
      const auto n = x_[k].rows();
      RealMatrix center = target * RealMatrix::Identity(n, n);
      if (pred) center -= pred->dx[k] * pred->dz[k];
      kmat[k] = center * zinv[k] - x_[k] - x_[k] * rd[k] * zinv[k];
    }
    Direction d;
    d.dy = schur.solve(rp - apply_adjoint_general(kmat));
    d.dx.resize(blocks());
    d.dz.resize(blocks());
    for (std::size_t k = 0; k < blocks(); ++k) {
      const RealMatrix ady = apply_block(k, d.dy);
      d.dz[k] = rd[k] - ady;
      d.dx[k] = symmetrize(kmat[k] + x_[k] * ady * zinv[k]);
    }
    return d;
  }

  /// Adjoint applied to possibly non-symmetric matrices: Tr[A_i K].
  RealVector apply_adjoint_general(const std::vector<RealMatrix>& kmat) const {
    RealVector out = RealVector::Zero(m_);
    for (std::size_t k = 0; k < blocks(); ++k) {
      const ConicBlock& blk = p_.blocks[k];
      for (int i : active_[k]) {
        double acc = 0.0;
        for (const Entry& e : blk.coefficients[i]) acc += e.value * kmat[k](e.col, e.row);
        out[i] += acc;
      }
    }
    return out;
  }

  /// Large iterates along a homogeneous direction certify infeasibility.
  bool detect_infeasibility(ConicResult& r, const RealVector& rp, const std::vector<RealMatrix>& rd,
                            double pobj, double dobj) const {
    double x_norm = 0.0;
    for (const RealMatrix& x : x_) x_norm += x.squaredNorm();
    x_norm = std::sqrt(x_norm);
    const double y_norm = y_.norm();
    const double tol = std::max(10.0 * opt_.tolerance, 1e-8);

    if (x_norm > 1e8 && dobj < 0.0) {
      // X / |<C,X>| approaches {X >= 0, A(X) = 0, <C,X> = -1}.
      const double ax = (p_.b - rp).norm();
      if (ax / -dobj < tol) {
        r.status = Status::infeasible;
        r.detail = "primal infeasible: constraints admit no feasible point";
        return true;
      }
    }
    if (y_norm > 1e8 && pobj > 0.0) {
      // y / b^T y approaches {-sum y_i A_i >= 0, b^T y = 1}.
      double resid = 0.0;
      for (std::size_t k = 0; k < blocks(); ++k) resid += (p_.blocks[k].c - rd[k]).squaredNorm();
      if (std::sqrt(resid) / pobj < tol) {
        r.status = Status::infeasible;
        r.detail = "dual infeasible: objective is unbounded";
        return true;
      }
    }
    return false;
  }

  const ConicProblem& p_;
  SolverOptions opt_;
  int m_;
  double total_size_ = 0.0;
  std::vector<std::vector<int>> active_;
  RealVector y_;
  std::vector<RealMatrix> x_;
  std::vector<RealMatrix> z_;
};

// ---------------------------------------------------------------------------
// Compilation of Hermitian problems into conic form.

/// Hermitian basis of an n x n space: diagonal units, then for each j < k
/// the real part E_jk + E_kj and the imaginary part i(E_jk - E_kj).
struct HermitianBasis {
  std::size_t n;
  std::vector<std::pair<std::size_t, std::size_t>> index;  // (j, k), j <= k
  std::vector<bool> imaginary;

  explicit HermitianBasis(std::size_t size) : n(size) {
    for (std::size_t k = 0; k < n; ++k) {
      index.emplace_back(k, k);
      imaginary.push_back(false);
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        index.emplace_back(j, k);
        imaginary.push_back(false);
        index.emplace_back(j, k);
        imaginary.push_back(true);
      }
    }
  }

  std::size_t count() const { return index.size(); }

  ComplexMatrix element(std::size_t p) const {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    const auto [j, k] = index[p];
    if (j == k) {
      m(j, j) = 1.0;
    } else if (!imaginary[p]) {
      m(j, k) = 1.0;
      m(k, j) = 1.0;
    } else {
      m(j, k) = Complex(0.0, 1.0);
      m(k, j) = Complex(0.0, -1.0);
    }
    return m;
  }

  /// Coordinates such that H = sum_p coords[p] * element(p).
  RealVector coordinates(const ComplexMatrix& h) const {
    RealVector c(count());
    for (std::size_t p = 0; p < count(); ++p) {
      const auto [j, k] = index[p];
      c[p] = imaginary[p] ? h(j, k).imag() : h(j, k).real();
    }
    return c;
  }

  /// Hermitian L with Tr[L H] = sum_p lambda[p] * coordinates(H)[p].
  ComplexMatrix functional(const RealVector& lambda) const {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (std::size_t p = 0; p < count(); ++p) {
      const auto [j, k] = index[p];
      if (j == k) {
        m(j, j) += lambda[p];
      } else if (!imaginary[p]) {
        m(j, k) += 0.5 * lambda[p];
        m(k, j) += 0.5 * lambda[p];
      } else {
        m(j, k) += Complex(0.0, 0.5 * lambda[p]);
        m(k, j) += Complex(0.0, -0.5 * lambda[p]);
      }
    }
    return m;
  }
};

std::vector<Entry> sparse_entries(const RealMatrix& m) {
  std::vector<Entry> out;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (m(r, c) != 0.0) out.push_back({static_cast<int>(r), static_cast<int>(c), m(r, c)});
    }
  }
  return out;
}

enum class BlockOrigin { constraint, variable };

struct BlockInfo {
  BlockOrigin origin;
  std::size_t index;  // into constraints or variables
};

struct EqualityInfo {
  std::size_t constraint;
  std::size_t first_row;
  std::size_t size;  // Hermitian side
};

struct Compiled {
  std::vector<std::size_t> offset;  // per variable
  std::vector<HermitianBasis> bases;
  std::size_t params = 0;
  ConicProblem conic;  // full parameter space
  std::vector<BlockInfo> block_info;
  RealMatrix eq_matrix;  // rows: E y + e0 = 0
  RealVector eq_offset;
  std::vector<EqualityInfo> equalities;
};

Compiled compile(const Problem& problem) {
  Compiled c;
  std::map<std::string, std::size_t> var_index;
  for (std::size_t v = 0; v < problem.variables().size(); ++v) {
    const Variable& var = problem.variables()[v];
    var_index[var.id] = v;
    c.offset.push_back(c.params);
    c.bases.emplace_back(var.size);
    c.params += c.bases.back().count();
  }
  const double sign = problem.sense() == Sense::maximize ? 1.0 : -1.0;

  c.conic.b = RealVector::Zero(c.params);
  for (const ObjectiveTerm& t : problem.objective()) {
    const std::size_t v = var_index.at(t.variable);
    const HermitianBasis& basis = c.bases[v];
    // Tr[W B_p] for the basis element B_p.
    for (std::size_t p = 0; p < basis.count(); ++p) {
      const auto [j, k] = basis.index[p];
      const ComplexMatrix& w = t.weight.matrix();
      double val;
      if (j == k) {
        val = w(j, j).real();
      } else if (!basis.imaginary[p]) {
        val = 2.0 * w(k, j).real();
      } else {
        val = -2.0 * w(k, j).imag();
      }
      c.conic.b[c.offset[v] + p] += sign * val;
    }
  }

  std::size_t eq_row_count = 0;
  std::vector<double> eq_offset;
  std::vector<std::vector<double>> eq_dense;  // row-major per equality row

  for (std::size_t ci = 0; ci < problem.constraints().size(); ++ci) {
    const Constraint& con = problem.constraints()[ci];
    const std::size_t s = problem.constraint_size(ci);
    std::vector<ComplexMatrix> coeff(c.params);  // lazily filled
    std::vector<bool> touched(c.params, false);
    for (const Term& t : con.expression.terms()) {
      const std::size_t v = var_index.at(t.variable);
      const HermitianBasis& basis = c.bases[v];
      for (std::size_t p = 0; p < basis.count(); ++p) {
        const std::size_t gp = c.offset[v] + p;
        ComplexMatrix out = sdp::apply(t.chain, basis.element(p));
        if (!touched[gp]) {
          coeff[gp] = std::move(out);
          touched[gp] = true;
        } else {
          coeff[gp] += out;
        }
      }
    }
    ComplexMatrix k0 = con.expression.constant_part() ? *con.expression.constant_part()
                                                      : ComplexMatrix::Zero(s, s);
    if (con.relation == Relation::psd) {
      ConicBlock blk;
      blk.c = real_embedding(ComplexMatrix(0.5 * (k0 + k0.adjoint())));
      blk.coefficients.resize(c.params);
      for (std::size_t gp = 0; gp < c.params; ++gp) {
        if (!touched[gp]) continue;
        const ComplexMatrix h = 0.5 * (coeff[gp] + coeff[gp].adjoint());
        blk.coefficients[gp] = sparse_entries(-real_embedding(h));
      }
      c.conic.blocks.push_back(std::move(blk));
      c.block_info.push_back({BlockOrigin::constraint, ci});
    } else {
      const HermitianBasis out_basis(s);
      const std::size_t rows = out_basis.count();
      c.equalities.push_back({ci, eq_row_count, s});
      const RealVector k0c = out_basis.coordinates(k0);
      std::vector<std::vector<double>> block_rows(rows, std::vector<double>(c.params, 0.0));
      for (std::size_t gp = 0; gp < c.params; ++gp) {
        if (!touched[gp]) continue;
        const RealVector col = out_basis.coordinates(coeff[gp]);
        for (std::size_t r = 0; r < rows; ++r) block_rows[r][gp] = col[r];
      }
      for (std::size_t r = 0; r < rows; ++r) {
        eq_dense.push_back(std::move(block_rows[r]));
        eq_offset.push_back(k0c[r]);
      }
      eq_row_count += rows;
    }
  }

  for (std::size_t v = 0; v < problem.variables().size(); ++v) {
    const Variable& var = problem.variables()[v];
    if (var.cone != Cone::psd) continue;
    const HermitianBasis& basis = c.bases[v];
    ConicBlock blk;
    blk.c = RealMatrix::Zero(2 * var.size, 2 * var.size);
    blk.coefficients.resize(c.params);
    for (std::size_t p = 0; p < basis.count(); ++p) {
      blk.coefficients[c.offset[v] + p] = sparse_entries(-real_embedding(basis.element(p)));
    }
    c.conic.blocks.push_back(std::move(blk));
    c.block_info.push_back({BlockOrigin::variable, v});
  }

  c.eq_matrix = RealMatrix::Zero(eq_row_count, c.params);
  c.eq_offset = RealVector::Zero(eq_row_count);
  for (std::size_t r = 0; r < eq_row_count; ++r) {
    for (std::size_t gp = 0; gp < c.params; ++gp) c.eq_matrix(r, gp) = eq_dense[r][gp];
    c.eq_offset[r] = eq_offset[r];
  }
  return c;
}

/// Affine parametrization y = y0 + N t of {y : E y + e0 = 0}.
struct Reduction {
  bool consistent = true;
  RealVector y0;
  RealMatrix null_basis;  // params x free
  std::vector<std::size_t> free_params;
};

Reduction eliminate(const RealMatrix& e, const RealVector& e0, std::size_t params) {
  Reduction red;
  red.y0 = RealVector::Zero(params);
  if (e.rows() == 0) {
    red.null_basis = RealMatrix::Identity(params, params);
    red.free_params.resize(params);
    std::iota(red.free_params.begin(), red.free_params.end(), 0);
    return red;
  }
  // Gauss-Jordan on [E | -e0] with the largest entry of each row as pivot.
  RealMatrix a(e.rows(), params + 1);
  a.leftCols(params) = e;
  a.col(params) = -e0;
  const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
  std::vector<bool> is_pivot(params, false);
  std::vector<std::pair<Eigen::Index, std::size_t>> pivots;  // (row, column)
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    Eigen::Index col = -1;
    double best = 0.0;
    for (std::size_t j = 0; j < params; ++j) {
      if (is_pivot[j]) continue;
      if (std::abs(a(r, j)) > best) {
        best = std::abs(a(r, j));
        col = static_cast<Eigen::Index>(j);
      }
    }
    if (col < 0 || best <= 1e-12 * scale) {
      if (std::abs(a(r, params)) > 1e-9 * std::max(1.0, e0.cwiseAbs().maxCoeff())) {
        red.consistent = false;
      }
      a.row(r).setZero();
      continue;
    }
    a.row(r) /= a(r, col);
    for (Eigen::Index other = 0; other < a.rows(); ++other) {
      if (other != r && a(other, col) != 0.0) a.row(other) -= a(other, col) * a.row(r);
    }
    is_pivot[static_cast<std::size_t>(col)] = true;
    pivots.emplace_back(r, static_cast<std::size_t>(col));
  }
  for (std::size_t j = 0; j < params; ++j) {
    if (!is_pivot[j]) red.free_params.push_back(j);
  }
  red.null_basis = RealMatrix::Zero(params, red.free_params.size());
  for (std::size_t f = 0; f < red.free_params.size(); ++f) {
    red.null_basis(red.free_params[f], f) = 1.0;
  }
  for (const auto& [row, col] : pivots) {
    red.y0[col] = a(row, params);
    for (std::size_t f = 0; f < red.free_params.size(); ++f) {
      red.null_basis(col, f) = -a(row, red.free_params[f]);
    }
  }
  return red;
}

ConicProblem reduce(const ConicProblem& full, const Reduction& red, double& offset) {
  ConicProblem out;
  const auto nfree = static_cast<Eigen::Index>(red.free_params.size());
  out.b = red.null_basis.transpose() * full.b;
  offset = full.b.dot(red.y0);
  const auto params = static_cast<std::size_t>(full.b.size());
  for (const ConicBlock& blk : full.blocks) {
    ConicBlock nb;
    const Eigen::Index n = blk.c.rows();
    // C' = C - sum_p y0_p A_p.
    nb.c = blk.c;
    for (std::size_t p = 0; p < params; ++p) {
      if (red.y0[p] == 0.0) continue;
      for (const Entry& e : blk.coefficients[p]) nb.c(e.row, e.col) -= red.y0[p] * e.value;
    }
    nb.coefficients.resize(nfree);
    for (Eigen::Index f = 0; f < nfree; ++f) {
      // A'_f = sum_p N(p, f) A_p; N is sparse when few pivots exist.
      std::vector<std::size_t> contributors;
      for (std::size_t p = 0; p < params; ++p) {
        if (red.null_basis(p, f) != 0.0 && !blk.coefficients[p].empty()) contributors.push_back(p);
      }
      if (contributors.empty()) continue;
      if (contributors.size() == 1 && red.null_basis(contributors[0], f) == 1.0) {
        nb.coefficients[f] = blk.coefficients[contributors[0]];
        continue;
      }
      RealMatrix acc = RealMatrix::Zero(n, n);
      for (std::size_t p : contributors) {
        for (const Entry& e : blk.coefficients[p]) acc(e.row, e.col) += red.null_basis(p, f) * e.value;
      }
      nb.coefficients[f] = sparse_entries(acc);
    }
    out.blocks.push_back(std::move(nb));
  }
  return out;
}

ComplexMatrix assemble_variable(const HermitianBasis& basis, const RealVector& y, std::size_t offset) {
  ComplexMatrix m = ComplexMatrix::Zero(basis.n, basis.n);
  for (std::size_t p = 0; p < basis.count(); ++p) {
    const double v = y[offset + p];
    if (v == 0.0) continue;
    const auto [j, k] = basis.index[p];
    if (j == k) {
      m(j, j) += v;
    } else if (!basis.imaginary[p]) {
      m(j, k) += v;
      m(k, j) += v;
    } else {
      m(j, k) += Complex(0.0, v);
      m(k, j) -= Complex(0.0, v);
    }
  }
  return m;
}

}  // namespace

ConicResult solve_conic(const ConicProblem& problem, const SolverOptions& options) {
  for (const ConicBlock& blk : problem.blocks) {
    if (blk.c.rows() != blk.c.cols()) throw InputError("conic block constant must be square");
    if (blk.coefficients.size() != static_cast<std::size_t>(problem.b.size())) {
      throw InputError("conic block coefficient count does not match the number of variables");
    }
  }
  if (problem.blocks.empty()) {
    ConicResult r;
    r.y = RealVector::Zero(problem.b.size());
    if (problem.b.size() == 0 || problem.b.isZero(0.0)) {
      r.status = Status::optimal;
    } else {
      r.status = Status::infeasible;
      r.detail = "dual infeasible: objective is unbounded";
    }
    return r;
  }
  ConicSolver solver(problem, options);
  return solver.run();
}

Solution solve(const Problem& problem, const SolverOptions& options) {
  if (!(options.tolerance >= 1e-10 && options.tolerance <= 1e-4)) {
    throw InputError("solver tolerance must lie in [1e-10, 1e-4]");
  }
  const Compiled c = compile(problem);
  const Reduction red = eliminate(c.eq_matrix, c.eq_offset, c.params);
  const double sign = problem.sense() == Sense::maximize ? 1.0 : -1.0;

  Solution sol;
  if (!red.consistent) {
    sol.status = Status::infeasible;
    sol.detail = "equality constraints are inconsistent";
    return sol;
  }
  double offset = 0.0;
  const ConicProblem reduced = reduce(c.conic, red, offset);
  const ConicResult r = solve_conic(reduced, options);

  sol.status = r.status;
  sol.detail = r.detail;
  sol.iterations = r.iterations;
  sol.primal_infeasibility = r.primal_infeasibility;
  sol.dual_infeasibility = r.dual_infeasibility;
  sol.primal_value = sign * (r.primal_objective + offset);
  sol.dual_value = sign * (r.dual_objective + offset);
  sol.gap = std::abs(sol.primal_value - sol.dual_value) /
            (1.0 + std::abs(sol.primal_value) + std::abs(sol.dual_value));

  const RealVector y = red.y0 + red.null_basis * r.y;
  for (std::size_t v = 0; v < problem.variables().size(); ++v) {
    sol.primal_vars.emplace(problem.variables()[v].id,
                            make_hermitian_unchecked(assemble_variable(c.bases[v], y, c.offset[v])));
  }
  if (r.x.size() != c.conic.blocks.size()) return sol;

  for (std::size_t k = 0; k < c.block_info.size(); ++k) {
    const BlockInfo& info = c.block_info[k];
    const std::string key = info.origin == BlockOrigin::constraint
                                ? problem.constraints()[info.index].name
                                : "psd:" + problem.variables()[info.index].id;
    // <embed(K), X> = 2 Re Tr[K proj(X)], so the complex multiplier is 2 proj(X).
    sol.dual_vars.emplace(key, 2.0 * from_real_embedding(r.x[k]));
  }
  if (!c.equalities.empty()) {
    // Stationarity in the full parameter space: E^T lambda = A(X) - b.
    RealVector ax = RealVector::Zero(c.params);
    for (std::size_t k = 0; k < c.conic.blocks.size(); ++k) {
      const ConicBlock& blk = c.conic.blocks[k];
      for (std::size_t p = 0; p < c.params; ++p) {
        for (const Entry& e : blk.coefficients[p]) ax[p] += e.value * r.x[k](e.row, e.col);
      }
    }
    const RealVector rhs = ax - c.conic.b;
    const RealVector lambda = c.eq_matrix.transpose().colPivHouseholderQr().solve(rhs);
    for (const EqualityInfo& eq : c.equalities) {
      const HermitianBasis out_basis(eq.size);
      const RealVector part = lambda.segment(eq.first_row, out_basis.count());
      sol.dual_vars.emplace(problem.constraints()[eq.constraint].name,
                            make_hermitian_unchecked(out_basis.functional(part)));
    }
  }
  return sol;
}

}  // namespace hsd::sdp
