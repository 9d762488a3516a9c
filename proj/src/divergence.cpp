#include "hsd/divergence.hpp"

#include "hsd/error.hpp"

#include <algorithm>
#include <cmath>

namespace hsd {

namespace {

double offset(double gamma) { return std::max(0.0, 1.0 - gamma); }

void check_gamma(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw InputError("gamma must be a finite nonnegative number, got " + std::to_string(gamma));
  }
}

void check_query(const DivergenceQuery& q) {
  check_gamma(q.gamma);
  if (q.rho.size() != q.sigma.size()) {
    throw InputError("state dimensions differ: " + std::to_string(q.rho.size()) + " vs " +
                     std::to_string(q.sigma.size()));
  }
  if (q.measurement_class != MeasurementClass::all) {
    if (!q.rho.shape() || !q.sigma.shape()) {
      throw InputError(to_string(q.measurement_class) + " divergence needs a bipartite shape on both states");
    }
    if (!(*q.rho.shape() == *q.sigma.shape())) {
      throw InputError("bipartite shapes of the two states differ");
    }
  }
}

HermitianOperator difference(const DivergenceQuery& q) {
  HermitianOperator delta = q.rho.op() - q.gamma * q.sigma.op();
  return delta.with_shape(q.rho.shape());
}

void check_closed_form_args(double p, double q, double gamma) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
    throw InputError("p and q must lie in [0, 1]");
  }
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
    throw InputError("closed forms need gamma >= 1; use hs_measured for gamma < 1");
  }
}

// Shrinks M toward I/2 so that 0 <= M <= I and, for PPT, 0 <= T_B(M) <= I
// hold exactly despite interior-point residuals.
HermitianOperator clip_effect(const HermitianOperator& m, bool ppt) {
  double excess = std::max(-min_eigenvalue(m), max_eigenvalue(m) - 1.0);
  if (ppt) {
    const HermitianOperator t = partial_transpose(m, Subsystem::B);
    excess = std::max({excess, -min_eigenvalue(t), max_eigenvalue(t) - 1.0});
  }
  if (excess <= 0.0) return m;
  const HermitianOperator id = HermitianOperator::identity(m.size(), m.shape());
  return (1.0 / (1.0 + 2.0 * excess)) * (m + excess * id);
}

DivergenceQuery reflected(const DivergenceQuery& q) {
  return DivergenceQuery{q.sigma, q.rho, 1.0 / q.gamma, q.measurement_class};
}

DivergenceResult reflect_back(DivergenceResult r, double gamma) {
  r.value *= gamma;
  if (r.dual_value) *r.dual_value *= gamma;
  if (r.witness) {
    r.witness = HermitianOperator::identity(r.witness->size(), r.witness->shape()) - *r.witness;
  }
  r.notes.push_back("computed as gamma * E_{1/gamma}(sigma || rho)");
  return r;
}

DivergenceResult zero_gamma(const DivergenceQuery& q, Method method) {
  DivergenceResult r;
  r.value = 0.0;
  r.witness = HermitianOperator::identity(q.rho.size(), q.rho.shape());
  r.method = method;
  r.notes.push_back("gamma = 0: the identity effect attains sup Tr[M rho] = 1");
  return r;
}

DivergenceResult lo_star_lower(const DivergenceQuery& q) {
  const HermitianOperator delta = difference(q);
  std::vector<HermitianOperator> family = default_lo_star_family(*q.rho.shape());
  family.push_back(best_diagonal_postprocessing(delta));
  return hs_lower_bound_from_measurements(q, family);
}

}  // namespace

std::string to_string(MeasurementClass c) {
  switch (c) {
    case MeasurementClass::all: return "all";
    case MeasurementClass::ppt: return "ppt";
    case MeasurementClass::lo_star_lower: return "lo_star_lower";
  }
  return "?";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::closed_form: return "closed_form";
    case Method::sdp_primal_dual: return "sdp_primal_dual";
    case Method::analytic: return "analytic";
    case Method::lower_bound: return "lower_bound";
    case Method::sdp: return "sdp";
    case Method::covariance_reduction: return "covariance_reduction";
  }
  return "?";
}

MeasurementClass parse_measurement_class(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "all") return MeasurementClass::all;
  if (t == "ppt") return MeasurementClass::ppt;
  if (t == "lo_star_lower" || t == "lo_star" || t == "lo*") return MeasurementClass::lo_star_lower;
  throw InputError("unknown measurement class '" + text + "' (expected all, ppt or lo_star_lower)");
}

double hs_classical(const std::vector<double>& p, const std::vector<double>& q, double gamma) {
  check_gamma(gamma);
  if (p.size() != q.size()) {
    throw InputError("distributions have different lengths: " + std::to_string(p.size()) + " vs " +
                     std::to_string(q.size()));
  }
  if (p.empty()) throw InputError("distributions must be non-empty");
  double sp = 0.0, sq = 0.0, sum = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (!(p[x] >= 0.0) || !(q[x] >= 0.0)) throw InputError("probabilities must be nonnegative");
    sp += p[x];
    sq += q[x];
    sum += std::max(0.0, p[x] - gamma * q[x]);
  }
  if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9) {
    throw InputError("distributions must sum to 1");
  }
  return sum - offset(gamma);
}

DivergenceResult hs_all(const DivergenceQuery& q) {
  check_gamma(q.gamma);
  if (q.rho.size() != q.sigma.size()) {
    throw InputError("state dimensions differ: " + std::to_string(q.rho.size()) + " vs " +
                     std::to_string(q.sigma.size()));
  }
  const HermitianOperator delta = difference(q);
  const EigenDecomposition eig = hermitian_eig(delta);
  double positive = 0.0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values[k] > kZeroEigenvalue) positive += eig.values[k];
  }
  DivergenceResult r;
  r.value = std::max(0.0, positive - offset(q.gamma));
  r.witness = positive_projector(delta);
  r.method = Method::closed_form;
  return r;
}

sdp::Problem ppt_primal_problem(const HermitianOperator& delta) {
  const BipartiteShape& s = delta.require_shape();
  const HermitianOperator id = HermitianOperator::identity(delta.size());
  using sdp::constant;
  using sdp::var;
  sdp::ProblemBuilder b;
  b.variable("M", delta.size())
      .objective(delta.with_shape(std::nullopt), "M")
      .constraint("Y1", var("M"))
      .constraint("Y3", constant(id) - var("M"))
      .constraint("Y2", var("M").partial_transpose_b(s.dim_b))
      .constraint("Y4", constant(id) - var("M").partial_transpose_b(s.dim_b));
  return b.build();
}

sdp::Problem ppt_dual_problem(const HermitianOperator& delta) {
  const BipartiteShape& s = delta.require_shape();
  const std::size_t n = delta.size();
  const HermitianOperator id = HermitianOperator::identity(n);
  using sdp::Cone;
  using sdp::constant;
  using sdp::var;
  sdp::ProblemBuilder b;
  b.sense(sdp::Sense::minimize)
      .variable("Y1", n, Cone::psd)
      .variable("Y2", n, Cone::psd)
      .variable("Y3", n, Cone::psd)
      .variable("Y4", n, Cone::psd)
      .objective(id, "Y3")
      .objective(id, "Y4")
      .constraint("M", var("Y3") - var("Y1") + (var("Y4") - var("Y2")).partial_transpose_b(s.dim_b) -
                           constant(delta.with_shape(std::nullopt)));
  return b.build();
}

DivergenceResult hs_ppt(const DivergenceQuery& q, const sdp::SolverOptions& options) {
  DivergenceQuery query = q;
  query.measurement_class = MeasurementClass::ppt;
  check_query(query);
  if (query.gamma == 0.0) return zero_gamma(query, Method::sdp_primal_dual);
  if (query.gamma < 1.0) return reflect_back(hs_ppt(reflected(query), options), query.gamma);

  const HermitianOperator delta = difference(query);
  const sdp::Solution sol = sdp::solve(ppt_primal_problem(delta), options);
  if (!sol.optimal()) {
    throw SolverError("PPT divergence SDP ended with status " + sdp::to_string(sol.status) + ": " +
                      sol.detail);
  }
  DivergenceResult r;
  r.method = Method::sdp_primal_dual;
  r.value = std::max(0.0, sol.primal_value);
  r.dual_value = sol.dual_value;
  r.gap = sol.gap;
  r.witness = clip_effect(sol.primal("M").with_shape(delta.shape()), true);
  for (const char* name : {"Y1", "Y2", "Y3", "Y4"}) {
    r.certificates.emplace(name, sol.dual(name).with_shape(delta.shape()));
  }
  return r;
}

DivergenceResult hs_lower_bound_from_measurements(const DivergenceQuery& q,
                                                  const std::vector<HermitianOperator>& measurements) {
  check_gamma(q.gamma);
  if (q.rho.size() != q.sigma.size()) throw InputError("state dimensions differ");
  const HermitianOperator delta = difference(q);
  const std::size_t n = delta.size();
  const HermitianOperator id = HermitianOperator::identity(n, delta.shape());

  DivergenceResult r;
  r.method = Method::lower_bound;
  r.witness = HermitianOperator::zero(n, delta.shape());
  double best = 0.0;
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    const HermitianOperator& m = measurements[k];
    if (m.size() != n) {
      throw InputError("measurement " + std::to_string(k) + " has side " + std::to_string(m.size()) +
                       ", expected " + std::to_string(n));
    }
    if (!is_measurement_operator(m, 1e-8)) {
      throw InputError("measurement " + std::to_string(k) + " is not between 0 and I");
    }
    const double v = inner(m, delta);
    const double vc = delta.trace() - v;  // Tr[(I - M) delta]
    if (v > best) {
      best = v;
      r.witness = m.with_shape(delta.shape());
    }
    if (vc > best) {
      best = vc;
      r.witness = (id - m).with_shape(delta.shape());
    }
  }
  r.value = std::max(0.0, best - offset(q.gamma));
  r.notes.push_back("lower bound from " + std::to_string(measurements.size()) + " fixed effects");
  return r;
}

std::vector<HermitianOperator> default_lo_star_family(const BipartiteShape& shape) {
  const std::size_t n = shape.size();
  RealVector diag = RealVector::Zero(static_cast<Eigen::Index>(n));
  const std::size_t m = std::min(shape.dim_a, shape.dim_b);
  for (std::size_t i = 0; i < m; ++i) diag[static_cast<Eigen::Index>(i * shape.dim_b + i)] = 1.0;
  const HermitianOperator p = HermitianOperator::diagonal(diag, shape);
  return {HermitianOperator::zero(n, shape), p, HermitianOperator::identity(n, shape) - p};
}

HermitianOperator best_diagonal_postprocessing(const HermitianOperator& delta) {
  const auto n = static_cast<Eigen::Index>(delta.size());
  RealVector diag = RealVector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (delta.matrix()(k, k).real() > 0.0) diag[k] = 1.0;
  }
  return HermitianOperator::diagonal(diag, delta.shape());
}

DivergenceResult hs_measured(const DivergenceQuery& q, const sdp::SolverOptions& options) {
  check_query(q);
  const Method method = q.measurement_class == MeasurementClass::all   ? Method::closed_form
                        : q.measurement_class == MeasurementClass::ppt ? Method::sdp_primal_dual
                                                                       : Method::lower_bound;
  if (q.gamma == 0.0) return zero_gamma(q, method);
  if (q.gamma < 1.0) return reflect_back(hs_measured(reflected(q), options), q.gamma);
  switch (q.measurement_class) {
    case MeasurementClass::all: return hs_all(q);
    case MeasurementClass::ppt: return hs_ppt(q, options);
    case MeasurementClass::lo_star_lower: return lo_star_lower(q);
  }
  throw InputError("unknown measurement class");
}

double werner_hs_analytic(double p, double q, double gamma) {
  check_closed_form_args(p, q, gamma);
  return std::max({0.0, q - gamma * p, (1.0 - q) - gamma * (1.0 - p)});
}

double werner_measured_analytic(double p, double q, std::size_t d, double gamma) {
  check_closed_form_args(p, q, gamma);
  if (d < 2) throw InputError("Werner states need d >= 2");
  const double t = 2.0 * (q - gamma * p) / (static_cast<double>(d) + 1.0);
  return std::max({0.0, t, 1.0 - gamma - t});
}

double isotropic_hs_analytic(double p, double q, double gamma) {
  check_closed_form_args(p, q, gamma);
  return std::max({0.0, q - gamma * p, (1.0 - q) - gamma * (1.0 - p)});
}

double isotropic_measured_analytic(double p, double q, std::size_t d, double gamma) {
  check_closed_form_args(p, q, gamma);
  if (d < 2) throw InputError("isotropic states need d >= 2");
  const double dd = static_cast<double>(d);
  const double rest = 1.0 - q - gamma * (1.0 - p);
  return std::max({0.0, q - gamma * p + rest / (dd + 1.0), dd / (dd + 1.0) * rest});
}

}  // namespace hsd
