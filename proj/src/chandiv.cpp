#include "hsd/chandiv.hpp"

#include "hsd/error.hpp"

#include <algorithm>
#include <cmath>

namespace hsd {

namespace {

HermitianOperator choi_difference(const ChannelPair& pair) {
  return make_hermitian_unchecked(pair.p.matrix() - pair.gamma * pair.q.matrix());
}

void check_depolarizing_args(double q, double p, std::size_t d, double gamma) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
    throw InputError("depolarizing parameters must lie in [0, 1]");
  }
  if (d < 1) throw InputError("dimension must be at least 1");
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) throw InputError("channel divergences need gamma >= 1");
}

DivergenceResult solve_channel(const sdp::Problem& problem, const BipartiteShape& shape,
                               std::initializer_list<const char*> duals,
                               const sdp::SolverOptions& options) {
  const sdp::Solution sol = sdp::solve(problem, options);
  if (!sol.optimal()) {
    throw SolverError("channel divergence SDP ended with status " + sdp::to_string(sol.status) + ": " +
                      sol.detail);
  }
  DivergenceResult r;
  r.method = Method::sdp;
  r.value = std::max(0.0, sol.primal_value);
  r.dual_value = sol.dual_value;
  r.gap = sol.gap;
  r.certificates.emplace("Omega", sol.primal("Omega").with_shape(shape));
  r.certificates.emplace("rho_R", sol.primal("rho_R"));
  for (const char* name : duals) {
    const HermitianOperator& y = sol.dual(name);
    r.certificates.emplace(name, y.size() == shape.size() ? y.with_shape(shape) : y);
  }
  return r;
}

}  // namespace

ChannelPair::ChannelPair(ChoiOperator p_, ChoiOperator q_, double gamma_)
    : p(std::move(p_)), q(std::move(q_)), gamma(gamma_) {
  if (p.input_dim() != q.input_dim() || p.output_dim() != q.output_dim()) {
    throw InputError("channel dimensions differ: " + std::to_string(p.input_dim()) + "->" +
                     std::to_string(p.output_dim()) + " vs " + std::to_string(q.input_dim()) + "->" +
                     std::to_string(q.output_dim()));
  }
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
    throw InputError("channel divergences need gamma >= 1, got " + std::to_string(gamma));
  }
}

sdp::Problem channel_all_problem(const ChannelPair& pair) {
  using sdp::Cone;
  using sdp::constant;
  using sdp::var;
  const std::size_t dr = pair.p.input_dim();
  const std::size_t db = pair.p.output_dim();
  sdp::ProblemBuilder b;
  b.variable("Omega", dr * db, Cone::psd)
      .variable("rho_R", dr, Cone::psd)
      .objective(choi_difference(pair), "Omega")
      .constraint("mu", constant(HermitianOperator::identity(1)) - var("rho_R").partial_trace_b(dr),
                  sdp::Relation::zero)
      .constraint("Z", var("rho_R").tensor_identity_right(db) - var("Omega"));
  return b.build();
}

sdp::Problem channel_ppt_problem(const ChannelPair& pair) {
  using sdp::Cone;
  using sdp::constant;
  using sdp::var;
  const std::size_t dr = pair.p.input_dim();
  const std::size_t db = pair.p.output_dim();
  sdp::ProblemBuilder b;
  b.variable("Omega", dr * db, Cone::psd)
      .variable("rho_R", dr, Cone::psd)
      .objective(choi_difference(pair), "Omega")
      .constraint("mu", constant(HermitianOperator::identity(1)) - var("rho_R").partial_trace_b(dr),
                  sdp::Relation::zero)
      .constraint("Z", var("rho_R").tensor_identity_right(db) - var("Omega"))
      .constraint("L", var("Omega").partial_transpose_b(db))
      .constraint("Y", var("rho_R").tensor_identity_right(db) - var("Omega").partial_transpose_b(db));
  return b.build();
}

DivergenceResult channel_hs_all(const ChannelPair& pair, const sdp::SolverOptions& options) {
  const BipartiteShape shape{pair.p.input_dim(), pair.p.output_dim()};
  return solve_channel(channel_all_problem(pair), shape, {"mu", "Z"}, options);
}

DivergenceResult channel_hs_ppt(const ChannelPair& pair, const sdp::SolverOptions& options) {
  const BipartiteShape shape{pair.p.input_dim(), pair.p.output_dim()};
  return solve_channel(channel_ppt_problem(pair), shape, {"mu", "Z", "L", "Y"}, options);
}

DivergenceResult channel_hs(const ChannelPair& pair, MeasurementClass c, const sdp::SolverOptions& options) {
  switch (c) {
    case MeasurementClass::all: return channel_hs_all(pair, options);
    case MeasurementClass::ppt: return channel_hs_ppt(pair, options);
    case MeasurementClass::lo_star_lower: break;
  }
  throw InputError("channel divergences support the all and ppt classes only");
}

DivergenceResult channel_hs_via_covariance(const ChannelPair& pair, const CovarianceDeclaration& decl,
                                           MeasurementClass c, const sdp::SolverOptions& options) {
  if (decl.irreducible_input_rep && !decl.covariant) {
    throw InputError("an irreducible input representation presupposes a covariant pair");
  }
  if (!decl.irreducible_input_rep) {
    throw InputError("the covariance shortcut needs an irreducible input representation");
  }
  if (c == MeasurementClass::lo_star_lower) {
    throw InputError("channel divergences support the all and ppt classes only");
  }
  DivergenceQuery q{choi_state(pair.p), choi_state(pair.q), pair.gamma, c};
  DivergenceResult r = hs_measured(q, options);
  r.method = Method::covariance_reduction;
  r.notes.push_back("evaluated at the maximally entangled input; covariance asserted by caller");
  return r;
}

double depolarizing_channel_all_analytic(double q, double p, std::size_t d, double gamma) {
  check_depolarizing_args(q, p, d, gamma);
  const double d2 = static_cast<double>(d * d);
  const double t = q - gamma * p;
  return std::max({0.0, (1.0 - q) - gamma * (1.0 - p) + t / d2, t - t / d2});
}

double depolarizing_channel_ppt_analytic(double q, double p, std::size_t d, double gamma) {
  check_depolarizing_args(q, p, d, gamma);
  const double dd = static_cast<double>(d);
  const double t = q - gamma * p;
  return std::max({0.0, 1.0 - q - gamma * (1.0 - p) + t / dd, (dd - 1.0) / dd * t});
}

}  // namespace hsd
