#pragma once

// Hockey-stick divergences between two states,
//
//   E_gamma(rho || sigma) = sup_M Tr[M (rho - gamma sigma)] - (1 - gamma)_+,
//
// with the supremum over all effects 0 <= M <= I, over PPT effects, or over
// a fixed list of effects (which only gives a lower bound).

#include "hsd/qobjects.hpp"
#include "hsd/sdp.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hsd {

enum class MeasurementClass { all, ppt, lo_star_lower };

enum class Method { closed_form, sdp_primal_dual, analytic, lower_bound, sdp, covariance_reduction };

std::string to_string(MeasurementClass c);
std::string to_string(Method m);
/// Accepts "all", "ppt", "lo_star_lower" (also "lo_star", "lo*").
MeasurementClass parse_measurement_class(const std::string& text);

struct DivergenceQuery {
  DensityMatrix rho;
  DensityMatrix sigma;
  double gamma = 1.0;
  MeasurementClass measurement_class = MeasurementClass::all;
};

struct DivergenceResult {
  double value = 0.0;
  /// Optimal (or best found) effect M.
  std::optional<HermitianOperator> witness;
  std::optional<double> dual_value;
  std::optional<double> gap;
  Method method = Method::closed_form;
  /// SDP-backed results: dual multipliers keyed by constraint name, plus
  /// any primal variables worth keeping (channel solves store Omega, rho_R).
  std::map<std::string, HermitianOperator> certificates;
  std::vector<std::string> notes;
};

/// sum_x max{0, P(x) - gamma Q(x)} - (1 - gamma)_+.
double hs_classical(const std::vector<double>& p, const std::vector<double>& q, double gamma);

/// Spectral closed form; valid for every gamma >= 0.
DivergenceResult hs_all(const DivergenceQuery& q);

/// PPT-restricted divergence by SDP. gamma < 1 goes through the reflection
/// E_gamma(rho||sigma) = gamma E_{1/gamma}(sigma||rho). Throws SolverError
/// when the solver does not certify an optimum.
DivergenceResult hs_ppt(const DivergenceQuery& q, const sdp::SolverOptions& options = {});

/// Dispatches on q.measurement_class. lo_star_lower uses
/// default_lo_star_family plus the best diagonal post-processing.
DivergenceResult hs_measured(const DivergenceQuery& q, const sdp::SolverOptions& options = {});

/// max over {0} and each M, I - M of Tr[M (rho - gamma sigma)], minus
/// (1 - gamma)_+. Throws InputError if some M is not between 0 and I.
DivergenceResult hs_lower_bound_from_measurements(const DivergenceQuery& q,
                                                  const std::vector<HermitianOperator>& measurements);

/// {0, sum_i |ii><ii|, I - sum_i |ii><ii|} on the given shape.
std::vector<HermitianOperator> default_lo_star_family(const BipartiteShape& shape);

/// Best effect of the form sum_{(i,j) in S} |i><i| (x) |j><j| for
/// delta = rho - gamma sigma: S collects the positive diagonal entries.
/// This is the optimum over all 2^(dA dB) diagonal 0/1 post-processings.
HermitianOperator best_diagonal_postprocessing(const HermitianOperator& delta);

// Primal and dual SDPs for the PPT divergence, gamma >= 1, delta = rho - gamma sigma.
//   primal: max Tr[M delta]  s.t. M, I - M, T_B(M), I - T_B(M) >= 0
//   dual:   min Tr[Y3 + Y4]  s.t. Y3 - Y1 + T_B(Y4 - Y2) >= delta, Y_i >= 0
// Primal constraint names are Y1 (M), Y3 (I - M), Y2 (T_B M), Y4 (I - T_B M)
// so that the multipliers carry the dual variable names.
sdp::Problem ppt_primal_problem(const HermitianOperator& delta);
sdp::Problem ppt_dual_problem(const HermitianOperator& delta);

// Closed forms; rho is the q-state, sigma the p-state. gamma < 1 throws.
double werner_hs_analytic(double p, double q, double gamma);
double werner_measured_analytic(double p, double q, std::size_t d, double gamma);
double isotropic_hs_analytic(double p, double q, double gamma);
double isotropic_measured_analytic(double p, double q, std::size_t d, double gamma);

}  // namespace hsd
