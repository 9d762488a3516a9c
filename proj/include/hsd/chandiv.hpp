#pragma once

// Channel hockey-stick divergences
//
//   E_gamma(P || Q) = sup_{rho_RA} E_gamma(P(rho_RA) || Q(rho_RA))
//
// with R isomorphic to A, computed from Choi operators by SDP.

#include "hsd/divergence.hpp"

namespace hsd {

struct ChannelPair {
  ChoiOperator p;
  ChoiOperator q;
  double gamma = 1.0;

  /// Throws InputError on dimension mismatch or gamma < 1.
  ChannelPair(ChoiOperator p, ChoiOperator q, double gamma);
};

/// Caller-supplied symmetry assertion; nothing here is verified.
struct CovarianceDeclaration {
  bool covariant = false;
  bool irreducible_input_rep = false;
};

// All measurements:
//   max Tr[Omega (G_P - gamma G_Q)]  s.t.  Tr[rho_R] = 1, 0 <= Omega <= rho_R (x) I, rho_R >= 0
// Constraint multipliers: mu (trace), Z (Omega <= rho_R (x) I).
DivergenceResult channel_hs_all(const ChannelPair& pair, const sdp::SolverOptions& options = {});

// PPT measurements: additionally T_B(Omega) >= 0 (multiplier L) and
// T_B(Omega) <= rho_R (x) I (multiplier Y).
DivergenceResult channel_hs_ppt(const ChannelPair& pair, const sdp::SolverOptions& options = {});

/// Dispatch for MeasurementClass::all and ::ppt.
DivergenceResult channel_hs(const ChannelPair& pair, MeasurementClass c,
                            const sdp::SolverOptions& options = {});

sdp::Problem channel_all_problem(const ChannelPair& pair);
sdp::Problem channel_ppt_problem(const ChannelPair& pair);

/// State divergence of the normalized Choi states. Valid when the pair is
/// jointly covariant with an irreducible input representation, which the
/// caller asserts through decl.
DivergenceResult channel_hs_via_covariance(const ChannelPair& pair, const CovarianceDeclaration& decl,
                                           MeasurementClass c, const sdp::SolverOptions& options = {});

// Depolarizing channels with Choi (1 - x)|Gamma><Gamma| + (x / d) I, comparing
// the q-channel against the p-channel.
double depolarizing_channel_all_analytic(double q, double p, std::size_t d, double gamma);
double depolarizing_channel_ppt_analytic(double q, double p, std::size_t d, double gamma);

}  // namespace hsd
