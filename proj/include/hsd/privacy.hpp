#pragma once

// Restricted quantum local differential privacy audits.
//
// A mechanism A is (eps, delta)-private on a state set S under a measurement
// class iff E_{e^eps}(A(rho) || A(sigma)) <= delta for every ordered pair in
// S x S. The channel version replaces states by channels and the state
// divergence by the channel divergence.

#include "hsd/chandiv.hpp"

#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace hsd {

struct PrivacyParams {
  double epsilon = 0.0;
  double delta = 0.0;

  /// Throws InputError unless epsilon >= 0 and delta in [0, 1].
  void validate() const;
};

struct StateSet {
  std::string label;
  std::vector<DensityMatrix> states;

  /// Throws InputError if empty or dimensions/shapes are not uniform.
  void validate() const;
};

struct ChannelSet {
  std::string label;
  std::vector<ChoiOperator> channels;

  void validate() const;
};

struct AuditOptions {
  sdp::SolverOptions solver;
  std::size_t jobs = 1;
};

struct AuditReport {
  double epsilon = 0.0;
  MeasurementClass measurement_class = MeasurementClass::all;
  double achieved_delta = 0.0;
  /// First pair (row-major) attaining achieved_delta.
  std::pair<std::size_t, std::size_t> witness_pair{0, 0};
  /// pairwise[i][j] = E_{e^eps}(A(S_i) || A(S_j)); NaN where the solve failed.
  std::vector<std::vector<double>> pairwise;
  /// Gap per pair (0 for closed-form entries).
  std::vector<std::vector<double>> per_pair_gaps;
  /// Failure messages for pairs that did not solve, as (i, j, message).
  std::vector<std::tuple<std::size_t, std::size_t, std::string>> failures;
  bool complete = true;

  bool passes(double delta) const { return complete && achieved_delta <= delta; }
};

AuditReport audit_states(const ChoiOperator& mechanism, const StateSet& set, double epsilon,
                         MeasurementClass c, const AuditOptions& options = {});

AuditReport audit_channels(const ChannelSet& set, double epsilon, MeasurementClass c,
                           const AuditOptions& options = {});

/// (e^eps - 1 + 2 delta) / (e^eps + 1).
double contraction_bound(double epsilon, double delta);

/// 2 / (d + 1).
double werner_qldp_delta(std::size_t d);

}  // namespace hsd
