#include "hsd/privacy.hpp"

#include "hsd/error.hpp"
#include "hsd/parallel.hpp"

#include <cmath>
#include <limits>

namespace hsd {

namespace {

void check_class(MeasurementClass c) {
  if (c == MeasurementClass::lo_star_lower) {
    throw InputError("audits support the all and ppt classes only");
  }
}

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw InputError("epsilon must be a finite nonnegative number");
  }
}

struct PairOutcome {
  double value = std::numeric_limits<double>::quiet_NaN();
  double gap = 0.0;
  std::string error;
};

// Shared by both audits: fills the matrices, then reduces in index order.
template <class PairFn>
AuditReport run_audit(std::size_t n, double epsilon, MeasurementClass c, std::size_t jobs,
                      PairFn&& solve_pair) {
  AuditReport report;
  report.epsilon = epsilon;
  report.measurement_class = c;
  report.pairwise.assign(n, std::vector<double>(n, 0.0));
  report.per_pair_gaps.assign(n, std::vector<double>(n, 0.0));

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  std::vector<PairOutcome> outcomes(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t k) {
    PairOutcome& out = outcomes[k];
    try {
      const DivergenceResult r = solve_pair(pairs[k].first, pairs[k].second);
      out.value = r.value;
      out.gap = r.gap.value_or(0.0);
    } catch (const SolverError& e) {
      out.error = e.what();
    }
  });

  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    report.pairwise[i][j] = outcomes[k].value;
    report.per_pair_gaps[i][j] = outcomes[k].gap;
    if (!outcomes[k].error.empty()) {
      report.complete = false;
      report.failures.emplace_back(i, j, outcomes[k].error);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = report.pairwise[i][j];
      if (!std::isnan(v) && v > report.achieved_delta) {
        report.achieved_delta = v;
        report.witness_pair = {i, j};
      }
    }
  }
  return report;
}

}  // namespace

void PrivacyParams::validate() const {
  check_epsilon(epsilon);
  if (!(delta >= 0.0 && delta <= 1.0)) throw InputError("delta must lie in [0, 1]");
}

void StateSet::validate() const {
  if (states.empty()) throw InputError("state set '" + label + "' is empty");
  for (std::size_t k = 1; k < states.size(); ++k) {
    if (states[k].size() != states[0].size()) {
      throw InputError("state " + std::to_string(k) + " of set '" + label + "' has dimension " +
                       std::to_string(states[k].size()) + ", expected " + std::to_string(states[0].size()));
    }
    if (states[k].shape() != states[0].shape()) {
      throw InputError("state " + std::to_string(k) + " of set '" + label + "' has a different shape");
    }
  }
}

void ChannelSet::validate() const {
  if (channels.empty()) throw InputError("channel set '" + label + "' is empty");
  for (std::size_t k = 1; k < channels.size(); ++k) {
    if (channels[k].input_dim() != channels[0].input_dim() ||
        channels[k].output_dim() != channels[0].output_dim()) {
      throw InputError("channel " + std::to_string(k) + " of set '" + label + "' has different dimensions");
    }
  }
}

AuditReport audit_states(const ChoiOperator& mechanism, const StateSet& set, double epsilon,
                         MeasurementClass c, const AuditOptions& options) {
  check_epsilon(epsilon);
  check_class(c);
  set.validate();
  if (set.states[0].size() != mechanism.input_dim()) {
    throw InputError("mechanism input dimension " + std::to_string(mechanism.input_dim()) +
                     " does not match state dimension " + std::to_string(set.states[0].size()));
  }
  if (c == MeasurementClass::ppt && !mechanism.output_shape()) {
    throw InputError("a PPT audit needs a bipartite shape on the mechanism output");
  }
  std::vector<DensityMatrix> outputs;
  outputs.reserve(set.states.size());
  for (const DensityMatrix& rho : set.states) outputs.push_back(apply_channel(mechanism, rho));

  const double gamma = std::exp(epsilon);
  return run_audit(outputs.size(), epsilon, c, options.jobs, [&](std::size_t i, std::size_t j) {
    return hs_measured(DivergenceQuery{outputs[i], outputs[j], gamma, c}, options.solver);
  });
}

AuditReport audit_channels(const ChannelSet& set, double epsilon, MeasurementClass c,
                           const AuditOptions& options) {
  check_epsilon(epsilon);
  check_class(c);
  set.validate();
  const double gamma = std::exp(epsilon);
  return run_audit(set.channels.size(), epsilon, c, options.jobs, [&](std::size_t i, std::size_t j) {
    return channel_hs(ChannelPair(set.channels[i], set.channels[j], gamma), c, options.solver);
  });
}

double contraction_bound(double epsilon, double delta) {
  PrivacyParams{epsilon, delta}.validate();
  const double e = std::exp(epsilon);
  return (e - 1.0 + 2.0 * delta) / (e + 1.0);
}

double werner_qldp_delta(std::size_t d) {
  if (d < 2) throw InputError("Werner states need d >= 2");
  return 2.0 / (static_cast<double>(d) + 1.0);
}

}  // namespace hsd
