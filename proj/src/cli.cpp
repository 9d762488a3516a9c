#include "hsd/cli.hpp"

#include "hsd/error.hpp"
#include "hsd/io.hpp"
#include "hsd/parallel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

namespace hsd::cli {

namespace {

using io::Json;

struct RunConfig {
  std::vector<std::string> inputs;
  std::string gamma = "1";
  std::string epsilon = "0";
  std::string measurement_class = "ppt";
  double tol = sdp::default_tolerance();
  int max_iterations = 200;
  std::string out;
  std::string grid = "0:1:11";
  std::string dims = "2";
  std::size_t jobs = default_jobs();
  std::string config;
  std::string mechanism;
  std::string states;
  std::string channels;
  std::string family;
  double p = 0.0;
  std::size_t d = 2;
  std::string kind = "auto";
  bool witness = false;
  bool covariant_irreducible = false;
  ValidationTolerances tolerances;
};

// Fills options the user did not pass on the command line from the config
// file named by --config.
class ConfigOverlay {
 public:
  explicit ConfigOverlay(const std::string& path) {
    if (!path.empty()) json_ = io::read_json_file(path);
    if (!json_.is_null() && !json_.is_object()) throw InputError("config file must hold a JSON object");
  }

  template <class T>
  void fill(const CLI::App& app, const std::string& flag, const std::string& key, T& target) const {
    if (json_.is_null() || given(app, flag)) return;
    auto it = json_.find(key);
    if (it == json_.end()) return;
    try {
      target = it->get<T>();
    } catch (const Json::exception&) {
      throw InputError("config field '" + key + "' has the wrong type");
    }
  }

  // Numbers and lists in the config are accepted for fields that the
  // command line takes as text ("1.5", "0,1").
  void fill_text(const CLI::App& app, const std::string& flag, const std::string& key,
                 std::string& target) const {
    if (json_.is_null() || given(app, flag)) return;
    auto it = json_.find(key);
    if (it == json_.end()) return;
    if (it->is_string()) {
      target = it->get<std::string>();
    } else if (it->is_number()) {
      std::ostringstream os;
      os << std::setprecision(17) << it->get<double>();
      target = os.str();
    } else if (it->is_array()) {
      std::ostringstream os;
      os << std::setprecision(17);
      for (std::size_t k = 0; k < it->size(); ++k) {
        if (!(*it)[k].is_number()) throw InputError("config field '" + key + "' must hold numbers");
        os << (k ? "," : "") << (*it)[k].get<double>();
      }
      target = os.str();
    } else {
      throw InputError("config field '" + key + "' has the wrong type");
    }
  }

  void fill_tolerances(ValidationTolerances& tol) const {
    if (json_.is_null()) return;
    auto it = json_.find("tolerances");
    if (it == json_.end()) return;
    for (auto [key, target] : {std::pair{"psd", &tol.psd}, std::pair{"trace", &tol.trace},
                               std::pair{"trace_preservation", &tol.trace_preservation}}) {
      if (auto f = it->find(key); f != it->end()) {
        if (!f->is_number()) throw InputError(std::string("config field 'tolerances.") + key + "' must be a number");
        *target = f->get<double>();
      }
    }
  }

 private:
  static bool given(const CLI::App& app, const std::string& flag) {
    const CLI::Option* o = app.get_option_no_throw(flag);
    return o != nullptr && o->count() > 0;
  }

  Json json_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(15) << v;
  return os.str();
}

double single_real(const std::string& text, const std::string& what) {
  const std::vector<double> v = parse_reals(text, what);
  if (v.size() != 1) throw InputError(what + " expects a single value");
  return v.front();
}

void emit(const RunConfig& cfg, std::ostream& out, const std::string& content) {
  if (cfg.out.empty() || cfg.out == "-") {
    out << content;
    out.flush();
  } else {
    io::write_text(cfg.out, content);
  }
}

sdp::SolverOptions solver_options(const RunConfig& cfg) {
  sdp::SolverOptions o;
  o.tolerance = cfg.tol;
  o.max_iterations = cfg.max_iterations;
  if (cfg.max_iterations < 1) throw InputError("--max-iterations must be positive");
  if (!(cfg.tol >= 1e-10 && cfg.tol <= 1e-4)) throw InputError("--tol must lie in [1e-10, 1e-4]");
  return o;
}

// ---------------------------------------------------------------------------

int cmd_state_div(const RunConfig& cfg, std::ostream& out) {
  if (cfg.inputs.size() != 2) throw InputError("state-div needs exactly two state files");
  const DensityMatrix rho = io::state_from_json(io::read_json_file(cfg.inputs[0]), cfg.inputs[0], cfg.tolerances);
  const DensityMatrix sigma = io::state_from_json(io::read_json_file(cfg.inputs[1]), cfg.inputs[1], cfg.tolerances);
  const double gamma = single_real(cfg.gamma, "--gamma");
  const MeasurementClass c = parse_measurement_class(cfg.measurement_class);
  const DivergenceResult r = hs_measured(DivergenceQuery{rho, sigma, gamma, c}, solver_options(cfg));
  emit(cfg, out, io::result_to_json(r, c, gamma, cfg.witness).dump(2) + "\n");
  return kOk;
}

int cmd_channel_div(const RunConfig& cfg, std::ostream& out) {
  if (cfg.inputs.size() != 2) throw InputError("channel-div needs exactly two Choi files");
  ChoiOperator p = io::choi_from_json(io::read_json_file(cfg.inputs[0]), cfg.inputs[0], cfg.tolerances);
  ChoiOperator q = io::choi_from_json(io::read_json_file(cfg.inputs[1]), cfg.inputs[1], cfg.tolerances);
  const double gamma = single_real(cfg.gamma, "--gamma");
  const MeasurementClass c = parse_measurement_class(cfg.measurement_class);
  const ChannelPair pair(std::move(p), std::move(q), gamma);
  const DivergenceResult r =
      cfg.covariant_irreducible
          ? channel_hs_via_covariance(pair, CovarianceDeclaration{true, true}, c, solver_options(cfg))
          : channel_hs(pair, c, solver_options(cfg));
  emit(cfg, out, io::result_to_json(r, c, gamma, false).dump(2) + "\n");
  return kOk;
}

int cmd_audit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.states.empty() == cfg.channels.empty()) {
    throw InputError("audit needs exactly one of --states or --channels");
  }
  const MeasurementClass c = parse_measurement_class(cfg.measurement_class);
  const std::vector<double> eps = parse_reals(cfg.epsilon, "--epsilon");
  AuditOptions options;
  options.solver = solver_options(cfg);
  options.jobs = cfg.jobs;

  std::vector<AuditReport> reports;
  if (!cfg.states.empty()) {
    const StateSet set = io::state_set_from_json(io::read_json_file(cfg.states), cfg.states, cfg.tolerances);
    std::optional<ChoiOperator> mechanism;
    if (!cfg.mechanism.empty() && cfg.mechanism != "identity") {
      mechanism = io::choi_from_json(io::read_json_file(cfg.mechanism), cfg.mechanism, cfg.tolerances);
    } else {
      mechanism = identity_choi(set.states.front().size(), set.states.front().shape());
    }
    for (double e : eps) reports.push_back(audit_states(*mechanism, set, e, c, options));
  } else {
    if (!cfg.mechanism.empty()) throw InputError("--mechanism applies to state audits only");
    const ChannelSet set =
        io::channel_set_from_json(io::read_json_file(cfg.channels), cfg.channels, cfg.tolerances);
    for (double e : eps) reports.push_back(audit_channels(set, e, c, options));
  }

  bool complete = true;
  for (const AuditReport& r : reports) {
    complete = complete && r.complete;
    for (const auto& [i, j, msg] : r.failures) {
      err << "pair (" << i << ", " << j << ") at epsilon " << r.epsilon << " failed: " << msg << "\n";
    }
  }
  if (reports.size() == 1) {
    emit(cfg, out, io::audit_to_json(reports.front()).dump(2) + "\n");
  } else {
    std::ostringstream csv;
    csv << "epsilon,achieved_delta,witness_i,witness_j,complete,contraction_bound\n";
    for (const AuditReport& r : reports) {
      csv << fmt(r.epsilon) << "," << fmt(r.achieved_delta) << "," << r.witness_pair.first << ","
          << r.witness_pair.second << "," << (r.complete ? "true" : "false") << ","
          << fmt(contraction_bound(r.epsilon, std::min(1.0, r.achieved_delta))) << "\n";
    }
    emit(cfg, out, csv.str());
  }
  return complete ? kOk : kIncompleteAudit;
}

struct TableRow {
  double p, q;
  std::size_t d;
  double gamma, analytic, sdp, diff;
};

int cmd_table(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string family = cfg.family.empty() && !cfg.inputs.empty() ? cfg.inputs.front() : cfg.family;
  if (family != "werner" && family != "isotropic" && family != "depolarizing") {
    throw InputError("unknown family '" + family + "' (expected werner, isotropic or depolarizing)");
  }
  const MeasurementClass c = parse_measurement_class(cfg.measurement_class);
  if (c == MeasurementClass::lo_star_lower) throw InputError("table supports the all and ppt classes");
  const std::vector<double> points = parse_grid(cfg.grid).points();
  const std::vector<std::size_t> dims = parse_dims(cfg.dims);
  const std::vector<double> gammas = parse_reals(cfg.gamma, "--gamma");
  for (double g : gammas) {
    if (!(g >= 1.0)) throw InputError("table needs gamma >= 1");
  }
  for (std::size_t d : dims) {
    if (d < 2) throw InputError("table needs dimensions >= 2");
  }
  const sdp::SolverOptions options = solver_options(cfg);

  std::vector<TableRow> rows;
  for (std::size_t d : dims) {
    for (double g : gammas) {
      for (double p : points) {
        for (double q : points) rows.push_back(TableRow{p, q, d, g, 0.0, 0.0, 0.0});
      }
    }
  }
  parallel_for(rows.size(), cfg.jobs, [&](std::size_t k) {
    TableRow& r = rows[k];
    if (family == "depolarizing") {
      const ChannelPair pair(depolarizing_choi(r.q, r.d), depolarizing_choi(r.p, r.d), r.gamma);
      r.analytic = c == MeasurementClass::all ? depolarizing_channel_all_analytic(r.q, r.p, r.d, r.gamma)
                                              : depolarizing_channel_ppt_analytic(r.q, r.p, r.d, r.gamma);
      r.sdp = channel_hs(pair, c, options).value;
    } else {
      const bool werner = family == "werner";
      const DensityMatrix rho = werner ? werner_state({r.q, r.d}) : isotropic_state({r.q, r.d});
      const DensityMatrix sigma = werner ? werner_state({r.p, r.d}) : isotropic_state({r.p, r.d});
      if (c == MeasurementClass::all) {
        r.analytic = werner ? werner_hs_analytic(r.p, r.q, r.gamma) : isotropic_hs_analytic(r.p, r.q, r.gamma);
      } else {
        r.analytic = werner ? werner_measured_analytic(r.p, r.q, r.d, r.gamma)
                            : isotropic_measured_analytic(r.p, r.q, r.d, r.gamma);
      }
      r.sdp = hs_measured(DivergenceQuery{rho, sigma, r.gamma, c}, options).value;
    }
    r.diff = std::abs(r.analytic - r.sdp);
  });

  std::ostringstream csv;
  csv << "p,q,d,gamma,analytic,sdp,abs_diff\n";
  double worst = 0.0;
  for (const TableRow& r : rows) {
    csv << fmt(r.p) << "," << fmt(r.q) << "," << r.d << "," << fmt(r.gamma) << "," << fmt(r.analytic) << ","
        << fmt(r.sdp) << "," << fmt(r.diff) << "\n";
    worst = std::max(worst, r.diff);
  }
  emit(cfg, out, csv.str());
  err << "max |diff| = " << fmt(worst) << " over " << rows.size() << " rows\n";
  return kOk;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.inputs.empty()) throw InputError("validate needs at least one file");
  std::ostringstream report;
  for (const std::string& path : cfg.inputs) {
    const Json j = io::read_json_file(path);
    std::string kind = cfg.kind;
    if (kind == "auto") {
      if (j.contains("states")) kind = "state-set";
      else if (j.contains("channels")) kind = "channel-set";
      else if (j.contains("dim_in") || j.contains("kraus")) kind = "choi";
      else kind = "state";
    }
    if (kind == "state") {
      const DensityMatrix rho = io::state_from_json(j, path, cfg.tolerances);
      report << path << ": valid state of dimension " << rho.size() << "\n";
    } else if (kind == "choi") {
      const ChoiOperator ch = io::choi_from_json(j, path, cfg.tolerances);
      report << path << ": valid channel " << ch.input_dim() << " -> " << ch.output_dim() << "\n";
    } else if (kind == "state-set") {
      const StateSet s = io::state_set_from_json(j, path, cfg.tolerances);
      report << path << ": valid state set with " << s.states.size() << " states\n";
    } else if (kind == "channel-set") {
      const ChannelSet s = io::channel_set_from_json(j, path, cfg.tolerances);
      report << path << ": valid channel set with " << s.channels.size() << " channels\n";
    } else {
      throw InputError("unknown --kind '" + kind + "'");
    }
  }
  emit(cfg, out, report.str());
  return kOk;
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  const std::string family = cfg.family.empty() && !cfg.inputs.empty() ? cfg.inputs.front() : cfg.family;
  Json j;
  if (family == "werner") {
    j = io::to_json(werner_state({cfg.p, cfg.d}));
  } else if (family == "isotropic") {
    j = io::to_json(isotropic_state({cfg.p, cfg.d}));
  } else if (family == "depolarizing") {
    j = io::to_json(depolarizing_choi(cfg.p, cfg.d));
  } else if (family == "werner-grid" || family == "isotropic-grid") {
    StateSet set;
    set.label = family + " d=" + std::to_string(cfg.d);
    for (double p : parse_grid(cfg.grid).points()) {
      set.states.push_back(family == "werner-grid" ? werner_state({p, cfg.d}) : isotropic_state({p, cfg.d}));
    }
    j = io::to_json(set);
  } else if (family == "depolarizing-grid") {
    ChannelSet set;
    set.label = family + " d=" + std::to_string(cfg.d);
    for (double p : parse_grid(cfg.grid).points()) set.channels.push_back(depolarizing_choi(p, cfg.d));
    j = io::to_json(set);
  } else {
    throw InputError("unknown family '" + family +
                     "' (expected werner, isotropic, depolarizing or one of their -grid forms)");
  }
  emit(cfg, out, j.dump(2) + "\n");
  return kOk;
}

}  // namespace

std::vector<double> Grid::points() const {
  std::vector<double> out;
  if (n == 1) return {lo};
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(k + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
  }
  return out;
}

Grid parse_grid(const std::string& text) {
  Grid g;
  std::istringstream in(text);
  std::string a, b, c;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c) || a.empty() ||
      b.empty() || c.empty()) {
    throw InputError("--grid expects p0:p1:n, got '" + text + "'");
  }
  try {
    std::size_t pos = 0;
    g.lo = std::stod(a, &pos);
    if (pos != a.size()) throw std::invalid_argument(a);
    g.hi = std::stod(b, &pos);
    if (pos != b.size()) throw std::invalid_argument(b);
    const long long n = std::stoll(c, &pos);
    if (pos != c.size() || n < 1) throw std::invalid_argument(c);
    g.n = static_cast<std::size_t>(n);
  } catch (const std::logic_error&) {
    throw InputError("--grid expects p0:p1:n, got '" + text + "'");
  }
  if (!(g.lo >= 0.0 && g.hi <= 1.0 && g.lo <= g.hi)) throw InputError("--grid bounds must satisfy 0 <= p0 <= p1 <= 1");
  return g;
}

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(item, &pos);
      if (pos != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw InputError(what + " expects numbers, got '" + item + "'");
    }
  }
  if (out.empty()) throw InputError(what + " is empty");
  return out;
}

std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_reals(text, "--dims")) {
    if (v < 1 || v != std::floor(v)) throw InputError("--dims expects positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hockey-stick divergences of quantum states and channels", "hsd"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", cfg.config, "JSON file with default values for any flag");
    sub->add_option("--tol", cfg.tol, "solver tolerance in [1e-10, 1e-4]");
    sub->add_option("--max-iterations", cfg.max_iterations, "interior-point iteration limit");
    sub->add_option("--out", cfg.out, "output file (default: standard output)");
  };

  CLI::App* state_div = app.add_subcommand("state-div", "divergence between two states");
  state_div->add_option("inputs", cfg.inputs, "rho.json sigma.json");
  state_div->add_option("--gamma", cfg.gamma, "gamma >= 0");
  state_div->add_option("--class", cfg.measurement_class, "all, ppt or lo_star_lower");
  state_div->add_flag("--witness", cfg.witness, "include the optimal effect");
  add_common(state_div);

  CLI::App* channel_div = app.add_subcommand("channel-div", "divergence between two channels");
  channel_div->add_option("inputs", cfg.inputs, "P.json Q.json (Choi or Kraus form)");
  channel_div->add_option("--gamma", cfg.gamma, "gamma >= 1");
  channel_div->add_option("--class", cfg.measurement_class, "all or ppt");
  channel_div->add_flag("--covariant-irreducible", cfg.covariant_irreducible,
                        "assert joint covariance with an irreducible input representation");
  add_common(channel_div);

  CLI::App* audit = app.add_subcommand("audit", "privacy audit of a mechanism or a set of channels");
  audit->add_option("--mechanism", cfg.mechanism, "Choi file of the mechanism (default: identity)");
  audit->add_option("--states", cfg.states, "state set file");
  audit->add_option("--channels", cfg.channels, "channel set file");
  audit->add_option("--epsilon", cfg.epsilon, "epsilon, or a comma-separated sweep");
  audit->add_option("--class", cfg.measurement_class, "all or ppt");
  audit->add_option("--jobs", cfg.jobs, "worker threads");
  add_common(audit);

  CLI::App* table = app.add_subcommand("table", "closed form versus numerical value on a grid");
  table->add_option("family", cfg.family, "werner, isotropic or depolarizing");
  table->add_option("--grid", cfg.grid, "p0:p1:n, used for both p and q");
  table->add_option("--dims", cfg.dims, "comma-separated dimensions");
  table->add_option("--gamma", cfg.gamma, "comma-separated gamma values >= 1");
  table->add_option("--class", cfg.measurement_class, "all or ppt");
  table->add_option("--jobs", cfg.jobs, "worker threads");
  add_common(table);

  CLI::App* validate = app.add_subcommand("validate", "check input files");
  validate->add_option("inputs", cfg.inputs, "files to check");
  validate->add_option("--kind", cfg.kind, "auto, state, choi, state-set or channel-set");
  add_common(validate);

  CLI::App* generate = app.add_subcommand("generate", "write a family member as JSON");
  generate->add_option("family", cfg.family,
                       "werner, isotropic, depolarizing, werner-grid, isotropic-grid or depolarizing-grid");
  generate->add_option("--p", cfg.p, "family parameter");
  generate->add_option("--d", cfg.d, "local dimension");
  generate->add_option("--grid", cfg.grid, "p0:p1:n for the -grid families");
  add_common(generate);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const ConfigOverlay overlay(cfg.config);
    overlay.fill(*sub, "inputs", "inputs", cfg.inputs);
    overlay.fill_text(*sub, "--gamma", "gamma", cfg.gamma);
    overlay.fill_text(*sub, "--epsilon", "epsilon", cfg.epsilon);
    overlay.fill(*sub, "--class", "class", cfg.measurement_class);
    overlay.fill(*sub, "--tol", "tol", cfg.tol);
    overlay.fill(*sub, "--max-iterations", "max_iterations", cfg.max_iterations);
    overlay.fill(*sub, "--out", "out", cfg.out);
    overlay.fill(*sub, "--grid", "grid", cfg.grid);
    overlay.fill_text(*sub, "--dims", "dims", cfg.dims);
    overlay.fill(*sub, "--jobs", "jobs", cfg.jobs);
    overlay.fill(*sub, "--mechanism", "mechanism", cfg.mechanism);
    overlay.fill(*sub, "--states", "states", cfg.states);
    overlay.fill(*sub, "--channels", "channels", cfg.channels);
    overlay.fill(*sub, "family", "family", cfg.family);
    overlay.fill(*sub, "--p", "p", cfg.p);
    overlay.fill(*sub, "--d", "d", cfg.d);
    overlay.fill(*sub, "--kind", "kind", cfg.kind);
    overlay.fill(*sub, "--witness", "witness", cfg.witness);
    overlay.fill(*sub, "--covariant-irreducible", "covariant_irreducible", cfg.covariant_irreducible);
    overlay.fill_tolerances(cfg.tolerances);
    if (cfg.jobs == 0) cfg.jobs = default_jobs();

    const std::string name = sub->get_name();
    if (name == "state-div") return cmd_state_div(cfg, out);
    if (name == "channel-div") return cmd_channel_div(cfg, out);
    if (name == "audit") return cmd_audit(cfg, out, err);
    if (name == "table") return cmd_table(cfg, out, err);
    if (name == "validate") return cmd_validate(cfg, out);
    if (name == "generate") return cmd_generate(cfg, out);
    throw InputError("unknown command '" + name + "'");
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run(args, std::cout, std::cerr);
}

}  // namespace hsd::cli
