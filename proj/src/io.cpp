#include "hsd/io.hpp"

#include "hsd/error.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace hsd::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InputError("invalid JSON at " + path + ": " + what);
}

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing field");
  return *it;
}

std::size_t count_field(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_number_integer() && !v.is_number_unsigned()) fail(path + "." + key, "expected a positive integer");
  const auto n = v.get<long long>();
  if (n <= 0) fail(path + "." + key, "expected a positive integer");
  return static_cast<std::size_t>(n);
}

double number(const Json& v, const std::string& path) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::string text(const Json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::optional<BipartiteShape> shape_field(const Json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  const std::string p = path + "." + key;
  if (!it->is_array() || it->size() != 2) fail(p, "expected [dim_a, dim_b]");
  BipartiteShape s;
  for (int k = 0; k < 2; ++k) {
    const Json& v = (*it)[k];
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
      fail(p + "[" + std::to_string(k) + "]", "expected a positive integer");
    }
  }
  s.dim_a = (*it)[0].get<std::size_t>();
  s.dim_b = (*it)[1].get<std::size_t>();
  return s;
}

Json shape_json(const BipartiteShape& s) { return Json::array({s.dim_a, s.dim_b}); }

RealMatrix real_block(const Json& j, std::size_t rows, std::size_t cols, const std::string& path) {
  if (!j.is_array() || j.size() != rows) fail(path, "expected " + std::to_string(rows) + " rows");
  RealMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string pr = path + "[" + std::to_string(r) + "]";
    const Json& row = j[r];
    if (!row.is_array() || row.size() != cols) fail(pr, "expected " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c) {
      const Json& v = row[c];
      if (!v.is_number()) fail(pr + "[" + std::to_string(c) + "]", "expected a number");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v.get<double>();
    }
  }
  return m;
}

Json real_rows(const RealMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Json with_shape_field(Json j, const std::optional<BipartiteShape>& shape) {
  if (shape) j["shape"] = shape_json(*shape);
  return j;
}

template <class Fn>
auto rethrow_at(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind("invalid JSON at ", 0) == 0) throw;
    throw InputError("invalid value at " + path + ": " + msg);
  }
}

std::vector<std::vector<double>> square_from_json(const Json& j, std::size_t n, const std::string& path) {
  if (!j.is_array() || j.size() != n) fail(path, "expected " + std::to_string(n) + " rows");
  std::vector<std::vector<double>> out(n, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const std::string pr = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != n) fail(pr, "expected " + std::to_string(n) + " entries");
    for (std::size_t c = 0; c < n; ++c) out[r][c] = number(j[r][c], pr + "[" + std::to_string(c) + "]");
  }
  return out;
}

Json nullable(double v) { return std::isnan(v) ? Json(nullptr) : Json(v); }

}  // namespace

Json to_json(const ComplexMatrix& m) {
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", real_rows(m.real())}, {"im", real_rows(m.imag())}};
}

Json to_json(const HermitianOperator& op) { return with_shape_field(to_json(op.matrix()), op.shape()); }

Json to_json(const DensityMatrix& rho) { return to_json(rho.op()); }

Json to_json(const ChoiOperator& choi) {
  Json j = to_json(choi.matrix());
  j["dim_in"] = choi.input_dim();
  j["dim_out"] = choi.output_dim();
  if (choi.output_shape()) j["out_shape"] = shape_json(*choi.output_shape());
  return j;
}

Json to_json(const StateSet& set) {
  Json states = Json::array();
  for (const DensityMatrix& rho : set.states) states.push_back(to_json(rho));
  return Json{{"label", set.label}, {"states", states}};
}

Json to_json(const ChannelSet& set) {
  Json channels = Json::array();
  for (const ChoiOperator& c : set.channels) channels.push_back(to_json(c));
  return Json{{"label", set.label}, {"channels", channels}};
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& path) {
  const std::size_t rows = count_field(j, "rows", path);
  const std::size_t cols = count_field(j, "cols", path);
  const RealMatrix re = real_block(field(j, "re", path), rows, cols, path + ".re");
  RealMatrix im = RealMatrix::Zero(rows, cols);
  if (auto it = j.find("im"); it != j.end() && !it->is_null()) im = real_block(*it, rows, cols, path + ".im");
  ComplexMatrix m(rows, cols);
  m.real() = re;
  m.imag() = im;
  return m;
}

HermitianOperator hermitian_from_json(const Json& j, const std::string& path) {
  const ComplexMatrix m = matrix_from_json(j, path);
  const std::optional<BipartiteShape> shape = shape_field(j, "shape", path);
  if (m.rows() != m.cols()) fail(path, "matrix must be square");
  if (shape && shape->size() != static_cast<std::size_t>(m.rows())) {
    fail(path + ".shape", "product of dimensions does not match the side " + std::to_string(m.rows()));
  }
  return rethrow_at(path, [&] { return HermitianOperator(m, shape); });
}

DensityMatrix state_from_json(const Json& j, const std::string& path, const ValidationTolerances& tol) {
  HermitianOperator op = hermitian_from_json(j, path);
  return rethrow_at(path, [&] { return DensityMatrix(std::move(op), tol); });
}

ChoiOperator choi_from_json(const Json& j, const std::string& path, const ValidationTolerances& tol) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::optional<BipartiteShape> out_shape = shape_field(j, "out_shape", path);
  if (auto it = j.find("kraus"); it != j.end()) {
    if (!it->is_array() || it->empty()) fail(path + ".kraus", "expected a non-empty array of matrices");
    std::vector<ComplexMatrix> kraus;
    for (std::size_t k = 0; k < it->size(); ++k) {
      kraus.push_back(matrix_from_json((*it)[k], path + ".kraus[" + std::to_string(k) + "]"));
    }
    return rethrow_at(path, [&] { return choi_from_kraus(kraus, out_shape, tol); });
  }
  const std::size_t din = count_field(j, "dim_in", path);
  const std::size_t dout = count_field(j, "dim_out", path);
  const ComplexMatrix m = matrix_from_json(j, path);
  if (static_cast<std::size_t>(m.rows()) != din * dout || m.rows() != m.cols()) {
    fail(path, "Choi matrix side must equal dim_in * dim_out = " + std::to_string(din * dout));
  }
  return rethrow_at(path, [&] { return ChoiOperator(HermitianOperator(m), din, dout, out_shape, tol); });
}

StateSet state_set_from_json(const Json& j, const std::string& path, const ValidationTolerances& tol) {
  StateSet set;
  if (auto it = j.find("label"); it != j.end()) set.label = text(*it, path + ".label");
  const Json& states = field(j, "states", path);
  if (!states.is_array()) fail(path + ".states", "expected an array");
  for (std::size_t k = 0; k < states.size(); ++k) {
    set.states.push_back(state_from_json(states[k], path + ".states[" + std::to_string(k) + "]", tol));
  }
  if (set.states.empty()) fail(path + ".states", "state set is empty");
  rethrow_at(path + ".states", [&] { set.validate(); });
  return set;
}

ChannelSet channel_set_from_json(const Json& j, const std::string& path, const ValidationTolerances& tol) {
  ChannelSet set;
  if (auto it = j.find("label"); it != j.end()) set.label = text(*it, path + ".label");
  const Json& channels = field(j, "channels", path);
  if (!channels.is_array()) fail(path + ".channels", "expected an array");
  for (std::size_t k = 0; k < channels.size(); ++k) {
    set.channels.push_back(choi_from_json(channels[k], path + ".channels[" + std::to_string(k) + "]", tol));
  }
  if (set.channels.empty()) fail(path + ".channels", "channel set is empty");
  rethrow_at(path + ".channels", [&] { set.validate(); });
  return set;
}

Method parse_method(const std::string& t) {
  for (Method m : {Method::closed_form, Method::sdp_primal_dual, Method::analytic, Method::lower_bound,
                   Method::sdp, Method::covariance_reduction}) {
    if (to_string(m) == t) return m;
  }
  throw InputError("unknown method '" + t + "'");
}

Json result_to_json(const DivergenceResult& r, MeasurementClass c, double gamma, bool with_witness) {
  Json j{{"value", r.value},
         {"dual_value", r.dual_value ? Json(*r.dual_value) : Json(nullptr)},
         {"gap", r.gap ? Json(*r.gap) : Json(nullptr)},
         {"method", to_string(r.method)},
         {"class", to_string(c)},
         {"gamma", gamma}};
  if (with_witness && r.witness) j["witness"] = to_json(*r.witness);
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

ParsedResult result_from_json(const Json& j, const std::string& path) {
  ParsedResult out;
  out.result.value = number(field(j, "value", path), path + ".value");
  if (const Json& d = field(j, "dual_value", path); !d.is_null()) {
    out.result.dual_value = number(d, path + ".dual_value");
  }
  if (const Json& g = field(j, "gap", path); !g.is_null()) out.result.gap = number(g, path + ".gap");
  out.result.method =
      rethrow_at(path + ".method", [&] { return parse_method(text(field(j, "method", path), path + ".method")); });
  out.measurement_class = rethrow_at(path + ".class", [&] {
    return parse_measurement_class(text(field(j, "class", path), path + ".class"));
  });
  out.gamma = number(field(j, "gamma", path), path + ".gamma");
  if (auto it = j.find("witness"); it != j.end()) out.result.witness = hermitian_from_json(*it, path + ".witness");
  if (auto it = j.find("notes"); it != j.end()) {
    if (!it->is_array()) fail(path + ".notes", "expected an array of strings");
    for (std::size_t k = 0; k < it->size(); ++k) {
      out.result.notes.push_back(text((*it)[k], path + ".notes[" + std::to_string(k) + "]"));
    }
  }
  return out;
}

Json audit_to_json(const AuditReport& report) {
  Json pairwise = Json::array();
  Json gaps = Json::array();
  for (std::size_t i = 0; i < report.pairwise.size(); ++i) {
    Json row = Json::array();
    Json grow = Json::array();
    for (std::size_t j = 0; j < report.pairwise[i].size(); ++j) {
      row.push_back(nullable(report.pairwise[i][j]));
      grow.push_back(nullable(report.per_pair_gaps[i][j]));
    }
    pairwise.push_back(std::move(row));
    gaps.push_back(std::move(grow));
  }
  Json j{{"epsilon", report.epsilon},
         {"class", to_string(report.measurement_class)},
         {"achieved_delta", report.achieved_delta},
         {"witness", Json::array({report.witness_pair.first, report.witness_pair.second})},
         {"pairwise", pairwise},
         {"per_pair_gaps", gaps},
         {"complete", report.complete},
         {"contraction_bound", contraction_bound(report.epsilon, std::min(1.0, report.achieved_delta))}};
  if (!report.failures.empty()) {
    Json failures = Json::array();
    for (const auto& [i, k, msg] : report.failures) failures.push_back(Json{{"pair", {i, k}}, {"error", msg}});
    j["failures"] = failures;
  }
  return j;
}

AuditReport audit_from_json(const Json& j, const std::string& path) {
  AuditReport r;
  r.epsilon = number(field(j, "epsilon", path), path + ".epsilon");
  r.measurement_class = rethrow_at(path + ".class", [&] {
    return parse_measurement_class(text(field(j, "class", path), path + ".class"));
  });
  r.achieved_delta = number(field(j, "achieved_delta", path), path + ".achieved_delta");
  const Json& w = field(j, "witness", path);
  if (!w.is_array() || w.size() != 2 || !w[0].is_number_unsigned() || !w[1].is_number_unsigned()) {
    fail(path + ".witness", "expected [i, j]");
  }
  r.witness_pair = {w[0].get<std::size_t>(), w[1].get<std::size_t>()};
  const Json& pw = field(j, "pairwise", path);
  if (!pw.is_array()) fail(path + ".pairwise", "expected an array");
  const std::size_t n = pw.size();
  r.pairwise = square_from_json(pw, n, path + ".pairwise");
  if (auto it = j.find("per_pair_gaps"); it != j.end()) {
    r.per_pair_gaps = square_from_json(*it, n, path + ".per_pair_gaps");
  } else {
    r.per_pair_gaps.assign(n, std::vector<double>(n, 0.0));
  }
  const Json& c = field(j, "complete", path);
  if (!c.is_boolean()) fail(path + ".complete", "expected a boolean");
  r.complete = c.get<bool>();
  if (auto it = j.find("failures"); it != j.end()) {
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string p = path + ".failures[" + std::to_string(k) + "]";
      const Json& pair = field((*it)[k], "pair", p);
      if (!pair.is_array() || pair.size() != 2) fail(p + ".pair", "expected [i, j]");
      r.failures.emplace_back(pair[0].get<std::size_t>(), pair[1].get<std::size_t>(),
                              text(field((*it)[k], "error", p), p + ".error"));
    }
  }
  return r;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
  if (!out) throw InputError("failed writing '" + path + "'");
}

}  // namespace hsd::io
