#pragma once

// JSON forms of the library types.
//
// Matrix:  {"rows": n, "cols": n, "re": [[...]], "im": [[...]], "shape": [a, b]?}
//          "im" may be omitted for real matrices.
// Choi:    matrix fields plus "dim_in", "dim_out" and optional "out_shape",
//          or {"kraus": [matrix, ...], "out_shape"?}.
// Sets:    {"label": text, "states": [...]} or {"label": text, "channels": [...]}.
//
// Parse errors throw InputError with the JSON path of the offending field.

#include "hsd/privacy.hpp"

#include <json.hpp>

#include <string>

namespace hsd::io {

using Json = nlohmann::json;

Json to_json(const ComplexMatrix& m);
Json to_json(const HermitianOperator& op);
Json to_json(const DensityMatrix& rho);
Json to_json(const ChoiOperator& choi);
Json to_json(const StateSet& set);
Json to_json(const ChannelSet& set);

ComplexMatrix matrix_from_json(const Json& j, const std::string& path = "$");
HermitianOperator hermitian_from_json(const Json& j, const std::string& path = "$");
DensityMatrix state_from_json(const Json& j, const std::string& path = "$",
                              const ValidationTolerances& tol = {});
ChoiOperator choi_from_json(const Json& j, const std::string& path = "$",
                            const ValidationTolerances& tol = {});
StateSet state_set_from_json(const Json& j, const std::string& path = "$",
                             const ValidationTolerances& tol = {});
ChannelSet channel_set_from_json(const Json& j, const std::string& path = "$",
                                 const ValidationTolerances& tol = {});

/// {value, dual_value, gap, method, class, gamma, witness?, notes?}.
Json result_to_json(const DivergenceResult& r, MeasurementClass c, double gamma, bool with_witness);

struct ParsedResult {
  DivergenceResult result;
  MeasurementClass measurement_class = MeasurementClass::all;
  double gamma = 1.0;
};
ParsedResult result_from_json(const Json& j, const std::string& path = "$");

/// {epsilon, class, achieved_delta, witness: [i, j], pairwise, complete,
///  contraction_bound, per_pair_gaps, failures?}. Failed entries are null.
Json audit_to_json(const AuditReport& report);
AuditReport audit_from_json(const Json& j, const std::string& path = "$");

Method parse_method(const std::string& text);

/// Throws InputError naming the file on read or parse failure.
Json read_json_file(const std::string& path);
/// "-" or empty writes to standard output.
void write_text(const std::string& path, const std::string& text);

}  // namespace hsd::io
