#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hsd::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kSolverFailure = 2;
inline constexpr int kIncompleteAudit = 3;

struct Grid {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 11;

  std::vector<double> points() const;
};

/// Parses "p0:p1:n" with 0 <= p0 <= p1 <= 1 and n >= 1.
Grid parse_grid(const std::string& text);
/// Parses "2,3,4".
std::vector<std::size_t> parse_dims(const std::string& text);
/// Parses "0,0.5,1".
std::vector<double> parse_reals(const std::string& text, const std::string& what);

/// args excludes the program name. Results go to `out` unless --out names a
/// file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace hsd::cli
