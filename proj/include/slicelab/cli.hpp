#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "slicelab/json_io.hpp"
#include "slicelab/rational.hpp"

namespace slicelab::cli {

enum class Format { json, csv };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kExitAssertion = 5;

/// Missing or conflicting flags (exit 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or malformed input files and values (exit 3).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output could not be written (exit 4).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Validated command line. `params` holds every experiment flag given,
/// keyed by its long name without dashes.
struct RunConfig {
  std::string subcommand;  // "ekr certify" style for nested commands
  std::vector<std::string> inputs;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  Format format = Format::json;
  std::string output;  // empty: stdout
  std::map<std::string, std::string> params;
  std::vector<std::string> ranges;  // sweep only

  bool has(const std::string& key) const { return params.count(key) != 0; }
  const std::string& get(const std::string& key) const;
};

/// CSV view of a report: fixed column order, one vector per row.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

struct Report {
  Json doc = Json::object();
  bool has_table = false;
  Table table;
  bool holds = true;  // false: a checked invariant failed, exit 5 after emitting
  std::string failure;
};

/// Throws UsageError on unknown flags or missing subcommands. Returns
/// false when help was printed and nothing should run.
bool parse_args(int argc, const char* const* argv, RunConfig& config, std::ostream& out);

Report dispatch(const RunConfig& config);

/// Serializes a report. CSV renders report.table when present; otherwise
/// one row whose columns are the report's top-level keys in order, nested
/// objects flattened with dotted keys and arrays written as JSON text.
std::string render(const Report& report, Format format);
/// render() to config.output or `out`; throws IoError on failure.
void emit(const Report& report, const RunConfig& config, std::ostream& out);

/// Exact number from "a", "a/b" or a decimal such as "-0.25".
Rational parse_number(const std::string& text);

/// Values of a range "start:stop:step" (inclusive, exact) or "v1,v2,...".
/// Values keep the decimal form when every endpoint was written that way.
std::vector<std::string> expand_range(const std::string& spec);

/// Full CLI: parse, dispatch, emit, map exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace slicelab::cli
