// Experiment reports and their JSON / CSV / text renderings.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "detsum/char_transforms.hpp"
#include "detsum/cyclotomic.hpp"
#include "detsum/matrix_ring.hpp"

namespace detsum {

using json = nlohmann::json;

/// Rounds to 12 significant digits so rendered floats are stable and round-trip.
double round12(double v);
json num(double v);
json to_json(const CycInt& c);
CycInt cyc_from_json(const json& j);
/// Sorted member indices.
json to_json(const MatSet& s);
MatSet matset_from_json(const FieldCtx& f, const json& j);
/// {"flavor", "k", "p", "entries"}: entries[m] holds the canonical coefficients of entry m.
json to_json(const TransformTable& t);

/// One hard check.
struct Assertion {
  std::string claim;
  json lhs;
  json rhs;
  bool pass = false;
  std::string detail;

  friend bool operator==(const Assertion&, const Assertion&) = default;
};

/// One row of an empirical-ratio or sweep table. Rows are data, never hard checks.
struct RatioRow {
  std::string claim;
  std::uint32_t q = 0;
  std::string i;
  std::string j;
  std::uint64_t e = 0;
  std::uint64_t f = 0;
  std::string key;  // t, l, k or size label
  double lhs = 0;
  double rhs = 0;
  double ratio = 0;
  bool pass = true;

  friend bool operator==(const RatioRow&, const RatioRow&) = default;
};

struct Report {
  std::string experiment;
  std::string field;  // context descriptor(s), "p^n:modulus"
  json params = json::object();
  std::vector<Assertion> assertions;
  std::vector<RatioRow> table;
  std::vector<std::string> flags;  // informational findings, never affect pass
  double runtime_ms = 0;

  /// Conjunction of hard assertions.
  bool pass() const;
  std::vector<std::string> failed_claims() const;

  void check(std::string claim, json lhs, json rhs, bool ok, std::string detail = {});
  void add_row(RatioRow row);
  /// Appends another report's assertions, rows and flags.
  void absorb(const Report& other);

  friend bool operator==(const Report& a, const Report& b) {
    return a.experiment == b.experiment && a.field == b.field && a.params == b.params &&
           a.assertions == b.assertions && a.table == b.table && a.flags == b.flags;
  }
};

/// Sorted-key JSON. `runtime_ms` is included only when `with_timing` is set,
/// so the default rendering is byte-identical across runs.
json report_to_json(const Report& r, bool with_timing = false);
Report report_from_json(const json& j);

enum class Format { json, csv, text };
Format parse_format(const std::string& name);

std::string render(const Report& r, Format fmt, bool with_timing = false);
std::string render_csv(const std::vector<Report>& reports);

/// Writes to `path`, or stdout when path is empty or "-". Throws
/// std::runtime_error naming the path on I/O failure.
void emit(const Report& r, Format fmt, const std::string& path, bool with_timing = false);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace detsum
