#include "detsum/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace detsum {

double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

json num(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? json("nan") : json(v > 0 ? "inf" : "-inf");
  return json(round12(v));
}

json to_json(const CycInt& c) { return json{{"p", c.p()}, {"coeffs", c.coeffs()}}; }

CycInt cyc_from_json(const json& j) {
  const auto p = j.at("p").get<std::uint32_t>();
  const auto coeffs = j.at("coeffs").get<std::vector<std::int64_t>>();
  return CycInt::from_exponent_counts(p, coeffs);
}

json to_json(const MatSet& s) { return json(s.indices()); }

MatSet matset_from_json(const FieldCtx& f, const json& j) {
  const auto idx = j.get<std::vector<MatIndex>>();
  const std::uint64_t universe = std::uint64_t{f.q()} * f.q() * f.q() * f.q();
  for (auto k : idx) {
    if (k >= universe) throw std::invalid_argument("matrix index " + std::to_string(k) + " out of range");
  }
  return MatSet::from_indices(f, idx);
}

json to_json(const TransformTable& t) {
  json entries = json::array();
  for (MatIndex m = 0; m < t.size(); ++m) entries.push_back(t.at(m).coeffs());
  return json{{"flavor", flavor_name(t.flavor())}, {"k", t.k()}, {"p", t.field().p()}, {"entries", entries}};
}

bool Report::pass() const {
  for (const auto& a : assertions) {
    if (!a.pass) return false;
  }
  return true;
}

std::vector<std::string> Report::failed_claims() const {
  std::vector<std::string> out;
  for (const auto& a : assertions) {
    if (!a.pass) out.push_back(a.claim);
  }
  return out;
}

void Report::check(std::string claim, json lhs, json rhs, bool ok, std::string detail) {
  assertions.push_back({std::move(claim), std::move(lhs), std::move(rhs), ok, std::move(detail)});
}

void Report::add_row(RatioRow row) {
  row.lhs = round12(row.lhs);
  row.rhs = round12(row.rhs);
  row.ratio = round12(row.ratio);
  table.push_back(std::move(row));
}

void Report::absorb(const Report& other) {
  assertions.insert(assertions.end(), other.assertions.begin(), other.assertions.end());
  table.insert(table.end(), other.table.begin(), other.table.end());
  flags.insert(flags.end(), other.flags.begin(), other.flags.end());
}

json report_to_json(const Report& r, bool with_timing) {
  json j;
  j["experiment"] = r.experiment;
  j["field"] = r.field;
  j["params"] = r.params;
  json as = json::array();
  for (const auto& a : r.assertions) {
    as.push_back({{"claim", a.claim}, {"lhs", a.lhs}, {"rhs", a.rhs}, {"pass", a.pass}, {"detail", a.detail}});
  }
  j["assertions"] = std::move(as);
  json rows = json::array();
  for (const auto& row : r.table) {
    rows.push_back({{"claim", row.claim},
                    {"q", row.q},
                    {"i", row.i},
                    {"j", row.j},
                    {"E", row.e},
                    {"F", row.f},
                    {"key", row.key},
                    {"lhs", num(row.lhs)},
                    {"rhs", num(row.rhs)},
                    {"ratio", num(row.ratio)},
                    {"pass", row.pass}});
  }
  j["table"] = std::move(rows);
  j["flags"] = r.flags;
  j["pass"] = r.pass();
  if (with_timing) j["runtime_ms"] = num(r.runtime_ms);
  return j;
}

namespace {

double number_or_special(const json& v) {
  if (v.is_number()) return v.get<double>();
  const auto s = v.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  return NAN;
}

}  // namespace

Report report_from_json(const json& j) {
  Report r;
  r.experiment = j.at("experiment").get<std::string>();
  r.field = j.at("field").get<std::string>();
  r.params = j.at("params");
  for (const auto& a : j.at("assertions")) {
    r.assertions.push_back({a.at("claim").get<std::string>(), a.at("lhs"), a.at("rhs"),
                            a.at("pass").get<bool>(), a.at("detail").get<std::string>()});
  }
  for (const auto& row : j.at("table")) {
    RatioRow x;
    x.claim = row.at("claim").get<std::string>();
    x.q = row.at("q").get<std::uint32_t>();
    x.i = row.at("i").get<std::string>();
    x.j = row.at("j").get<std::string>();
    x.e = row.at("E").get<std::uint64_t>();
    x.f = row.at("F").get<std::uint64_t>();
    x.key = row.at("key").get<std::string>();
    x.lhs = number_or_special(row.at("lhs"));
    x.rhs = number_or_special(row.at("rhs"));
    x.ratio = number_or_special(row.at("ratio"));
    x.pass = row.at("pass").get<bool>();
    r.table.push_back(std::move(x));
  }
  r.flags = j.at("flags").get<std::vector<std::string>>();
  if (j.contains("runtime_ms")) r.runtime_ms = number_or_special(j.at("runtime_ms"));
  if (j.contains("pass") && j.at("pass").get<bool>() != r.pass()) {
    throw std::invalid_argument("report 'pass' disagrees with its assertions");
  }
  return r;
}

Format parse_format(const std::string& name) {
  if (name == "json") return Format::json;
  if (name == "csv") return Format::csv;
  if (name == "text") return Format::text;
  throw std::invalid_argument("unknown format '" + name + "' (expected json, csv or text)");
}

namespace {

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string json_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return fmt12(v.get<double>());
  return v.dump();
}

std::string csv_cell(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

constexpr const char* kCsvHeader = "claim,q,i,j,|E|,|F|,t-or-l,lhs,rhs,ratio,pass\n";

void append_csv_rows(std::ostringstream& os, const Report& r) {
  if (!r.table.empty()) {
    for (const auto& row : r.table) {
      os << csv_cell(row.claim) << ',' << row.q << ',' << csv_cell(row.i) << ',' << csv_cell(row.j) << ','
         << row.e << ',' << row.f << ',' << csv_cell(row.key) << ',' << fmt12(row.lhs) << ','
         << fmt12(row.rhs) << ',' << fmt12(row.ratio) << ',' << (row.pass ? "true" : "false") << '\n';
    }
    return;
  }
  const auto param = [&](const char* key) -> std::string {
    if (!r.params.contains(key)) return "";
    return json_scalar(r.params.at(key));
  };
  for (const auto& a : r.assertions) {
    os << csv_cell(a.claim) << ',' << csv_cell(param("q")) << ',' << csv_cell(param("i")) << ','
       << csv_cell(param("j")) << ",,,," << csv_cell(json_scalar(a.lhs)) << ','
       << csv_cell(json_scalar(a.rhs)) << ",," << (a.pass ? "true" : "false") << '\n';
  }
}

std::string render_text(const Report& r, bool with_timing) {
  std::ostringstream os;
  os << r.experiment << " [" << r.field << "] " << (r.pass() ? "PASS" : "FAIL") << '\n';
  os << "params: " << r.params.dump() << '\n';
  std::size_t failed = 0;
  for (const auto& a : r.assertions) {
    if (a.pass) continue;
    ++failed;
    os << "  FAIL " << a.claim << ": lhs=" << json_scalar(a.lhs) << " rhs=" << json_scalar(a.rhs);
    if (!a.detail.empty()) os << " (" << a.detail << ")";
    os << '\n';
  }
  for (const auto& a : r.assertions) {
    if (!a.pass) continue;
    os << "  ok   " << a.claim << ": lhs=" << json_scalar(a.lhs) << " rhs=" << json_scalar(a.rhs);
    if (!a.detail.empty()) os << " (" << a.detail << ")";
    os << '\n';
  }
  os << "assertions: " << r.assertions.size() << " (" << failed << " failed)";
  if (!r.table.empty()) os << ", table rows: " << r.table.size();
  os << '\n';
  for (const auto& fl : r.flags) os << "  note: " << fl << '\n';
  if (with_timing) os << "runtime_ms: " << fmt12(r.runtime_ms) << '\n';
  return os.str();
}

}  // namespace

std::string render(const Report& r, Format fmt, bool with_timing) {
  switch (fmt) {
    case Format::json:
      return report_to_json(r, with_timing).dump(2) + "\n";
    case Format::csv: {
      std::ostringstream os;
      os << kCsvHeader;
      append_csv_rows(os, r);
      return os.str();
    }
    case Format::text:
      return render_text(r, with_timing);
  }
  return {};
}

std::string render_csv(const std::vector<Report>& reports) {
  std::ostringstream os;
  os << kCsvHeader;
  for (const auto& r : reports) append_csv_rows(os, r);
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    if (!std::cout) throw std::runtime_error("failed writing report to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed writing report to '" + path + "'");
}

void emit(const Report& r, Format fmt, const std::string& path, bool with_timing) {
  write_text_file(path, render(r, fmt, with_timing));
}

}  // namespace detsum
