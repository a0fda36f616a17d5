#pragma once

// Report records, JSON (de)serialization, CSV and the human summary table.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "rtoda/cli/config.hpp"

namespace rtoda::cli {

inline constexpr const char* kSchema = "rtoda-report/1";

/// check: part of the exit code. probe: measured and reported only, for
/// alternatives the run is meant to discriminate (e.g. an alternative sign convention).
enum class Kind { check, probe };

struct Record {
  std::string id;
  std::string suite;
  Kind kind = Kind::check;
  int index = 0;
  json inputs = json::object();
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
  double wall_time = 0.0;
};

struct Report {
  std::string command;
  json config = json::object();
  std::vector<Record> records;
  /// Command-specific payload (solution, scan rows, findings), emitted as is.
  json payload = json::object();
  double wall_time = 0.0;

  int checks() const { return count(Kind::check); }
  int probes() const { return count(Kind::probe); }
  int failed() const {
    int n = 0;
    for (const auto& r : records) n += r.kind == Kind::check && !r.pass;
    return n;
  }
  bool all_pass() const { return failed() == 0; }
  double worst_residual() const {
    double w = 0.0;
    for (const auto& r : records)
      if (r.kind == Kind::check) w = std::isnan(r.residual) ? r.residual : std::max(w, r.residual);
    return w;
  }

 private:
  int count(Kind k) const {
    int n = 0;
    for (const auto& r : records) n += r.kind == k;
    return n;
  }
};

/// Strict comparison; NaN never passes.
inline bool within(double residual, double tol) { return residual < tol; }

inline json number_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
inline double number_from_json(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

inline json to_json(const Record& r, bool timings) {
  json j;
  j["id"] = r.id;
  j["suite"] = r.suite;
  j["kind"] = r.kind == Kind::check ? "check" : "probe";
  j["index"] = r.index;
  j["inputs"] = r.inputs;
  j["residual"] = number_json(r.residual);
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  if (!r.note.empty()) j["note"] = r.note;
  if (timings) j["wall_time_s"] = r.wall_time;
  return j;
}

inline json to_json(const Report& rep, bool timings = false) {
  json j;
  j["schema"] = kSchema;
  j["command"] = rep.command;
  j["config"] = rep.config;
  json recs = json::array();
  for (const auto& r : rep.records) recs.push_back(to_json(r, timings));
  j["records"] = std::move(recs);
  if (!rep.payload.empty()) j["payload"] = rep.payload;
  json s;
  s["checks"] = rep.checks();
  s["probes"] = rep.probes();
  s["passed"] = rep.checks() - rep.failed();
  s["failed"] = rep.failed();
  s["worst_residual"] = number_json(rep.worst_residual());
  if (timings) s["wall_time_s"] = rep.wall_time;
  j["summary"] = std::move(s);
  return j;
}

inline Report report_from_json(const json& j) {
  try {
    if (j.at("schema").get<std::string>() != kSchema) throw ConfigError("unsupported report schema");
    Report rep;
    rep.command = j.at("command").get<std::string>();
    rep.config = j.at("config");
    for (const auto& rj : j.at("records")) {
      Record r;
      r.id = rj.at("id").get<std::string>();
      r.suite = rj.at("suite").get<std::string>();
      r.kind = rj.at("kind").get<std::string>() == "probe" ? Kind::probe : Kind::check;
      r.index = rj.at("index").get<int>();
      r.inputs = rj.at("inputs");
      r.residual = number_from_json(rj.at("residual"));
      r.tolerance = rj.at("tolerance").get<double>();
      r.pass = rj.at("pass").get<bool>();
      if (rj.contains("note")) r.note = rj.at("note").get<std::string>();
      if (rj.contains("wall_time_s")) r.wall_time = rj.at("wall_time_s").get<double>();
      rep.records.push_back(std::move(r));
    }
    if (j.contains("payload")) rep.payload = j.at("payload");
    if (j.at("summary").contains("wall_time_s")) rep.wall_time = j.at("summary").at("wall_time_s").get<double>();
    return rep;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
}

/// True when the report carried wall times, so a re-emit keeps them.
inline bool has_timings(const json& j) { return j.contains("summary") && j.at("summary").contains("wall_time_s"); }

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Record table: id,suite,kind,index,residual,tolerance,pass,note.
inline std::string records_csv(const Report& rep) {
  std::string out = "id,suite,kind,index,residual,tolerance,pass,note\n";
  for (const auto& r : rep.records) {
    out += csv_field(r.id) + "," + csv_field(r.suite) + "," + (r.kind == Kind::check ? "check" : "probe") + "," +
           std::to_string(r.index) + "," + fmt_double(r.residual) + "," + fmt_double(r.tolerance) + "," +
           (r.pass ? "true" : "false") + "," + csv_field(r.note) + "\n";
  }
  return out;
}

/// One line per record id: count, failures, worst residual, tolerance, time.
inline void print_summary(std::ostream& os, const Report& rep) {
  struct Row {
    std::string kind;
    int n = 0, failed = 0;
    double worst = 0.0, tol = 0.0, time = 0.0;
  };
  std::vector<std::string> order;
  std::map<std::string, Row> rows;
  for (const auto& r : rep.records) {
    auto [it, fresh] = rows.try_emplace(r.id);
    if (fresh) order.push_back(r.id);
    Row& row = it->second;
    row.kind = r.kind == Kind::check ? "check" : "probe";
    ++row.n;
    row.failed += !r.pass;
    row.worst = std::isnan(r.residual) ? r.residual : std::max(row.worst, r.residual);
    row.tol = r.tolerance;
    row.time += r.wall_time;
  }
  char line[256];
  std::snprintf(line, sizeof line, "%-34s %-5s %5s %5s %12s %10s %9s\n", "id", "kind", "n", "fail", "worst", "tol",
                "time[s]");
  os << line;
  for (const auto& id : order) {
    const Row& r = rows.at(id);
    std::snprintf(line, sizeof line, "%-34s %-5s %5d %5d %12.3e %10.1e %9.3f\n", id.c_str(), r.kind.c_str(), r.n,
                  r.failed, r.worst, r.tol, r.time);
    os << line;
  }
  std::snprintf(line, sizeof line, "checks %d, failed %d, probes %d, worst %.3e, %.3f s\n", rep.checks(), rep.failed(),
                rep.probes(), rep.worst_residual(), rep.wall_time);
  os << line;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace rtoda::cli
