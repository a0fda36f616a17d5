#pragma once

// Run configuration for the rtoda tool: flags, JSON config files, tolerance
// overrides. Flags override the file; the file overrides the defaults.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtoda/algebra.hpp"

namespace rtoda::cli {

using nlohmann::json;

enum class Command { verify, solve, scan, report };
enum class Format { json, csv };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::verify: return "verify";
    case Command::solve: return "solve";
    case Command::scan: return "scan";
    case Command::report: return "report";
  }
  return "?";
}

inline const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> s{"ybe", "commutation", "vacuum", "offshell", "hamiltonian"};
  return s;
}

/// Overrides above this need --unsafe.
inline constexpr double kSafeTolCeiling = 1e-6;

/// Parses "a", "bi", "a+bi", "a-bi" (also with j). Whitespace is ignored.
inline Cx parse_complex(std::string s) {
  std::erase_if(s, [](unsigned char c) { return std::isspace(c); });
  static const std::regex full(R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?:([+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)[ij])?$)");
  static const std::regex imag(R"(^([+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)[ij]$)");
  std::smatch m;
  auto coef = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return std::stod(t);
  };
  if (std::regex_match(s, m, full)) {
    const double re = std::stod(m[1].str());
    const double im = m[2].matched ? coef(m[2].str()) : 0.0;
    return {re, im};
  }
  if (std::regex_match(s, m, imag)) return {0.0, coef(m[1].str())};
  throw ConfigError("cannot parse complex number '" + s + "'");
}

inline json complex_json(Cx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline Cx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) return parse_complex(j.get<std::string>());
  if (j.is_object() && j.contains("re") && j.contains("im")) return {j.at("re").get<double>(), j.at("im").get<double>()};
  throw ConfigError("complex value must be a number, a string, or {re, im}");
}

/// Inclusive integer range "a:b" or a single value "a".
inline std::pair<int, int> parse_range(const std::string& s) {
  const auto c = s.find(':');
  try {
    if (c == std::string::npos) {
      const int v = std::stoi(s);
      return {v, v};
    }
    const int a = std::stoi(s.substr(0, c)), b = std::stoi(s.substr(c + 1));
    if (b < a) throw ConfigError("empty range '" + s + "'");
    return {a, b};
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse range '" + s + "'");
  }
}

struct ConstraintSpec {
  int N = 2, M = 1, q = 1;
};

/// "N=2,M=1,q=1"; missing keys keep their defaults.
inline ConstraintSpec parse_constraint(const std::string& s) {
  ConstraintSpec c;
  static const std::regex item(R"(\s*([NMq])\s*=\s*(-?\d+)\s*)");
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto end = std::min(s.find(',', pos), s.size());
    const std::string part = s.substr(pos, end - pos);
    std::smatch m;
    if (!std::regex_match(part, m, item)) throw ConfigError("cannot parse constraint item '" + part + "'");
    const int v = std::stoi(m[2].str());
    if (m[1] == "N") c.N = v;
    else if (m[1] == "M") c.M = v;
    else c.q = v;
    pos = end + 1;
  }
  return c;
}

struct RunConfig {
  Command command = Command::verify;
  std::vector<std::string> suites{"all"};

  // Model inputs.
  int N = 2, M = 1, q = 1;
  /// Unset: operator suites draw g per sample, Bethe runs use e^{-1/2}.
  std::optional<Cx> g;
  Cx K = 0.0;
  bool complex_k = false;
  std::vector<int> branch;

  // Representation inputs.
  int L = 4, r = 1;

  /// Sample count per suite; 0 picks the suite default.
  int samples = 0;
  std::uint64_t seed = 1;
  std::map<std::string, double> tol;
  bool unsafe = false;

  std::optional<ConstraintSpec> eta_from_constraint;

  // Scan grid.
  std::pair<int, int> q_range{1, 1};
  std::pair<int, int> M_range{1, 1};
  std::vector<double> K_values{0.0};
  /// Branch tuples are increasing M-subsets of {0, ..., span-1}; 0 means the
  /// single default tuple.
  int branch_span = 0;

  // Output.
  std::string input;
  std::string output;
  Format format = Format::json;
  bool timings = false;

  Cx g_or_default() const { return g.value_or(std::exp(Cx(-0.5))); }
};

inline Command command_from_string(const std::string& s) {
  if (s == "verify") return Command::verify;
  if (s == "solve") return Command::solve;
  if (s == "scan") return Command::scan;
  if (s == "report") return Command::report;
  throw ConfigError("unknown command '" + s + "'");
}

inline Format format_from_string(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  throw ConfigError("unknown format '" + s + "' (json or csv)");
}

/// "name=value" tolerance override.
inline void add_tolerance(RunConfig& c, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("tolerance override must be name=value, got '" + spec + "'");
  try {
    c.tol[spec.substr(0, eq)] = std::stod(spec.substr(eq + 1));
  } catch (const std::logic_error&) {
    throw ConfigError("bad tolerance value in '" + spec + "'");
  }
}

inline void validate(const RunConfig& c) {
  for (const auto& s : c.suites)
    if (s != "all" && std::find(known_suites().begin(), known_suites().end(), s) == known_suites().end())
      throw ConfigError("unknown suite '" + s + "'");
  if (c.N < 1 || c.N > 4) throw ConfigError("N must be in 1..4");
  if (c.M < 0) throw ConfigError("M must be >= 0");
  if (c.L < 2 || c.L > 8) throw ConfigError("L must be in 2..8");
  if (c.samples < 0) throw ConfigError("samples must be >= 0");
  if (!c.complex_k && c.K.imag() != 0.0) throw ConfigError("complex K needs --complex-k");
  if (!c.branch.empty() && static_cast<int>(c.branch.size()) != c.M)
    throw ConfigError("branch needs exactly M integers");
  for (const auto& [name, v] : c.tol) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("tolerance for '" + name + "' must be positive");
    if (v > kSafeTolCeiling && !c.unsafe)
      throw ConfigError("tolerance for '" + name + "' looser than 1e-6 needs --unsafe");
  }
  if (c.M_range.first < 0) throw ConfigError("M range must be non-negative");
  if (c.branch_span < 0) throw ConfigError("branch span must be >= 0");
  if (c.command == Command::report && c.input.empty()) throw ConfigError("report needs --input");
}

/// Applies every key present in a JSON config object.
inline void apply_json(RunConfig& c, const json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") c.command = command_from_string(v.get<std::string>());
      else if (key == "suite" || key == "suites") c.suites = v.is_array() ? v.get<std::vector<std::string>>() : std::vector<std::string>{v.get<std::string>()};
      else if (key == "N") c.N = v.get<int>();
      else if (key == "M") c.M = v.get<int>();
      else if (key == "q") c.q = v.get<int>();
      else if (key == "g") c.g = v.is_null() ? std::nullopt : std::optional<Cx>(complex_from_json(v));
      else if (key == "K") c.K = complex_from_json(v);
      else if (key == "complex_k") c.complex_k = v.get<bool>();
      else if (key == "branch") c.branch = v.get<std::vector<int>>();
      else if (key == "L") c.L = v.get<int>();
      else if (key == "r") c.r = v.get<int>();
      else if (key == "samples") c.samples = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "tol") c.tol = v.get<std::map<std::string, double>>();
      else if (key == "unsafe") c.unsafe = v.get<bool>();
      else if (key == "eta_from_constraint") {
        if (v.is_null()) c.eta_from_constraint.reset();
        else if (v.is_string()) c.eta_from_constraint = parse_constraint(v.get<std::string>());
        else c.eta_from_constraint = ConstraintSpec{v.at("N").get<int>(), v.at("M").get<int>(), v.at("q").get<int>()};
      } else if (key == "q_range") c.q_range = parse_range(v.is_string() ? v.get<std::string>() : std::to_string(v.get<int>()));
      else if (key == "M_range") c.M_range = parse_range(v.is_string() ? v.get<std::string>() : std::to_string(v.get<int>()));
      else if (key == "K_values") c.K_values = v.get<std::vector<double>>();
      else if (key == "branch_span") c.branch_span = v.get<int>();
      else if (key == "input") c.input = v.get<std::string>();
      else if (key == "output") c.output = v.get<std::string>();
      else if (key == "format") c.format = format_from_string(v.get<std::string>());
      else if (key == "timings") c.timings = v.get<bool>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  RunConfig c;
  apply_json(c, j);
  return c;
}

/// The inputs that determine a run's output, echoed in every report. Output
/// destination and timing flags are left out so they cannot change the bytes.
inline json config_json(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  j["suites"] = c.suites;
  j["N"] = c.N;
  j["M"] = c.M;
  j["q"] = c.q;
  j["g"] = c.g ? complex_json(*c.g) : json(nullptr);
  j["K"] = complex_json(c.K);
  j["branch"] = c.branch;
  j["L"] = c.L;
  j["r"] = c.r;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["eta_from_constraint"] =
      c.eta_from_constraint
          ? json{{"N", c.eta_from_constraint->N}, {"M", c.eta_from_constraint->M}, {"q", c.eta_from_constraint->q}}
          : json(nullptr);
  if (c.command == Command::scan) {
    j["q_range"] = std::to_string(c.q_range.first) + ":" + std::to_string(c.q_range.second);
    j["M_range"] = std::to_string(c.M_range.first) + ":" + std::to_string(c.M_range.second);
    j["K_values"] = c.K_values;
    j["branch_span"] = c.branch_span;
  }
  return j;
}

}  // namespace rtoda::cli
