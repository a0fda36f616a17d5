// rtoda: verification suites, Bethe solves, scans and report round-trips.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rtoda/cli/commands.hpp"

using namespace rtoda;
using namespace rtoda::cli;

int main(int argc, char** argv) {
  CLI::App app{"Relativistic quantum Toda chain: identity checks and Bethe solver"};
  app.set_help_all_flag("--help-all");

  std::string command, config_path, g_str, k_str, format_str, constraint_str, q_range, m_range;
  std::vector<std::string> suites, tols;
  std::vector<int> branch;
  std::vector<double> k_values;
  int N = 0, M = 0, q = 0, L = 0, r = 0, samples = 0, span = 0;
  std::uint64_t seed = 0;
  std::string input, output;

  app.add_option("command", command, "verify | solve | scan | report")->required();
  app.add_option("--config", config_path, "JSON config file; flags override its keys");
  auto* o_suite = app.add_option("--suite", suites, "ybe, commutation, vacuum, offshell, hamiltonian, all");
  auto* o_N = app.add_option("--N", N, "site count");
  auto* o_M = app.add_option("--M", M, "number of Bethe roots");
  auto* o_q = app.add_option("--q", q, "constraint integer q");
  auto* o_g = app.add_option("--g", g_str, "coupling, e.g. 0.6065 or 0.3+0.1i");
  auto* o_K = app.add_option("--K", k_str, "total momentum (real unless --complex-k)");
  auto* o_ck = app.add_flag("--complex-k", "accept complex K");
  auto* o_branch = app.add_option("--branch", branch, "branch integers n_1 .. n_M")->delimiter(',');
  auto* o_L = app.add_option("--L", L, "cyclic representation dimension");
  auto* o_r = app.add_option("--r", r, "cyclic representation exponent");
  auto* o_samples = app.add_option("--samples", samples, "samples per suite (0: suite default)");
  auto* o_seed = app.add_option("--seed", seed, "random seed");
  auto* o_tol = app.add_option("--tol", tols, "tolerance override name=value (prefix match)");
  auto* o_unsafe = app.add_flag("--unsafe", "allow tolerance overrides above 1e-6");
  auto* o_constraint = app.add_option("--eta-from-constraint", constraint_str, "N=..,M=..,q=.. for the vacuum/offshell eta");
  auto* o_qr = app.add_option("--q-range", q_range, "scan: q range a:b");
  auto* o_mr = app.add_option("--M-range", m_range, "scan: M range a:b");
  auto* o_kv = app.add_option("--K-values", k_values, "scan: K values")->delimiter(',');
  auto* o_span = app.add_option("--branch-span", span, "scan: branch tuples drawn from 0..span-1");
  auto* o_in = app.add_option("--input", input, "report: JSON report to read");
  auto* o_out = app.add_option("--output", output, "output file (default stdout)");
  auto* o_fmt = app.add_option("--format", format_str, "json | csv");
  auto* o_time = app.add_flag("--timings", "include wall times in the JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config_file(config_path);
    cfg.command = command_from_string(command);
    if (*o_suite) cfg.suites = suites;
    if (*o_N) cfg.N = N;
    if (*o_M) cfg.M = M;
    if (*o_q) cfg.q = q;
    if (*o_g) cfg.g = parse_complex(g_str);
    if (*o_K) cfg.K = parse_complex(k_str);
    if (*o_ck) cfg.complex_k = true;
    if (*o_branch) cfg.branch = branch;
    if (*o_L) cfg.L = L;
    if (*o_r) cfg.r = r;
    if (*o_samples) cfg.samples = samples;
    if (*o_seed) cfg.seed = seed;
    if (*o_tol)
      for (const auto& t : tols) add_tolerance(cfg, t);
    if (*o_unsafe) cfg.unsafe = true;
    if (*o_constraint) cfg.eta_from_constraint = parse_constraint(constraint_str);
    if (*o_qr) cfg.q_range = parse_range(q_range);
    if (*o_mr) cfg.M_range = parse_range(m_range);
    if (*o_kv) cfg.K_values = k_values;
    if (*o_span) cfg.branch_span = span;
    if (*o_in) cfg.input = input;
    if (*o_out) cfg.output = output;
    if (*o_fmt) cfg.format = format_from_string(format_str);
    if (*o_time) cfg.timings = true;
  } catch (const ConfigError& e) {
    std::cerr << "rtoda: " << e.what() << "\n";
    return kExitConfig;
  }

  const CommandResult res = run(cfg);
  if (res.exit_code == kExitConfig) return kExitConfig;

  const std::string text = render(res);
  if (cfg.output.empty()) {
    std::cout << text;
    if (cfg.command != Command::report) print_summary(std::cerr, res.report);
  } else {
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) {
      std::cerr << "rtoda: cannot write '" << cfg.output << "'\n";
      return kExitConfig;
    }
    out << text;
    if (cfg.command != Command::report) print_summary(std::cout, res.report);
  }
  return res.exit_code;
}
