#pragma once

// verify / solve / scan / report. Each command returns its report and exit
// code; rendering to JSON or CSV is separate so tests can call both.

#include <iostream>
#include <random>
#include <set>

#include "rtoda/bethe.hpp"
#include "rtoda/cli/report.hpp"

namespace rtoda::cli {

/// Exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNoConvergence = 3;

struct CommandResult {
  Report report;
  int exit_code = kExitPass;
  Format format = Format::json;
  bool timings = false;
  /// Pre-rendered CSV for commands whose table is not the record list.
  std::string csv;
};

// ---------------------------------------------------------------------------
// Seeding and sampling

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

/// Independent stream per (seed, suite, sample index).
class Sampler {
 public:
  Sampler(std::uint64_t seed, const std::string& stream, std::size_t index)
      : rng_(splitmix64(splitmix64(seed ^ fnv1a(stream)) + index)) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  /// Spectral parameter: Re in [-0.5, 0.5], Im in [-pi, pi].
  Cx spectral() { return {uniform(-0.5, 0.5), uniform(-kPi, kPi)}; }
  /// Gauge index: Re in [-1, 1], |Im| in [0.2, 1].
  Cx gauge_index() { return {uniform(-1.0, 1.0), (coin() ? 1.0 : -1.0) * uniform(0.2, 1.0)}; }
  /// Coupling with |g| in [0.3, 0.9].
  Cx coupling() { return std::polar(uniform(0.3, 0.9), uniform(-kPi, kPi)); }
  /// Vacuum-regime eta: Re in [0.2, 1.5], Im in [-1, 1].
  Cx vacuum_eta() { return {uniform(0.2, 1.5), uniform(-1.0, 1.0)}; }
  Cx unit_box() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }

 private:
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Records

/// Override lookup: exact id first, then each dotted prefix.
inline double tolerance_for(const RunConfig& c, const std::string& id, double fallback) {
  std::string key = id;
  while (true) {
    if (auto it = c.tol.find(key); it != c.tol.end()) return it->second;
    const auto dot = key.rfind('.');
    if (dot == std::string::npos) return fallback;
    key.resize(dot);
  }
}

class RecordSink {
 public:
  RecordSink(const RunConfig& c, std::string suite, int index) : cfg_(c), suite_(std::move(suite)), index_(index) {}

  void add(const std::string& id, double residual, double default_tol, json inputs, Kind kind = Kind::check,
           std::string note = {}) {
    Record r;
    r.id = id;
    r.suite = suite_;
    r.kind = kind;
    r.index = index_;
    r.inputs = std::move(inputs);
    r.residual = residual;
    r.tolerance = tolerance_for(cfg_, id, default_tol);
    r.pass = within(residual, r.tolerance);
    r.note = std::move(note);
    out.push_back(std::move(r));
  }

  std::vector<Record> out;

 private:
  const RunConfig& cfg_;
  std::string suite_;
  int index_;
};

/// Runs `n` independent samples in parallel, keeps index order, and splits
/// each sample's wall time across its records.
template <class F>
std::vector<Record> run_samples(int n, F&& sample) {
  auto chunks = parallel_map(static_cast<std::size_t>(n), [&](std::size_t i) {
    Stopwatch sw;
    std::vector<Record> recs = sample(static_cast<int>(i));
    const double t = sw.seconds();
    for (auto& r : recs) r.wall_time = t / static_cast<double>(std::max<std::size_t>(recs.size(), 1));
    return recs;
  });
  std::vector<Record> all;
  for (auto& c : chunks) all.insert(all.end(), std::make_move_iterator(c.begin()), std::make_move_iterator(c.end()));
  return all;
}

inline int samples_or(const RunConfig& c, int fallback) { return c.samples > 0 ? c.samples : fallback; }

// ---------------------------------------------------------------------------
// Verification suites

/// Largest auxiliary-times-quantum dimension the operator suites accept.
inline constexpr long kOperatorDimLimit = 2048;

inline void require_operator_size(const RunConfig& c) {
  long d = 4;
  for (int n = 0; n < c.N; ++n) d *= c.L;
  if (d > kOperatorDimLimit) throw ConfigError("4 L^N exceeds 2048; lower L or N for operator suites");
}

inline std::vector<Record> suite_ybe(const RunConfig& c) {
  require_operator_size(c);
  const CyclicWeylRep rep = build_cyclic_rep(c.L, c.r);
  return run_samples(samples_or(c, 20), [&](int i) {
    Sampler s(c.seed, "ybe", static_cast<std::size_t>(i));
    const Cx u = s.spectral(), v = s.spectral();
    const Cx g = c.g ? *c.g : s.coupling();
    const int site = s.integer(1, c.N);
    const json in{{"u", complex_json(u)}, {"v", complex_json(v)}, {"g", complex_json(g)},
                  {"site", site},         {"L", c.L},             {"r", c.r},
                  {"N", c.N}};
    RecordSink sink(c, "ybe", i);
    sink.add("ybe.lax", verify_ybe_lax(u, v, rep, g, site, c.N), 1e-10, in);
    sink.add("ybe.monodromy", verify_ybe_monodromy(u, v, rep, g, c.N), 1e-10, in);
    sink.add("ybe.transfer_commute", transfer_commutator(u, v, rep, g, c.N), 1e-10, in);
    return sink.out;
  });
}

inline std::vector<Record> suite_hamiltonian(const RunConfig& c) {
  require_operator_size(c);
  const CyclicWeylRep rep = build_cyclic_rep(c.L, c.r);
  const int N = c.N;
  return run_samples(samples_or(c, 3), [&](int i) {
    Sampler s(c.seed, "hamiltonian", static_cast<std::size_t>(i));
    const Cx g = c.g ? *c.g : s.coupling();
    const Cx u = s.spectral();
    const json in{{"g", complex_json(g)}, {"u", complex_json(u)}, {"L", c.L}, {"r", c.r}, {"N", N}};
    RecordSink sink(c, "hamiltonian", i);

    const TransferCoeffs tc = transfer_coeffs(rep, g, N);
    sink.add("hamiltonian.out_of_band", tc.out_of_band, 1e-11, in);
    const SiteOp held = transfer(u, rep, g, N);
    sink.add("hamiltonian.reconstruction",
             max_norm(tc.evaluate(u) - held) / std::max(1.0, max_norm(held)), 1e-10, in);

    const SiteOp shift = total_shift(rep, N);
    sink.add("hamiltonian.t_plus_N", max_norm(tc.at(N) - shift), 1e-12, in);
    const SiteOp back = (N % 2 ? Cx(-1.0) : Cx(1.0)) * inverse(shift);
    sink.add("hamiltonian.t_minus_N", max_norm(tc.at(-N) - back), 1e-12, in);

    const SiteOp h = hamiltonian_from_transfer(tc);
    sink.add("hamiltonian.commutes", mixed_residual(max_norm(commutator(h, held)), max_norm(h * held)), 1e-10, in);

    double best = std::numeric_limits<double>::infinity();
    std::string matching;
    for (Ordering o : {Ordering::cos_left, Ordering::cos_right, Ordering::symmetrized}) {
      const SiteOp hd = hamiltonian_direct(rep, g, N, o);
      const double res = mixed_residual(max_norm(hd - h), max_norm(h));
      sink.add(std::string("hamiltonian.ordering.") + to_string(o), res, 1e-9, in, Kind::probe);
      if (res < tolerance_for(c, "hamiltonian.ordering_best", 1e-9))
        matching += (matching.empty() ? "" : ",") + std::string(to_string(o));
      best = std::min(best, res);
    }
    // N = 1: the periodic wrap couples the site to itself and the transfer
    // expansion has no separate t_{N-2}; the comparison is informative only.
    sink.add("hamiltonian.ordering_best", best, 1e-9, in, N >= 2 ? Kind::check : Kind::probe,
             matching.empty() ? "no ordering matches" : "matching: " + matching);
    return sink.out;
  });
}

inline std::vector<Record> suite_commutation(const RunConfig& c) {
  require_operator_size(c);
  const CyclicWeylRep rep = build_cyclic_rep(c.L, c.r);
  return run_samples(samples_or(c, 10), [&](int i) {
    Sampler s(c.seed, "commutation", static_cast<std::size_t>(i));
    RecordSink sink(c, "commutation", i);

    const Cx u1 = s.spectral(), u2 = s.spectral();
    const Cx m = s.gauge_index();
    const Cx eta{s.uniform(0.2, 1.0), s.uniform(-1.0, 1.0)};
    for (GaugeVariant v : {GaugeVariant::A, GaugeVariant::B}) {
      const VectorRelationReport vr = verify_vector_relations(u1, u2, m, eta, v);
      const json in{{"u1", complex_json(u1)}, {"u2", complex_json(u2)}, {"m", complex_json(m)},
                    {"eta", complex_json(eta)}, {"variant", to_string(v)}};
      for (int k = 0; k < 8; ++k)
        sink.add("commutation.vector." + std::string(to_string(v)) + "." + std::to_string(k + 1),
                 vr.residual[static_cast<std::size_t>(k)], 1e-12, in);
    }

    const Cx g = c.g ? *c.g : s.coupling();
    Cx v1 = s.spectral(), v2 = s.spectral();
    while (std::abs(std::sinh(v1 - v2)) < 1e-2) v2 = s.spectral();
    const Cx mp = s.gauge_index(), mm = s.gauge_index();
    const json in{{"m_prime", complex_json(mp)}, {"m", complex_json(mm)}, {"u1", complex_json(v1)},
                  {"u2", complex_json(v2)},      {"g", complex_json(g)},  {"L", c.L},
                  {"r", c.r},                    {"N", c.N}};
    const CommutationReport cr = verify_gauged_commutations(mp, mm, v1, v2, rep, g, c.N);
    sink.add("commutation.cc", cr.cc, 1e-10, in);
    sink.add("commutation.ac", cr.ac, 1e-10, in);
    sink.add("commutation.dc", cr.dc, 1e-10, in, Kind::check, std::string("form: ") + to_string(cr.dc_form));
    if (cr.dc_exchanged >= 0.0) sink.add("commutation.dc_exchanged", cr.dc_exchanged, 1e-10, in, Kind::probe);
    return sink.out;
  });
}

inline std::vector<Record> suite_vacuum(const RunConfig& c) {
  return run_samples(samples_or(c, 10), [&](int i) {
    Sampler s(c.seed, "vacuum", static_cast<std::size_t>(i));
    RecordSink sink(c, "vacuum", i);
    const Cx alpha = s.unit_box(), u = s.spectral();
    Cx eta_a, g_a, eta_b, g_b;
    if (c.eta_from_constraint) {
      const ConstraintSpec& k = *c.eta_from_constraint;
      g_a = c.g_or_default();
      if (std::abs(g_a) > 1.0) g_a = 1.0 / g_a;
      g_b = 1.0 / g_a;
      eta_a = derive_params(k.N, k.M, k.q, g_a, 0.0).eta;
      eta_b = derive_params(k.N, k.M, k.q, g_b, 0.0).eta;
    } else {
      g_a = c.g && std::abs(*c.g) < 1.0 ? *c.g : s.coupling();
      eta_a = s.vacuum_eta();
      g_b = 1.0 / g_a;
      eta_b = -eta_a;
    }
    for (GaugeVariant v : {GaugeVariant::A, GaugeVariant::B}) {
      const bool a = v == GaugeVariant::A;
      const VacuumSpec spec = make_vacuum_spec(v, alpha, a ? eta_a : eta_b, a ? g_a : g_b);
      const json in{{"alpha", complex_json(alpha)}, {"eta", complex_json(spec.eta)}, {"g", complex_json(spec.g)},
                    {"u", complex_json(u)},         {"N", c.N},                       {"variant", to_string(v)}};
      const std::string pre = std::string("vacuum.") + to_string(v);
      double lb = 0.0, la = 0.0, ld = 0.0;
      for (int n = 1; n <= c.N; ++n) {
        const VacuumActionReport lr = verify_local_actions(spec, n, u);
        lb = std::max(lb, lr.b_annihilation);
        la = std::max(la, lr.a_residual);
        ld = std::max(ld, lr.d_residual);
      }
      sink.add(pre + ".local.b", lb, 1e-11, in);
      sink.add(pre + ".local.a", la, 1e-11, in);
      sink.add(pre + ".local.d", ld, 1e-11, in);
      const GlobalActionReport gr = verify_global_actions(spec, c.N, u);
      sink.add(pre + ".global.b", gr.b_annihilation, 1e-11, in);
      sink.add(pre + ".global.a", gr.a_residual, 1e-11, in);
      sink.add(pre + ".global.d", gr.d_residual, 1e-11, in);
      sink.add(pre + ".global.ad_product", gr.ad_product, 1e-12, in);
    }
    return sink.out;
  });
}

inline std::vector<Record> suite_offshell(const RunConfig& c) {
  std::vector<std::pair<int, int>> pairs{{1, 1}, {2, 1}, {1, 2}};
  int q = c.q;
  if (c.eta_from_constraint) {
    pairs = {{c.eta_from_constraint->N, c.eta_from_constraint->M}};
    q = c.eta_from_constraint->q;
  }
  const int per = samples_or(c, 3);
  const int total = per * static_cast<int>(pairs.size());
  return run_samples(total, [&](int i) {
    const auto [N, M] = pairs[static_cast<std::size_t>(i / per)];
    Sampler s(c.seed, "offshell", static_cast<std::size_t>(i));
    RecordSink sink(c, "offshell", i);
    Cx g = c.g ? *c.g : s.coupling();
    if (std::abs(g) > 1.0) g = 1.0 / g;
    const ModelParams p = derive_params(N, M, q, g, 0.0);
    const VacuumSpec spec = make_vacuum_spec(GaugeVariant::A, s.unit_box(), p.eta, g, M);
    std::vector<Cx> roots;
    while (static_cast<int>(roots.size()) < M) {
      const Cx r{s.uniform(-0.5, 0.5), s.uniform(-1.0, 1.0)};
      bool ok = true;
      for (const Cx& o : roots) ok = ok && std::abs(std::sinh(r - o)) > 0.05 && std::abs(std::sinh(r + o)) > 0.05;
      if (ok) roots.push_back(r);
    }
    Cx u = s.spectral();
    auto far = [&](Cx x) {
      for (const Cx& r : roots)
        if (std::abs(std::sinh(x - r)) < 0.05) return false;
      return true;
    };
    while (!far(u)) u = s.spectral();
    json jr = json::array();
    for (const Cx& r : roots) jr.push_back(complex_json(r));
    const json in{{"N", N}, {"M", M}, {"q", q}, {"g", complex_json(g)}, {"eta", complex_json(p.eta)},
                  {"alpha", complex_json(spec.alpha)}, {"roots", jr}, {"u", complex_json(u)}};
    const OffshellReport r = verify_offshell_action(spec, N, roots, u);
    const std::string note = std::string("d_j denominator: ") + to_string(r.d_form);
    sink.add("offshell.a", r.a_residual, 1e-10, in);
    sink.add("offshell.d", r.d_residual, 1e-10, in, Kind::check, note);
    sink.add("offshell.d_plus", r.d_residual_plus, 1e-10, in, Kind::probe, note);
    return sink.out;
  });
}

inline std::vector<std::string> expand_suites(const std::vector<std::string>& s) {
  std::vector<std::string> out;
  for (const auto& name : s) {
    if (name == "all") {
      for (const auto& k : known_suites())
        if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    } else if (std::find(out.begin(), out.end(), name) == out.end()) {
      out.push_back(name);
    }
  }
  return out;
}

/// Which d_j denominator the off-shell identity selects across all samples.
inline json offshell_finding(const std::vector<Record>& recs) {
  int minus = 0, plus = 0, both = 0;
  for (const auto& r : recs) {
    if (r.id != "offshell.d") continue;
    if (r.note.find(to_string(DjForm::minus)) != std::string::npos) ++minus;
    else if (r.note.find(to_string(DjForm::plus)) != std::string::npos) ++plus;
    else if (r.note.find(to_string(DjForm::both)) != std::string::npos) ++both;
  }
  std::string verdict = minus > 0 && plus == 0   ? "sinh(u_j-u_l)"
                        : plus > 0 && minus == 0 ? "sinh(u_j+u_l)"
                        : minus + plus == 0      ? "undetermined (no sample with M >= 2)"
                                                 : "conflicting";
  return {{"d_j_denominator", verdict}, {"discriminating_samples", minus + plus}, {"indistinguishable_samples", both}};
}

inline CommandResult cmd_verify(const RunConfig& c) {
  CommandResult res;
  res.format = c.format;
  res.timings = c.timings;
  Report& rep = res.report;
  rep.command = "verify";
  rep.config = config_json(c);
  Stopwatch sw;
  for (const auto& suite : expand_suites(c.suites)) {
    std::vector<Record> recs;
    if (suite == "ybe") recs = suite_ybe(c);
    else if (suite == "hamiltonian") recs = suite_hamiltonian(c);
    else if (suite == "commutation") recs = suite_commutation(c);
    else if (suite == "vacuum") recs = suite_vacuum(c);
    else if (suite == "offshell") {
      recs = suite_offshell(c);
      rep.payload["findings"]["offshell"] = offshell_finding(recs);
    }
    rep.records.insert(rep.records.end(), recs.begin(), recs.end());
  }
  rep.wall_time = sw.seconds();
  res.exit_code = rep.all_pass() ? kExitPass : kExitCheckFailure;
  return res;
}

// ---------------------------------------------------------------------------
// Bethe commands

inline json params_json(const ModelParams& p) {
  return {{"N", p.N},
          {"M", p.M},
          {"q", p.q},
          {"g", complex_json(p.g)},
          {"K", complex_json(p.K)},
          {"eta", complex_json(p.eta)},
          {"delta", complex_json(p.delta)},
          {"exp_iphi", complex_json(p.exp_iphi)},
          {"m_branch", p.m_branch},
          {"variant", to_string(p.variant)}};
}

inline json solution_json(const BetheSolution& s, const SolutionChecks& ch) {
  json roots = json::array();
  for (const Cx& l : s.lambda) roots.push_back(complex_json(l));
  json coeffs = json::array();
  for (const auto& [k, v] : s.lambda_coeffs) coeffs.push_back({{"mode", k}, {"value", complex_json(v)}});
  json j{{"params", params_json(s.params)},
         {"branch", s.branch},
         {"roots", roots},
         {"iterations", s.iterations},
         {"residuals",
          {{"log", number_json(s.residual)},
           {"product", number_json(s.product_residual)},
           {"unwanted", number_json(ch.unwanted)},
           {"out_of_band", number_json(s.out_of_band)}}},
         {"lambda_coeffs", coeffs},
         {"energy", complex_json(s.energy)}};
  if (s.params.N >= 2) {
    Cx alt;
    verify_energy_identity(s, &alt);
    j["energy_alt"] = complex_json(alt);
  } else {
    j["energy_alt"] = nullptr;
  }
  return j;
}

inline void add_solution_records(RecordSink& sink, const BetheSolution& s, const SolutionChecks& ch) {
  const ModelParams& p = s.params;
  json in{{"N", p.N}, {"M", p.M}, {"q", p.q}, {"g", complex_json(p.g)}, {"K", complex_json(p.K)}, {"branch", s.branch}};
  sink.add("bethe.log_residual", ch.log_residual, 1e-12, in);
  sink.add("bethe.product_residual", ch.product_residual, 1e-11, in);
  sink.add("bethe.unwanted", ch.unwanted, 1e-10, in);
  sink.add("bethe.band_limit", ch.out_of_band, 1e-9, in);
  sink.add("bethe.leading_product", ch.leading_product, 1e-10, in, Kind::probe,
           "against g^{2N} e^{N eta}; the Q ratios add e^{2M eta}");
  sink.add("bethe.leading_product_full", ch.leading_product_full, 1e-10, in);
  sink.add("bethe.leading_sign", ch.leading_sign, 1e-10, in);
  sink.add("bethe.vacuum_form", ch.vacuum_form, 1e-10, in);
  if (ch.energy_identity) sink.add("bethe.energy_identity", *ch.energy_identity, 1e-9, in);
}

inline CommandResult config_failure(CommandResult res, const std::string& why) {
  std::cerr << "rtoda: " << why << "\n";
  res.exit_code = kExitConfig;
  return res;
}

/// One row per root plus a summary row.
/// Columns: row,index,branch,lambda_re,lambda_im,energy_re,energy_im,log_residual,product_residual
inline std::string solution_csv(const BetheSolution& s) {
  std::string out = "row,index,branch,lambda_re,lambda_im,energy_re,energy_im,log_residual,product_residual\n";
  for (std::size_t j = 0; j < s.lambda.size(); ++j)
    out += "root," + std::to_string(j + 1) + "," + std::to_string(s.branch[j]) + "," + fmt_double(s.lambda[j].real()) +
           "," + fmt_double(s.lambda[j].imag()) + ",,,,\n";
  out += "summary,,,,," + fmt_double(s.energy.real()) + "," + fmt_double(s.energy.imag()) + "," +
         fmt_double(s.residual) + "," + fmt_double(s.product_residual) + "\n";
  return out;
}

inline CommandResult cmd_solve(const RunConfig& c) {
  CommandResult res;
  res.format = c.format;
  res.timings = c.timings;
  Report& rep = res.report;
  rep.command = "solve";
  rep.config = config_json(c);
  Stopwatch sw;
  ModelParams p;
  try {
    p = derive_params(c.N, c.M, c.q, c.g_or_default(), c.K, c.complex_k);
  } catch (const DomainError& e) {
    return config_failure(std::move(res), e.what());
  }
  try {
    const BetheSolution s = solve_bae(p, c.branch);
    const SolutionChecks ch = check_solution(s);
    RecordSink sink(c, "bethe", 0);
    add_solution_records(sink, s, ch);
    rep.records = std::move(sink.out);
    rep.payload["solution"] = solution_json(s, ch);
    res.csv = solution_csv(s);
  } catch (const ConvergenceError& e) {
    std::cerr << "rtoda: " << e.what() << " (last residual " << fmt_double(e.last_residual()) << ", homotopy stage "
              << fmt_double(e.stage()) << ")\n";
    rep.payload["failure"] = {{"error", e.what()},
                              {"last_residual", number_json(e.last_residual())},
                              {"stage", e.stage()}};
    rep.wall_time = sw.seconds();
    res.exit_code = kExitNoConvergence;
    return res;
  }
  rep.wall_time = sw.seconds();
  for (auto& r : rep.records) r.wall_time = rep.wall_time / static_cast<double>(rep.records.size());
  res.exit_code = rep.all_pass() ? kExitPass : kExitCheckFailure;
  return res;
}

/// Increasing M-subsets of {0, ..., span-1}, lexicographic.
inline std::vector<std::vector<int>> branch_tuples(int M, int span) {
  if (span <= 0 || span < M) return {default_branch(M)};
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == M) {
      out.push_back(cur);
      return;
    }
    for (int v = start; v < span; ++v) {
      cur.push_back(v);
      self(self, v + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

struct ScanPoint {
  int q = 0, M = 0;
  double K = 0.0;
  std::vector<int> branch;
};

inline std::string branch_label(const std::vector<int>& b) {
  std::string s;
  for (std::size_t i = 0; i < b.size(); ++i) s += (i ? " " : "") + std::to_string(b[i]);
  return s;
}

/// Columns: q,M,eta_re,eta_im,branch,K,E_re,E_im,worst_residual
inline CommandResult cmd_scan(const RunConfig& c) {
  CommandResult res;
  res.format = c.format;
  res.timings = c.timings;
  Report& rep = res.report;
  rep.command = "scan";
  rep.config = config_json(c);
  Stopwatch sw;

  std::vector<ScanPoint> grid;
  for (int q = c.q_range.first; q <= c.q_range.second; ++q)
    for (int M = c.M_range.first; M <= c.M_range.second; ++M)
      for (double K : c.K_values)
        for (const auto& b : branch_tuples(M, c.branch_span)) grid.push_back({q, M, K, b});

  struct Outcome {
    bool ok = false;
    std::string error;
    std::optional<BetheSolution> sol;
    SolutionChecks checks;
    double time = 0.0;
  };
  const Cx g = c.g_or_default();
  auto outcomes = parallel_map(grid.size(), [&](std::size_t i) {
    Outcome o;
    Stopwatch t;
    try {
      const ScanPoint& pt = grid[i];
      const ModelParams p = derive_params(c.N, pt.M, pt.q, g, pt.K);
      o.sol = solve_bae(p, pt.branch);
      o.checks = check_solution(*o.sol);
      o.ok = true;
    } catch (const Error& e) {
      o.error = e.what();
    }
    o.time = t.seconds();
    return o;
  });

  json rows = json::array(), failures = json::array();
  std::string csv = "q,M,eta_re,eta_im,branch,K,E_re,E_im,worst_residual\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ScanPoint& pt = grid[i];
    Outcome& o = outcomes[i];
    if (!o.ok) {
      std::cerr << "rtoda: scan point q=" << pt.q << " M=" << pt.M << " K=" << fmt_double(pt.K) << " branch=["
                << branch_label(pt.branch) << "] failed: " << o.error << "\n";
      failures.push_back({{"q", pt.q}, {"M", pt.M}, {"K", pt.K}, {"branch", pt.branch}, {"error", o.error}});
      continue;
    }
    const BetheSolution& s = *o.sol;
    const SolutionChecks& ch = o.checks;
    double worst = std::max({ch.log_residual, ch.product_residual, ch.unwanted, ch.out_of_band,
                             ch.leading_product_full, ch.leading_sign, ch.vacuum_form});
    if (ch.energy_identity) worst = std::max(worst, *ch.energy_identity);
    RecordSink sink(c, "scan", static_cast<int>(i));
    add_solution_records(sink, s, ch);
    for (auto& r : sink.out) r.wall_time = o.time / static_cast<double>(sink.out.size());
    rep.records.insert(rep.records.end(), sink.out.begin(), sink.out.end());
    rows.push_back({{"q", pt.q},
                    {"M", pt.M},
                    {"eta", complex_json(s.params.eta)},
                    {"branch", pt.branch},
                    {"K", pt.K},
                    {"energy", complex_json(s.energy)},
                    {"worst_residual", number_json(worst)}});
    csv += std::to_string(pt.q) + "," + std::to_string(pt.M) + "," + fmt_double(s.params.eta.real()) + "," +
           fmt_double(s.params.eta.imag()) + "," + branch_label(pt.branch) + "," + fmt_double(pt.K) + "," +
           fmt_double(s.energy.real()) + "," + fmt_double(s.energy.imag()) + "," + fmt_double(worst) + "\n";
  }
  rep.payload["rows"] = std::move(rows);
  rep.payload["failures"] = std::move(failures);
  res.csv = std::move(csv);
  rep.wall_time = sw.seconds();
  res.exit_code = rep.all_pass() ? kExitPass : kExitCheckFailure;
  return res;
}

/// Reads a report and re-emits it unchanged (JSON) or as the record table (CSV).
inline CommandResult cmd_report(const RunConfig& c) {
  CommandResult res;
  res.format = c.format;
  std::ifstream in(c.input);
  if (!in) return config_failure(std::move(res), "cannot open report '" + c.input + "'");
  json j;
  try {
    in >> j;
    res.report = report_from_json(j);
  } catch (const json::exception& e) {
    return config_failure(std::move(res), std::string("report is not valid JSON: ") + e.what());
  } catch (const ConfigError& e) {
    return config_failure(std::move(res), e.what());
  }
  res.timings = has_timings(j);
  res.exit_code = kExitPass;
  return res;
}

inline CommandResult run(const RunConfig& c) {
  try {
    validate(c);
    switch (c.command) {
      case Command::verify: return cmd_verify(c);
      case Command::solve: return cmd_solve(c);
      case Command::scan: return cmd_scan(c);
      case Command::report: return cmd_report(c);
    }
  } catch (const ConfigError& e) {
    return config_failure({}, e.what());
  } catch (const DomainError& e) {
    return config_failure({}, e.what());
  }
  return config_failure({}, "unknown command");
}

/// Output text in the requested format.
inline std::string render(const CommandResult& r) {
  if (r.format == Format::json) return dump(to_json(r.report, r.timings));
  if (!r.csv.empty()) return r.csv;
  return records_csv(r.report);
}

}  // namespace rtoda::cli
