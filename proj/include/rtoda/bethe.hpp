#pragma once

// Parameters on the eta constraint sequence, the log-form Bethe equations,
// T-Q eigenvalues and the self-consistency checks built on them.

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rtoda/parallel.hpp"
#include "rtoda/wavefun.hpp"

namespace rtoda {

struct ModelParams {
  int N = 0, M = 0, q = 0;
  Cx g, K;
  Cx log_g;
  Cx eta, delta;
  /// e^{i phi}; e^{-i phi} is its reciprocal.
  Cx exp_iphi;
  /// N delta eta = 2 M eta + 2 pi i m_branch.
  int m_branch = 0;
  /// Vacuum gauge the wavefunction construction needs: A for |g| < 1.
  GaugeVariant variant = GaugeVariant::A;

  // Construction-time invariant residuals.
  double constraint_identity = 0.0;  // |e^{2M eta} - e^{N delta eta}|, relative
  double phi_duality = 0.0;          // |e^{i phi} * (second form) - 1|
  double g_identity = 0.0;           // |g^{2N} e^{(N+2M) eta} - (-1)^N|
};

inline constexpr double kParamTol = 1e-12;

/// eta = [i pi (2q - N) - 2 N ln g] / (N + 2M), delta = -1 - (2 ln g + i pi) / eta,
/// e^{i phi} = g^N e^{-N M eta} e^{N eta / 2 + i eta K}.
inline ModelParams derive_params(int N, int M, int q, Cx g, Cx K, bool allow_complex_k = false) {
  if (N < 1) throw DomainError("N must be >= 1");
  if (M < 0) throw DomainError("M must be >= 0");
  if (g == Cx(0.0)) throw DomainError("g must be nonzero");
  if (std::abs(std::abs(g) - 1.0) < 1e-12) throw DomainError("|g| = 1 is not supported");
  if (!allow_complex_k && K.imag() != 0.0) throw DomainError("K must be real (pass allow_complex_k to override)");

  ModelParams p;
  p.N = N;
  p.M = M;
  p.q = q;
  p.g = g;
  p.K = K;
  p.log_g = std::log(g);
  const double dN = N, dM = M;
  p.eta = (kI * kPi * (2.0 * q - dN) - 2.0 * dN * p.log_g) / (dN + 2.0 * dM);
  if (std::abs(p.eta) < 1e-12) throw DomainError("eta vanishes for these inputs");
  p.delta = -1.0 - (2.0 * p.log_g + kI * kPi) / p.eta;
  p.variant = std::abs(g) < 1.0 ? GaugeVariant::A : GaugeVariant::B;

  const Cx m = (dN * p.delta * p.eta - 2.0 * dM * p.eta) / (2.0 * kPi * kI);
  p.m_branch = static_cast<int>(std::lround(m.real()));
  if (std::abs(m - Cx(p.m_branch)) > 1e-9) throw DomainError("constraint branch integer is not an integer");

  p.exp_iphi = ipow(g, N) * std::exp(-dN * dM * p.eta + dN * p.eta / 2.0 + kI * p.eta * K);
  const Cx second = (N % 2 ? -1.0 : 1.0) * ipow(g, N) * std::exp((dN + 2.0) * dM * p.eta + dN * p.eta / 2.0 - kI * p.eta * K);

  const Cx e1 = std::exp(2.0 * dM * p.eta), e2 = std::exp(dN * p.delta * p.eta);
  p.constraint_identity = std::abs(e1 - e2) / std::max(std::abs(e1), std::abs(e2));
  p.phi_duality = std::abs(p.exp_iphi * second - 1.0);
  p.g_identity = std::abs(ipow(g, 2 * N) * std::exp((dN + 2.0 * dM) * p.eta) - (N % 2 ? -1.0 : 1.0));
  if (!(p.constraint_identity < kParamTol) || !(p.phi_duality < kParamTol) || !(p.g_identity < kParamTol))
    throw DomainError("derived parameters violate the constraint identities");
  return p;
}

/// Variant-A vacuum functions for the model parameters (alpha does not enter).
inline VacuumSpec vacuum_of(const ModelParams& p) {
  VacuumSpec s;
  s.variant = GaugeVariant::A;
  s.alpha = 0.0;
  s.eta = p.eta;
  s.g = p.g;
  s.log_g = p.log_g;
  s.delta = p.delta;
  s.M = p.M;
  return s;
}

struct SolverOptions {
  int homotopy_steps = 10;
  int max_iterations = 60;
  double tolerance = 1e-12;
  /// Smallest Newton step fraction the backtracking accepts.
  double min_step = 1.0 / 1024.0;
};

struct BetheSolution {
  ModelParams params;
  std::vector<int> branch;
  std::vector<Cx> lambda;
  double residual = 0.0;          // log form, ||F||_inf
  double product_residual = 0.0;  // product form, relative
  int iterations = 0;
  Cx energy;
  std::map<int, Cx> lambda_coeffs;
  double out_of_band = 0.0;
};

inline constexpr double kRootGuard = 1e-6;

namespace detail {

// Right-hand constant of the log form for root j with the interaction off.
inline Cx log_rhs(const ModelParams& p, int n) {
  return 2.0 * kI * p.eta * p.K - kI * kPi * static_cast<double>(p.N % 2) - 2.0 * kPi * kI * static_cast<double>(n);
}

inline void check_separation(const std::vector<Cx>& lam, Cx eta, double stage) {
  for (std::size_t j = 0; j < lam.size(); ++j)
    for (std::size_t l = j + 1; l < lam.size(); ++l) {
      const Cx d = lam[j] - lam[l];
      // sinh detects coincidence modulo i pi, which is what the equations see.
      if (std::abs(std::sinh(d)) < kRootGuard || std::abs(std::sinh(d + eta)) < kRootGuard ||
          std::abs(std::sinh(d - eta)) < kRootGuard)
        throw ConvergenceError("Bethe roots collided", std::numeric_limits<double>::infinity(), stage);
    }
}

}  // namespace detail

/// F_j = -2N l_j + 2 i eta K - i pi (N mod 2) - 2 pi i n_j
///       - s sum_{l != j} [log sinh(l_j - l_l + eta) - log sinh(l_j - l_l - eta)].
inline std::vector<Cx> bae_log_residual(const ModelParams& p, std::span<const int> n, std::span<const Cx> lam,
                                        double s = 1.0) {
  std::vector<Cx> f(lam.size());
  for (std::size_t j = 0; j < lam.size(); ++j) {
    Cx v = -2.0 * static_cast<double>(p.N) * lam[j] + detail::log_rhs(p, n[j]);
    for (std::size_t l = 0; l < lam.size(); ++l) {
      if (l == j) continue;
      const Cx d = lam[j] - lam[l];
      v -= s * (std::log(std::sinh(d + p.eta)) - std::log(std::sinh(d - p.eta)));
    }
    f[j] = v;
  }
  return f;
}

inline Eigen::MatrixXcd bae_jacobian(const ModelParams& p, std::span<const Cx> lam, double s = 1.0) {
  const auto M = static_cast<Eigen::Index>(lam.size());
  Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(M, M);
  for (Eigen::Index j = 0; j < M; ++j) {
    J(j, j) = -2.0 * static_cast<double>(p.N);
    for (Eigen::Index l = 0; l < M; ++l) {
      if (l == j) continue;
      const Cx d = lam[static_cast<std::size_t>(j)] - lam[static_cast<std::size_t>(l)];
      const Cx c = 1.0 / std::tanh(d + p.eta) - 1.0 / std::tanh(d - p.eta);
      J(j, j) -= s * c;
      J(j, l) += s * c;
    }
  }
  return J;
}

inline double inf_norm(const std::vector<Cx>& v) {
  double m = 0.0;
  for (const Cx& x : v) m = std::max(m, std::abs(x));
  return m;
}

/// e^{-2N l_j + 2 i eta K} against (-1)^N prod sinh(l_j - l_l + eta) / sinh(l_j - l_l - eta).
inline double bae_product_residual(const ModelParams& p, std::span<const Cx> lam) {
  double worst = 0.0;
  for (std::size_t j = 0; j < lam.size(); ++j) {
    const Cx lhs = std::exp(-2.0 * static_cast<double>(p.N) * lam[j] + 2.0 * kI * p.eta * p.K);
    Cx rhs = p.N % 2 ? -1.0 : 1.0;
    for (std::size_t l = 0; l < lam.size(); ++l)
      if (l != j) rhs *= std::sinh(lam[j] - lam[l] + p.eta) / std::sinh(lam[j] - lam[l] - p.eta);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)));
  }
  return worst;
}

/// Interaction-free roots l_j = (2 i eta K - i pi (N mod 2) - 2 pi i n_j) / (2N).
inline std::vector<Cx> decoupled_roots(const ModelParams& p, std::span<const int> n) {
  std::vector<Cx> lam;
  for (int nj : n) lam.push_back(detail::log_rhs(p, nj) / (2.0 * static_cast<double>(p.N)));
  return lam;
}

/// Default branch integers 0, 1, ..., M-1.
inline std::vector<int> default_branch(int M) {
  std::vector<int> n(static_cast<std::size_t>(std::max(M, 0)));
  for (int j = 0; j < M; ++j) n[static_cast<std::size_t>(j)] = j;
  return n;
}

inline Cx tq_eval(const ModelParams& p, std::span<const Cx> lam, Cx u);
inline void fill_observables(BetheSolution& s);

/// Damped Newton on the log form, continued from the decoupled roots by
/// scaling the interaction sum from 0 to 1. With `init`, Newton starts from
/// the given roots at full interaction.
inline BetheSolution solve_bae(const ModelParams& p, std::vector<int> branch = {},
                               std::optional<std::vector<Cx>> init = std::nullopt, SolverOptions opt = {}) {
  if (branch.empty()) branch = default_branch(p.M);
  if (static_cast<int>(branch.size()) != p.M) throw DomainError("need one branch integer per root");
  BetheSolution sol;
  sol.params = p;
  sol.branch = branch;
  if (p.M == 0) {
    fill_observables(sol);
    return sol;
  }

  std::vector<Cx> lam = init ? *init : decoupled_roots(p, branch);
  if (static_cast<int>(lam.size()) != p.M) throw DomainError("initial roots must have M entries");
  std::vector<double> stages;
  if (init) {
    stages = {1.0};
  } else {
    const int steps = std::max(opt.homotopy_steps, 1);
    for (int k = 1; k <= steps; ++k) stages.push_back(static_cast<double>(k) / steps);
  }

  double res = 0.0;
  for (double s : stages) {
    detail::check_separation(lam, p.eta, s);
    std::vector<Cx> f = bae_log_residual(p, branch, lam, s);
    res = inf_norm(f);
    const double stage_tol = s < 1.0 ? 1e-10 : 0.1 * opt.tolerance;
    for (int it = 0; it < opt.max_iterations && res >= stage_tol; ++it) {
      ++sol.iterations;
      const Eigen::MatrixXcd J = bae_jacobian(p, lam, s);
      Eigen::VectorXcd rhs(p.M);
      for (int j = 0; j < p.M; ++j) rhs(j) = f[static_cast<std::size_t>(j)];
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(J);
      const Eigen::VectorXcd step = lu.solve(rhs);
      if (!step.allFinite() || !(J * step - rhs).isZero(1e-8 * std::max(1.0, rhs.norm())))
        throw ConvergenceError("singular Bethe Jacobian", res, s);
      double t = 1.0;
      bool accepted = false;
      while (t >= opt.min_step) {
        std::vector<Cx> trial = lam;
        for (int j = 0; j < p.M; ++j) trial[static_cast<std::size_t>(j)] -= t * step(j);
        try {
          detail::check_separation(trial, p.eta, s);
        } catch (const ConvergenceError&) {
          t /= 2.0;
          continue;
        }
        std::vector<Cx> ft = bae_log_residual(p, branch, trial, s);
        const double rt = inf_norm(ft);
        if (rt < res || (t == 1.0 && rt < 10.0 * res && res < 1e-9)) {
          lam = std::move(trial);
          f = std::move(ft);
          res = rt;
          accepted = true;
          break;
        }
        t /= 2.0;
      }
      if (!accepted) break;
    }
    if (s < 1.0 && !(res < 1e-8)) throw ConvergenceError("homotopy stage did not converge", res, s);
  }
  if (!(res < opt.tolerance)) throw ConvergenceError("Bethe equations did not converge", res, 1.0);
  detail::check_separation(lam, p.eta, 1.0);
  sol.lambda = std::move(lam);
  sol.residual = res;
  sol.product_residual = bae_product_residual(p, sol.lambda);
  fill_observables(sol);
  return sol;
}

inline Cx q_function(std::span<const Cx> lam, Cx u) {
  Cx q = 1.0;
  for (const Cx& l : lam) q *= std::sinh(u - l);
  return q;
}

inline void require_off_roots(std::span<const Cx> lam, Cx u) {
  for (const Cx& l : lam)
    if (!(std::abs(std::sinh(u - l)) > kPoleGuard)) throw DomainError("u within the pole guard of a Bethe root");
}

/// Lambda(u) = (ig)^N e^{N eta/2} e^{Nu - i eta K} Q(u+eta)/Q(u)
///           + (-ig)^N e^{N eta/2} e^{-Nu + i eta K} Q(u-eta)/Q(u).
inline Cx tq_eval(const ModelParams& p, std::span<const Cx> lam, Cx u) {
  require_off_roots(lam, u);
  const double dN = p.N;
  const Cx q0 = q_function(lam, u);
  const Cx pre = std::exp(dN * p.eta / 2.0);
  return ipow(kI * p.g, p.N) * pre * std::exp(dN * u - kI * p.eta * p.K) * q_function(lam, u + p.eta) / q0 +
         ipow(-kI * p.g, p.N) * pre * std::exp(-dN * u + kI * p.eta * p.K) * q_function(lam, u - p.eta) / q0;
}

inline Cx tq_eval(const BetheSolution& s, Cx u) { return tq_eval(s.params, s.lambda, u); }

/// e^{-i phi} a(u) prod sinh(u - l + eta)/sinh(u - l) + e^{i phi} d(u) prod sinh(u - l - eta)/sinh(u - l),
/// with the variant-A vacuum functions a, d.
inline Cx tq_eval_vacuum_form(const ModelParams& p, std::span<const Cx> lam, Cx u) {
  require_off_roots(lam, u);
  const VacuumSpec v = vacuum_of(p);
  Cx pa = 1.0, pd = 1.0;
  for (const Cx& l : lam) {
    const Cx s0 = std::sinh(u - l);
    pa *= std::sinh(u - l + p.eta) / s0;
    pd *= std::sinh(u - l - p.eta) / s0;
  }
  return vacuum_a(v, p.N, u) * pa / p.exp_iphi + p.exp_iphi * vacuum_d(v, p.N, u) * pd;
}

struct UnwantedReport {
  std::vector<Cx> values;
  /// max_j |Lambda_j| / max(|first term|, |second term|).
  double relative = 0.0;
};

inline UnwantedReport verify_unwanted(const ModelParams& p, std::span<const Cx> lam) {
  const VacuumSpec v = vacuum_of(p);
  UnwantedReport r;
  for (std::size_t j = 0; j < lam.size(); ++j) {
    Cx pa = 1.0, pd = 1.0;
    for (std::size_t l = 0; l < lam.size(); ++l) {
      if (l == j) continue;
      const Cx s0 = std::sinh(lam[j] - lam[l]);
      pa *= std::sinh(lam[j] - lam[l] + p.eta) / s0;
      pd *= std::sinh(lam[j] - lam[l] - p.eta) / s0;
    }
    const Cx t1 = vacuum_a(v, p.N, lam[j]) * pa / p.exp_iphi;
    const Cx t2 = p.exp_iphi * vacuum_d(v, p.N, lam[j]) * pd;
    r.values.push_back(t1 - t2);
    r.relative = std::max(r.relative, std::abs(t1 - t2) / std::max(std::abs(t1), std::abs(t2)));
  }
  return r;
}

inline UnwantedReport verify_unwanted(const BetheSolution& s) { return verify_unwanted(s.params, s.lambda); }

struct LambdaCoeffs {
  std::map<int, Cx> modes;
  double out_of_band = 0.0;
  double radius_log = 0.0;  // u0 with sampling circle |z| = e^{2 u0}
};

/// Laurent modes of Lambda(u) in e^{u} by sampling e^{Nu} Lambda(u), a
/// polynomial in z = e^{2u} when the Bethe equations hold, on a circle that
/// keeps clear of the poles e^{2 l_j}. Oversampled 4(N+1) times so a
/// surviving pole shows up as out-of-band content, reported relative to the
/// largest sample.
inline LambdaCoeffs lambda_coeffs(const ModelParams& p, std::span<const Cx> lam) {
  const int N = p.N, P = 4 * (N + 1);
  // Prefer the smallest |u0| with a clear margin to every Re(l_j): rescaling
  // by e^{-2 u0 m} amplifies rounding in the high modes.
  double u0 = 0.0, best = -1.0, best_u = 0.0;
  bool found = false;
  for (int c = 0; c <= 40 && !found; ++c) {
    const double cand = (c % 2 ? 1.0 : -1.0) * 0.05 * ((c + 1) / 2);
    double gap = std::numeric_limits<double>::infinity();
    for (const Cx& l : lam) gap = std::min(gap, std::abs(cand - l.real()));
    if (gap >= 0.3) {
      u0 = cand;
      found = true;
    } else if (gap > best) {
      best = gap;
      best_u = cand;
    }
  }
  if (!found) u0 = best_u;
  std::vector<Cx> f(static_cast<std::size_t>(P));
  double sample_max = 0.0;
  for (int k = 0; k < P; ++k) {
    const Cx u = u0 + kI * kPi * static_cast<double>(k) / static_cast<double>(P);
    f[static_cast<std::size_t>(k)] = std::exp(static_cast<double>(N) * u) * tq_eval(p, lam, u);
    sample_max = std::max(sample_max, std::abs(f[static_cast<std::size_t>(k)]));
  }
  LambdaCoeffs out;
  out.radius_log = u0;
  double out_band = 0.0;
  for (int m = 0; m < P; ++m) {
    Cx c = 0.0;
    for (int k = 0; k < P; ++k)
      c += std::polar(1.0, -2.0 * kPi * static_cast<double>((k * m) % P) / P) * f[static_cast<std::size_t>(k)];
    c /= static_cast<double>(P);
    if (m <= N) {
      out.modes.emplace(2 * m - N, c * std::exp(-2.0 * u0 * m));
    } else {
      out_band = std::max(out_band, std::abs(c));
    }
  }
  out.out_of_band = sample_max > 0.0 ? out_band / sample_max : out_band;
  return out;
}

/// E = (e^{-2 eta} - 1) sum_j cosh(2 l_j).
inline Cx energy(const ModelParams& p, std::span<const Cx> lam) {
  Cx s = 0.0;
  for (const Cx& l : lam) s += std::cosh(2.0 * l);
  return (std::exp(-2.0 * p.eta) - 1.0) * s;
}

inline void fill_observables(BetheSolution& s) {
  const LambdaCoeffs c = lambda_coeffs(s.params, s.lambda);
  s.lambda_coeffs = c.modes;
  s.out_of_band = c.out_of_band;
  s.energy = energy(s.params, s.lambda);
}

/// E_alt = -1/2 (Lambda_{N-2}/Lambda_N + Lambda_{2-N}/Lambda_{-N}); returns
/// |E - E_alt| / (1 + |E|). Needs N >= 2: for N = 1 the two ratios involve the
/// same pair of modes and the expansion does not separate.
inline double verify_energy_identity(const BetheSolution& s, Cx* e_alt = nullptr) {
  const int N = s.params.N;
  if (N < 2) throw DomainError("energy identity needs N >= 2");
  const auto& c = s.lambda_coeffs;
  const Cx ln = c.at(N), lmn = c.at(-N);
  if (ln == Cx(0.0) || lmn == Cx(0.0)) throw DomainError("leading T-Q coefficient vanishes");
  const Cx alt = -0.5 * (c.at(N - 2) / ln + c.at(2 - N) / lmn);
  if (e_alt) *e_alt = alt;
  return std::abs(s.energy - alt) / (1.0 + std::abs(s.energy));
}

/// Self-consistency of a converged solution, one figure per property.
struct SolutionChecks {
  double log_residual = 0.0;
  double product_residual = 0.0;
  double unwanted = 0.0;
  double out_of_band = 0.0;
  /// |Lambda_N Lambda_{-N} - g^{2N} e^{N eta}|, relative. Only holds for
  /// M = 0: the Q ratios contribute e^{+-M eta} at u -> +-infinity.
  double leading_product = 0.0;
  /// |Lambda_N Lambda_{-N} - g^{2N} e^{(N+2M) eta}|, relative; the target is
  /// (-1)^N on the constraint sequence, the eigenvalue of t_N t_{-N}.
  double leading_product_full = 0.0;
  double leading_sign = 0.0;     // |Lambda_N e^{i eta K} - (-1)^{m_branch}|
  /// T-Q against the vacuum-function form at a test point, after the sign
  /// (-1)^{Nq} that separates the two on the constraint sequence.
  double vacuum_form = 0.0;
  std::optional<double> energy_identity;
};

inline SolutionChecks check_solution(const BetheSolution& s, Cx test_u = Cx(0.17, 0.41)) {
  SolutionChecks c;
  const ModelParams& p = s.params;
  c.log_residual = s.residual;
  c.product_residual = s.product_residual;
  c.unwanted = verify_unwanted(s).relative;
  c.out_of_band = s.out_of_band;
  const Cx target = ipow(p.g, 2 * p.N) * std::exp(static_cast<double>(p.N) * p.eta);
  const Cx lead = s.lambda_coeffs.at(p.N) * s.lambda_coeffs.at(-p.N);
  c.leading_product = std::abs(lead - target) / std::abs(target);
  const Cx full = ipow(p.g, 2 * p.N) * std::exp(static_cast<double>(p.N + 2 * p.M) * p.eta);
  c.leading_product_full = std::abs(lead - full) / std::abs(full);
  const double sign = p.m_branch % 2 ? -1.0 : 1.0;
  c.leading_sign = std::abs(s.lambda_coeffs.at(p.N) * std::exp(kI * p.eta * p.K) - sign);
  const Cx t1 = tq_eval(s, test_u);
  const Cx t2 = ((p.N * p.q) % 2 ? -1.0 : 1.0) * tq_eval_vacuum_form(p, s.lambda, test_u);
  c.vacuum_form = std::abs(t1 - t2) / std::max({std::abs(t1), std::abs(t2), 1e-300});
  if (p.N >= 2) c.energy_identity = verify_energy_identity(s);
  return c;
}

/// Independent solves for several branch tuples, ordered as given.
inline std::vector<BetheSolution> solve_many(const ModelParams& p, const std::vector<std::vector<int>>& branches,
                                             SolverOptions opt = {}) {
  return parallel_map(branches.size(), [&](std::size_t i) { return solve_bae(p, branches[i], std::nullopt, opt); });
}

}  // namespace rtoda
