#pragma once

// Exact algebra of Gaussian-exponential wavefunctions
//   psi(x_1..x_N) = sum_t amp_t prod_n exp(a_n x_n^2 + b_{t,n} x_n)
// which is closed under the Lax-entry actions
//   exp(-i eta p_n): psi(x_n) -> psi(x_n - eta),   exp(+-x_n): multiplication.
// Used to check the vacuum properties and the off-shell action of the gauged
// monodromy on Bethe-type states.

#include <algorithm>
#include <array>
#include <span>
#include <string>
#include <vector>

#include "rtoda/gauge.hpp"

namespace rtoda {

/// Exponent keys closer than this (per site, max over Re/Im) are merged.
inline constexpr double kKeyTol = 1e-9;
/// Terms below this fraction of the state's largest scale are dropped.
inline constexpr double kPruneRel = 1e-13;

/// One exponential monomial. `scale` accumulates the moduli of every raw
/// contribution merged into the term, so |amp| / scale measures cancellation.
struct GaussTerm {
  Cx amp;
  double scale = 0.0;
  std::vector<Cx> lin;
};

class ExpGaussState {
 public:
  ExpGaussState() = default;
  explicit ExpGaussState(std::vector<Cx> quad) : quad_(std::move(quad)) {}

  int n_sites() const { return static_cast<int>(quad_.size()); }
  const std::vector<Cx>& quad() const { return quad_; }
  const std::vector<GaussTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add_term(Cx amp, std::vector<Cx> lin, double scale = -1.0) {
    if (lin.size() != quad_.size()) throw DimensionError("term key has the wrong site count");
    terms_.push_back({amp, scale < 0.0 ? std::abs(amp) : scale, std::move(lin)});
  }

  ExpGaussState& operator+=(const ExpGaussState& o) {
    require_same_quad(o);
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
  }

  ExpGaussState& operator*=(Cx c) {
    const double m = std::abs(c);
    for (auto& t : terms_) {
      t.amp *= c;
      t.scale *= m;
    }
    return *this;
  }

  double max_scale() const {
    double s = 0.0;
    for (const auto& t : terms_) s = std::max(s, t.scale);
    return s;
  }

  double max_amp() const {
    double s = 0.0;
    for (const auto& t : terms_) s = std::max(s, std::abs(t.amp));
    return s;
  }

  /// Merges equal keys and sorts keys lexicographically by (Re, Im) per site.
  /// With `prune`, drops terms with |amp| < kPruneRel * max_scale().
  ExpGaussState canonical(bool prune = true) const {
    ExpGaussState out(quad_);
    for (const auto& t : terms_) {
      auto it = std::find_if(out.terms_.begin(), out.terms_.end(),
                             [&](const GaussTerm& g) { return same_key(g.lin, t.lin); });
      if (it == out.terms_.end()) {
        out.terms_.push_back(t);
      } else {
        it->amp += t.amp;
        it->scale += t.scale;
      }
    }
    if (prune) {
      const double cut = kPruneRel * out.max_scale();
      std::erase_if(out.terms_, [&](const GaussTerm& g) { return !(std::abs(g.amp) >= cut) || g.amp == Cx(0.0); });
    }
    std::sort(out.terms_.begin(), out.terms_.end(),
              [](const GaussTerm& a, const GaussTerm& b) { return key_less(a.lin, b.lin); });
    return out;
  }

  /// Pointwise value, for oracle checks independent of the term algebra.
  Cx evaluate(std::span<const Cx> x) const {
    if (x.size() != quad_.size()) throw DimensionError("evaluate: wrong coordinate count");
    Cx sum = 0.0;
    for (const auto& t : terms_) {
      Cx e = 0.0;
      for (std::size_t n = 0; n < quad_.size(); ++n) e += quad_[n] * x[n] * x[n] + t.lin[n] * x[n];
      sum += t.amp * std::exp(e);
    }
    return sum;
  }

  void require_same_quad(const ExpGaussState& o) const {
    if (o.quad_.size() != quad_.size()) throw DimensionError("states on different site counts");
    for (std::size_t n = 0; n < quad_.size(); ++n)
      if (std::abs(o.quad_[n] - quad_[n]) > kKeyTol * std::max(1.0, std::abs(quad_[n])))
        throw DimensionError("states with different quadratic coefficients");
  }

  // Term-level mutation for the site actions below.
  std::vector<GaussTerm>& mutable_terms() { return terms_; }

 private:
  static bool same_key(const std::vector<Cx>& a, const std::vector<Cx>& b) {
    for (std::size_t n = 0; n < a.size(); ++n)
      if (std::abs(a[n].real() - b[n].real()) > kKeyTol || std::abs(a[n].imag() - b[n].imag()) > kKeyTol)
        return false;
    return true;
  }
  static bool key_less(const std::vector<Cx>& a, const std::vector<Cx>& b) {
    for (std::size_t n = 0; n < a.size(); ++n) {
      if (a[n].real() != b[n].real()) return a[n].real() < b[n].real();
      if (a[n].imag() != b[n].imag()) return a[n].imag() < b[n].imag();
    }
    return false;
  }

  std::vector<Cx> quad_;
  std::vector<GaussTerm> terms_;
};

inline ExpGaussState operator+(ExpGaussState a, const ExpGaussState& b) { return a += b; }
inline ExpGaussState operator-(ExpGaussState a, ExpGaussState b) {
  b *= Cx(-1.0);
  return a += b;
}
inline ExpGaussState operator*(Cx c, ExpGaussState a) { return a *= c; }

/// max |amp| / max scale of the merged difference; 0 when both sides vanish.
inline double state_residual(const ExpGaussState& a, const ExpGaussState& b) {
  const ExpGaussState d = (a - b).canonical(false);
  const double s = d.max_scale();
  return s > 0.0 ? d.max_amp() / s : 0.0;
}

/// Size of what is left after cancellation, relative to what cancelled.
inline double annihilation_residual(const ExpGaussState& s) {
  const ExpGaussState c = s.canonical(false);
  const double sc = c.max_scale();
  return sc > 0.0 ? c.max_amp() / sc : 0.0;
}

/// coeff * exp(expmul * x_site) * psi(x_site + shift * eta), site 1-based.
struct ActionTerm {
  Cx coeff;
  int site = 1;
  int shift = 0;
  int expmul = 0;
};

/// Finite sum of single-site actions. Closed on ExpGaussState: the shift
/// x -> x + s maps exp(a x^2 + b x) to exp(a x^2 + (b + 2 a s) x) times
/// exp(a s^2 + b s), folded into the amplitude.
struct SiteAction {
  Cx eta;
  std::vector<ActionTerm> terms;

  ExpGaussState apply(const ExpGaussState& in) const {
    ExpGaussState out(in.quad());
    for (const auto& at : terms) {
      if (at.site < 1 || at.site > in.n_sites()) throw DimensionError("action site out of range");
      const auto n = static_cast<std::size_t>(at.site - 1);
      const Cx a = in.quad()[n];
      const Cx s = static_cast<double>(at.shift) * eta;
      for (const auto& t : in.terms()) {
        std::vector<Cx> lin = t.lin;
        Cx factor = at.coeff;
        if (at.shift != 0) {
          factor *= std::exp(a * s * s + lin[n] * s);
          lin[n] += 2.0 * a * s;
        }
        lin[n] += static_cast<double>(at.expmul);
        out.add_term(t.amp * factor, std::move(lin), t.scale * std::abs(factor));
      }
    }
    return out;
  }
};

/// Lax entries of site n as actions, row-major. U = exp(-i eta p) is shift -1.
inline std::array<SiteAction, 4> lax_action(int site, Cx u, Cx g, Cx eta) {
  std::array<SiteAction, 4> l{SiteAction{eta, {}}, SiteAction{eta, {}}, SiteAction{eta, {}},
                              SiteAction{eta, {}}};
  l[0].terms = {{std::exp(u), site, -1, 0}, {-std::exp(-u), site, +1, 0}};
  l[1].terms = {{-g, site, 0, +1}};
  l[2].terms = {{g, site, 0, -1}};
  return l;
}

/// M_j^{-1}(u) L_{s_k}(u) ... L_{s_1}(u) M_k(u) acting on states, where
/// sites = {s_1 < ... < s_k}. With all sites this is the gauged monodromy;
/// with one site it is the gauged local Lax operator.
class GaugedMonodromyAction {
 public:
  GaugedMonodromyAction(Cx j, Cx k, Cx u, Cx g, Cx eta, std::vector<int> sites,
                        GaugeVariant variant = GaugeVariant::A)
      : left_(gauge_matrix(variant, j, u, eta).m_inv), right_(gauge_matrix(variant, k, u, eta).m) {
    for (int s : sites) lax_.push_back(lax_action(s, u, g, eta));
  }

  GaugedMonodromyAction(Cx j, Cx k, Cx u, Cx g, Cx eta, int N, GaugeVariant variant = GaugeVariant::A)
      : GaugedMonodromyAction(j, k, u, g, eta, all_sites(N), variant) {}

  ExpGaussState apply(int row, int col, const ExpGaussState& s) const {
    ExpGaussState up = right_(0, col) * s;
    ExpGaussState down = right_(1, col) * s;
    for (const auto& l : lax_) {
      ExpGaussState nu = (l[0].apply(up) + l[1].apply(down)).canonical(false);
      ExpGaussState nd = (l[2].apply(up) + l[3].apply(down)).canonical(false);
      up = std::move(nu);
      down = std::move(nd);
    }
    return (left_(row, 0) * std::move(up) + left_(row, 1) * std::move(down)).canonical(false);
  }

  ExpGaussState Abar(const ExpGaussState& s) const { return apply(0, 0, s); }
  ExpGaussState Bbar(const ExpGaussState& s) const { return apply(0, 1, s); }
  ExpGaussState Cbar(const ExpGaussState& s) const { return apply(1, 0, s); }
  ExpGaussState Dbar(const ExpGaussState& s) const { return apply(1, 1, s); }

 private:
  static std::vector<int> all_sites(int N) {
    std::vector<int> s(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) s[static_cast<std::size_t>(n)] = n + 1;
    return s;
  }

  Mat2 left_, right_;
  std::vector<std::array<SiteAction, 4>> lax_;
};

inline Cx ipow(Cx z, int n) {
  Cx out = 1.0;
  for (int i = 0; i < std::abs(n); ++i) out *= z;
  return n >= 0 ? out : 1.0 / out;
}

/// Local vacuum parameters.
///
/// Variant A (Re eta > 0):
///   |alpha;n> = exp(-(x_n - alpha eta)^2 / (2 eta) + beta_n x_n)
///   delta = -1 - (2 ln g + i pi) / eta
///   beta_n = -n - 1/2 - ((2n+1) ln g + i n pi) / eta
/// Variant B (Re eta < 0), derived the same way for the alternate gauge:
///   |alpha;n> = exp(+(x_n - alpha eta)^2 / (2 eta) + beta_n x_n)
///   delta = 1 - (2 ln g + i pi) / eta
///   beta_n = -n - 1/2 + ((2n+1) ln g + i (n+1) pi) / eta
/// ln is the principal branch.
struct VacuumSpec {
  GaugeVariant variant = GaugeVariant::A;
  Cx alpha, eta, g;
  Cx log_g;
  Cx delta;
  int M = 0;

  Cx beta(int n) const {
    const double dn = n;
    if (variant == GaugeVariant::A)
      return -dn - 0.5 - ((2.0 * dn + 1.0) * log_g + kI * dn * kPi) / eta;
    return -dn - 0.5 + ((2.0 * dn + 1.0) * log_g + kI * (dn + 1.0) * kPi) / eta;
  }
  Cx alpha_n(int n) const { return alpha + static_cast<double>(n) * delta; }
  Cx k_alpha() const { return alpha + delta + static_cast<double>(M); }
  Cx quad() const { return (variant == GaugeVariant::A ? -1.0 : 1.0) / (2.0 * eta); }
  /// +1 when Abar raises alpha (variant A), -1 when it lowers it (variant B).
  int a_shift() const { return variant == GaugeVariant::A ? 1 : -1; }
};

inline VacuumSpec make_vacuum_spec(GaugeVariant variant, Cx alpha, Cx eta, Cx g, int M = 0) {
  if (variant == GaugeVariant::A && !(eta.real() > 0.0))
    throw DomainError("variant A vacuum needs Re(eta) > 0 (the Gaussian must converge)");
  if (variant == GaugeVariant::B && !(eta.real() < 0.0))
    throw DomainError("variant B vacuum needs Re(eta) < 0 (the Gaussian must converge)");
  if (g == Cx(0.0)) throw DomainError("vacuum needs g != 0");
  if (M < 0) throw DomainError("M must be non-negative");
  VacuumSpec s;
  s.variant = variant;
  s.alpha = alpha;
  s.eta = eta;
  s.g = g;
  s.log_g = std::log(g);
  s.M = M;
  s.delta = (variant == GaugeVariant::A ? -1.0 : 1.0) - (2.0 * s.log_g + kI * kPi) / eta;
  return s;
}

inline VacuumSpec with_alpha(VacuumSpec s, Cx alpha) {
  s.alpha = alpha;
  return s;
}

/// Single-site state |alpha;n> (site label n enters through beta_n).
inline ExpGaussState local_vacuum(const VacuumSpec& s, int n) {
  const double sign = s.variant == GaugeVariant::A ? -1.0 : 1.0;
  ExpGaussState st({s.quad()});
  st.add_term(std::exp(sign * s.alpha * s.alpha * s.eta / 2.0), {-sign * s.alpha + s.beta(n)});
  return st;
}

/// |alpha> = |alpha;1> (x) ... (x) |alpha;N>.
inline ExpGaussState global_vacuum(const VacuumSpec& s, int N) {
  if (N < 1) throw DomainError("global vacuum needs N >= 1");
  const double sign = s.variant == GaugeVariant::A ? -1.0 : 1.0;
  ExpGaussState st(std::vector<Cx>(static_cast<std::size_t>(N), s.quad()));
  std::vector<Cx> lin;
  for (int n = 1; n <= N; ++n) lin.push_back(-sign * s.alpha + s.beta(n));
  st.add_term(std::exp(static_cast<double>(N) * sign * s.alpha * s.alpha * s.eta / 2.0), std::move(lin));
  return st;
}

/// Eigenvalue of the local Abar on |alpha;n>.
inline Cx local_a(const VacuumSpec& s, int n, Cx u) {
  const Cx ndh = static_cast<double>(n) * s.delta * s.eta;
  if (s.variant == GaugeVariant::A) return s.g * std::exp(s.eta / 2.0 + u - ndh);
  return s.g * std::exp(-s.eta / 2.0 - u - ndh);
}

inline Cx local_d(const VacuumSpec& s, int n, Cx u) {
  const Cx ndh = static_cast<double>(n) * s.delta * s.eta;
  if (s.variant == GaugeVariant::A) return s.g * std::exp(s.eta / 2.0 - u + ndh);
  return s.g * std::exp(-s.eta / 2.0 + u + ndh);
}

/// a(u): variant A gives g^N e^{N eta/2} e^{N u - N(N+1) delta eta / 2}.
inline Cx vacuum_a(const VacuumSpec& s, int N, Cx u) {
  const double dN = N;
  const Cx tail = dN * (dN + 1.0) * s.delta * s.eta / 2.0;
  if (s.variant == GaugeVariant::A) return ipow(s.g, N) * std::exp(dN * s.eta / 2.0 + dN * u - tail);
  return ipow(s.g, N) * std::exp(-dN * s.eta / 2.0 - dN * u - tail);
}

/// d(u): variant A gives g^N e^{N eta/2} e^{-N u + N(N+1) delta eta / 2}.
inline Cx vacuum_d(const VacuumSpec& s, int N, Cx u) {
  const double dN = N;
  const Cx tail = dN * (dN + 1.0) * s.delta * s.eta / 2.0;
  if (s.variant == GaugeVariant::A) return ipow(s.g, N) * std::exp(dN * s.eta / 2.0 - dN * u + tail);
  return ipow(s.g, N) * std::exp(-dN * s.eta / 2.0 + dN * u + tail);
}

struct VacuumActionReport {
  double b_annihilation = 0.0;
  double a_residual = 0.0;
  double d_residual = 0.0;
  std::size_t a_terms = 0;
  std::size_t d_terms = 0;
  double worst() const { return std::max({b_annihilation, a_residual, d_residual}); }
};

/// Bbar^{(n)}_{alpha_{n+1},alpha_n}(u) |alpha;n> = 0 and the two shift actions.
inline VacuumActionReport verify_local_actions(const VacuumSpec& s, int n, Cx u) {
  const GaugedMonodromyAction op(s.alpha_n(n + 1), s.alpha_n(n), u, s.g, s.eta, std::vector<int>{1},
                                 s.variant);
  const ExpGaussState vac = local_vacuum(s, n);
  VacuumActionReport r;
  r.b_annihilation = annihilation_residual(op.Bbar(vac));
  const ExpGaussState a = op.Abar(vac), d = op.Dbar(vac);
  const double up = s.a_shift();
  r.a_residual = state_residual(a, local_a(s, n, u) * local_vacuum(with_alpha(s, s.alpha + up), n));
  r.d_residual = state_residual(d, local_d(s, n, u) * local_vacuum(with_alpha(s, s.alpha - up), n));
  r.a_terms = a.canonical().size();
  r.d_terms = d.canonical().size();
  return r;
}

struct GlobalActionReport : VacuumActionReport {
  /// |a(u) d(u) - g^{2N} e^{+-N eta}| relative.
  double ad_product = 0.0;
};

inline GlobalActionReport verify_global_actions(const VacuumSpec& s, int N, Cx u) {
  const GaugedMonodromyAction op(s.alpha_n(N + 1), s.alpha_n(1), u, s.g, s.eta, N, s.variant);
  const ExpGaussState vac = global_vacuum(s, N);
  GlobalActionReport r;
  r.b_annihilation = annihilation_residual(op.Bbar(vac));
  const ExpGaussState a = op.Abar(vac), d = op.Dbar(vac);
  const double up = s.a_shift();
  r.a_residual = state_residual(a, vacuum_a(s, N, u) * global_vacuum(with_alpha(s, s.alpha + up), N));
  r.d_residual = state_residual(d, vacuum_d(s, N, u) * global_vacuum(with_alpha(s, s.alpha - up), N));
  r.a_terms = a.canonical().size();
  r.d_terms = d.canonical().size();
  const Cx expected = ipow(s.g, 2 * N) * std::exp((s.variant == GaugeVariant::A ? 1.0 : -1.0) * N * s.eta);
  r.ad_product = std::abs(vacuum_a(s, N, u) * vacuum_d(s, N, u) - expected) / std::abs(expected);
  return r;
}

/// Cbar_{k+1,k-1}(u_1) ... Cbar_{k+M,k-M}(u_M) |alpha>, k = alpha + delta + M.
/// The rightmost factor acts first.
inline ExpGaussState bethe_type_state(const VacuumSpec& s, int N, std::span<const Cx> roots) {
  if (s.variant != GaugeVariant::A) throw DomainError("Bethe-type states are built for variant A");
  if (static_cast<int>(roots.size()) != s.M)
    throw DomainError("root count must equal the vacuum spec's M");
  const Cx k = s.k_alpha();
  ExpGaussState st = global_vacuum(s, N);
  for (int j = s.M; j >= 1; --j) {
    const double dj = j;
    const GaugedMonodromyAction op(k + dj, k - dj, roots[static_cast<std::size_t>(j - 1)], s.g, s.eta, N);
    st = op.Cbar(st);
  }
  return st.canonical();
}

/// Which denominator makes the D off-shell identity hold.
enum class DjForm { minus, plus, both, neither };

inline const char* to_string(DjForm f) {
  switch (f) {
    case DjForm::minus: return "sinh(u_j-u_l)";
    case DjForm::plus: return "sinh(u_j+u_l)";
    case DjForm::both: return "indistinguishable";
    case DjForm::neither: return "neither";
  }
  return "?";
}

struct OffshellReport {
  double a_residual = 0.0;
  /// D identity with denominator sinh(u_j - u_l).
  double d_residual = 0.0;
  /// D identity with the denominator sinh(u_j + u_l).
  double d_residual_plus = 0.0;
  DjForm d_form = DjForm::both;
  double worst() const { return std::max(a_residual, d_residual); }
};

/// Wanted and unwanted coefficients of the off-shell action.
struct OffshellCoefficients {
  Cx a_wanted, d_wanted;
  std::vector<Cx> a_unwanted, d_unwanted, d_unwanted_plus;
};

inline OffshellCoefficients offshell_coefficients(const VacuumSpec& s, int N, std::span<const Cx> roots, Cx u) {
  const Cx eta = s.eta, k = s.k_alpha(), se = std::sinh(eta);
  const std::size_t M = roots.size();
  OffshellCoefficients c;
  c.a_wanted = vacuum_a(s, N, u);
  c.d_wanted = vacuum_d(s, N, u);
  for (std::size_t j = 0; j < M; ++j) {
    const Cx suj = std::sinh(u - roots[j]);
    if (!(std::abs(suj) > kPoleGuard)) throw DomainError("u within the pole guard of a root");
    c.a_wanted *= std::sinh(u - roots[j] + eta) / suj;
    c.d_wanted *= std::sinh(u - roots[j] - eta) / suj;
  }
  for (std::size_t j = 0; j < M; ++j) {
    const Cx uj = roots[j];
    const Cx suj = std::sinh(u - uj);
    Cx pa = 1.0, pd = 1.0, pd_plus = 1.0;
    for (std::size_t l = 0; l < M; ++l) {
      if (l == j) continue;
      const Cx sjl = std::sinh(uj - roots[l]);
      if (!(std::abs(sjl) > kPoleGuard)) throw DomainError("coincident roots");
      pa *= std::sinh(uj - roots[l] + eta) / sjl;
      pd *= std::sinh(uj - roots[l] - eta) / sjl;
      pd_plus *= std::sinh(uj - roots[l] - eta) / std::sinh(uj + roots[l]);
    }
    const Cx kp = (k + 1.0) * eta, km = (k - 1.0) * eta;
    const Cx fa = -vacuum_a(s, N, uj) * se * std::sinh(kp - u + uj) / (suj * std::sinh(kp));
    const Cx fd = vacuum_d(s, N, uj) * se * std::sinh(km - u + uj) / (suj * std::sinh(km));
    c.a_unwanted.push_back(fa * pa);
    c.d_unwanted.push_back(fd * pd);
    c.d_unwanted_plus.push_back(fd * pd_plus);
  }
  return c;
}

/// Abar_{k,k}(u) and Dbar_{k,k}(u) on |u_1..u_M;alpha> against the wanted term
/// at alpha +- 1 plus the M unwanted terms with u_j replaced by u. Requires
/// e^{2 M eta} = e^{N delta eta}, which lines the outermost gauge index up with
/// the vacuum's.
inline OffshellReport verify_offshell_action(const VacuumSpec& s, int N, std::span<const Cx> roots, Cx u,
                                             double tol = 1e-10) {
  const Cx lhs_c = std::exp(2.0 * s.M * s.eta), rhs_c = std::exp(static_cast<double>(N) * s.delta * s.eta);
  if (std::abs(lhs_c - rhs_c) > 1e-10 * std::max(1.0, std::abs(lhs_c)))
    throw DomainError("off-shell action needs eta on the constraint sequence (e^{2M eta} = e^{N delta eta})");
  const OffshellCoefficients c = offshell_coefficients(s, N, roots, u);
  const Cx k = s.k_alpha();
  const std::vector<Cx> base(roots.begin(), roots.end());
  const ExpGaussState state = bethe_type_state(s, N, base);
  const GaugedMonodromyAction A(k, k, u, s.g, s.eta, N);
  const ExpGaussState lhs_a = A.Abar(state), lhs_d = A.Dbar(state);

  const VacuumSpec up = with_alpha(s, s.alpha + 1.0), down = with_alpha(s, s.alpha - 1.0);
  ExpGaussState rhs_a = c.a_wanted * bethe_type_state(up, N, base);
  ExpGaussState rhs_d = c.d_wanted * bethe_type_state(down, N, base);
  ExpGaussState rhs_d_plus = rhs_d;
  for (std::size_t j = 0; j < base.size(); ++j) {
    std::vector<Cx> swapped = base;
    swapped[j] = u;
    rhs_a += c.a_unwanted[j] * bethe_type_state(up, N, swapped);
    const ExpGaussState sd = bethe_type_state(down, N, swapped);
    rhs_d += c.d_unwanted[j] * sd;
    rhs_d_plus += c.d_unwanted_plus[j] * sd;
  }
  OffshellReport r;
  r.a_residual = state_residual(lhs_a, rhs_a);
  r.d_residual = state_residual(lhs_d, rhs_d);
  r.d_residual_plus = state_residual(lhs_d, rhs_d_plus);
  const bool ok_minus = r.d_residual < tol, ok_plus = r.d_residual_plus < tol;
  r.d_form = ok_minus && ok_plus ? DjForm::both
             : ok_minus            ? DjForm::minus
             : ok_plus             ? DjForm::plus
                                   : DjForm::neither;
  return r;
}

}  // namespace rtoda
