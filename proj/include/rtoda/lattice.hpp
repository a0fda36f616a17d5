#pragma once

// R-matrix, Lax operators, monodromy, transfer matrix and Hamiltonian of the
// relativistic Toda chain, realized over the cyclic representation.

#include <array>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "rtoda/algebra.hpp"

namespace rtoda {

using Mat4 = Eigen::Matrix4cd;
using Mat2 = Eigen::Matrix2cd;

struct RMat {
  Cx u;
  Cx eta;
  Mat4 mat;
};

/// Six-vertex R(u): sinh(u+eta) on the corners, [[sinh u, sinh eta],
/// [sinh eta, sinh u]] in the middle block. Basis order |11>, |12>, |21>, |22>.
inline RMat r_matrix(Cx u, Cx eta) {
  Mat4 m = Mat4::Zero();
  const Cx a = std::sinh(u + eta), b = std::sinh(u), c = std::sinh(eta);
  m(0, 0) = a;
  m(3, 3) = a;
  m(1, 1) = b;
  m(2, 2) = b;
  m(1, 2) = c;
  m(2, 1) = c;
  return {u, eta, m};
}

/// Permutation P of C^2 (x) C^2.
inline Mat4 permutation4() {
  Mat4 p = Mat4::Zero();
  p(0, 0) = 1.0;
  p(1, 2) = 1.0;
  p(2, 1) = 1.0;
  p(3, 3) = 1.0;
  return p;
}

/// P M P: the same matrix with the two auxiliary factors exchanged.
inline Mat4 swap_factors(const Mat4& m) {
  const Mat4 p = permutation4();
  return p * m * p;
}

/// 2x2 auxiliary-space matrix with operator entries, row-major (A, B, C, D).
struct AuxOpMatrix {
  std::array<SiteOp, 4> e;
  Cx u;
  /// Highest power of exp(u) an entry can carry.
  int laurent_degree = 0;

  const SiteOp& operator()(int row, int col) const { return e[static_cast<std::size_t>(2 * row + col)]; }
  SiteOp& operator()(int row, int col) { return e[static_cast<std::size_t>(2 * row + col)]; }
  const SiteOp& A() const { return e[0]; }
  const SiteOp& B() const { return e[1]; }
  const SiteOp& C() const { return e[2]; }
  const SiteOp& D() const { return e[3]; }
};

/// Auxiliary-space product; operator entries multiply in order.
inline AuxOpMatrix operator*(const AuxOpMatrix& x, const AuxOpMatrix& y) {
  AuxOpMatrix out;
  out.u = x.u;
  out.laurent_degree = x.laurent_degree + y.laurent_degree;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j);
  return out;
}

/// L_n(u) = [[e^u U_n - e^{-u} U_n^{-1}, -g V_n], [g V_n^{-1}, 0]].
inline AuxOpMatrix lax(int site, Cx u, const CyclicWeylRep& rep, Cx g, int N) {
  AuxOpMatrix l;
  l.u = u;
  l.laurent_degree = 1;
  const SiteOp Un = embed(rep.U, site, N);
  const SiteOp Un_inv = embed(rep.U_inv, site, N);
  l(0, 0) = std::exp(u) * Un - std::exp(-u) * Un_inv;
  l(0, 1) = (-g) * embed(rep.V, site, N);
  l(1, 0) = g * embed(rep.V_inv, site, N);
  l(1, 1) = zero_op(N, rep.L);
  return l;
}

/// T(u) = L_N(u) ... L_1(u).
inline AuxOpMatrix monodromy(Cx u, const CyclicWeylRep& rep, Cx g, int N) {
  if (N < 1) throw DomainError("monodromy needs N >= 1");
  AuxOpMatrix t = lax(1, u, rep, g, N);
  for (int n = 2; n <= N; ++n) t = lax(n, u, rep, g, N) * t;
  return t;
}

namespace detail {

// R T1(u) T2(v) - T2(v) T1(u) R as a mixed residual, on the layout
// aux1 (x) aux2 (x) quantum. Block (a1 a2, b1 b2) of T1 T2 is T_{a1 b1}(u) T_{a2 b2}(v)
// and of T2 T1 is T_{a2 b2}(v) T_{a1 b1}(u); R mixes blocks by scalars.
// Entries are sums of clock and shift products, so the products run sparse.
inline double ybe_residual(const Mat4& r, const AuxOpMatrix& tu, const AuxOpMatrix& tv) {
  using Sparse = Eigen::SparseMatrix<Cx>;
  std::array<Sparse, 4> su, sv;
  for (std::size_t k = 0; k < 4; ++k) {
    su[k] = tu.e[k].mat.sparseView();
    sv[k] = tv.e[k].mat.sparseView();
  }
  std::array<Sparse, 16> uv, vu;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const Sparse& x = su[static_cast<std::size_t>(2 * (a / 2) + b / 2)];
      const Sparse& y = sv[static_cast<std::size_t>(2 * (a % 2) + b % 2)];
      uv[static_cast<std::size_t>(4 * a + b)] = x * y;
      vu[static_cast<std::size_t>(4 * a + b)] = y * x;
    }
  auto max_abs = [](const Sparse& m) {
    double v = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
      for (Sparse::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
    return v;
  };
  const auto d = tu.A().dim();
  double diff = 0.0, scale = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Sparse lhs(d, d), rhs(d, d);
      for (int c = 0; c < 4; ++c) {
        if (r(a, c) != Cx(0.0)) lhs += r(a, c) * uv[static_cast<std::size_t>(4 * c + b)];
        if (r(c, b) != Cx(0.0)) rhs += r(c, b) * vu[static_cast<std::size_t>(4 * a + c)];
      }
      diff = std::max(diff, max_abs(lhs - rhs));
      scale = std::max({scale, max_abs(lhs), max_abs(rhs)});
    }
  return mixed_residual(diff, scale);
}

}  // namespace detail

/// Local Yang-Baxter relation for L_site on 4 L^N dimensions (4L for N = 1).
inline double verify_ybe_lax(Cx u, Cx v, const CyclicWeylRep& rep, Cx g, int site, int N) {
  return detail::ybe_residual(r_matrix(u - v, rep.eta).mat, lax(site, u, rep, g, N),
                              lax(site, v, rep, g, N));
}

inline double verify_ybe_monodromy(Cx u, Cx v, const CyclicWeylRep& rep, Cx g, int N) {
  return detail::ybe_residual(r_matrix(u - v, rep.eta).mat, monodromy(u, rep, g, N),
                              monodromy(v, rep, g, N));
}

inline SiteOp transfer(Cx u, const CyclicWeylRep& rep, Cx g, int N) {
  const AuxOpMatrix t = monodromy(u, rep, g, N);
  return t.A() + t.D();
}

/// ||[t(u), t(v)]||_max, mixed relative to ||t(u) t(v)||_max.
inline double transfer_commutator(Cx u, Cx v, const CyclicWeylRep& rep, Cx g, int N) {
  const SiteOp tu = transfer(u, rep, g, N), tv = transfer(v, rep, g, N);
  const SiteOp uv = tu * tv;
  return mixed_residual(max_norm(uv - tv * tu), max_norm(uv));
}

/// Laurent modes t_k of t(u) = sum_k t_k e^{k u}, k in {N, N-2, ..., -N}.
struct TransferCoeffs {
  int N = 0;
  std::map<int, SiteOp> modes;
  /// Largest out-of-band mode from the oversampled inversion, relative to the
  /// largest in-band mode.
  double out_of_band = 0.0;

  const SiteOp& at(int k) const {
    auto it = modes.find(k);
    if (it == modes.end()) throw DomainError("no transfer mode " + std::to_string(k));
    return it->second;
  }

  SiteOp evaluate(Cx u) const {
    SiteOp sum = zero_op(modes.begin()->second.n_sites, modes.begin()->second.local_dim);
    for (const auto& [k, op] : modes) sum = sum + std::exp(static_cast<double>(k) * u) * op;
    return sum;
  }
};

/// Mode extraction by sampling e^{Nu} t(u), a degree-N polynomial in
/// z = e^{2u}, at P roots of unity and inverting the DFT. P > N + 1 gives the
/// out-of-band witness for free.
inline TransferCoeffs transfer_coeffs(const CyclicWeylRep& rep, Cx g, int N, int samples = 0) {
  const int P = samples > 0 ? samples : 2 * (N + 1) + 1;
  if (P < N + 1) throw DomainError("transfer_coeffs needs at least N + 1 samples");
  std::vector<CMat> F;
  F.reserve(static_cast<std::size_t>(P));
  for (int k = 0; k < P; ++k) {
    const double theta = 2.0 * kPi * k / P;
    const Cx u(0.0, theta / 2.0);
    F.push_back(std::exp(static_cast<double>(N) * u) * transfer(u, rep, g, N).mat);
  }
  TransferCoeffs out;
  out.N = N;
  double in_band = 0.0, out_band = 0.0;
  for (int m = 0; m < P; ++m) {
    CMat c = CMat::Zero(F[0].rows(), F[0].cols());
    for (int k = 0; k < P; ++k)
      c += std::polar(1.0, -2.0 * kPi * ((static_cast<long long>(k) * m) % P) / P) *
           F[static_cast<std::size_t>(k)];
    c /= static_cast<double>(P);
    if (m <= N) {
      in_band = std::max(in_band, max_norm(c));
      out.modes.emplace(2 * m - N, SiteOp{N, rep.L, std::move(c)});
    } else {
      out_band = std::max(out_band, max_norm(c));
    }
  }
  out.out_of_band = in_band > 0.0 ? out_band / in_band : out_band;
  return out;
}

/// Product of U_n over all sites, the e^{Nu} coefficient of t(u).
inline SiteOp total_shift(const CyclicWeylRep& rep, int N) {
  SiteOp p = identity_op(N, rep.L);
  for (int n = 1; n <= N; ++n) p = p * embed(rep.U, n, N);
  return p;
}

/// H = -1/2 (t_{N-2} t_N^{-1} + t_{2-N} t_{-N}^{-1}).
inline SiteOp hamiltonian_from_transfer(const TransferCoeffs& c) {
  const int N = c.N;
  const SiteOp tn_inv = inverse(c.at(N));
  const SiteOp tmn_inv = inverse(c.at(-N));
  return Cx(-0.5) * (c.at(N - 2) * tn_inv + c.at(2 - N) * tmn_inv);
}

/// Placement of the cos(eta p_n + eta p_{n+1}) factor relative to
/// exp(x_{n+1} - x_n) in the hopping term.
enum class Ordering { cos_left, cos_right, symmetrized };

inline const char* to_string(Ordering o) {
  switch (o) {
    case Ordering::cos_left: return "cos_left";
    case Ordering::cos_right: return "cos_right";
    case Ordering::symmetrized: return "symmetrized";
  }
  return "?";
}

/// sum_n cos(2 eta p_n) + g^2 sum_n cos(eta p_n + eta p_{n+1}) e^{x_{n+1} - x_n}
/// with periodic indexing, cos(eta p) = (U + U^{-1}) / 2.
inline SiteOp hamiltonian_direct(const CyclicWeylRep& rep, Cx g, int N, Ordering ordering) {
  SiteOp h = zero_op(N, rep.L);
  for (int n = 1; n <= N; ++n) {
    const int next = n % N + 1;
    const SiteOp Un = embed(rep.U, n, N), Un_inv = embed(rep.U_inv, n, N);
    const SiteOp Um = embed(rep.U, next, N), Um_inv = embed(rep.U_inv, next, N);
    h = h + Cx(0.5) * (Un * Un + Un_inv * Un_inv);
    const SiteOp cosine = Cx(0.5) * (Un * Um + Un_inv * Um_inv);
    const SiteOp hop = embed(rep.V, next, N) * embed(rep.V_inv, n, N);
    SiteOp term;
    switch (ordering) {
      case Ordering::cos_left: term = cosine * hop; break;
      case Ordering::cos_right: term = hop * cosine; break;
      case Ordering::symmetrized: term = Cx(0.5) * (cosine * hop + hop * cosine); break;
    }
    h = h + (g * g) * term;
  }
  return h;
}

}  // namespace rtoda
