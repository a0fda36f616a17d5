#pragma once

// Cyclic clock/shift realization of the per-site Weyl pair and dense operator
// arithmetic on the N-site tensor space.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "rtoda/error.hpp"

namespace rtoda {

using Cx = std::complex<double>;
using CMat = Eigen::MatrixXcd;

inline constexpr Cx kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

/// Largest entry modulus. Zero for an empty matrix.
inline double max_norm(const CMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline bool all_finite(const CMat& m) { return m.allFinite(); }

/// ||diff||_max / max(1, scale): absolute for O(1) operators, relative once the
/// operands grow.
inline double mixed_residual(double diff_norm, double scale) {
  return diff_norm / std::max(1.0, scale);
}

/// Clock/shift pair with U V = omega V U and omega = exp(2 pi i r / L).
///
/// U is the cyclic index-decrement shift (U e_j = e_{j-1}) and V the clock
/// diag(omega^0, ..., omega^{L-1}). With eta = -2 pi i r / L this reproduces
/// exp(-i eta p) exp(x) = exp(-eta) exp(x) exp(-i eta p), so U stands for
/// exp(-i eta p_n) and V for exp(x_n).
struct CyclicWeylRep {
  int L = 0;
  int r = 0;
  Cx omega;
  Cx eta;
  CMat U, V, U_inv, V_inv;
};

inline CyclicWeylRep build_cyclic_rep(int L, int r) {
  if (L < 2) throw DomainError("cyclic rep needs L >= 2, got " + std::to_string(L));
  if (((r % L) + L) % L == 0)
    throw DomainError("cyclic rep needs r != 0 mod L (omega = 1 is degenerate)");

  CyclicWeylRep rep;
  rep.L = L;
  rep.r = r;
  const double angle = 2.0 * kPi * static_cast<double>(r) / static_cast<double>(L);
  rep.omega = std::polar(1.0, angle);
  rep.eta = Cx(0.0, -angle);

  rep.U = CMat::Zero(L, L);
  rep.V = CMat::Zero(L, L);
  rep.V_inv = CMat::Zero(L, L);
  for (int j = 0; j < L; ++j) {
    rep.U(j, (j + 1) % L) = 1.0;
    // Exact powers of omega: integer multiples of the angle, reduced mod L.
    const long long p = (static_cast<long long>(r) * j) % L;
    rep.V(j, j) = std::polar(1.0, 2.0 * kPi * static_cast<double>(p) / L);
    rep.V_inv(j, j) = std::conj(rep.V(j, j));
  }
  rep.U_inv = rep.U.transpose();
  return rep;
}

/// Operator on the L^N dimensional space (site 1 is the leftmost tensor factor).
struct SiteOp {
  int n_sites = 0;
  int local_dim = 0;
  CMat mat;

  Eigen::Index dim() const { return mat.rows(); }
};

namespace detail {

inline Eigen::Index ipow(int base, int exp) {
  Eigen::Index out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

inline void require_conform(const SiteOp& a, const SiteOp& b, const char* op) {
  if (a.n_sites != b.n_sites || a.local_dim != b.local_dim || a.mat.rows() != b.mat.rows() ||
      a.mat.cols() != b.mat.cols())
    throw DimensionError(std::string("non-conforming operands in ") + op);
}

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace detail

/// Largest tensor space the dense representation accepts.
inline constexpr Eigen::Index kMaxDim = 4096;

inline SiteOp identity_op(int N, int L) {
  if (N < 1 || L < 1) throw DimensionError("identity_op needs N >= 1 and L >= 1");
  const auto d = detail::ipow(L, N);
  if (d > kMaxDim) throw DimensionError("L^N exceeds the dense limit");
  return {N, L, CMat::Identity(d, d)};
}

inline SiteOp zero_op(int N, int L) {
  SiteOp z = identity_op(N, L);
  z.mat.setZero();
  return z;
}

/// Acts as `local` on `site` (1-based) and as the identity elsewhere.
inline SiteOp embed(const CMat& local, int site, int N) {
  if (local.rows() != local.cols() || local.rows() < 1)
    throw DimensionError("embed needs a square local matrix");
  if (site < 1 || site > N)
    throw DimensionError("site " + std::to_string(site) + " outside 1.." + std::to_string(N));
  const int L = static_cast<int>(local.rows());
  if (detail::ipow(L, N) > kMaxDim) throw DimensionError("L^N exceeds the dense limit");
  const auto left = detail::ipow(L, site - 1);
  const auto right = detail::ipow(L, N - site);
  CMat out = detail::kron(CMat::Identity(left, left), local);
  out = detail::kron(out, CMat::Identity(right, right));
  return {N, L, std::move(out)};
}

inline SiteOp operator+(const SiteOp& a, const SiteOp& b) {
  detail::require_conform(a, b, "add");
  return {a.n_sites, a.local_dim, a.mat + b.mat};
}

inline SiteOp operator-(const SiteOp& a, const SiteOp& b) {
  detail::require_conform(a, b, "subtract");
  return {a.n_sites, a.local_dim, a.mat - b.mat};
}

inline SiteOp operator*(const SiteOp& a, const SiteOp& b) {
  detail::require_conform(a, b, "multiply");
  return {a.n_sites, a.local_dim, a.mat * b.mat};
}

inline SiteOp operator*(Cx s, const SiteOp& a) { return {a.n_sites, a.local_dim, s * a.mat}; }

inline SiteOp commutator(const SiteOp& a, const SiteOp& b) { return a * b - b * a; }

inline Cx trace(const SiteOp& a) { return a.mat.trace(); }

inline double max_norm(const SiteOp& a) { return max_norm(a.mat); }

/// Inverse validated by ||A A^{-1} - I||_max; throws SingularMatrixError above
/// `tol`.
inline SiteOp inverse(const SiteOp& a, double tol = 1e-9) {
  if (a.mat.rows() != a.mat.cols()) throw DimensionError("inverse of a non-square operator");
  Eigen::PartialPivLU<CMat> lu(a.mat);
  CMat inv = lu.inverse();
  const auto n = a.mat.rows();
  double residual = all_finite(inv) ? max_norm(CMat(a.mat * inv - CMat::Identity(n, n)))
                                    : std::numeric_limits<double>::infinity();
  if (!(residual <= tol))
    throw SingularMatrixError("operator inversion residual above threshold", residual);
  return {a.n_sites, a.local_dim, std::move(inv)};
}

}  // namespace rtoda
