#pragma once

// Gauge matrices M_k(u) (two variants), the gauged monodromy
// M_j^{-1}(u) T(u) M_k(u), and the numeric checks of the vector relations and
// the C-C / A-C / D-C exchange relations.

#include <array>
#include <string>

#include "rtoda/lattice.hpp"

namespace rtoda {

/// A: Re(eta) > 0 gauge. B: the alternate gauge for Re(eta) < 0 (|g| > 1).
enum class GaugeVariant { A, B };

inline const char* to_string(GaugeVariant v) { return v == GaugeVariant::A ? "A" : "B"; }

inline constexpr double kGaugeGuard = 1e-12;

/// M_k(u) = (X_k(u), Y_k(u)) with closed-form inverse rows (Ybar_k; Xbar_k).
///
/// Variant A:  [[e^{-u-k eta}/sinh(k eta), e^{-u+k eta}], [1/sinh(k eta), 1]].
/// Variant B is variant A at -u: [[e^{u-k eta}/sinh(k eta), e^{u+k eta}], ...].
struct GaugeMatrix {
  GaugeVariant variant = GaugeVariant::A;
  Cx k, u, eta;
  Mat2 m;
  Mat2 m_inv;

  Eigen::Vector2cd X() const { return m.col(0); }
  Eigen::Vector2cd Y() const { return m.col(1); }
  Eigen::RowVector2cd Ybar() const { return m_inv.row(0); }
  Eigen::RowVector2cd Xbar() const { return m_inv.row(1); }
};

inline GaugeMatrix gauge_matrix(GaugeVariant variant, Cx k, Cx u, Cx eta) {
  const Cx s = std::sinh(k * eta);
  if (!(std::abs(s) > kGaugeGuard))
    throw SingularGaugeError("gauge matrix needs |sinh(k eta)| > 1e-12");
  const Cx w = variant == GaugeVariant::A ? -u : u;  // e^{w} carries the spectral dependence
  GaugeMatrix gm{variant, k, u, eta, Mat2::Zero(), Mat2::Zero()};
  gm.m(0, 0) = std::exp(w - k * eta) / s;
  gm.m(0, 1) = std::exp(w + k * eta);
  gm.m(1, 0) = 1.0 / s;
  gm.m(1, 1) = 1.0;
  // det M = -2 e^{w}
  const Cx pre = std::exp(-w) / 2.0;
  gm.m_inv(0, 0) = -pre;
  gm.m_inv(0, 1) = pre * std::exp(w + k * eta);
  gm.m_inv(1, 0) = pre / s;
  gm.m_inv(1, 1) = -pre * std::exp(w - k * eta) / s;
  return gm;
}

/// Residuals of the eight vector relations, in the order
/// R X X, R Y Y, R X Y, R Y X, X X R, Y Y R, X Y R, Y X R.
struct VectorRelationReport {
  std::array<double, 8> residual{};
  double worst() const {
    double w = 0.0;
    for (double r : residual) w = std::max(w, r);
    return w;
  }
};

namespace detail {

inline Eigen::Vector4cd kron2(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
  return {a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1)};
}

inline Eigen::RowVector4cd kron2(const Eigen::RowVector2cd& a, const Eigen::RowVector2cd& b) {
  Eigen::RowVector4cd out;
  out << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return out;
}

template <class V>
double rel3(const V& lhs, const V& t1, const V& t2) {
  const double scale = std::max({lhs.cwiseAbs().maxCoeff(), t1.cwiseAbs().maxCoeff(),
                                 t2.cwiseAbs().maxCoeff(), 1e-300});
  return (lhs - t1 - t2).cwiseAbs().maxCoeff() / scale;
}

}  // namespace detail

/// Checks the eight pure-number relations between R(u1 - u2) and the gauge
/// vectors. Superscript 1 (2) is the first (second) auxiliary factor, so
/// X^2_m(u2) X^1_{m-1}(u1) is X_{m-1}(u1) (x) X_m(u2).
///
/// Variant B vectors equal variant A vectors at -u, so for variant B the
/// R-matrix argument and every scalar coefficient use the reflected spectral
/// parameters -u1, -u2 while the vectors are built at u1, u2.
inline VectorRelationReport verify_vector_relations(Cx u1, Cx u2, Cx m, Cx eta,
                                                    GaugeVariant variant = GaugeVariant::A) {
  const bool reflect = variant == GaugeVariant::B;
  const Cx d = reflect ? (u2 - u1) : (u1 - u2);
  const Mat4 R = r_matrix(d, eta).mat;
  auto G = [&](Cx k, Cx u) { return gauge_matrix(variant, k, u, eta); };
  auto X = [&](Cx k, Cx u) { return G(k, u).X(); };
  auto Y = [&](Cx k, Cx u) { return G(k, u).Y(); };
  auto Xb = [&](Cx k, Cx u) { return G(k, u).Xbar(); };
  auto Yb = [&](Cx k, Cx u) { return G(k, u).Ybar(); };
  using detail::kron2;
  using detail::rel3;
  const Cx se = std::sinh(eta), sm = std::sinh(m * eta);
  const Cx c_plus = std::sinh(d + eta), c_zero = std::sinh(d);
  const Cx mix_plus = se * std::sinh(m * eta + d) / sm;
  const Cx mix_minus = se * std::sinh(m * eta - d) / sm;
  const Eigen::Vector4cd zv = Eigen::Vector4cd::Zero();
  const Eigen::RowVector4cd zr = Eigen::RowVector4cd::Zero();

  VectorRelationReport rep;
  rep.residual[0] = rel3<Eigen::Vector4cd>(R * kron2(X(m, u1), X(m - 1.0, u2)),
                                           c_plus * kron2(X(m - 1.0, u1), X(m, u2)), zv);
  rep.residual[1] = rel3<Eigen::Vector4cd>(R * kron2(Y(m, u1), Y(m + 1.0, u2)),
                                           c_plus * kron2(Y(m + 1.0, u1), Y(m, u2)), zv);
  rep.residual[2] = rel3<Eigen::Vector4cd>(R * kron2(X(m - 1.0, u1), Y(m, u2)),
                                           c_zero * kron2(X(m, u1), Y(m + 1.0, u2)),
                                           mix_plus * kron2(Y(m, u1), X(m - 1.0, u2)));
  rep.residual[3] = rel3<Eigen::Vector4cd>(R * kron2(Y(m, u1), X(m + 1.0, u2)),
                                           c_zero * kron2(Y(m - 1.0, u1), X(m, u2)),
                                           mix_minus * kron2(X(m + 1.0, u1), Y(m, u2)));
  rep.residual[4] = rel3<Eigen::RowVector4cd>(kron2(Xb(m + 1.0, u1), Xb(m, u2)) * R,
                                              c_plus * kron2(Xb(m, u1), Xb(m + 1.0, u2)), zr);
  rep.residual[5] = rel3<Eigen::RowVector4cd>(kron2(Yb(m - 1.0, u1), Yb(m, u2)) * R,
                                              c_plus * kron2(Yb(m, u1), Yb(m - 1.0, u2)), zr);
  rep.residual[6] = rel3<Eigen::RowVector4cd>(kron2(Xb(m - 1.0, u1), Yb(m, u2)) * R,
                                              c_zero * kron2(Xb(m, u1), Yb(m + 1.0, u2)),
                                              mix_plus * kron2(Yb(m, u1), Xb(m - 1.0, u2)));
  rep.residual[7] = rel3<Eigen::RowVector4cd>(kron2(Yb(m, u1), Xb(m + 1.0, u2)) * R,
                                              c_zero * kron2(Yb(m - 1.0, u1), Xb(m, u2)),
                                              mix_minus * kron2(Xb(m + 1.0, u1), Yb(m, u2)));
  return rep;
}

/// Entries Abar, Bbar, Cbar, Dbar of M_j^{-1}(u) T(u) M_k(u).
struct GaugedAuxOpMatrix {
  Cx j, k, u;
  std::array<SiteOp, 4> e;

  const SiteOp& operator()(int row, int col) const { return e[static_cast<std::size_t>(2 * row + col)]; }
  const SiteOp& Abar() const { return e[0]; }
  const SiteOp& Bbar() const { return e[1]; }
  const SiteOp& Cbar() const { return e[2]; }
  const SiteOp& Dbar() const { return e[3]; }
};

/// Scalar similarity on the auxiliary space: left * T * right.
inline GaugedAuxOpMatrix gauge_sandwich(const AuxOpMatrix& t, const Mat2& left, const Mat2& right,
                                        Cx j, Cx k) {
  GaugedAuxOpMatrix out{j, k, t.u, {}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      SiteOp acc = zero_op(t.A().n_sites, t.A().local_dim);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) acc.mat += (left(r, a) * right(b, c)) * t(a, b).mat;
      out.e[static_cast<std::size_t>(2 * r + c)] = std::move(acc);
    }
  return out;
}

inline GaugedAuxOpMatrix gauge_transform(const AuxOpMatrix& t, Cx j, Cx k, Cx eta,
                                         GaugeVariant variant = GaugeVariant::A) {
  return gauge_sandwich(t, gauge_matrix(variant, j, t.u, eta).m_inv,
                        gauge_matrix(variant, k, t.u, eta).m, j, k);
}

/// T_bar_{j,k}(u) in the cyclic representation; eta is the representation's.
inline GaugedAuxOpMatrix gauged_monodromy(Cx j, Cx k, Cx u, const CyclicWeylRep& rep, Cx g, int N,
                                          GaugeVariant variant = GaugeVariant::A) {
  return gauge_transform(monodromy(u, rep, g, N), j, k, rep.eta, variant);
}

/// Which form of the D-C relation held: as written, or with u1 and u2
/// exchanged in the second coefficient.
enum class DcForm { direct, exchanged, neither };

inline const char* to_string(DcForm f) {
  switch (f) {
    case DcForm::direct: return "direct";
    case DcForm::exchanged: return "exchanged";
    case DcForm::neither: return "neither";
  }
  return "?";
}

struct CommutationReport {
  double cc = 0.0;
  double ac = 0.0;
  double dc = 0.0;
  /// Residual of the D-C relation with u1 and u2 exchanged in the second
  /// coefficient; only evaluated when the direct form fails.
  double dc_exchanged = -1.0;
  DcForm dc_form = DcForm::direct;

  double worst() const { return std::max({cc, ac, dc}); }
};

inline constexpr double kPoleGuard = 1e-8;

/// Exchange relations of the gauged monodromy entries at shifted gauge
/// indices, each as a relative max-norm residual on the L^N space:
///
///   C_{m',m}(u1) C_{m'+1,m-1}(u2) = C_{m',m}(u2) C_{m'+1,m-1}(u1)
///   A_{m',m}(u1) C_{m'+1,m-1}(u2) = s(u1-u2+eta)/s(u1-u2) C_{m'+2,m}(u2) A_{m'+1,m-1}(u1)
///       - s(eta) s((m'+1)eta-u1+u2) / (s(u1-u2) s((m'+1)eta)) C_{m'+2,m}(u1) A_{m'+1,m-1}(u2)
///   D_{m',m}(u1) C_{m'+1,m-1}(u2) = s(u1-u2-eta)/s(u1-u2) C_{m',m-2}(u2) D_{m'+1,m-1}(u1)
///       + s(eta) s((m-1)eta-u1+u2) / (s(u1-u2) s((m-1)eta)) C_{m',m-2}(u1) D_{m'+1,m-1}(u2)
inline CommutationReport verify_gauged_commutations(Cx mp, Cx m, Cx u1, Cx u2,
                                                    const CyclicWeylRep& rep, Cx g, int N,
                                                    double tol = 1e-10) {
  const Cx s12 = std::sinh(u1 - u2);
  if (!(std::abs(s12) > kPoleGuard)) throw DomainError("|sinh(u1 - u2)| below the pole guard");
  const Cx eta = rep.eta;
  const AuxOpMatrix t1 = monodromy(u1, rep, g, N), t2 = monodromy(u2, rep, g, N);
  auto bar = [&](const AuxOpMatrix& t, Cx j, Cx k, int row, int col) {
    return gauge_transform(t, j, k, eta)(row, col);
  };
  auto A = [&](const AuxOpMatrix& t, Cx j, Cx k) { return bar(t, j, k, 0, 0); };
  auto C = [&](const AuxOpMatrix& t, Cx j, Cx k) { return bar(t, j, k, 1, 0); };
  auto D = [&](const AuxOpMatrix& t, Cx j, Cx k) { return bar(t, j, k, 1, 1); };
  auto rel = [](const SiteOp& lhs, const SiteOp& a, const SiteOp& b) {
    const double scale = std::max({max_norm(lhs), max_norm(a), max_norm(b), 1e-300});
    return max_norm(lhs - a - b) / scale;
  };
  const SiteOp zero = zero_op(N, rep.L);
  const Cx one(1.0);

  CommutationReport out;
  out.cc = rel(C(t1, mp, m) * C(t2, mp + one, m - one), C(t2, mp, m) * C(t1, mp + one, m - one), zero);

  {
    const Cx c1 = std::sinh(u1 - u2 + eta) / s12;
    const Cx c2 = std::sinh(eta) * std::sinh((mp + one) * eta - u1 + u2) / (s12 * std::sinh((mp + one) * eta));
    out.ac = rel(A(t1, mp, m) * C(t2, mp + one, m - one),
                 c1 * (C(t2, mp + 2.0, m) * A(t1, mp + one, m - one)),
                 (-c2) * (C(t1, mp + 2.0, m) * A(t2, mp + one, m - one)));
  }

  const SiteOp dc_lhs = D(t1, mp, m) * C(t2, mp + one, m - one);
  const SiteOp dc_first = (std::sinh(u1 - u2 - eta) / s12) * (C(t2, mp, m - 2.0) * D(t1, mp + one, m - one));
  const SiteOp dc_tail = C(t1, mp, m - 2.0) * D(t2, mp + one, m - one);
  const Cx denom = s12 * std::sinh((m - one) * eta);
  const Cx c4 = std::sinh(eta) * std::sinh((m - one) * eta - u1 + u2) / denom;
  out.dc = rel(dc_lhs, dc_first, c4 * dc_tail);
  if (!(out.dc < tol)) {
    const Cx c4x = std::sinh(eta) * std::sinh((m - one) * eta + u1 - u2) / denom;
    out.dc_exchanged = rel(dc_lhs, dc_first, c4x * dc_tail);
    out.dc_form = out.dc_exchanged < tol ? DcForm::exchanged : DcForm::neither;
  }
  return out;
}

}  // namespace rtoda
