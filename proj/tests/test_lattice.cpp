#include <random>

#include <gtest/gtest.h>

#include "rtoda/lattice.hpp"

using namespace rtoda;

namespace {

struct Draw {
  std::mt19937_64 rng;
  explicit Draw(std::uint64_t seed) : rng(seed) {}
  double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  Cx spectral() { return {uni(-0.5, 0.5), uni(-kPi, kPi)}; }
  Cx coupling() { return std::polar(uni(0.3, 0.9), uni(-kPi, kPi)); }
};

}  // namespace

TEST(RMatrix, ZeroIsPermutation) {
  const Cx eta(0.3, 0.7);
  const Mat4 r = r_matrix(0.0, eta).mat;
  EXPECT_LT((r - std::sinh(eta) * permutation4()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(RMatrix, Unitarity) {
  Draw d(1);
  for (int i = 0; i < 10; ++i) {
    const Cx u = d.spectral(), eta(d.uni(-1, 1), d.uni(-1, 1));
    const Mat4 lhs = r_matrix(u, eta).mat * swap_factors(r_matrix(-u, eta).mat);
    const Mat4 rhs = std::sinh(eta + u) * std::sinh(eta - u) * Mat4::Identity();
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(RMatrix, RankOneMiddleBlockAtEta) {
  const Cx eta(0.4, -0.2);
  const Mat4 r = r_matrix(eta, eta).mat;
  EXPECT_LT(std::abs(r(1, 1) * r(2, 2) - r(1, 2) * r(2, 1)), 1e-15);
  EXPECT_LT(std::abs(r(1, 1) - std::sinh(eta)), 1e-15);
}

TEST(Lax, EntriesAndDecoupledLimit) {
  const CyclicWeylRep rep = build_cyclic_rep(3, 1);
  const Cx u(0.2, 0.4), g(0.5, 0.1);
  const AuxOpMatrix l = lax(2, u, rep, g, 3);
  EXPECT_EQ(max_norm(l.D()), 0.0);
  EXPECT_LT(max_norm(l.A() - (std::exp(u) * embed(rep.U, 2, 3) - std::exp(-u) * embed(rep.U_inv, 2, 3))), 1e-15);
  EXPECT_LT(max_norm(l.B() + g * embed(rep.V, 2, 3)), 1e-15);
  const AuxOpMatrix free = lax(1, u, rep, 0.0, 2);
  EXPECT_EQ(max_norm(free.B()), 0.0);
  EXPECT_EQ(max_norm(free.C()), 0.0);
}

TEST(Ybe, LaxAcrossRepresentations) {
  Draw d(2);
  for (auto [L, r] : std::initializer_list<std::pair<int, int>>{{3, 1}, {4, 1}, {4, 3}, {6, 1}, {6, 5}})
    for (int N = 1; N <= 3; ++N)
      for (int i = 0; i < 4; ++i) {
        const CyclicWeylRep rep = build_cyclic_rep(L, r);
        const int site = 1 + i % N;
        EXPECT_LT(verify_ybe_lax(d.spectral(), d.spectral(), rep, d.coupling(), site, N), 1e-10);
      }
}

TEST(Ybe, BlockFormMatchesDenseEmbedding) {
  const CyclicWeylRep rep = build_cyclic_rep(3, 1);
  const Cx u(0.2, 0.5), v(-0.1, 1.3), g(0.5, 0.2);
  const AuxOpMatrix lu = lax(1, u, rep, g, 1), lv = lax(1, v, rep, g, 1);
  const Eigen::Index d = 3;
  CMat t1 = CMat::Zero(4 * d, 4 * d), t2 = CMat::Zero(4 * d, 4 * d);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        t1.block((2 * a + c) * d, (2 * b + c) * d, d, d) = lu(a, b).mat;
        t2.block((2 * c + a) * d, (2 * c + b) * d, d, d) = lv(a, b).mat;
      }
  const CMat R = detail::kron(CMat(r_matrix(u - v, rep.eta).mat), CMat::Identity(d, d));
  const CMat diff = R * t1 * t2 - t2 * t1 * R;
  EXPECT_LT(max_norm(diff), 1e-14);
  // A wrong R (swapped spectral arguments) must show up in both forms.
  const CMat Rw = detail::kron(CMat(r_matrix(v - u, rep.eta).mat), CMat::Identity(d, d));
  const double dense = max_norm(CMat(Rw * t1 * t2 - t2 * t1 * Rw));
  const double block = detail::ybe_residual(r_matrix(v - u, rep.eta).mat, lu, lv);
  EXPECT_GT(dense, 1e-3);
  EXPECT_GT(block, 1e-3);
}

TEST(Ybe, CoincidentPointsAndShiftInvariance) {
  const CyclicWeylRep rep = build_cyclic_rep(4, 1);
  const Cx u(0.1, 0.3), v(-0.2, 1.1), g(0.4, 0.3), c(0.25, -0.6);
  EXPECT_LT(verify_ybe_lax(u, u, rep, g, 1, 1), 1e-15);
  const double base = verify_ybe_lax(u, v, rep, g, 1, 1);
  const double shifted = verify_ybe_lax(u + c, v + c, rep, g, 1, 1);
  EXPECT_LT(base, 1e-13);
  EXPECT_LT(shifted, 1e-13);
}

TEST(Monodromy, SingleSiteAndDecoupled) {
  const CyclicWeylRep rep = build_cyclic_rep(4, 1);
  const Cx u(0.3, -0.2), g(0.6, 0.0);
  const AuxOpMatrix t = monodromy(u, rep, g, 1), l = lax(1, u, rep, g, 1);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(max_norm(t.e[k] - l.e[k]), 0.0);
  const AuxOpMatrix t0 = monodromy(u, rep, 0.0, 2);
  EXPECT_EQ(max_norm(t0.B()), 0.0);
  EXPECT_EQ(max_norm(t0.C()), 0.0);
  EXPECT_THROW(monodromy(u, rep, g, 0), DomainError);
}

TEST(Monodromy, YbeAndCommutingFamily) {
  Draw d(3);
  const CyclicWeylRep rep = build_cyclic_rep(4, 1);
  for (int i = 0; i < 5; ++i) {
    const Cx u = d.spectral(), v = d.spectral(), g = d.coupling();
    EXPECT_LT(verify_ybe_monodromy(u, v, rep, g, 3), 1e-10);
    EXPECT_LT(transfer_commutator(u, v, rep, g, 3), 1e-10);
  }
}

TEST(Transfer, ModesAndAsymptotics) {
  Draw d(4);
  const CyclicWeylRep rep = build_cyclic_rep(4, 1);
  for (int N = 1; N <= 3; ++N) {
    const Cx g = d.coupling();
    const TransferCoeffs c = transfer_coeffs(rep, g, N, 4 * (N + 1));
    EXPECT_EQ(static_cast<int>(c.modes.size()), N + 1);
    EXPECT_LT(c.out_of_band, 1e-11);
    const SiteOp shift = total_shift(rep, N);
    EXPECT_LT(max_norm(c.at(N) - shift), 1e-12);
    const SiteOp back = (N % 2 ? Cx(-1.0) : Cx(1.0)) * inverse(shift);
    EXPECT_LT(max_norm(c.at(-N) - back), 1e-12);
    const Cx u = d.spectral();
    const SiteOp t = transfer(u, rep, g, N);
    EXPECT_LT(max_norm(c.evaluate(u) - t) / std::max(1.0, max_norm(t)), 1e-10);
  }
}

TEST(Hamiltonian, CommutesWithTransferAndShift) {
  Draw d(5);
  const CyclicWeylRep rep = build_cyclic_rep(4, 1);
  for (int N = 2; N <= 3; ++N) {
    const Cx g = d.coupling();
    const SiteOp h = hamiltonian_from_transfer(transfer_coeffs(rep, g, N));
    const SiteOp t = transfer(d.spectral(), rep, g, N);
    EXPECT_LT(mixed_residual(max_norm(commutator(h, t)), max_norm(h * t)), 1e-10);
    EXPECT_LT(max_norm(commutator(h, total_shift(rep, N))), 1e-12);
  }
}

TEST(Hamiltonian, AllOrderingsMatchTransferForm) {
  Draw d(6);
  const CyclicWeylRep rep = build_cyclic_rep(4, 1);
  for (int N = 2; N <= 3; ++N) {
    const Cx g = d.coupling();
    const SiteOp h = hamiltonian_from_transfer(transfer_coeffs(rep, g, N));
    for (Ordering o : {Ordering::cos_left, Ordering::cos_right, Ordering::symmetrized})
      EXPECT_LT(mixed_residual(max_norm(hamiltonian_direct(rep, g, N, o) - h), max_norm(h)), 1e-9) << to_string(o);
  }
}

TEST(Hamiltonian, FreeLimitAndSingleSiteWrap) {
  const CyclicWeylRep rep = build_cyclic_rep(4, 1);
  const SiteOp u2 = embed(CMat(rep.U * rep.U), 1, 1), um2 = embed(CMat(rep.U_inv * rep.U_inv), 1, 1);
  const SiteOp free = hamiltonian_direct(rep, 0.0, 1, Ordering::symmetrized);
  EXPECT_LT(max_norm(free - Cx(0.5) * (u2 + um2)), 1e-15);
  // N = 1: V_1 V_1^{-1} = I, so the hopping term is another cos(2 eta p).
  const Cx g(0.7, 0.2);
  const SiteOp h1 = hamiltonian_direct(rep, g, 1, Ordering::cos_left);
  EXPECT_LT(max_norm(h1 - (Cx(0.5) * (1.0 + g * g)) * (u2 + um2)), 1e-14);
}
