#include <random>

#include <gtest/gtest.h>

#include "rtoda/algebra.hpp"

using namespace rtoda;

namespace {

CMat random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> d;
  CMat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Cx(d(rng), d(rng));
  return m;
}

}  // namespace

TEST(CyclicRep, SmallestPair) {
  const CyclicWeylRep rep = build_cyclic_rep(2, 1);
  CMat flip(2, 2);
  flip << 0.0, 1.0, 1.0, 0.0;
  EXPECT_EQ(max_norm(CMat(rep.U - flip)), 0.0);
  EXPECT_NEAR(std::abs(rep.V(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(rep.V(1, 1) + 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(rep.omega + 1.0), 0.0, 1e-15);
}

TEST(CyclicRep, DefiningRelationAndInverses) {
  for (int L = 2; L <= 8; ++L)
    for (int r = 1; r < L; ++r) {
      const CyclicWeylRep rep = build_cyclic_rep(L, r);
      EXPECT_LT(max_norm(CMat(rep.U * rep.V - rep.omega * rep.V * rep.U)), 1e-14) << L << "," << r;
      EXPECT_LT(max_norm(CMat(rep.U * rep.U_inv - CMat::Identity(L, L))), 1e-14);
      EXPECT_LT(max_norm(CMat(rep.V * rep.V_inv - CMat::Identity(L, L))), 1e-14);
      // omega = exp(-eta)
      EXPECT_LT(std::abs(std::exp(-rep.eta) - rep.omega), 1e-14);
    }
}

TEST(CyclicRep, Cyclicity) {
  const CyclicWeylRep rep = build_cyclic_rep(4, 1);
  CMat u = CMat::Identity(4, 4), v = CMat::Identity(4, 4);
  for (int i = 0; i < 4; ++i) {
    u = u * rep.U;
    v = v * rep.V;
  }
  EXPECT_EQ(max_norm(CMat(u - CMat::Identity(4, 4))), 0.0);
  EXPECT_LT(max_norm(CMat(v - CMat::Identity(4, 4))), 1e-15);
}

TEST(CyclicRep, RejectsDegenerateInputs) {
  EXPECT_THROW(build_cyclic_rep(1, 1), DomainError);
  EXPECT_THROW(build_cyclic_rep(4, 0), DomainError);
  EXPECT_THROW(build_cyclic_rep(4, 8), DomainError);
  EXPECT_THROW(build_cyclic_rep(4, -4), DomainError);
  EXPECT_NO_THROW(build_cyclic_rep(4, -1));
}

TEST(Embed, IdentityAndDisjointSites) {
  const CyclicWeylRep rep = build_cyclic_rep(3, 1);
  const SiteOp id = embed(CMat::Identity(3, 3), 2, 3);
  EXPECT_EQ(max_norm(id - identity_op(3, 3)), 0.0);
  const SiteOp u1 = embed(rep.U, 1, 2), v2 = embed(rep.V, 2, 2);
  EXPECT_EQ(max_norm(commutator(u1, v2)), 0.0);
  const SiteOp uv = embed(rep.U, 1, 2) * embed(rep.V, 1, 2);
  EXPECT_LT(max_norm(uv - embed(CMat(rep.U * rep.V), 1, 2)), 1e-15);
}

TEST(Embed, SiteOneIsLeftmostFactor) {
  CMat e = CMat::Zero(2, 2);
  e(0, 1) = 1.0;
  const SiteOp a = embed(e, 1, 2);
  // e (x) I maps basis |1,j> to |0,j>: entry (0*2+j, 1*2+j).
  EXPECT_EQ(a.mat(0, 2), Cx(1.0));
  EXPECT_EQ(a.mat(1, 3), Cx(1.0));
  EXPECT_EQ(a.mat(0, 1), Cx(0.0));
}

TEST(Embed, RandomDisjointPairsCommute) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const SiteOp a = embed(random_matrix(rng, 3), 1, 3);
    const SiteOp b = embed(random_matrix(rng, 3), 3, 3);
    EXPECT_LT(max_norm(commutator(a, b)), 1e-13);
  }
}

TEST(Embed, RejectsBadInput) {
  EXPECT_THROW(embed(CMat::Identity(2, 2), 0, 2), DimensionError);
  EXPECT_THROW(embed(CMat::Identity(2, 2), 3, 2), DimensionError);
  EXPECT_THROW(embed(CMat::Identity(2, 3), 1, 2), DimensionError);
  EXPECT_THROW(embed(CMat::Identity(9, 9), 1, 4), DimensionError);  // 9^4 > 4096
}

TEST(OpArith, TraceInverseDistributivity) {
  EXPECT_EQ(trace(identity_op(3, 4)), Cx(64.0));
  const CyclicWeylRep rep = build_cyclic_rep(4, 1);
  const SiteOp u = embed(rep.U, 2, 2);
  const SiteOp inv = inverse(u);
  EXPECT_LT(max_norm(inv - embed(rep.U_inv, 2, 2)), 1e-12);

  std::mt19937_64 rng(3);
  const SiteOp a{2, 3, random_matrix(rng, 9)}, b{2, 3, random_matrix(rng, 9)}, c{2, 3, random_matrix(rng, 9)};
  EXPECT_LT(max_norm((a + b) * c - (a * c + b * c)), 1e-12);
}

TEST(OpArith, SingularAndNonConforming) {
  SiteOp z = zero_op(1, 3);
  try {
    inverse(z);
    FAIL() << "expected SingularMatrixError";
  } catch (const SingularMatrixError& e) {
    EXPECT_GT(e.residual(), 1e-9);
  }
  EXPECT_THROW(identity_op(1, 3) + identity_op(1, 2), DimensionError);
  EXPECT_THROW(identity_op(2, 2) * identity_op(1, 4), DimensionError);
}
