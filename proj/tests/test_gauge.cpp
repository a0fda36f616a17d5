#include <random>

#include <gtest/gtest.h>

#include "rtoda/gauge.hpp"

using namespace rtoda;

namespace {

struct Draw {
  std::mt19937_64 rng;
  explicit Draw(std::uint64_t seed) : rng(seed) {}
  double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  Cx spectral() { return {uni(-0.5, 0.5), uni(-kPi, kPi)}; }
  Cx coupling() { return std::polar(uni(0.3, 0.9), uni(-kPi, kPi)); }
  Cx index() { return {uni(-1, 1), (uni(0, 1) < 0.5 ? -1.0 : 1.0) * uni(0.2, 1.0)}; }
};

}  // namespace

TEST(GaugeMatrix, ClosedFormInverse) {
  Draw d(1);
  for (GaugeVariant v : {GaugeVariant::A, GaugeVariant::B})
    for (int i = 0; i < 10; ++i) {
      const GaugeMatrix g = gauge_matrix(v, d.index(), d.spectral(), Cx(d.uni(0.2, 1), d.uni(-1, 1)));
      EXPECT_LT((g.m * g.m_inv - Mat2::Identity()).cwiseAbs().maxCoeff(), 1e-13);
      EXPECT_LT((g.m_inv * g.m - Mat2::Identity()).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(GaugeMatrix, Entries) {
  const Cx k(0.3, 0.5), u(0.2, -0.4), eta(0.6, 0.1);
  const GaugeMatrix a = gauge_matrix(GaugeVariant::A, k, u, eta);
  EXPECT_LT(std::abs(a.m(0, 1) - std::exp(-u + k * eta)), 1e-15);
  EXPECT_LT(std::abs(a.m(0, 0) - std::exp(-u - k * eta) / std::sinh(k * eta)), 1e-15);
  EXPECT_LT(std::abs(a.m(1, 0) - 1.0 / std::sinh(k * eta)), 1e-15);
  EXPECT_EQ(a.m(1, 1), Cx(1.0));
  const GaugeMatrix b = gauge_matrix(GaugeVariant::B, k, u, eta);
  EXPECT_LT(std::abs(b.m(0, 1) - std::exp(u + k * eta)), 1e-15);
  EXPECT_LT(std::abs(b.m(0, 0) - std::exp(u - k * eta) / std::sinh(k * eta)), 1e-15);
}

TEST(GaugeMatrix, SingularGuard) {
  EXPECT_THROW(gauge_matrix(GaugeVariant::A, 0.0, 0.1, 0.5), SingularGaugeError);
  EXPECT_THROW(gauge_matrix(GaugeVariant::B, Cx(2.0), 0.1, Cx(0.0, kPi / 2.0)), SingularGaugeError);
}

TEST(VectorRelations, RandomTriplesBothVariants) {
  Draw d(2);
  for (GaugeVariant v : {GaugeVariant::A, GaugeVariant::B})
    for (int i = 0; i < 50; ++i) {
      const VectorRelationReport r =
          verify_vector_relations(d.spectral(), d.spectral(), d.index(), Cx(d.uni(0.2, 1), d.uni(-1, 1)), v);
      for (int k = 0; k < 8; ++k) EXPECT_LT(r.residual[k], 1e-12) << to_string(v) << " relation " << k + 1;
    }
}

TEST(VectorRelations, CoincidentPoints) {
  const Cx u(0.15, 0.3), m(0.4, 0.6), eta(0.5, 0.2);
  const VectorRelationReport r = verify_vector_relations(u, u, m, eta);
  EXPECT_LT(r.residual[2], 1e-13);
}

TEST(GaugedMonodromy, SimilarityInvariants) {
  Draw d(3);
  const CyclicWeylRep rep = build_cyclic_rep(4, 1);
  for (int N = 1; N <= 3; ++N) {
    const Cx u = d.spectral(), g = d.coupling(), j = d.index(), k = d.index();
    const AuxOpMatrix t = monodromy(u, rep, g, N);
    const GaugedAuxOpMatrix kk = gauged_monodromy(k, k, u, rep, g, N);
    EXPECT_LT(max_norm(kk.e[0] + kk.e[3] - transfer(u, rep, g, N)) / std::max(1.0, max_norm(t.A())), 1e-12);

    const GaugedAuxOpMatrix jk = gauged_monodromy(j, k, u, rep, g, N);
    const GaugeMatrix mj = gauge_matrix(GaugeVariant::A, j, u, rep.eta);
    const GaugeMatrix mk = gauge_matrix(GaugeVariant::A, k, u, rep.eta);
    const GaugedAuxOpMatrix back = gauge_sandwich(AuxOpMatrix{jk.e, u, 0}, mj.m, mk.m_inv, j, k);
    for (int e = 0; e < 4; ++e)
      EXPECT_LT(max_norm(back.e[e] - t.e[e]) / std::max(1.0, max_norm(t.e[e])), 1e-12);
  }
}

TEST(GaugedMonodromy, SingleSiteEntries) {
  // Abar = Ybar_j L X_k and so on, written out for one site.
  const CyclicWeylRep rep = build_cyclic_rep(3, 1);
  const Cx u(0.2, 0.7), g(0.5, -0.2), j(0.3, 0.4), k(-0.2, 0.6);
  const AuxOpMatrix l = lax(1, u, rep, g, 1);
  const GaugeMatrix mj = gauge_matrix(GaugeVariant::A, j, u, rep.eta), mk = gauge_matrix(GaugeVariant::A, k, u, rep.eta);
  const GaugedAuxOpMatrix bar = gauged_monodromy(j, k, u, rep, g, 1);
  auto sand = [&](const Eigen::RowVector2cd& row, const Eigen::Vector2cd& col) {
    return row(0) * (col(0) * l.A() + col(1) * l.B()) + row(1) * (col(0) * l.C() + col(1) * l.D());
  };
  EXPECT_LT(max_norm(bar.Abar() - sand(mj.Ybar(), mk.X())), 1e-13);
  EXPECT_LT(max_norm(bar.Bbar() - sand(mj.Ybar(), mk.Y())), 1e-13);
  EXPECT_LT(max_norm(bar.Cbar() - sand(mj.Xbar(), mk.X())), 1e-13);
  EXPECT_LT(max_norm(bar.Dbar() - sand(mj.Xbar(), mk.Y())), 1e-13);
}

TEST(Commutations, CyclicRepresentation) {
  Draw d(4);
  const CyclicWeylRep rep = build_cyclic_rep(4, 1);
  for (int N = 1; N <= 3; ++N)
    for (int i = 0; i < 4; ++i) {
      const CommutationReport r =
          verify_gauged_commutations(d.index(), d.index(), d.spectral(), d.spectral(), rep, d.coupling(), N);
      EXPECT_LT(r.cc, 1e-10);
      EXPECT_LT(r.ac, 1e-10);
      EXPECT_LT(r.dc, 1e-10);
      EXPECT_EQ(r.dc_form, DcForm::direct);
    }
}

TEST(Commutations, PoleGuard) {
  const CyclicWeylRep rep = build_cyclic_rep(4, 1);
  const Cx u(0.1, 0.2);
  EXPECT_THROW(verify_gauged_commutations(Cx(0.1, 0.5), Cx(0.2, 0.4), u, u + Cx(1e-10), rep, 0.5, 2), DomainError);
  EXPECT_THROW(verify_gauged_commutations(Cx(0.1, 0.5), Cx(0.2, 0.4), u, u + Cx(0.0, kPi), rep, 0.5, 2), DomainError);
}
