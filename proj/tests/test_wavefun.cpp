#include <random>

#include <gtest/gtest.h>

#include "rtoda/bethe.hpp"
#include "rtoda/wavefun.hpp"

using namespace rtoda;

namespace {

const Cx kG = std::exp(Cx(-0.5));

std::vector<Cx> separated_roots(std::mt19937_64& rng, int M) {
  std::uniform_real_distribution<double> re(-0.5, 0.5), im(-1.0, 1.0);
  std::vector<Cx> out;
  while (static_cast<int>(out.size()) < M) {
    const Cx r(re(rng), im(rng));
    bool ok = true;
    for (const Cx& o : out) ok = ok && std::abs(std::sinh(r - o)) > 0.05 && std::abs(std::sinh(r + o)) > 0.05;
    if (ok) out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(VacuumSpec, WorkedExample) {
  const VacuumSpec s = make_vacuum_spec(GaugeVariant::A, 0.0, 0.5, kG);
  EXPECT_LT(std::abs(s.delta - Cx(1.0, -2.0 * kPi)), 1e-14);
  EXPECT_LT(std::abs(s.beta(1) - Cx(1.5, -2.0 * kPi)), 1e-14);
  const Cx u(0.3, 0.2);
  EXPECT_LT(std::abs(vacuum_a(s, 2, u) + std::exp(2.0 * u - 2.0)), 1e-13);
  EXPECT_LT(std::abs(vacuum_a(s, 2, u) * vacuum_d(s, 2, u) - kG * kG * kG * kG * std::exp(1.0)), 1e-14);
  EXPECT_LT(std::abs(s.quad() + 1.0), 1e-15);
}

TEST(VacuumSpec, GaussianConvergenceGuards) {
  EXPECT_THROW(make_vacuum_spec(GaugeVariant::A, 0.0, -0.5, kG), DomainError);
  EXPECT_THROW(make_vacuum_spec(GaugeVariant::B, 0.0, 0.5, kG), DomainError);
  EXPECT_THROW(make_vacuum_spec(GaugeVariant::A, 0.0, 0.5, 0.0), DomainError);
  EXPECT_THROW(global_vacuum(make_vacuum_spec(GaugeVariant::A, 0.0, 0.5, kG), 0), DomainError);
}

TEST(ExpGaussState, PointwiseVacuum) {
  const Cx eta(0.7, 0.3), alpha(0.2, -0.4), x(0.35, 0.1);
  const VacuumSpec s = make_vacuum_spec(GaugeVariant::A, alpha, eta, Cx(0.6, 0.2));
  const ExpGaussState v = local_vacuum(s, 2);
  const Cx direct = std::exp(-(x - alpha * eta) * (x - alpha * eta) / (2.0 * eta) + s.beta(2) * x);
  const Cx xs[] = {x};
  EXPECT_LT(std::abs(v.evaluate(xs) - direct) / std::abs(direct), 1e-14);
}

TEST(ExpGaussState, ShiftAndMultiplyPointwise) {
  const Cx eta(0.6, -0.2);
  ExpGaussState st({Cx(-0.4, 0.1), Cx(-0.3, 0.0)});
  st.add_term(Cx(0.8, 0.1), {Cx(0.2, 0.5), Cx(-0.1, 0.3)});
  st.add_term(Cx(-0.3, 0.2), {Cx(1.1, -0.5), Cx(0.4, 0.0)});
  const SiteAction shift{eta, {{Cx(1.0), 2, +1, 0}}};
  const SiteAction mul{eta, {{Cx(2.0), 1, 0, -1}}};
  const Cx x[] = {Cx(0.3, 0.1), Cx(-0.2, 0.4)};
  const Cx xs[] = {x[0], x[1] + eta};
  EXPECT_LT(std::abs(shift.apply(st).evaluate(x) - st.evaluate(xs)), 1e-14);
  EXPECT_LT(std::abs(mul.apply(st).evaluate(x) - 2.0 * std::exp(-x[0]) * st.evaluate(x)), 1e-14);
}

TEST(ExpGaussState, CanonicalMergesAndIsIdempotent) {
  ExpGaussState st({Cx(-0.5)});
  st.add_term(1.0, {Cx(0.3)});
  st.add_term(2.0, {Cx(-0.1)});
  st.add_term(-1.0, {Cx(0.3) + 1e-12});
  const ExpGaussState c = st.canonical();
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.terms()[0].amp, Cx(2.0));
  EXPECT_EQ(c.canonical().size(), 1u);
  EXPECT_EQ(annihilation_residual(st - st), 0.0);
  ExpGaussState other({Cx(-0.4)});
  EXPECT_THROW(st + other, DimensionError);
}

TEST(ExpGaussState, ActionIsLinear) {
  const Cx eta(0.5, 0.1), u(0.2, 0.3), g(0.6, 0.0);
  ExpGaussState a({Cx(-0.5), Cx(-0.5)}), b({Cx(-0.5), Cx(-0.5)});
  a.add_term(1.0, {0.1, 0.2});
  b.add_term(Cx(0.0, 1.0), {-0.3, 0.4});
  const GaugedMonodromyAction op(Cx(0.3, 0.4), Cx(-0.2, 0.5), u, g, eta, 2);
  const Cx c(0.7, -0.3);
  EXPECT_LT(state_residual(op.Cbar(a + c * b), op.Cbar(a) + c * op.Cbar(b)), 1e-14);
}

TEST(VacuumActions, LocalAndGlobalBothVariants) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Cx alpha(d(rng), d(rng)), u(0.5 * d(rng), kPi * d(rng));
    const Cx eta(0.85 + 0.65 * d(rng), d(rng));
    const Cx g = std::polar(0.6 + 0.3 * d(rng), kPi * d(rng));
    for (GaugeVariant v : {GaugeVariant::A, GaugeVariant::B}) {
      const bool a = v == GaugeVariant::A;
      const VacuumSpec s = make_vacuum_spec(v, alpha, a ? eta : -eta, a ? g : 1.0 / g);
      for (int n = 1; n <= 3; ++n) {
        const VacuumActionReport r = verify_local_actions(s, n, u);
        EXPECT_LT(r.worst(), 1e-11) << to_string(v) << " site " << n;
        EXPECT_EQ(r.a_terms, 1u);
      }
      for (int N = 1; N <= 3; ++N) {
        const GlobalActionReport r = verify_global_actions(s, N, u);
        EXPECT_LT(r.worst(), 1e-11) << to_string(v) << " N " << N;
        EXPECT_LT(r.ad_product, 1e-12);
      }
    }
  }
}

TEST(BetheTypeState, EmptyRootSetIsVacuum) {
  const ModelParams p = derive_params(2, 0, 1, kG, 0.0);
  const VacuumSpec s = make_vacuum_spec(GaugeVariant::A, Cx(0.3, 0.1), p.eta, kG, 0);
  EXPECT_EQ(state_residual(bethe_type_state(s, 2, {}), global_vacuum(s, 2)), 0.0);
}

TEST(BetheTypeState, SymmetricInTheRoots) {
  const ModelParams p = derive_params(2, 2, 1, kG, 0.0);
  const VacuumSpec s = make_vacuum_spec(GaugeVariant::A, Cx(0.2, -0.3), p.eta, kG, 2);
  const std::vector<Cx> r{Cx(0.1, 0.4), Cx(-0.2, 0.7)}, rs{r[1], r[0]};
  const ExpGaussState a = bethe_type_state(s, 2, r), b = bethe_type_state(s, 2, rs);
  EXPECT_FALSE(a.empty());
  EXPECT_LT(state_residual(a, b), 1e-12);
}

TEST(BetheTypeState, Rejections) {
  const VacuumSpec sb = make_vacuum_spec(GaugeVariant::B, 0.0, -0.5, 1.0 / kG, 1);
  const Cx one[] = {Cx(0.1)};
  EXPECT_THROW(bethe_type_state(sb, 2, one), DomainError);
  const VacuumSpec sa = make_vacuum_spec(GaugeVariant::A, 0.0, 0.5, kG, 2);
  EXPECT_THROW(bethe_type_state(sa, 2, one), DomainError);
}

TEST(Offshell, IdentitiesOnTheConstraintSequence) {
  std::mt19937_64 rng(5);
  for (auto [N, M] : std::initializer_list<std::pair<int, int>>{{1, 1}, {2, 1}, {1, 2}, {3, 1}, {2, 2}})
    for (int q : {0, 1}) {
      const ModelParams p = derive_params(N, M, q, Cx(0.55, 0.2), 0.0);
      const VacuumSpec s = make_vacuum_spec(GaugeVariant::A, Cx(0.3, -0.2), p.eta, p.g, M);
      const std::vector<Cx> roots = separated_roots(rng, M);
      const OffshellReport r = verify_offshell_action(s, N, roots, Cx(0.15, 1.9));
      EXPECT_LT(r.a_residual, 1e-10) << N << "," << M << "," << q;
      EXPECT_LT(r.d_residual, 1e-10) << N << "," << M << "," << q;
      if (M >= 2) {
        EXPECT_EQ(r.d_form, DjForm::minus);
        EXPECT_GT(r.d_residual_plus, 1e-4);
      }
    }
}

TEST(Offshell, OffConstraintRejected) {
  const VacuumSpec s = make_vacuum_spec(GaugeVariant::A, 0.0, Cx(0.5, 0.123), kG, 1);
  const Cx one[] = {Cx(0.1, 0.2)};
  EXPECT_THROW(verify_offshell_action(s, 2, one, Cx(0.3)), DomainError);
  const ModelParams p = derive_params(2, 1, 1, kG, 0.0);
  const VacuumSpec on = make_vacuum_spec(GaugeVariant::A, 0.0, p.eta, kG, 1);
  EXPECT_THROW(verify_offshell_action(on, 2, one, Cx(0.1, 0.2)), DomainError);
}
