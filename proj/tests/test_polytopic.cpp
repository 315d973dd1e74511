#include <gtest/gtest.h>

#include "finsler/pointwise.hpp"
#include "finsler/polytopic.hpp"
#include "test_support.hpp"

using namespace finsler;

namespace {

Polytope random_polytope(test::Rng& rng, int n, int nv) {
  std::vector<RectMatrix> verts;
  for (int i = 0; i < nv; ++i) verts.push_back(rng.rect(n, n));
  return Polytope::from(std::move(verts));
}

}  // namespace

TEST(GenLyapunov, CountsAndStructure) {
  test::Rng rng(1);
  const LmiSet lmis = gen_lyapunov_g1(random_polytope(rng, 2, 3));
  EXPECT_EQ(lmis.constraints.size(), 3u + 9u);
  EXPECT_EQ(lmis.scalar_var_count(), 9);  // three symmetric 2x2 blocks
}

TEST(GenLyapunov, SingleVertexClassicalPair) {
  const Polytope p = Polytope::from({RectMatrix::from_rows({{-1.0}})});
  const LmiSet lmis = gen_lyapunov_g1(p);
  ASSERT_EQ(lmis.constraints.size(), 2u);
  EXPECT_EQ(lmis.scalar_var_count(), 1);
  // A^T P + P A = -2p for A = [-1].
  const VerifyReport rep =
      verify_candidate(lmis, {{"P_1", RectMatrix::from_rows({{1.0}})}});
  EXPECT_TRUE(rep.all_satisfied);
  EXPECT_DOUBLE_EQ(rep.constraints[0].margin, 1.0);  // P > 0 slack
  EXPECT_DOUBLE_EQ(rep.constraints[1].margin, 2.0);  // -lambda_max(-2)
}

TEST(GenLyapunov, ScalarVerticesGiveScalarPairs) {
  const Polytope p =
      Polytope::from({RectMatrix::from_rows({{-1.0}}), RectMatrix::from_rows({{-3.0}})});
  const LmiSet lmis = gen_lyapunov_g1(p);
  EXPECT_EQ(lmis.scalar_var_count(), 2);
  ASSERT_EQ(lmis.constraints.size(), 2u + 4u);
  // Pair (i, j) constraint is 2 a_i p_j.
  const std::vector<double> x = {2.0, 5.0};  // p_1, p_2
  const double a[] = {-1.0, -3.0};
  std::size_t idx = 2;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const SymMatrix m = lmis.constraints[idx++].form.eval(x);
      EXPECT_DOUBLE_EQ(m(0, 0), 2.0 * a[i] * x[j]);
    }
}

TEST(GenLyapunovCollected, FullSymmetricCrossTerms) {
  test::Rng rng(7);
  const Polytope p = random_polytope(rng, 2, 3);
  const LmiSet lmis = gen_lyapunov_g1_collected(p);
  // 3 positivity + 3 squares + 3 cross terms.
  EXPECT_EQ(lmis.constraints.size(), 9u);

  // The cross-term constraint evaluates to A_i^T P_j + P_j A_i + A_j^T P_i + P_i A_j.
  std::map<std::string, RectMatrix> assign;
  std::vector<SymMatrix> ps;
  for (int i = 0; i < 3; ++i) {
    ps.push_back(rng.sym(2));
    assign["P_" + std::to_string(i + 1)] = ps.back().to_rect();
  }
  const std::vector<double> x = lmis.flatten(assign);
  for (const auto& c : lmis.constraints) {
    if (c.name != "mono_1_2") continue;
    const RectMatrix expect =
        p.vertices[0].transposed() * ps[1].to_rect() + ps[1].to_rect() * p.vertices[0] +
        p.vertices[1].transposed() * ps[0].to_rect() + ps[0].to_rect() * p.vertices[1];
    EXPECT_LE((c.form.eval(x).to_rect() - expect).max_abs(), 1e-12);
  }
}

TEST(GenFinslerForm, SpotVariableCounts) {
  test::Rng rng(11);
  const Polytope p23 = random_polytope(rng, 2, 3);
  EXPECT_EQ(gen_finsler_form(p23, 1, 1).scalar_var_count(), 33);
  EXPECT_EQ(gen_finsler_form(p23, 2, 1).scalar_var_count(), 42);  // 18 + 24
  EXPECT_EQ(gen_finsler_form(p23, 2, 2).scalar_var_count(), 66);
}

TEST(GenFinslerForm, ConstantXSingleBlock) {
  test::Rng rng(12);
  const Polytope p = random_polytope(rng, 2, 2);
  const LmiSet lmis = gen_finsler_form(p, 1, 0);
  int x_vars = 0;
  for (const auto& v : lmis.variables)
    if (v.kind == LmiSet::MatrixVar::Kind::general) ++x_vars;
  EXPECT_EQ(x_vars, 1);
  EXPECT_EQ(lmis.scalar_var_count(), 2 * 3 + 2 * 2 * 2);  // two sym 2x2 + one 4x2
}

TEST(CountFormulas, KnownValues) {
  EXPECT_EQ(count_full(2, 3, 1), 33);
  EXPECT_EQ(count_full(2, 3, 2), 66);
  EXPECT_EQ(count_full(1, 1, 0), 3);
  EXPECT_EQ(count_reduced(2, 3, 1), 33);
  EXPECT_EQ(count_reduced(2, 3, 2), 42);
  EXPECT_EQ(count_reduced(2, 3, 3), 54);
  EXPECT_EQ(count_full(2, 3, 3), 110);
}

TEST(CountFormulas, ReducedNeverExceedsFull) {
  for (int n = 1; n <= 4; ++n)
    for (int nv = 1; nv <= 5; ++nv)
      for (int g = 1; g <= 3; ++g) {
        EXPECT_LE(count_reduced(n, nv, g), count_full(n, nv, g));
        if (g == 1) EXPECT_EQ(count_reduced(n, nv, g), count_full(n, nv, g));
      }
}

TEST(CountFormulas, EnumerationMatchesFormulas) {
  test::Rng rng(31);
  for (int n = 1; n <= 3; ++n)
    for (int nv = 1; nv <= 4; ++nv) {
      const Polytope p = random_polytope(rng, n, nv);
      for (int g = 1; g <= 3; ++g) {
        EXPECT_EQ(gen_finsler_form(p, g, g).scalar_var_count(), count_full(n, nv, g));
        EXPECT_EQ(gen_finsler_form(p, g, 1).scalar_var_count(), count_reduced(n, nv, g));
      }
    }
}

TEST(CountFormulas, OverflowGuarded) {
  EXPECT_THROW(count_full(1000000, 500, 3), OverflowError);
}

TEST(VerifyCandidate, HurwitzCommutingToy) {
  const Polytope p = Polytope::from(
      {SymMatrix::diag({-1, -2}).to_rect(), SymMatrix::diag({-3, -1}).to_rect()});
  const LmiSet lmis = gen_lyapunov_g1(p);
  std::map<std::string, RectMatrix> assign = {{"P_1", RectMatrix::identity(2)},
                                              {"P_2", RectMatrix::identity(2)}};
  const VerifyReport rep = verify_candidate(lmis, assign);
  EXPECT_TRUE(rep.all_satisfied);
}

TEST(VerifyCandidate, ViolationLocated) {
  const Polytope p = Polytope::from({RectMatrix::from_rows({{-1.0}})});
  const LmiSet lmis = gen_lyapunov_g1(p);
  const VerifyReport rep =
      verify_candidate(lmis, {{"P_1", RectMatrix::from_rows({{-1.0}})}});
  EXPECT_FALSE(rep.all_satisfied);
  EXPECT_FALSE(rep.constraints[0].satisfied);  // pos_P_1 violated
  EXPECT_EQ(rep.constraints[0].name, "pos_P_1");
  EXPECT_FALSE(rep.constraints[1].satisfied);  // -2p > 0 now
}

TEST(VerifyCandidate, MissingVariableRejected) {
  const Polytope p = Polytope::from({RectMatrix::from_rows({{-1.0}})});
  const LmiSet lmis = gen_lyapunov_g1(p);
  EXPECT_THROW(verify_candidate(lmis, {}), InvalidInput);
}

TEST(StabilityFinsler, ScalarExample) {
  const Polytope p = Polytope::from({RectMatrix::from_rows({{-1.0}})});
  const StabilityCheck c =
      stability_finsler_pointwise(p, {1.0}, SymMatrix::identity(1), 2.0);
  EXPECT_TRUE(c.finsler_block);  // [[-2,-1],[-1,-2]] < 0
  EXPECT_TRUE(c.lyapunov);
}

TEST(StabilityFinsler, HurwitzDiagonal) {
  const Polytope p = Polytope::from({SymMatrix::diag({-1, -2}).to_rect()});
  const StabilityCheck c =
      stability_finsler_pointwise(p, {1.0}, SymMatrix::identity(2), 4.0);
  EXPECT_TRUE(c.finsler_block);
  EXPECT_TRUE(c.lyapunov);
}

TEST(StabilityFinsler, UnstableNeverPasses) {
  const Polytope p = Polytope::from({RectMatrix::from_rows({{1.0}})});
  for (double mu : {0.5, 2.0, 10.0, 1000.0}) {
    const StabilityCheck c =
        stability_finsler_pointwise(p, {1.0}, SymMatrix::identity(1), mu);
    EXPECT_FALSE(c.finsler_block);
    EXPECT_FALSE(c.lyapunov);
  }
}

TEST(StabilityFinsler, SchurEquivalenceWithAdequateMu) {
  // With mu = mu_inf + margin of the slack pair (Q', B') = ([[0,P],[P,0]],
  // [A -I]), the block verdict agrees with the classical Lyapunov verdict.
  test::Rng rng(321);
  int agree_true = 0, agree_false = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = rng.uniform_int(1, 4);
    const RectMatrix a = rng.rect(n, n);
    const SymMatrix lyap_p = SymMatrix::symmetrized(
        gram(rng.rect(n, n)).to_rect() + 0.05 * RectMatrix::identity(n));
    const bool classical = is_neg_def(
        SymMatrix::symmetrized(a.transposed() * lyap_p.to_rect() + lyap_p.to_rect() * a), 1e-9);

    SymMatrix qprime(2 * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) qprime.set(i, n + j, lyap_p(i, j));
    RectMatrix bprime(n, 2 * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) bprime(i, j) = a(i, j);
      bprime(i, n + i) = -1.0;
    }
    const ExtendedReal mi = mu_inf(qprime, bprime);
    const Polytope p = Polytope::from({a});
    if (mi.is_pos_inf()) {
      EXPECT_FALSE(classical);
      ++agree_false;
      continue;
    }
    const double mu = mi.value() + 1e-3 * (1.0 + std::abs(mi.value()));
    if (mu <= 0.0) continue;  // block needs mu > 0 for the Schur argument
    const StabilityCheck c = stability_finsler_pointwise(p, {1.0}, lyap_p, mu);
    EXPECT_EQ(c.finsler_block, classical);
    EXPECT_EQ(c.lyapunov, classical);
    if (classical) ++agree_true;
  }
  EXPECT_GT(agree_true, 0);
  EXPECT_GT(agree_false, 0);
}
