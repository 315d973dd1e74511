#include <gtest/gtest.h>

#include "finsler/domain.hpp"
#include "finsler/switching.hpp"
#include "test_support.hpp"

using namespace finsler;

namespace {

ModeSet worked_modes() {
  // mu_inf values 1 and 1/2.
  ModeSet ms;
  ms.qs = {SymMatrix::diag({-1, 1}), SymMatrix::diag({-1, 2})};
  ms.bs = {RectMatrix::from_rows({{0, 1}}), RectMatrix::from_rows({{0, 2}})};
  return ms;
}

}  // namespace

TEST(CertifyModes, WorkedExample) {
  const double margin = 1e-6;
  const ExtendedReal mu = certify_modes(worked_modes(), margin);
  ASSERT_TRUE(mu.is_finite());
  EXPECT_NEAR(mu.value(), 1.0 + margin, 1e-9);
}

TEST(CertifyModes, SingleUnconstrainedMode) {
  ModeSet ms;
  ms.qs = {-SymMatrix::identity(2)};
  ms.bs = {RectMatrix(1, 2)};
  const ExtendedReal mu = certify_modes(ms, 0.25);
  ASSERT_TRUE(mu.is_finite());
  EXPECT_DOUBLE_EQ(mu.value(), 0.25);
}

TEST(CertifyModes, InfeasibleModePoisons) {
  ModeSet ms = worked_modes();
  ms.qs.push_back(SymMatrix::diag({1, 0}));
  ms.bs.push_back(RectMatrix::from_rows({{0, 1}}));
  EXPECT_TRUE(certify_modes(ms, 1e-6).is_pos_inf());
}

TEST(CertifyProduct, WorkedExample) {
  // Pairwise infima {1, 1/4, 2, 1/2}: max 2.
  const double margin = 1e-6;
  ModeSet ms = worked_modes();
  ms.paired = false;
  const ExtendedReal mu = certify_product(ms, margin);
  ASSERT_TRUE(mu.is_finite());
  EXPECT_NEAR(mu.value(), 2.0 + margin, 1e-8);
  // Every pair verifies at the certified constant.
  for (const auto& q : ms.qs)
    for (const auto& b : ms.bs)
      EXPECT_TRUE(is_neg_def(shifted(q, mu.value(), gram(b)), 1e-9));
}

TEST(CertifyProduct, SingletonReducesToModes) {
  ModeSet ms;
  ms.qs = {SymMatrix::diag({-1, 1})};
  ms.bs = {RectMatrix::from_rows({{0, 1}})};
  const ExtendedReal a = certify_modes(ms, 1e-6);
  const ExtendedReal b = certify_product(ms, 1e-6);
  ASSERT_TRUE(a.is_finite());
  ASSERT_TRUE(b.is_finite());
  EXPECT_DOUBLE_EQ(a.value(), b.value());
}

TEST(CertifyProduct, InfeasiblePair) {
  ModeSet ms = worked_modes();
  ms.paired = false;
  ms.qs.push_back(SymMatrix::diag({1, 0}));
  EXPECT_TRUE(certify_product(ms, 1e-6).is_pos_inf());
}

TEST(CertifyProduct, DominatesDiagonalPairing) {
  test::Rng rng(13579);
  for (int trial = 0; trial < 30; ++trial) {
    ModeSet ms;
    const int n = rng.uniform_int(1, 4);
    const int m = n;  // full-rank modes keep everything feasible
    const int count = rng.uniform_int(1, 4);
    for (int i = 0; i < count; ++i) {
      ms.qs.push_back(rng.sym(n));
      RectMatrix b = rng.rect(m, n);
      // Keep the modes well conditioned so the margin resolves.
      while (true) {
        const Svd sv = svd_right(b);
        if (sv.sigma[n - 1] >= 0.2 * sv.sigma[0]) break;
        b = rng.rect(m, n);
      }
      ms.bs.push_back(b);
    }
    const ExtendedReal paired = certify_modes(ms, 1e-3);
    ModeSet prod = ms;
    prod.paired = false;
    const ExtendedReal product = certify_product(prod, 1e-3);
    ASSERT_TRUE(paired.is_finite());
    ASSERT_TRUE(product.is_finite());
    EXPECT_GE(product.value(), paired.value() - 1e-12);
  }
}

TEST(PiecewiseMu, TwoRegionWorkedExample) {
  const double margin = 1e-6;
  // Q and B piecewise over [0,1) and [1,2]; modes as in the paired example.
  const MatrixFn qf = MatrixFn::piecewise(
      {MatrixFn::Region{{{0.0, 1.0}}}, MatrixFn::Region{{{1.0, 2.0}}}},
      {SymMatrix::diag({-1, 1}).to_rect(), SymMatrix::diag({-1, 2}).to_rect()}, true);
  const MatrixFn bf = MatrixFn::piecewise(
      {MatrixFn::Region{{{0.0, 1.0}}}, MatrixFn::Region{{{1.0, 2.0}}}},
      {RectMatrix::from_rows({{0, 1}}), RectMatrix::from_rows({{0, 2}})}, false);
  const ParamDomain dom = ParamDomain::box({{0.0, 2.0, 5}});
  const MatrixFn mu = piecewise_mu(qf, bf, dom, margin);
  EXPECT_NEAR(mu.eval({0.5})(0, 0), 1.0 + margin, 1e-9);
  EXPECT_NEAR(mu.eval({1.5})(0, 0), 0.5 + margin, 1e-9);
}

TEST(PiecewiseMu, UniformSingleRegion) {
  const MatrixFn qf = MatrixFn::piecewise({MatrixFn::Region{{{0.0, 1.0}}}},
                                          {SymMatrix::diag({-1, 1}).to_rect()}, true);
  const MatrixFn bf = MatrixFn::piecewise({MatrixFn::Region{{{0.0, 1.0}}}},
                                          {RectMatrix::from_rows({{0, 1}})}, false);
  const MatrixFn mu = piecewise_mu(qf, bf, ParamDomain::box({{0.0, 1.0, 3}}), 1e-6);
  ASSERT_EQ(mu.regions().size(), 1u);
  EXPECT_NEAR(mu.eval({0.25})(0, 0), 1.0 + 1e-6, 1e-9);
}

TEST(PiecewiseMu, InfeasibleRegionNamed) {
  const MatrixFn qf = MatrixFn::piecewise({MatrixFn::Region{{{0.0, 1.0}}}},
                                          {SymMatrix::diag({1, 0}).to_rect()}, true);
  const MatrixFn bf = MatrixFn::piecewise({MatrixFn::Region{{{0.0, 1.0}}}},
                                          {RectMatrix::from_rows({{0, 1}})}, false);
  try {
    piecewise_mu(qf, bf, ParamDomain::box({{0.0, 1.0, 3}}), 1e-6);
    FAIL() << "expected Infeasible";
  } catch (const Infeasible& e) {
    EXPECT_NE(std::string(e.what()).find("region 1"), std::string::npos);
  }
}

TEST(PiecewiseMu, RefinementIntersectsPartitions) {
  // Q split at 1.0, B split at 0.5: three cells, values dominated by the
  // paired certificate.
  const MatrixFn qf = MatrixFn::piecewise(
      {MatrixFn::Region{{{0.0, 1.0}}}, MatrixFn::Region{{{1.0, 2.0}}}},
      {SymMatrix::diag({-1, 1}).to_rect(), SymMatrix::diag({-1, 2}).to_rect()}, true);
  const MatrixFn bf = MatrixFn::piecewise(
      {MatrixFn::Region{{{0.0, 0.5}}}, MatrixFn::Region{{{0.5, 2.0}}}},
      {RectMatrix::from_rows({{0, 1}}), RectMatrix::from_rows({{0, 2}})}, false);
  const ParamDomain dom = ParamDomain::box({{0.0, 2.0, 9}});
  const MatrixFn mu = piecewise_mu(qf, bf, dom, 1e-6);
  EXPECT_EQ(mu.regions().size(), 3u);

  // Each cell value is >= its own infimum, and a global paired certificate
  // over the cells dominates all of them.
  ModeSet cells;
  cells.qs = {SymMatrix::diag({-1, 1}), SymMatrix::diag({-1, 1}), SymMatrix::diag({-1, 2})};
  cells.bs = {RectMatrix::from_rows({{0, 1}}), RectMatrix::from_rows({{0, 2}}),
              RectMatrix::from_rows({{0, 2}})};
  const ExtendedReal global = certify_modes(cells, 1e-6);
  ASSERT_TRUE(global.is_finite());
  for (std::size_t c = 0; c < cells.qs.size(); ++c) {
    const double v = mu.region_values()[c](0, 0);
    const ExtendedReal mi = mu_inf(cells.qs[c], cells.bs[c]);
    EXPECT_GT(v, mi.value());
    EXPECT_LE(v, global.value() + 1e-12);
  }
}
