#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <mdlnmf/baselines.hpp>
#include <mdlnmf/synthgen.hpp>

using namespace mdlnmf;

namespace {

FactorPair random_factors(std::uint64_t seed, Index m, Index r, Index n,
                          double lo = 0.5, double hi = 1.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  FactorPair f;
  f.w.resize(m, r);
  f.h.resize(r, n);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < m; ++i) f.w(i, j) = u(rng);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < r; ++i) f.h(i, j) = u(rng);
  return f;
}

}  // namespace

TEST(MuNmf, ExactFactorsAreAFixedPoint) {
  const FactorPair f0 = random_factors(5, 10, 3, 8);
  const DataMatrix v = validate_nonneg(f0.w * f0.h);
  const BaselineResult res = mu_nmf(v, 3, 5, 0, f0);
  EXPECT_LT((res.factors.w - f0.w).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((res.factors.h - f0.h).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(MuNmf, ErrorTraceNonIncreasingWithinSlack) {
  StandinSpec st;
  st.m = 10;
  st.n = 8;
  st.seed = 2;
  const DataMatrix v = make_standin(st);
  const BaselineResult res = mu_nmf(v, 3, 500, 7);
  ASSERT_EQ(res.error_trace.size(), 501u);
  for (std::size_t i = 1; i < res.error_trace.size(); ++i)
    EXPECT_LE(res.error_trace[i], res.error_trace[i - 1] + 1e-9);
}

TEST(MuNmf, FullRankRecoversInput) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  Matrix vv(5, 6);
  for (Index j = 0; j < 6; ++j)
    for (Index i = 0; i < 5; ++i) vv(i, j) = u(rng);
  const DataMatrix v = validate_nonneg(vv);
  const BaselineResult res = mu_nmf(v, 5, 5000, 1);
  EXPECT_LT(std::sqrt(res.error_trace.back()) / vv.norm(), 1e-3);
}

TEST(MuNmf, PreservesNonNegativity) {
  StandinSpec st;
  st.m = 12;
  st.n = 9;
  st.seed = 4;
  const DataMatrix v = make_standin(st);
  const BaselineResult res = mu_nmf(v, 4, 200, 3);
  EXPECT_GE(res.factors.w.minCoeff(), 0.0);
  EXPECT_GE(res.factors.h.minCoeff(), 0.0);
}

TEST(HoyerSparseness, OneSparseVectorIsExactlyOne) {
  Vector x(3);
  x << 0, 0, 5;
  EXPECT_EQ(hoyer_sparseness(x), 1.0);
}

TEST(HoyerSparseness, ConstantVectorIsExactlyZero) {
  Vector x(4);
  x << 2, 2, 2, 2;
  EXPECT_EQ(hoyer_sparseness(x), 0.0);
}

TEST(HoyerSparseness, DirectFormulaCase) {
  Vector x(3);
  x << 1, 0, 1;
  const double expected = (std::sqrt(3.0) - std::sqrt(2.0)) / (std::sqrt(3.0) - 1.0);
  EXPECT_NEAR(hoyer_sparseness(x), expected, 1e-14);
}

TEST(HoyerSparseness, ScaleInvariant) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  Vector x(6);
  for (Index i = 0; i < 6; ++i) x[i] = u(rng);
  const double s = hoyer_sparseness(x);
  EXPECT_DOUBLE_EQ(hoyer_sparseness(4.0 * x), s);  // power of two: exact
  EXPECT_NEAR(hoyer_sparseness(0.37 * x), s, 1e-12);
}

TEST(HoyerSparseness, ErrorPaths) {
  EXPECT_THROW(hoyer_sparseness(Vector::Zero(3)), ZeroVectorError);
  Vector one(1);
  one << 2.0;
  EXPECT_THROW(hoyer_sparseness(one), LengthOneError);
}

TEST(ProjectSparseness, FixedPointForFeasibleInput) {
  Vector x(4);
  x << 0.9, 0.1, 0.4, 0.2;
  const double l1 = x.sum();
  const double l2 = x.norm();
  const Vector out = project_sparseness(x, l1, l2);
  EXPECT_LT((out - x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ProjectSparseness, ContractHoldsOnRandomFeasibleTargets) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> ndist(3, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = ndist(rng);
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = u(rng) - 0.2;  // some negatives
    const double l2 = 0.5 + u(rng);
    const double s = 0.05 + 0.9 * u(rng);
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    const double l1 = l2 * (sqrt_n - s * (sqrt_n - 1.0));
    const Vector out = project_sparseness(x, l1, l2);
    EXPECT_NEAR(out.cwiseAbs().sum(), l1, 1e-8);
    EXPECT_NEAR(out.norm(), l2, 1e-8);
    EXPECT_GE(out.minCoeff(), 0.0);
  }
}

TEST(ProjectSparseness, UniqueFeasiblePointForTwoElements) {
  // l1 = l2 * sqrt(2) admits exactly one non-negative point: the constant
  // vector. Verified against a grid-search oracle over the L1 simplex.
  const double l1 = std::sqrt(2.0), l2 = 1.0;
  double best_p = -1.0, best_gap = 1e300;
  for (int i = 0; i <= 100000; ++i) {
    const double p = l1 * i / 100000.0;
    const double q = l1 - p;
    const double gap = std::abs(p * p + q * q - l2 * l2);
    if (gap < best_gap) {
      best_gap = gap;
      best_p = p;
    }
  }
  EXPECT_NEAR(best_p, 1.0 / std::sqrt(2.0), 1e-4);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    Vector x(2);
    x << u(rng), u(rng);
    const Vector out = project_sparseness(x, l1, l2);
    EXPECT_NEAR(out[0], 1.0 / std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(out[1], 1.0 / std::sqrt(2.0), 1e-9);
  }
}

TEST(ProjectSparseness, InfeasibleTargetsThrow) {
  Vector x(3);
  x << 1, 2, 3;
  EXPECT_THROW(project_sparseness(x, 0.5, 1.0), InfeasibleTargetError);   // l1 < l2
  EXPECT_THROW(project_sparseness(x, 10.0, 1.0), InfeasibleTargetError);  // l1 > l2*sqrt(n)
  EXPECT_THROW(project_sparseness(x, -1.0, 1.0), InfeasibleTargetError);
  Vector one(1);
  one << 1.0;
  EXPECT_THROW(project_sparseness(one, 1.0, 1.0), LengthOneError);
}

TEST(Snmf, ColumnsHitTheSparsenessTarget) {
  StandinSpec st;
  st.m = 15;
  st.n = 12;
  st.seed = 6;
  const DataMatrix v = make_standin(st);
  SparsenessTarget t;
  t.w = 0.8;
  const BaselineResult res = snmf(v, 3, t, 100, 2);
  for (Index j = 0; j < res.factors.w.cols(); ++j) {
    const double s = hoyer_sparseness(res.factors.w.col(j));
    EXPECT_GT(s, 0.799);
    EXPECT_LT(s, 0.801);
  }
}

TEST(Snmf, RowTargetsApplyToH) {
  StandinSpec st;
  st.m = 10;
  st.n = 14;
  st.seed = 8;
  const DataMatrix v = make_standin(st);
  SparsenessTarget t;
  t.w = 0.6;
  t.h = 0.5;
  const BaselineResult res = snmf(v, 3, t, 60, 4);
  for (Index j = 0; j < res.factors.w.cols(); ++j)
    EXPECT_NEAR(hoyer_sparseness(res.factors.w.col(j)), 0.6, 1e-3);
  for (Index i = 0; i < res.factors.h.rows(); ++i)
    EXPECT_NEAR(hoyer_sparseness(res.factors.h.row(i).transpose()), 0.5, 1e-3);
}

TEST(Snmf, UnconstrainedFactorFollowsMultiplicativeUpdate) {
  StandinSpec st;
  st.m = 9;
  st.n = 7;
  st.seed = 3;
  const DataMatrix v = make_standin(st);
  const int rank = 3;
  const std::uint64_t seed = 11;
  SparsenessTarget t;
  t.h = 0.55;  // H constrained, W free -> W moves by the MU rule first

  const BaselineResult res = snmf(v, rank, t, 1, seed);

  FactorPair manual = baseline_init(v, rank, seed);
  detail::project_rows(manual.h, 0.55);
  const Matrix& vals = v.values;
  const Matrix w_expected =
      (manual.w.array() * (vals * manual.h.transpose()).array() /
       ((manual.w * (manual.h * manual.h.transpose())).array() + kMuEps)).matrix();
  EXPECT_LT((res.factors.w - w_expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Snmf, ErrorTraceMonotoneWithinSlack) {
  StandinSpec st;
  st.m = 14;
  st.n = 11;
  st.seed = 1;
  const DataMatrix v = make_standin(st);
  SparsenessTarget t;
  t.w = 0.7;
  const BaselineResult res = snmf(v, 4, t, 150, 9);
  for (std::size_t i = 1; i < res.error_trace.size(); ++i)
    EXPECT_LE(res.error_trace[i], res.error_trace[i - 1] + 1e-9);
}

TEST(Snmf, ConfigurationErrors) {
  StandinSpec st;
  st.m = 6;
  st.n = 5;
  const DataMatrix v = make_standin(st);
  EXPECT_THROW(snmf(v, 2, SparsenessTarget{}, 10, 0), DataError);
  SparsenessTarget bad;
  bad.w = 1.5;
  EXPECT_THROW(snmf(v, 2, bad, 10, 0), InfeasibleTargetError);
}
