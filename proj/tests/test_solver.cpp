#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <mdlnmf/solver.hpp>
#include <mdlnmf/synthgen.hpp>

using namespace mdlnmf;

namespace {

DataMatrix small_standin(std::uint64_t seed, Index m = 30, Index n = 20) {
  StandinSpec spec;
  spec.kind = StandinKind::Faces;
  spec.m = m;
  spec.n = n;
  spec.seed = seed;
  return make_standin(spec);
}

bool traces_equal(const RunTrace& a, const RunTrace& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].iteration != b[i].iteration || a[i].objective != b[i].objective ||
        a[i].l_w != b[i].l_w || a[i].l_h != b[i].l_h || a[i].l_e != b[i].l_e ||
        a[i].frobenius_error != b[i].frobenius_error ||
        a[i].learning_rate != b[i].learning_rate || a[i].accepted != b[i].accepted)
      return false;
  }
  return true;
}

}  // namespace

TEST(AutoDelta, ThousandthOfRange) {
  Matrix m(2, 2);
  m << 0, 3, 7, 10;
  EXPECT_DOUBLE_EQ(auto_delta(validate_nonneg(m)), 0.01);
}

TEST(AutoDelta, UnitRangeData) {
  Matrix m(2, 2);
  m << 0, 0.4, 0.7, 1.0;
  EXPECT_DOUBLE_EQ(auto_delta(validate_nonneg(m)), 0.001);
}

TEST(AutoDelta, ConstantDataFallsBackToScale) {
  EXPECT_DOUBLE_EQ(auto_delta(validate_nonneg(Matrix::Constant(3, 3, 5.0))), 5e-6);
  EXPECT_DOUBLE_EQ(auto_delta(validate_nonneg(Matrix::Zero(2, 2))), 1e-6);
}

TEST(ClampFactors, FloorsAtHalfDelta) {
  FactorPair f;
  f.w = Matrix::Zero(2, 2);
  f.h = Matrix::Constant(2, 2, 0.004);
  const FactorPair c = clamp_factors(f, 0.01);
  EXPECT_EQ(c.w.minCoeff(), 0.005);
  EXPECT_EQ(c.h.minCoeff(), 0.005);
}

TEST(ClampFactors, IdentityWhenAlreadyAboveFloor) {
  FactorPair f;
  f.w = Matrix::Constant(2, 3, 0.7);
  f.h = Matrix::Constant(3, 2, 1.3);
  const FactorPair c = clamp_factors(f, 0.01);
  EXPECT_TRUE(c.w.isApprox(f.w, 0.0));
  EXPECT_TRUE(c.h.isApprox(f.h, 0.0));
}

TEST(ClampFactors, Idempotent) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.01, 0.05);
  FactorPair f;
  f.w.resize(4, 3);
  f.h.resize(3, 5);
  for (Index j = 0; j < 3; ++j)
    for (Index i = 0; i < 4; ++i) f.w(i, j) = u(rng);
  for (Index j = 0; j < 5; ++j)
    for (Index i = 0; i < 3; ++i) f.h(i, j) = u(rng);
  const FactorPair once = clamp_factors(f, 0.01);
  const FactorPair twice = clamp_factors(once, 0.01);
  EXPECT_TRUE(once.w.isApprox(twice.w, 0.0));
  EXPECT_TRUE(once.h.isApprox(twice.h, 0.0));
}

TEST(InitFactors, WarmStartWithZeroNoiseJustClamps) {
  const DataMatrix v = small_standin(1);
  SolverConfig cfg;
  cfg.rank = 3;
  cfg.delta = 0.01;
  FactorPair src;
  src.w = Matrix::Constant(v.rows(), 3, 0.002);  // below the floor
  src.h = Matrix::Constant(3, v.cols(), 1.0);
  const FactorPair f = init_factors(v, cfg, InitStrategy::warm_start(src, 0.0));
  EXPECT_EQ(f.w.minCoeff(), 0.005);
  EXPECT_EQ(f.w.maxCoeff(), 0.005);
  EXPECT_TRUE(f.h.isApprox(src.h, 0.0));
}

TEST(InitFactors, WarmStartShapeMismatchThrows) {
  const DataMatrix v = small_standin(1);
  SolverConfig cfg;
  cfg.rank = 3;
  FactorPair src;
  src.w = Matrix::Ones(v.rows(), 2);
  src.h = Matrix::Ones(2, v.cols());
  EXPECT_THROW(init_factors(v, cfg, InitStrategy::warm_start(src)), ShapeMismatchError);
}

TEST(InitFactors, FixedSeedIsBitIdentical) {
  const DataMatrix v = small_standin(4);
  SolverConfig cfg;
  cfg.rank = 4;
  cfg.seed = 77;
  const FactorPair a = init_factors(v, cfg, InitStrategy::random_uniform());
  const FactorPair b = init_factors(v, cfg, InitStrategy::random_uniform());
  EXPECT_TRUE(a.w.isApprox(b.w, 0.0));
  EXPECT_TRUE(a.h.isApprox(b.h, 0.0));
}

TEST(InitFactors, RandomInitMatchesDataScaleAcrossSeeds) {
  const DataMatrix v = validate_nonneg(Matrix::Ones(20, 15));
  SolverConfig cfg;
  cfg.rank = 1;
  double acc = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    cfg.seed = seed;
    const FactorPair f = init_factors(v, cfg, InitStrategy::random_uniform());
    acc += (f.w * f.h).mean();
  }
  const double mean_of_means = acc / 100.0;
  EXPECT_GT(mean_of_means, 0.9);
  EXPECT_LT(mean_of_means, 1.1);
}

TEST(InitFactors, EntriesNeverBelowFloor) {
  const DataMatrix v = small_standin(9);
  SolverConfig cfg;
  cfg.rank = 5;
  cfg.delta = 0.02;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    cfg.seed = seed;
    const FactorPair f = init_factors(v, cfg, InitStrategy::random_uniform());
    EXPECT_GE(f.w.minCoeff(), 0.01);
    EXPECT_GE(f.h.minCoeff(), 0.01);
  }
}

TEST(SolverConfigValidation, RejectsBadValues) {
  const DataMatrix v = small_standin(1);
  SolverConfig cfg;
  cfg.rank = 0;
  EXPECT_THROW(mdl_nmf(v, cfg, InitStrategy::random_uniform()), DataError);
  cfg.rank = 2;
  cfg.lr_reduction_factor = 1.5;
  EXPECT_THROW(mdl_nmf(v, cfg, InitStrategy::random_uniform()), DataError);
}

TEST(MdlNmf, WarmStartAtExactFactorsStaysGood) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  Matrix w0(12, 3), h0(3, 10);
  for (Index j = 0; j < 3; ++j)
    for (Index i = 0; i < 12; ++i) w0(i, j) = u(rng);
  for (Index j = 0; j < 10; ++j)
    for (Index i = 0; i < 3; ++i) h0(i, j) = u(rng);
  const DataMatrix v = validate_nonneg(w0 * h0);
  SolverConfig cfg;
  cfg.rank = 3;
  cfg.max_iterations = 200;
  const SolverResult res = mdl_nmf(v, cfg, InitStrategy::warm_start({w0, h0}, 0.0));

  double prev = std::numeric_limits<double>::infinity();
  for (const TraceEntry& t : res.trace)
    if (t.accepted) {
      EXPECT_LE(t.objective, prev);
      prev = t.objective;
    }
  const double initial_frob = res.trace.front().frobenius_error;
  const double final_frob = (v.values - res.factors.w * res.factors.h).squaredNorm();
  EXPECT_LE(final_frob, initial_frob + 1e-12);
}

TEST(MdlNmf, AcceptedObjectiveMonotoneAndFloorsHold) {
  const DataMatrix v = small_standin(3, 20, 15);
  SolverConfig cfg;
  cfg.rank = 3;
  cfg.seed = 5;
  cfg.max_iterations = 2000;
  cfg.stop_patience = 1000000;  // exercise the full budget
  const double floor = auto_delta(v) / 2.0;

  bool floors_held = true;
  const SolverResult res = mdl_nmf(v, cfg, InitStrategy::random_uniform(),
                                   [&](const TraceEntry&, const FactorPair& f) {
                                     if (f.w.minCoeff() < floor || f.h.minCoeff() < floor)
                                       floors_held = false;
                                   });
  EXPECT_TRUE(floors_held);
  EXPECT_GE(res.factors.w.minCoeff(), floor);
  EXPECT_GE(res.factors.h.minCoeff(), floor);

  double prev = std::numeric_limits<double>::infinity();
  for (const TraceEntry& t : res.trace)
    if (t.accepted) {
      EXPECT_LE(t.objective, prev);
      prev = t.objective;
    }
  EXPECT_EQ(res.trace.size(), static_cast<std::size_t>(res.accepted + res.rejected));
}

TEST(MdlNmf, DeterministicPerSeed) {
  const DataMatrix v = small_standin(8, 25, 18);
  SolverConfig cfg;
  cfg.rank = 4;
  cfg.seed = 21;
  cfg.max_iterations = 300;
  const SolverResult a = mdl_nmf(v, cfg, InitStrategy::random_uniform());
  const SolverResult b = mdl_nmf(v, cfg, InitStrategy::random_uniform());
  EXPECT_TRUE(a.factors.w.isApprox(b.factors.w, 0.0));
  EXPECT_TRUE(a.factors.h.isApprox(b.factors.h, 0.0));
  EXPECT_TRUE(traces_equal(a.trace, b.trace));
}

TEST(MdlNmf, RejectionPathShrinksLearningRateAndReverts) {
  const DataMatrix v = small_standin(12, 20, 16);
  SolverConfig cfg;
  cfg.rank = 3;
  cfg.seed = 3;
  cfg.max_iterations = 120;
  cfg.learning_rate_w = cfg.learning_rate_h = 10.0;  // absurd on purpose
  const SolverResult res = mdl_nmf(v, cfg, InitStrategy::random_uniform());
  EXPECT_GT(res.rejected, 0);
  double prev_lr = std::numeric_limits<double>::infinity();
  double prev_obj = std::numeric_limits<double>::infinity();
  for (const TraceEntry& t : res.trace) {
    EXPECT_LE(t.learning_rate, prev_lr);
    prev_lr = t.learning_rate;
    if (t.accepted) {
      EXPECT_LE(t.objective, prev_obj);
      prev_obj = t.objective;
    }
  }
  EXPECT_EQ(res.trace.size(), static_cast<std::size_t>(res.accepted + res.rejected));
}

TEST(MdlNmf, SemiSyntheticRecoveryBeatsInitAcrossSeeds) {
  const DataMatrix base = small_standin(11, 30, 20);
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SemiSyntheticSet set = make_semisynthetic(base, 3, 0.3, Variant::Plain, seed, 200);
    SolverConfig cfg;
    cfg.rank = 3;
    cfg.seed = seed;
    cfg.max_iterations = 400;
    const BaselineResult warm = mu_nmf(set.v_noise, 3, 150, seed);
    const double noise_scale = 0.10 * warm.factors.w.mean();
    const InitStrategy init = InitStrategy::warm_start(warm.factors, noise_scale);
    const FactorPair f0 = init_factors(set.v_noise, cfg, init);
    const double initial_true = true_error(f0, set);
    const SolverResult res = mdl_nmf(set.v_noise, cfg, init);
    if (true_error(res.factors, set) < initial_true) ++improved;
  }
  EXPECT_GE(improved, 9);
}

TEST(MdlNmf, TraceIterationsStrictlyIncrease) {
  const DataMatrix v = small_standin(2, 15, 12);
  SolverConfig cfg;
  cfg.rank = 2;
  cfg.seed = 1;
  cfg.max_iterations = 100;
  const SolverResult res = mdl_nmf(v, cfg, InitStrategy::random_uniform());
  for (std::size_t i = 1; i < res.trace.size(); ++i)
    EXPECT_GT(res.trace[i].iteration, res.trace[i - 1].iteration);
}
