#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "abo/optimizers.hpp"

namespace abo {
namespace {

RunConfig small_config(std::uint64_t seed, int budget = 8) {
  RunConfig cfg;
  cfg.seed = seed;
  cfg.budget = budget;
  cfg.fit.restarts = 2;
  return cfg;
}

void expect_same_queries(const RunRecord& a, const RunRecord& b) {
  ASSERT_EQ(a.xs.size(), b.xs.size());
  for (std::size_t i = 0; i < a.xs.size(); ++i) {
    EXPECT_EQ(a.xs[i], b.xs[i]) << "query " << i;
    EXPECT_EQ(a.ys[i], b.ys[i]) << "query " << i;
  }
}

class AllAlgorithms : public ::testing::TestWithParam<Algorithm> {};

TEST_P(AllAlgorithms, ConsumeExactlyTheBudget) {
  const auto c = make_case("case2");
  const auto lf = generate_lf_dataset(c, 10, 3);
  const auto rec = run_algorithm(GetParam(), c, lf, small_config(4, 7));
  EXPECT_EQ(rec.xs.size(), 7u);
  EXPECT_EQ(rec.ys.size(), 7u);
  EXPECT_EQ(rec.incumbent.size(), 7u);
  EXPECT_EQ(rec.iteration_seconds.size(), 7u);
  EXPECT_EQ(rec.w_lf.size(), GetParam() == Algorithm::abo ? 7u : 0u);
  EXPECT_EQ(rec.zeta.has_value(), GetParam() == Algorithm::mfbo2);
  for (const auto& x : rec.xs) EXPECT_TRUE(c.domain.contains(x));
}

TEST_P(AllAlgorithms, DeterministicPerSeed) {
  const auto c = make_case("case1");
  const auto lf = generate_lf_dataset(c, 5, 9);
  const auto a = run_algorithm(GetParam(), c, lf, small_config(11));
  const auto b = run_algorithm(GetParam(), c, lf, small_config(11));
  expect_same_queries(a, b);
  EXPECT_EQ(a.w_lf, b.w_lf);
  const auto other = run_algorithm(GetParam(), c, lf, small_config(12));
  EXPECT_NE(a.xs.back(), other.xs.back());
}

TEST_P(AllAlgorithms, IncumbentIsRunningMax) {
  const auto c = make_case("case1");
  const auto lf = generate_lf_dataset(c, 5, 2);
  const auto rec = run_algorithm(GetParam(), c, lf, small_config(5, 12));
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rec.ys.size(); ++i) {
    best = std::max(best, rec.ys[i]);
    EXPECT_EQ(rec.incumbent[i], best);
  }
  const auto regret = simple_regret(rec, c);
  for (std::size_t t = 1; t < regret.size(); ++t) EXPECT_LE(regret[t], regret[t - 1]);
  EXPECT_GE(regret.back(), -1e-9);
}

INSTANTIATE_TEST_SUITE_P(Optimizers, AllAlgorithms,
                         ::testing::Values(Algorithm::gp_ucb, Algorithm::abo, Algorithm::mfbo1, Algorithm::mfbo2),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(GpUcb, BudgetEqualToDesignIsRandomSearch) {
  const auto c = make_case("case3");
  auto cfg = small_config(1, 2);
  const auto rec = run_gp_ucb(c, cfg);
  ASSERT_EQ(rec.xs.size(), 2u);
  Rng design(RunStreams(cfg.seed).design);
  EXPECT_EQ(rec.xs[0], sample_uniform(c.domain, design));
  EXPECT_EQ(rec.xs[1], sample_uniform(c.domain, design));
  EXPECT_EQ(rec.iteration_seconds, (std::vector<double>{0.0, 0.0}));
}

TEST(GpUcb, NoiseUsesItsOwnStream) {
  const auto noiseless = make_case("case1");
  const auto noisy = make_case("case1", {0.5, CurrinVariant::shifted});
  const auto a = run_gp_ucb(noiseless, small_config(3, 2));
  const auto b = run_gp_ucb(noisy, small_config(3, 2));
  EXPECT_EQ(a.xs, b.xs);
  EXPECT_NE(a.ys[0], b.ys[0]);
}

TEST(Abo, ZeroWeightWithoutUpdatesReducesToGpUcb) {
  const auto c = make_case("case1");
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto cfg = small_config(seed, 10);
    cfg.abo.initial_w_lf = 0.0;
    cfg.abo.adapt_weight = false;
    const auto lf = generate_lf_dataset(c, 20, seed + 100);
    const auto abo = run_abo(c, lf, cfg);
    const auto gp = run_gp_ucb(c, cfg);
    expect_same_queries(abo, gp);
    for (double w : abo.w_lf) EXPECT_EQ(w, 0.0);
  }
}

TEST(Abo, ZeroWeightIsAbsorbingWithUpdates) {
  const auto c = make_case("case1");
  auto cfg = small_config(6, 10);
  cfg.abo.initial_w_lf = 0.0;
  const auto lf = generate_lf_dataset(c, 20, 1);
  const auto abo = run_abo(c, lf, cfg);
  expect_same_queries(abo, run_gp_ucb(c, cfg));
  for (double w : abo.w_lf) EXPECT_EQ(w, 0.0);
}

TEST(Abo, WeightTraceStaysInRange) {
  const auto c = make_case("case4");
  const auto lf = generate_lf_dataset(c, 20, 8);
  const auto rec = run_abo(c, lf, small_config(8, 12));
  EXPECT_EQ(rec.w_lf[0], 0.5);
  EXPECT_EQ(rec.w_lf[1], 0.5);
  for (double w : rec.w_lf) {
    EXPECT_GE(w, 0.0);
    EXPECT_LT(w, 1.0);
  }
}

TEST(Abo, FrozenWeightKeepsItsValue) {
  const auto c = make_case("case1");
  auto cfg = small_config(2);
  cfg.abo.initial_w_lf = 0.3;
  cfg.abo.adapt_weight = false;
  const auto rec = run_abo(c, generate_lf_dataset(c, 20, 2), cfg);
  for (double w : rec.w_lf) EXPECT_EQ(w, 0.3);
}

TEST(Abo, RequiresLowFidelityData) {
  const auto c = make_case("case1");
  EXPECT_THROW(run_abo(c, Dataset(1), small_config(1)), std::invalid_argument);
  EXPECT_THROW(run_mfbo1(c, Dataset(1), small_config(1)), std::invalid_argument);
  EXPECT_THROW(run_mfbo2(c, Dataset(1), small_config(1)), std::invalid_argument);
}

TEST(Mfbo1, WarmStartFollowsTheLowFidelityMaximum) {
  // Case IV's LF model is affine in f, so both share the maximizer (1, 1, 1, 0).
  const auto c = make_case("case4");
  const auto lf = generate_lf_dataset(c, 60, 4);
  auto cfg = small_config(4, 2);
  const auto rec = run_mfbo1(c, lf, cfg);
  EXPECT_GT(c.hf(rec.xs[0]), c.f_star - 0.5);
  Rng design(RunStreams(cfg.seed).design);
  sample_uniform(c.domain, design);
  EXPECT_EQ(rec.xs[1], sample_uniform(c.domain, design));
}

TEST(Mfbo1, ContinuesAsGpUcbGivenTheSameDesign) {
  const auto c = make_case("case1");
  const auto lf = generate_lf_dataset(c, 20, 7);
  const auto cfg = small_config(7, 9);
  const auto rec = run_mfbo1(c, lf, cfg);
  EXPECT_EQ(rec.xs.size(), 9u);
  EXPECT_EQ(rec.iteration_seconds[0], 0.0);
  EXPECT_EQ(rec.iteration_seconds[1], 0.0);
}

TEST(Mfbo2, InfiniteZetaReducesToGpUcb) {
  const auto c = make_case("case2");
  auto cfg = small_config(9, 8);
  cfg.mfbo2.zeta = std::numeric_limits<double>::infinity();
  const auto lf = generate_lf_dataset(c, 20, 9);
  expect_same_queries(run_mfbo2(c, lf, cfg), run_gp_ucb(c, cfg));
}

TEST(Mfbo2, DefaultZetaIsTheSampleSdOfLfOutputs) {
  const auto c = make_case("case4");
  const auto lf = generate_lf_dataset(c, 20, 3);
  const auto rec = run_mfbo2(c, lf, small_config(3, 3));
  const double m = lf.outputs.mean();
  const double sd = std::sqrt((lf.outputs.array() - m).square().sum() / 19.0);
  ASSERT_TRUE(rec.zeta.has_value());
  EXPECT_NEAR(*rec.zeta, sd, 1e-12);
}

TEST(Mfbo2, ValidBoundOnCaseFourGrid) {
  // sup |f - f_l| = sup |0.2 f - 1| over the grid; with that zeta the LF
  // upper bound plus zeta dominates f wherever the LF posterior covers f_l.
  const auto c = make_case("case4");
  double sup = 0.0;
  const int n = 11;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d)
        for (int e = 0; e < n; ++e) {
          Point x(4);
          x << a / 10.0, b / 10.0, d / 10.0, e / 10.0;
          sup = std::max(sup, std::abs(c.hf(x) - c.lf(x)));
          ASSERT_LE(c.hf(x), c.lf(x) + std::abs(0.2 * c.hf(x) - 1.0) + 1e-12);
        }
  EXPECT_GT(sup, 0.0);
  const auto lf = generate_lf_dataset(c, 20, 1);
  auto cfg = small_config(1, 4);
  cfg.mfbo2.zeta = sup;
  EXPECT_EQ(*run_mfbo2(c, lf, cfg).zeta, sup);
}

TEST(Config, Validation) {
  RunConfig cfg;
  cfg.budget = 1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = RunConfig{};
  cfg.n_init = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = RunConfig{};
  cfg.abo.initial_w_lf = 1.0;
  EXPECT_THROW(cfg.validate(), std::domain_error);
  cfg = RunConfig{};
  cfg.mfbo2.zeta = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_THROW(parse_algorithm("ucb"), std::invalid_argument);
  EXPECT_EQ(parse_algorithm("mfbo2"), Algorithm::mfbo2);
}

}  // namespace
}  // namespace abo
