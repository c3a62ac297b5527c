#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "support.hpp"

namespace dmpm {
namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

std::vector<double> random_costs(std::mt19937_64& rng, int k, double scale) {
  std::uniform_real_distribution<double> u(0.0, scale);
  std::vector<double> c(static_cast<std::size_t>(k));
  for (double& x : c) x = u(rng);
  return c;
}

TEST(Sampling, DegenerateVarianceReturnsMean) {
  MPPIConfig cfg;
  cfg.samples = 5;
  cfg.variance = 1e-30;
  const std::vector<double> mean{0.3, -0.2, 1.0};
  std::mt19937_64 rng(1);
  const SampleMatrix s = sample_controls(std::span<const double>(mean), cfg, rng);
  ASSERT_EQ(s.size(), 5u);
  for (const auto& row : s)
    for (std::size_t i = 0; i < mean.size(); ++i) EXPECT_NEAR(row[i], mean[i], 1e-10);
}

TEST(Sampling, SampleMeanWithinThreeSigma) {
  MPPIConfig cfg;
  cfg.samples = 10000;
  const std::vector<double> mean{0.5, -1.0};
  const SampleMatrix s = sample_controls_split(std::span<const double>(mean), cfg, 0);
  const double bound = 3.0 * std::sqrt(cfg.variance) / std::sqrt(10000.0);
  for (std::size_t i = 0; i < mean.size(); ++i) {
    double m = 0.0;
    for (const auto& row : s) m += row[i];
    EXPECT_NEAR(m / 10000.0, mean[i], bound);
  }
}

TEST(Sampling, ReproducibleUnderSeed) {
  MPPIConfig cfg;
  cfg.samples = 20;
  const std::vector<double> mean(4, 0.0);
  std::mt19937_64 a(9), b(9);
  EXPECT_EQ(sample_controls(std::span<const double>(mean), cfg, a),
            sample_controls(std::span<const double>(mean), cfg, b));
  EXPECT_EQ(sample_controls_split(std::span<const double>(mean), cfg, 3),
            sample_controls_split(std::span<const double>(mean), cfg, 3));
  EXPECT_NE(sample_controls_split(std::span<const double>(mean), cfg, 3),
            sample_controls_split(std::span<const double>(mean), cfg, 4));
  // Rows are independent streams: a smaller K gives a prefix of the rows.
  MPPIConfig small = cfg;
  small.samples = 5;
  const SampleMatrix full = sample_controls_split(std::span<const double>(mean), cfg, 3);
  const SampleMatrix part = sample_controls_split(std::span<const double>(mean), small, 3);
  for (std::size_t k = 0; k < part.size(); ++k) EXPECT_EQ(part[k], full[k]);
}

TEST(Weights, HandValues) {
  const std::vector<double> c{0.0, 1.0, 2.0};
  const WeightResult r = mppi_weights(c, 1.0);
  EXPECT_NEAR(r.w[0], 0.6652, 1e-4);
  EXPECT_NEAR(r.w[1], 0.2447, 1e-4);
  EXPECT_NEAR(r.w[2], 0.0900, 1e-4);
  EXPECT_NEAR(r.eta, 1.0 + std::exp(-1.0) + std::exp(-2.0), 1e-15);
}

TEST(Weights, EqualCosts) {
  const std::vector<double> c(7, 3.5);
  const WeightResult r = mppi_weights(c, 0.3);
  EXPECT_EQ(r.eta, 7.0);
  for (double w : r.w) EXPECT_DOUBLE_EQ(w, 1.0 / 7.0);
}

TEST(Weights, ZeroTemperatureLimit) {
  const std::vector<double> c{4.0, 1.0, 1.5, 9.0};
  const WeightResult r = mppi_weights(c, 1e-12);
  EXPECT_EQ(r.w[1], 1.0);
  EXPECT_EQ(r.w[0] + r.w[2] + r.w[3], 0.0);
}

TEST(Weights, InvalidInput) {
  EXPECT_THROW(mppi_weights(std::vector<double>{}, 1.0), ConfigError);
  EXPECT_THROW(mppi_weights(std::vector<double>{1.0}, 0.0), ConfigError);
}

TEST(Weights, PartitionOfUnity) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> lb(-6.0, 6.0);
  for (int c = 0; c < 1000; ++c) {
    const std::vector<double> costs = random_costs(rng, 200, 100.0);
    const WeightResult r = mppi_weights(costs, std::pow(10.0, lb(rng)));
    ASSERT_NEAR(sum(r.w), 1.0, 1e-12);
    for (double w : r.w) ASSERT_GE(w, 0.0);
  }
}

TEST(Weights, ShiftInvariance) {
  std::mt19937_64 rng(3);
  // Dyadic costs and shifts: the differences C_k - rho are exact, so the
  // weights agree bit for bit.
  std::uniform_int_distribution<int> q(0, 4096);
  for (int c = 0; c < 200; ++c) {
    std::vector<double> costs(50), shifted(50);
    const double shift = q(rng) / 8.0;
    for (std::size_t k = 0; k < costs.size(); ++k) {
      costs[k] = q(rng) / 64.0;
      shifted[k] = costs[k] + shift;
    }
    ASSERT_EQ(mppi_weights(costs, 2.5).w, mppi_weights(shifted, 2.5).w);
  }
  for (int c = 0; c < 200; ++c) {
    const std::vector<double> costs = random_costs(rng, 50, 10.0);
    std::vector<double> shifted = costs;
    for (double& x : shifted) x += 1234.5678;
    const WeightResult a = mppi_weights(costs, 1.0), b = mppi_weights(shifted, 1.0);
    for (std::size_t k = 0; k < costs.size(); ++k) ASSERT_NEAR(a.w[k], b.w[k], 1e-12);
  }
}

TEST(Weights, MonotoneConcentration) {
  std::mt19937_64 rng(4);
  for (int c = 0; c < 100; ++c) {
    const std::vector<double> costs = random_costs(rng, 30, 5.0);
    const std::size_t best =
        static_cast<std::size_t>(std::min_element(costs.begin(), costs.end()) - costs.begin());
    double prev = 0.0;
    for (double beta = 100.0; beta > 1e-4; beta *= 0.7) {
      const double w = mppi_weights(costs, beta).w[best];
      ASSERT_GE(w, prev - 1e-15);
      prev = w;
    }
  }
}

TEST(LineSearch, LandsInRange) {
  std::vector<double> costs(10);
  std::iota(costs.begin(), costs.end(), 0.0);
  MPPIConfig cfg;
  cfg.samples = 10;
  cfg.eta_min = 2.0;
  cfg.eta_max = 4.0;
  const BetaSearch s = line_search_beta(costs, cfg);
  EXPECT_TRUE(s.in_range);
  EXPECT_FALSE(s.fallback);
  double eta = 0.0;
  for (int k = 0; k < 10; ++k) eta += std::exp(-k / s.beta);
  EXPECT_GT(eta, 2.0);
  EXPECT_LT(eta, 4.0);
  EXPECT_NEAR(eta, s.eta, 1e-12);
  EXPECT_LE(s.iterations, cfg.max_search_iterations);
}

TEST(LineSearch, ReachableRangesAreFound) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lb(-3.0, 3.0);
  for (int c = 0; c < 300; ++c) {
    // Start within a factor 100 of the cost range: 30 steps of 1.5 span
    // about 1.9e5 in beta.
    MPPIConfig cfg;
    const double scale = std::pow(10.0, lb(rng));
    const std::vector<double> costs = random_costs(rng, cfg.samples, scale);
    if (c % 2 == 1) cfg.beta = scale * std::pow(10.0, (2.0 / 3.0) * lb(rng));
    const BetaSearch s = line_search_beta(costs, cfg);
    ASSERT_TRUE(s.in_range) << "case " << c;
    ASSERT_GT(s.eta, cfg.resolved_eta_min());
    ASSERT_LT(s.eta, cfg.resolved_eta_max());
  }
}

TEST(LineSearch, WideningRangeNeverCostsIterations) {
  std::mt19937_64 rng(6);
  for (int c = 0; c < 200; ++c) {
    MPPIConfig narrow;
    narrow.samples = 100;
    narrow.eta_min = 30.0;
    narrow.eta_max = 35.0;
    const std::vector<double> costs = random_costs(rng, 100, 10.0);
    MPPIConfig wide = narrow;
    wide.eta_min = 20.0;
    wide.eta_max = 50.0;
    ASSERT_LE(line_search_beta(costs, wide).iterations, line_search_beta(costs, narrow).iterations);
  }
}

TEST(LineSearch, EqualCostsFallBack) {
  MPPIConfig cfg;
  cfg.samples = 10;
  cfg.beta = 0.7;
  const std::vector<double> costs(10, 2.0);
  const BetaSearch s = line_search_beta(costs, cfg);
  EXPECT_TRUE(s.fallback);
  EXPECT_FALSE(s.in_range);
  EXPECT_EQ(s.beta, 0.7);
  EXPECT_EQ(s.eta, 10.0);
}

TEST(Update, EqualCostsAverage) {
  MPPIConfig cfg;
  cfg.samples = 2;
  const SampleMatrix s{{1.0, 2.0}, {3.0, -2.0}};
  const MPPIUpdate u = mppi_update(s, std::vector<double>{5.0, 5.0}, cfg);
  EXPECT_DOUBLE_EQ(u.u[0], 2.0);
  EXPECT_DOUBLE_EQ(u.u[1], 0.0);
}

TEST(Update, DominantSample) {
  // eta >= 1 always; a range ending just above 1 makes the search
  // concentrate the weights on the best sample.
  MPPIConfig cfg;
  cfg.samples = 4;
  cfg.eta_min = 0.5;
  cfg.eta_max = 1.0 + 1e-10;
  const SampleMatrix s{{1.0, 2.0}, {3.0, -2.0}, {0.5, 0.5}, {-1.0, 4.0}};
  const MPPIUpdate u = mppi_update(s, std::vector<double>{1e9, 1e9, 0.0, 1e9}, cfg);
  EXPECT_NEAR(u.u[0], 0.5, 1e-9);
  EXPECT_NEAR(u.u[1], 0.5, 1e-9);
}

TEST(Update, ConvexCombination) {
  std::mt19937_64 rng(7);
  MPPIConfig cfg;
  cfg.samples = 50;
  for (int c = 0; c < 100; ++c) {
    const std::vector<double> mean(6, 0.0);
    const SampleMatrix s = sample_controls(std::span<const double>(mean), cfg, rng);
    const MPPIUpdate u = mppi_update(s, random_costs(rng, 50, 3.0), cfg);
    for (std::size_t i = 0; i < 6; ++i) {
      double lo = s[0][i], hi = s[0][i];
      for (const auto& row : s) lo = std::min(lo, row[i]), hi = std::max(hi, row[i]);
      ASSERT_GE(u.u[i], lo - 1e-12);
      ASSERT_LE(u.u[i], hi + 1e-12);
    }
  }
  EXPECT_THROW(mppi_update(SampleMatrix{{1.0}}, std::vector<double>{1.0, 2.0}, cfg), ConfigError);
}

TEST(Config, Validation) {
  MPPIConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_DOUBLE_EQ(cfg.resolved_eta_min(), 10.0);
  EXPECT_DOUBLE_EQ(cfg.resolved_eta_max(), 140.0);
  MPPIConfig bad = cfg;
  bad.horizon = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = cfg;
  bad.variance = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = cfg;
  bad.eta_min = 150.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = cfg;
  bad.beta = -1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

RopeConfig short_rope() {
  RopeConfig c = test::small_rope_config();
  c.disturbance_duration = 0.1;
  c.horizon = 0.25;
  return c;
}

TEST(RecedingHorizon, SingleSampleIsApplied) {
  const RopeScenario sc = build_rope(short_rope());
  MPPIConfig cfg;
  cfg.samples = 1;
  cfg.horizon = 2;
  cfg.eta_min = 0.5;
  cfg.eta_max = 1.0;
  cfg.seed = 5;
  const MPPIRun r = receding_horizon_control(sc, cfg);
  ASSERT_EQ(r.applied.values.size(), 3u);
  // Step 0 samples around a zero mean, so the applied value is the sample itself.
  const std::vector<double> zero(2, 0.0);
  const SampleMatrix s0 = sample_controls_split(std::span<const double>(zero), cfg, 0);
  EXPECT_EQ(r.applied.values[0], s0[0][0]);
}

TEST(RecedingHorizon, RopeAtRestStaysQuiet) {
  RopeConfig c = short_rope();
  c.disturbance_amplitude = 0.0;
  const RopeScenario sc = build_rope(c);
  MPPIConfig cfg;
  cfg.samples = 8;
  cfg.horizon = 2;
  const MPPIRun r = receding_horizon_control(sc, cfg);
  const double sigma = std::sqrt(cfg.variance);
  for (double u : r.applied.values) EXPECT_LE(std::abs(u), 3.0 * sigma);
  EXPECT_EQ(r.steps.size(), 3u);
  for (const auto& s : r.steps) EXPECT_EQ(s.failed_samples, 0);
  const double peak = *std::max_element(r.record.e_kin.begin(), r.record.e_kin.end());
  EXPECT_LT(peak, 1.0);
}

TEST(RecedingHorizon, Deterministic) {
  const RopeScenario sc = build_rope(short_rope());
  MPPIConfig cfg;
  cfg.samples = 6;
  cfg.horizon = 2;
  cfg.seed = 11;
  const MPPIRun a = receding_horizon_control(sc, cfg);
  const MPPIRun b = receding_horizon_control(sc, cfg);
  EXPECT_EQ(a.applied.values, b.applied.values);
  EXPECT_EQ(a.record.e_kin, b.record.e_kin);
  EXPECT_EQ(a.applied_full.values.size(), sc.disturbance.values.size() + 3);
}

}  // namespace
}  // namespace dmpm
