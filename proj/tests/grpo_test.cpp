#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "unav/grpo.hpp"

using namespace unav;

namespace {

// Two-pass mean / population std, independent of the library code.
std::vector<double> oracle_advantages(const std::vector<double>& r) {
  const double n = static_cast<double>(r.size());
  const double mean = std::accumulate(r.begin(), r.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : r) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / n);
  std::vector<double> out;
  for (double x : r) out.push_back(sd == 0.0 ? 0.0 : (x - mean) / (sd + 1e-6));
  return out;
}

}  // namespace

TEST(Advantages, Fixture) {
  const std::vector<double> r{1.0, 0.0, 0.5, 0.5, 0.5};
  const auto a = advantages(r);
  EXPECT_NEAR(a[0], 1.5811, 1e-3);
  EXPECT_NEAR(a[1], -1.5811, 1e-3);
  for (int i = 2; i < 5; ++i) EXPECT_NEAR(a[i], 0.0, 1e-12);
}

TEST(Advantages, DegenerateAndErrors) {
  const std::vector<double> same(5, 0.7);
  for (double x : advantages(same)) EXPECT_EQ(x, 0.0);
  const std::vector<double> one{1.0};
  EXPECT_THROW(advantages(one), DomainError);
}

TEST(Advantages, MatchOracleOnRandomGroups) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> r(2 + uniform_index(rng, 15));
    for (auto& x : r) x = uniform01(rng) * 2.1;
    const auto a = advantages(r);
    const auto o = oracle_advantages(r);
    for (std::size_t k = 0; k < r.size(); ++k) ASSERT_NEAR(a[k], o[k], 1e-9);
  }
}

TEST(Advantages, MomentsArgmaxAndAffineInvariance) {
  Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> r(5);
    for (auto& x : r) x = uniform01(rng) * 3.0;
    const auto a = advantages(r);
    const double n = 5.0;
    const double mean = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : a) ss += (x - mean) * (x - mean);
    const double sd_r = [&] {
      const double m = std::accumulate(r.begin(), r.end(), 0.0) / n;
      double s = 0.0;
      for (double x : r) s += (x - m) * (x - m);
      return std::sqrt(s / n);
    }();
    EXPECT_LE(std::abs(mean), 1e-9);
    // std of the output is exactly sd / (sd + eps)
    EXPECT_NEAR(std::sqrt(ss / n), sd_r / (sd_r + kAdvantageEpsilon), 1e-12);
    EXPECT_NEAR(std::sqrt(ss / n), 1.0, 1e-6 / sd_r + 1e-12);
    EXPECT_EQ(std::max_element(a.begin(), a.end()) - a.begin(), std::max_element(r.begin(), r.end()) - r.begin());

    std::vector<double> shifted;
    for (double x : r) shifted.push_back(2.0 * x + 3.0);
    const auto b = advantages(shifted);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(a[k], b[k], 1e-4);
  }
}

TEST(RolloutGroup, LengthMismatch) {
  RolloutGroup g{"0:0", {"a", "b"}, {1.0}};
  EXPECT_THROW(g.advantage(), DomainError);
}

TEST(SignalDensity, SparseAndDense) {
  const double analytic = 1.0 - std::pow(1.0 - std::pow(20.0 / 200.0, 2), 5);
  const double sparse = signal_density(RewardConfig::sparse(20.0), DiskSampler{}, 5, 20000, 3);
  EXPECT_NEAR(sparse, analytic, 0.01);
  const double dense = signal_density(RewardConfig{}, DiskSampler{}, 5, 20000, 3);
  EXPECT_GE(dense, 0.999);
}

TEST(SignalDensity, DegenerateSampler) {
  DiskSampler s;
  s.radius = 0.0;
  EXPECT_EQ(signal_density(RewardConfig::sparse(), s, 5, 1000), 0.0);
  EXPECT_EQ(signal_density(RewardConfig{}, s, 5, 1000), 0.0);
  EXPECT_THROW(signal_density(RewardConfig{}, s, 5, 999), DomainError);
}

TEST(ToyPolicy, DistributionSumsToOne) {
  ToyPolicy p(7, 0.5);
  auto l = p.logits();
  for (std::size_t i = 0; i < l.size(); ++i) l[i] = static_cast<double>(i) * 3.0;
  const auto probs = p.probabilities();
  EXPECT_NEAR(std::accumulate(probs.begin(), probs.end(), 0.0), 1.0, 1e-12);
  EXPECT_THROW(ToyPolicy(0, 1.0), DomainError);
  EXPECT_THROW(ToyPolicy(3, 0.0), DomainError);
}

TEST(ToyTrain, ZeroLearningRateIsFlat) {
  ToyTrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.steps = 50;
  const auto r = toy_train(ToyTask{}, cfg);
  ASSERT_EQ(r.curve.size(), 51u);
  for (const auto& p : r.curve) {
    EXPECT_EQ(p.mean_reward, r.curve.front().mean_reward);
    EXPECT_EQ(p.kl, 0.0);
  }
}

TEST(ToyTrain, BitReproducible) {
  ToyTrainConfig cfg;
  cfg.steps = 100;
  cfg.seed = 9;
  const auto a = toy_train(ToyTask{}, cfg);
  const auto b = toy_train(ToyTask{}, cfg);
  ASSERT_EQ(a.curve.size(), b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    EXPECT_EQ(a.curve[i].mean_reward, b.curve[i].mean_reward);
    EXPECT_EQ(a.curve[i].kl, b.curve[i].kl);
  }
}

TEST(ToyTrain, DenseLearnsOnDefaultTask) {
  ToyTrainConfig cfg;
  cfg.steps = 500;
  const auto r = toy_train(ToyTask{}, cfg);
  EXPECT_GE(r.final_mean_reward(), 0.8 * r.max_achievable);
  EXPECT_GT(r.final_mean_reward(), r.curve.front().mean_reward);
}

TEST(ToyTrain, ActionTypeTask) {
  ToyTask task;
  task.kind = ToyTaskKind::ActionType;
  task.target_type = ActionType::TurnLeft;
  ToyTrainConfig cfg;
  cfg.steps = 300;
  const auto r = toy_train(task, cfg);
  EXPECT_NEAR(r.max_achievable, 2.1, 1e-12);
  const auto best = std::max_element(r.final_probs.begin(), r.final_probs.end()) - r.final_probs.begin();
  EXPECT_EQ(static_cast<ActionType>(best), ActionType::TurnLeft);
}

TEST(CurveCsv, RoundTrip) {
  ToyTrainConfig cfg;
  cfg.steps = 10;
  const auto r = toy_train(ToyTask{}, cfg);
  std::stringstream buf;
  write_curve_csv(buf, r.curve);
  EXPECT_EQ(buf.str().substr(0, 22), "update,mean_reward,kl\n");
  const auto back = read_curve_csv(buf);
  ASSERT_EQ(back.size(), r.curve.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].update, r.curve[i].update);
    EXPECT_EQ(back[i].mean_reward, r.curve[i].mean_reward);
    EXPECT_EQ(back[i].kl, r.curve[i].kl);
  }
  std::stringstream bad("x,y\n");
  EXPECT_THROW(read_curve_csv(bad), SchemaError);
}
