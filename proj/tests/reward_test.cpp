#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "unav/reward.hpp"

using namespace unav;

namespace {

std::shared_ptr<const DepthMap> flat_depth(int w, int h, float value) {
  auto d = std::make_shared<DepthMap>(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) d->set(x, y, value);
  return d;
}

StepGroundTruth moveto_truth(PixelPoint p) {
  auto gt = StepGroundTruth::from_action(act::MoveTo{p});
  gt.image = ImageSize{1000, 1000};
  return gt;
}

}  // namespace

TEST(FormatReward, Cases) {
  EXPECT_EQ(format_reward(wrap_response("t", act::Stop{})), 1.0);
  EXPECT_EQ(format_reward("<think>t</think>"), 0.0);
  EXPECT_EQ(format_reward("<think>t</think><answer>not json</answer>"), 0.0);
}

TEST(TypeReward, Cases) {
  EXPECT_EQ(type_reward(ActionType::Click, ActionType::Click), 1.0);
  EXPECT_EQ(type_reward(ActionType::Click, ActionType::Scroll), 0.0);
  EXPECT_EQ(type_reward(ActionType::MoveTo, ActionType::Stop), 0.0);
}

TEST(GroundingReward, DenseDecay) {
  const RewardConfig cfg;
  const auto gt = moveto_truth({500, 500});
  EXPECT_EQ(grounding_reward({500, 500}, gt, cfg), 1.0);
  EXPECT_EQ(grounding_reward({600, 500}, gt, cfg), 0.5);
  EXPECT_EQ(grounding_reward({500, 700}, gt, cfg), 0.0);
  EXPECT_EQ(grounding_reward({500, 800}, gt, cfg), 0.0);
  EXPECT_EQ(grounding_reward({1200, 500}, gt, cfg), 0.0);  // outside the image
}

TEST(GroundingReward, SparseHitRadius) {
  const RewardConfig cfg = RewardConfig::sparse();
  const auto gt = moveto_truth({500, 500});
  EXPECT_EQ(grounding_reward({510, 500}, gt, cfg), 1.0);
  EXPECT_EQ(grounding_reward({519.9, 500}, gt, cfg), 1.0);
  EXPECT_EQ(grounding_reward({520, 500}, gt, cfg), 0.0);
}

TEST(GroundingReward, DepthGate) {
  const RewardConfig cfg;
  auto depth = std::make_shared<DepthMap>(100, 100);
  for (int y = 0; y < 100; ++y)
    for (int x = 0; x < 100; ++x) depth->set(x, y, x < 50 ? 2.0f : 2.8f);
  auto gt = StepGroundTruth::from_action(act::MoveTo{{45, 50}});
  gt.depth = depth;
  // d = 10, disparity 0.8 m > 0.5 m
  EXPECT_EQ(grounding_reward({55, 50}, gt, cfg), 0.0);
  // same surface, d = 5
  EXPECT_DOUBLE_EQ(grounding_reward({40, 50}, gt, cfg), 1.0 - 5.0 / 200.0);
  // infinite depth on either side
  depth->set(40, 10, std::numeric_limits<float>::infinity());
  EXPECT_EQ(grounding_reward({40, 10}, gt, cfg), 0.0);
  EXPECT_TRUE(std::isinf(depth_disparity(*depth, {40, 10}, {45, 50})));
  // outside the depth raster
  EXPECT_EQ(grounding_reward({140, 50}, gt, cfg), 0.0);
}

TEST(GroundingReward, NoPointIsAnError) {
  EXPECT_THROW(grounding_reward({1, 1}, StepGroundTruth::from_action(act::Stop{}), RewardConfig{}), DomainError);
}

// Golden table: (response, truth) -> breakdown under the default weights.
TEST(TotalReward, GoldenTable) {
  const RewardConfig cfg;
  ASSERT_EQ(cfg.format_weight, 0.1);
  ASSERT_EQ(cfg.type_weight, 1.0);
  ASSERT_EQ(cfg.grounding_weight, 1.0);
  ASSERT_EQ(cfg.distance_threshold, 200.0);

  struct Row {
    std::string raw;
    StepGroundTruth gt;
    double format, type, grounding, total;
  };
  const auto click = StepGroundTruth::from_action(act::Click{{378, 871}});
  const auto stop = StepGroundTruth::from_action(act::Stop{});
  const auto scroll = StepGroundTruth::from_action(act::Scroll{{100, 200}, {100, 800}});
  const std::vector<Row> rows{
      {wrap_response("t", act::Click{{378, 871}}), click, 1, 1, 1, 2.1},
      {wrap_response("t", act::Click{{478, 871}}), click, 1, 1, 0.5, 1.6},
      {wrap_response("t", act::Click{{378, 1171}}), click, 1, 1, 0, 1.1},
      {wrap_response("t", act::LongPress{{378, 871}}), click, 1, 0, 1, 1.1},
      {wrap_response("t", act::NavigateBack{}), click, 1, 0, 0, 0.1},
      {wrap_response("t", act::Stop{}), stop, 1, 1, 1, 2.1},
      {wrap_response("t", act::TurnLeft{}), stop, 1, 0, 0, 0.1},
      {wrap_response("t", act::MoveTo{{5, 5}}), stop, 1, 0, 0, 0.1},
      {wrap_response("t", act::Scroll{{100, 250}, {100, 900}}), scroll, 1, 1, 0.75, 1.85},
      {"garbage", click, 0, 0, 0, 0},
      {"<think>t</think><answer>[{\"action\": \"click\"}]</answer>", click, 0, 0, 0, 0},
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = total_reward(rows[i].raw, rows[i].gt, cfg);
    EXPECT_NEAR(r.format, rows[i].format, 1e-12) << i;
    EXPECT_NEAR(r.type, rows[i].type, 1e-12) << i;
    EXPECT_NEAR(r.grounding, rows[i].grounding, 1e-12) << i;
    EXPECT_NEAR(r.total, rows[i].total, 1e-12) << i;
  }
}

TEST(TotalReward, EmbodiedWithDepth) {
  auto gt = StepGroundTruth::from_action(act::MoveTo{{320, 400}});
  gt.depth = flat_depth(640, 480, 3.0f);
  const auto r = total_reward(wrap_response("t", act::MoveTo{{320, 400}}), gt, RewardConfig{});
  EXPECT_NEAR(r.total, 2.1, 1e-12);
  const auto out = total_reward(wrap_response("t", act::MoveTo{{700, 400}}), gt, RewardConfig{});
  EXPECT_NEAR(out.total, 1.1, 1e-12);
}

TEST(RewardConfig, Validation) {
  RewardConfig c;
  c.distance_threshold = 0;
  EXPECT_THROW(c.validate(), DomainError);
  RewardConfig w;
  w.format_weight = -1;
  EXPECT_THROW(w.validate(), DomainError);
}
