#pragma once

// Format, type and distance-aware grounding rewards and their weighted sum.

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string_view>

#include "unav/actions.hpp"
#include "unav/error.hpp"
#include "unav/geometry.hpp"
#include "unav/scene.hpp"

namespace unav {

enum class GroundingMode { Dense, Sparse };

struct RewardConfig {
  double format_weight = 0.1;
  double type_weight = 1.0;
  double grounding_weight = 1.0;
  double distance_threshold = 200.0;  // pixels, dense decay radius
  double depth_threshold = 0.5;       // meters, occlusion gate
  GroundingMode mode = GroundingMode::Dense;
  double sparse_threshold = 20.0;  // pixels, hit radius in sparse mode

  static RewardConfig sparse(double hit_radius = 20.0) {
    RewardConfig c;
    c.mode = GroundingMode::Sparse;
    c.sparse_threshold = hit_radius;
    return c;
  }

  void validate() const {
    if (!(distance_threshold > 0.0)) throw DomainError("distance threshold must be positive");
    if (!(depth_threshold > 0.0)) throw DomainError("depth threshold must be positive");
    if (!(sparse_threshold > 0.0)) throw DomainError("sparse threshold must be positive");
    for (double w : {format_weight, type_weight, grounding_weight})
      if (!std::isfinite(w) || w < 0.0) throw DomainError("reward weights must be finite and nonnegative");
  }
};

struct ImageSize {
  double width = 0.0;
  double height = 0.0;
};

struct StepGroundTruth {
  Action action;
  std::optional<PixelPoint> gt_point;
  std::shared_ptr<const DepthMap> depth;  // embodied steps only
  std::optional<ImageSize> image;         // bounds for predictions; defaults to the depth map size

  static StepGroundTruth from_action(Action a) {
    StepGroundTruth gt{std::move(a), std::nullopt, nullptr, std::nullopt};
    gt.gt_point = target_point(gt.action);
    return gt;
  }

  std::optional<ImageSize> bounds() const {
    if (image) return image;
    if (depth) return ImageSize{static_cast<double>(depth->width()), static_cast<double>(depth->height())};
    return std::nullopt;
  }
};

struct RewardBreakdown {
  double format = 0.0;
  double type = 0.0;
  double grounding = 0.0;
  double total = 0.0;
};

inline double format_reward(std::string_view raw) { return parse_response(raw).ok() ? 1.0 : 0.0; }

inline double type_reward(ActionType pred, ActionType gt) { return pred == gt ? 1.0 : 0.0; }

/// |h(pred) - h(gt)|; missing or infinite depth on either side yields +inf.
inline double depth_disparity(const DepthMap& depth, PixelPoint pred, PixelPoint gt) {
  const auto a = depth.sample(pred);
  const auto b = depth.sample(gt);
  if (!a || !b || !std::isfinite(*a) || !std::isfinite(*b)) return std::numeric_limits<double>::infinity();
  return std::abs(static_cast<double>(*a) - static_cast<double>(*b));
}

inline double grounding_reward(PixelPoint pred, const StepGroundTruth& gt, const RewardConfig& cfg) {
  if (!gt.gt_point) throw DomainError("grounding_reward: ground truth carries no point");
  if (const auto b = gt.bounds()) {
    if (!(pred.x >= 0.0 && pred.y >= 0.0 && pred.x <= b->width && pred.y <= b->height)) return 0.0;
  }
  const double d = pixel_distance(pred, *gt.gt_point);
  const double p = gt.depth ? depth_disparity(*gt.depth, pred, *gt.gt_point) : 0.0;
  if (!(p < cfg.depth_threshold)) return 0.0;
  if (cfg.mode == GroundingMode::Sparse) return d < cfg.sparse_threshold ? 1.0 : 0.0;
  return d < cfg.distance_threshold ? 1.0 - d / cfg.distance_threshold : 0.0;
}

inline double weighted_total(const RewardConfig& cfg, double format, double type, double grounding) {
  return cfg.format_weight * format + cfg.type_weight * type + cfg.grounding_weight * grounding;
}

/// Scores an already parsed prediction (format assumed valid).
inline RewardBreakdown score_action(const Action& pred, const StepGroundTruth& gt, const RewardConfig& cfg) {
  RewardBreakdown r;
  r.format = 1.0;
  r.type = type_reward(action_type(pred), action_type(gt.action));
  if (!carries_point(gt.action)) {
    r.grounding = r.type;
  } else if (const auto p = target_point(pred)) {
    r.grounding = grounding_reward(*p, gt, cfg);
  }
  r.total = weighted_total(cfg, r.format, r.type, r.grounding);
  return r;
}

/// Only the first action of a multi-action answer is scored.
inline RewardBreakdown total_reward(std::string_view raw, const StepGroundTruth& gt, const RewardConfig& cfg) {
  const auto parsed = parse_response(raw);
  if (!parsed) return {};
  return score_action(parsed.response().actions.front(), gt, cfg);
}

}  // namespace unav
