#pragma once

// Group-relative advantages, a Monte-Carlo measure of how often a reward
// gives any learning signal, and a categorical toy policy trained with
// group-relative policy gradients.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "unav/actions.hpp"
#include "unav/error.hpp"
#include "unav/random.hpp"
#include "unav/reward.hpp"

namespace unav {

inline constexpr double kAdvantageEpsilon = 1e-6;

/// (R - mean) / (std + eps) with the population std. A group whose rewards
/// are all equal gets all-zero advantages.
inline std::vector<double> advantages(std::span<const double> rewards, double eps = kAdvantageEpsilon) {
  if (rewards.size() < 2) throw DomainError("advantages: a group needs at least two rewards");
  std::vector<double> out(rewards.size(), 0.0);
  if (std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards.front(); })) return out;
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(rewards.size());
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / static_cast<double>(rewards.size()));
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / (sd + eps);
  return out;
}

struct RolloutGroup {
  std::string sample_id;
  std::vector<std::string> rollouts;
  std::vector<double> rewards;

  std::vector<double> advantage() const {
    if (rewards.size() != rollouts.size()) throw DomainError("rollout group: rewards and rollouts differ in length");
    return advantages(rewards);
  }
};

// ---------------------------------------------------------------------------
// Signal density

/// Predictions uniform in a disk around the target.
struct DiskSampler {
  double radius = 200.0;
  PixelPoint target{1000.0, 1000.0};
};

inline PixelPoint sample_disk(Rng& rng, const DiskSampler& s) {
  const double r = s.radius * std::sqrt(uniform01(rng));
  const double a = 2.0 * std::numbers::pi * uniform01(rng);
  return {s.target.x + r * std::cos(a), s.target.y + r * std::sin(a)};
}

/// Fraction of simulated groups whose grounding rewards are not all equal,
/// i.e. groups that produce a nonzero advantage.
inline double signal_density(const RewardConfig& cfg, const DiskSampler& sampler, int group_size, int trials,
                             std::uint64_t seed = 0) {
  if (trials < 1000) throw DomainError("signal_density: at least 1000 trials required");
  if (group_size < 2) throw DomainError("signal_density: group size must be at least 2");
  cfg.validate();
  const auto gt = StepGroundTruth::from_action(act::MoveTo{sampler.target});
  std::vector<double> rewards(static_cast<std::size_t>(group_size));
  long informative = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(t))));
    for (auto& r : rewards) r = grounding_reward(sample_disk(rng, sampler), gt, cfg);
    if (std::any_of(rewards.begin(), rewards.end(), [&](double r) { return r != rewards.front(); })) ++informative;
  }
  return static_cast<double>(informative) / trials;
}

// ---------------------------------------------------------------------------
// Toy policy and trainer

/// Softmax over logits at a fixed temperature.
class ToyPolicy {
 public:
  ToyPolicy(std::size_t n, double temperature) : logits_(n, 0.0), temperature_(temperature) {
    if (n == 0) throw DomainError("toy policy needs at least one choice");
    if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
  }

  std::size_t size() const { return logits_.size(); }
  double temperature() const { return temperature_; }
  std::span<double> logits() { return logits_; }
  std::span<const double> logits() const { return logits_; }

  std::vector<double> probabilities() const {
    const double top = *std::max_element(logits_.begin(), logits_.end()) / temperature_;
    std::vector<double> p(logits_.size());
    double z = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) z += (p[i] = std::exp(logits_[i] / temperature_ - top));
    for (double& x : p) x /= z;
    return p;
  }

  std::size_t sample(Rng& rng, std::span<const double> probs) const {
    const double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return probs.size() - 1;
  }

 private:
  std::vector<double> logits_;
  double temperature_;
};

/// KL(p || q) for categorical distributions.
inline double categorical_kl(std::span<const double> p, std::span<const double> q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) kl += p[i] * std::log(p[i] / q[i]);
  return kl;
}

enum class ToyTaskKind { Grounding, ActionType };

struct ToyTask {
  ToyTaskKind kind = ToyTaskKind::Grounding;
  double width = 640.0;
  double height = 480.0;
  int grid = 16;                        // K x K cells over the image for grounding
  std::optional<PixelPoint> target;     // drawn from the seed when empty
  ActionType target_type = ActionType::Stop;
};

struct ToyTrainConfig {
  RewardConfig reward;
  int group_size = 5;
  int steps = 200;
  double learning_rate = 0.4;
  double kl_coef = 0.01;
  double temperature = 1.0;
  std::uint64_t seed = 0;
};

struct CurvePoint {
  int update = 0;
  double mean_reward = 0.0;  // expected reward of the current policy
  double kl = 0.0;           // KL(policy || initial policy)
};

struct ToyTrainResult {
  std::vector<CurvePoint> curve;
  std::vector<double> choice_rewards;  // reward of each discrete choice
  std::vector<double> final_probs;
  PixelPoint target;
  double max_achievable = 0.0;

  double final_mean_reward() const { return curve.back().mean_reward; }
};

inline Action toy_choice_action(const ToyTask& task, std::size_t k) {
  if (task.kind == ToyTaskKind::Grounding) {
    const int row = static_cast<int>(k) / task.grid;
    const int col = static_cast<int>(k) % task.grid;
    return act::MoveTo{{(col + 0.5) * task.width / task.grid, (row + 0.5) * task.height / task.grid}};
  }
  const PixelPoint c{task.width / 2.0, task.height / 2.0};
  switch (static_cast<ActionType>(k)) {
    case ActionType::Click: return act::Click{c};
    case ActionType::LongPress: return act::LongPress{c};
    case ActionType::InputText: return act::InputText{"text", c};
    case ActionType::Scroll: return act::Scroll{c, {c.x, 0.0}};
    case ActionType::NavigateHome: return act::NavigateHome{};
    case ActionType::NavigateBack: return act::NavigateBack{};
    case ActionType::MoveTo: return act::MoveTo{c};
    case ActionType::TurnLeft: return act::TurnLeft{};
    case ActionType::TurnRight: return act::TurnRight{};
    case ActionType::TurnAround: return act::TurnAround{};
    case ActionType::LookDown: return act::LookDown{};
    case ActionType::Stop: return act::Stop{};
  }
  return act::Stop{};
}

inline PixelPoint toy_target(const ToyTask& task, std::uint64_t seed) {
  if (task.target) return *task.target;
  Rng rng(splitmix64(seed ^ 0x7A26E7ull));
  return {uniform01(rng) * task.width, uniform01(rng) * task.height};
}

/// Reward of every discrete choice, scored through the full response
/// grammar so format, type and grounding all contribute.
inline std::vector<double> toy_choice_rewards(const ToyTask& task, const RewardConfig& cfg, PixelPoint target) {
  StepGroundTruth gt = task.kind == ToyTaskKind::Grounding
                           ? StepGroundTruth::from_action(act::MoveTo{target})
                           : StepGroundTruth::from_action(toy_choice_action(task, static_cast<std::size_t>(task.target_type)));
  gt.image = ImageSize{task.width, task.height};
  const std::size_t n = task.kind == ToyTaskKind::Grounding ? static_cast<std::size_t>(task.grid) * task.grid
                                                             : kActionTypeCount;
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = total_reward(wrap_response("toy rollout", toy_choice_action(task, k)), gt, cfg).total;
  return out;
}

/// Each update samples a group, standardizes its rewards, and takes one
/// gradient ascent step on  mean_j Adv_j log pi(a_j) - kl_coef KL(pi || pi_0).
inline ToyTrainResult toy_train(const ToyTask& task, const ToyTrainConfig& cfg) {
  cfg.reward.validate();
  if (task.kind == ToyTaskKind::Grounding && task.grid < 1) throw DomainError("toy task grid must be positive");
  if (cfg.group_size < 2) throw DomainError("group size must be at least 2");
  if (cfg.steps < 0) throw DomainError("steps must be nonnegative");

  ToyTrainResult res;
  res.target = toy_target(task, cfg.seed);
  res.choice_rewards = toy_choice_rewards(task, cfg.reward, res.target);
  res.max_achievable = *std::max_element(res.choice_rewards.begin(), res.choice_rewards.end());

  ToyPolicy policy(res.choice_rewards.size(), cfg.temperature);
  const std::vector<double> reference = policy.probabilities();
  Rng rng(splitmix64(cfg.seed));

  auto expected = [&](std::span<const double> p) {
    double e = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) e += p[k] * res.choice_rewards[k];
    return e;
  };

  std::vector<double> probs = policy.probabilities();
  res.curve.push_back({0, expected(probs), 0.0});
  std::vector<std::size_t> picks(static_cast<std::size_t>(cfg.group_size));
  std::vector<double> rewards(picks.size());
  std::vector<double> grad(policy.size());
  for (int step = 1; step <= cfg.steps; ++step) {
    for (std::size_t j = 0; j < picks.size(); ++j) {
      picks[j] = policy.sample(rng, probs);
      rewards[j] = res.choice_rewards[picks[j]];
    }
    const auto adv = advantages(rewards);
    const double kl = categorical_kl(probs, reference);
    const double inv_t = 1.0 / cfg.temperature;
    const double inv_g = 1.0 / static_cast<double>(picks.size());
    for (std::size_t k = 0; k < grad.size(); ++k)
      grad[k] = probs[k] > 0.0 ? -cfg.kl_coef * inv_t * probs[k] * (std::log(probs[k] / reference[k]) - kl) : 0.0;
    for (std::size_t j = 0; j < picks.size(); ++j) {
      for (std::size_t k = 0; k < grad.size(); ++k) grad[k] -= inv_g * adv[j] * inv_t * probs[k];
      grad[picks[j]] += inv_g * adv[j] * inv_t;
    }
    auto logits = policy.logits();
    for (std::size_t k = 0; k < grad.size(); ++k) logits[k] += cfg.learning_rate * grad[k];
    probs = policy.probabilities();
    res.curve.push_back({step, expected(probs), categorical_kl(probs, reference)});
  }
  res.final_probs = probs;
  return res;
}

/// CSV with header "update,mean_reward,kl".
inline void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "update,mean_reward,kl\n";
  for (const auto& p : curve) out << p.update << ',' << format_number(p.mean_reward) << ',' << format_number(p.kl) << '\n';
}

inline std::vector<CurvePoint> read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "update,mean_reward,kl") throw SchemaError("curve: bad header");
  std::vector<CurvePoint> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    CurvePoint p;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) throw SchemaError("curve: line " + std::to_string(lineno));
    try {
      p.update = std::stoi(line.substr(0, c1));
      p.mean_reward = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
      p.kl = std::stod(line.substr(c2 + 1));
    } catch (const std::exception&) {
      throw SchemaError("curve: line " + std::to_string(lineno));
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace unav
