#pragma once

// GUI step metrics, embodied episodes with SR/SPL, and point-in-mask
// affordance success.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "unav/actions.hpp"
#include "unav/collect.hpp"
#include "unav/error.hpp"
#include "unav/pathfind.hpp"
#include "unav/reward.hpp"
#include "unav/scene.hpp"

namespace unav {

// ---------------------------------------------------------------------------
// GUI

inline constexpr double kGuiDistanceFraction = 0.14;

/// How "14% of the image size" is read. MaxDimension is the default.
enum class ToleranceRule { MaxDimension, PerAxis, Diagonal };

inline bool gui_step_correct(const Action& pred, const StepGroundTruth& gt, double width, double height,
                             ToleranceRule rule = ToleranceRule::MaxDimension) {
  if (action_type(pred) != action_type(gt.action)) return false;
  if (!gt.gt_point) return true;
  const auto p = target_point(pred);
  if (!p) return false;
  const double dx = std::abs(p->x - gt.gt_point->x);
  const double dy = std::abs(p->y - gt.gt_point->y);
  switch (rule) {
    case ToleranceRule::MaxDimension: return std::hypot(dx, dy) <= kGuiDistanceFraction * std::max(width, height);
    case ToleranceRule::PerAxis: return dx <= kGuiDistanceFraction * width && dy <= kGuiDistanceFraction * height;
    case ToleranceRule::Diagonal: return std::hypot(dx, dy) <= kGuiDistanceFraction * std::hypot(width, height);
  }
  return false;
}

inline double type_accuracy(std::span<const ActionType> preds, std::span<const ActionType> gts) {
  if (preds.size() != gts.size()) throw DomainError("type_accuracy: prediction and ground-truth counts differ");
  if (preds.empty()) throw DomainError("type_accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == gts[i];
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

// ---------------------------------------------------------------------------
// Embodied episodes

struct EpisodeResult {
  bool success = false;
  double path_length = 0.0;      // meters traveled
  double shortest_length = 0.0;  // meters, from the planner
  int steps_taken = 0;
  double final_distance = 0.0;   // meters from the goal when the episode ended
};

struct EpisodeConfig {
  int max_steps = 64;
  double success_threshold = 0.3;  // meters
  double stop_hint_distance = 1.0;  // stop distance given to the agent; not used for success
  ViewConfig view;
  bool render_observations = true;
};

struct Observation {
  std::size_t episode = 0;
  int step = 0;
  std::string_view instruction;
  std::string observation_id;
  const Pose& pose;
  const DepthMap* depth;  // null when rendering is disabled
  const std::vector<HistoryEntry>& history;
};

/// Maps an observation to a raw model response.
using Policy = std::function<std::string(const Observation&)>;

namespace detail {

// Traveled distance, exact for axis-aligned and diagonal hops between cell centers.
struct PathMeter {
  GridCost exact;
  double residual = 0.0;

  void add(const OccupancyGrid& grid, Vec3 from, Vec3 to) {
    const auto a = grid.cell_of(from);
    const auto b = grid.cell_of(to);
    if (a && b && grid.cell_center(*a) == from && grid.cell_center(*b) == to) {
      const auto dr = std::abs(b->row - a->row);
      const auto dc = std::abs(b->col - a->col);
      if (dr == 0 || dc == 0 || dr == dc) {
        exact = exact + octile(*a, *b);
        return;
      }
    }
    residual += std::hypot(to.u - from.u, to.w - from.w);
  }

  double meters(double cell_size) const { return exact.meters(cell_size) + residual; }
};

inline double horizontal_distance(Vec3 a, Vec3 b) { return std::hypot(a.u - b.u, a.w - b.w); }

}  // namespace detail

/// Floor cell center under a pixel, or nullopt when the ray hits a wall,
/// the sky, or leaves the image.
inline std::optional<Vec3> moveto_destination(const Scene& scene, const Pose& pose, const CameraModel& cam,
                                              PixelPoint pixel) {
  if (!(pixel.x >= 0.0 && pixel.y >= 0.0 && pixel.x <= cam.width && pixel.y <= cam.height)) return std::nullopt;
  const double depth = cast_depth(scene.grid, pose, cam, pixel);
  if (!std::isfinite(depth) || !(depth > 0.0)) return std::nullopt;
  const Vec3 hit = to_world_frame(unproject(pixel, depth, cam), pose);
  if (std::abs(hit.v) > 1e-6) return std::nullopt;  // wall face, not floor
  const auto cell = scene.grid.cell_of(hit);
  if (!cell || scene.grid.blocked(*cell)) return std::nullopt;
  return scene.grid.cell_center(*cell);
}

/// MOVETO relocates to the floor cell under the pixel, view actions rotate,
/// stop ends the episode. Anything else, including unparseable output,
/// consumes a step without changing state.
inline EpisodeResult navigate_episode(const Scene& scene, std::size_t goal_index, const CameraModel& cam,
                                      std::string_view instruction, const Policy& policy,
                                      const EpisodeConfig& cfg = {}, std::size_t episode = 0) {
  cam.validate();
  if (goal_index >= scene.goals.size()) throw DomainError("navigate_episode: goal index out of range");
  if (cfg.max_steps < 1) throw DomainError("navigate_episode: max_steps must be positive");
  const Vec3 goal = scene.goals[goal_index].position;

  EpisodeResult res;
  res.shortest_length = shortest_path(scene, scene.spawn.floor_point(), goal).cost;
  if (!(res.shortest_length > 0.0)) throw DomainError("navigate_episode: spawn already at the goal");

  Pose pose = scene.spawn;
  detail::PathMeter meter;
  std::vector<HistoryEntry> history;
  for (int step = 0; step < cfg.max_steps; ++step) {
    std::optional<DepthMap> depth;
    if (cfg.render_observations) depth = render_depth(scene, pose, cam);
    const Observation obs{episode, step, instruction, embodied_observation_id(scene.seed, static_cast<std::size_t>(step)),
                          pose, depth ? &*depth : nullptr, history};
    const std::string raw = policy(obs);
    res.steps_taken = step + 1;
    const auto parsed = parse_response(raw);
    if (!parsed) continue;
    const Action& action = parsed.response().actions.front();
    history.push_back({parsed.response().think, action});

    if (action_type(action) == ActionType::Stop) {
      res.final_distance = detail::horizontal_distance(pose.floor_point(), goal);
      res.success = res.final_distance <= cfg.success_threshold;
      res.path_length = meter.meters(scene.grid.cell_size());
      return res;
    }
    if (const auto view = as_view_action(action)) {
      pose = apply_view_action(pose, *view, cfg.view);
    } else if (const auto* mv = std::get_if<act::MoveTo>(&action)) {
      if (const auto dest = moveto_destination(scene, pose, cam, mv->point)) {
        meter.add(scene.grid, pose.floor_point(), *dest);
        pose = relocate(pose, *dest);
      }
    }
  }
  res.final_distance = detail::horizontal_distance(pose.floor_point(), goal);
  res.success = false;
  res.path_length = meter.meters(scene.grid.cell_size());
  res.steps_taken = cfg.max_steps;
  return res;
}

/// Replays recorded actions; episode i replays trajectories[i]. Past the end
/// of a trajectory it answers stop.
inline Policy make_replay_policy(std::vector<Trajectory> trajectories) {
  return [ts = std::move(trajectories)](const Observation& obs) -> std::string {
    if (obs.episode >= ts.size()) return wrap_response("no trajectory", act::Stop{});
    const auto& steps = ts[obs.episode].steps;
    const auto i = static_cast<std::size_t>(obs.step);
    if (i >= steps.size()) return wrap_response("trajectory exhausted", act::Stop{});
    return wrap_response(steps[i].thought, steps[i].action);
  };
}

struct EpisodeTask {
  const Scene* scene = nullptr;
  std::size_t goal_index = 0;
  CameraModel camera;
  std::string instruction;
};

/// Whether a policy may be called from several threads at once.
enum class PolicyConcurrency { Reentrant, Serialized };

/// Runs independent episodes; result i belongs to task i. A Serialized
/// policy is called under a lock.
inline std::vector<EpisodeResult> run_episodes(std::span<const EpisodeTask> tasks, const Policy& policy,
                                               PolicyConcurrency concurrency, const EpisodeConfig& cfg = {},
                                               unsigned threads = 0) {
  std::vector<EpisodeResult> results(tasks.size());
  std::mutex lock;
  Policy guarded = policy;
  if (concurrency == PolicyConcurrency::Serialized)
    guarded = [&](const Observation& obs) {
      std::lock_guard g(lock);
      return policy(obs);
    };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, tasks.size())));

  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](unsigned w) {
    try {
      for (std::size_t i = w; i < tasks.size(); i += threads)
        results[i] = navigate_episode(*tasks[i].scene, tasks[i].goal_index, tasks[i].camera, tasks[i].instruction,
                                      guarded, cfg, i);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

inline double success_rate(std::span<const EpisodeResult> results) {
  if (results.empty()) throw DomainError("success_rate: no episodes");
  double s = 0.0;
  for (const auto& r : results) s += r.success ? 1.0 : 0.0;
  return s / static_cast<double>(results.size());
}

/// Mean of S * l / max(p, l).
inline double spl(std::span<const EpisodeResult> results) {
  if (results.empty()) throw DomainError("spl: no episodes");
  double s = 0.0;
  for (const auto& r : results)
    if (r.success) s += r.shortest_length / std::max(r.path_length, r.shortest_length);
  return s / static_cast<double>(results.size());
}

/// One JSON line per episode, then {"sr", "spl", "n"}.
inline void write_episode_report(std::ostream& out, std::span<const EpisodeResult> results) {
  for (const auto& r : results) {
    nlohmann::ordered_json j;
    j["success"] = r.success;
    j["path_length"] = r.path_length;
    j["shortest_length"] = r.shortest_length;
    j["steps_taken"] = r.steps_taken;
    j["final_distance"] = r.final_distance;
    out << j.dump() << '\n';
  }
  nlohmann::ordered_json agg;
  agg["sr"] = success_rate(results);
  agg["spl"] = spl(results);
  agg["n"] = results.size();
  out << agg.dump() << '\n';
}

// ---------------------------------------------------------------------------
// Affordance masks

struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> inside;  // row-major, nonzero = inside

  Mask() = default;
  Mask(int w, int h, bool fill = false) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw DomainError("mask dimensions must be positive");
    inside.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
  }

  bool at(int x, int y) const { return inside[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { inside[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
};

inline bool affordance_success(PixelPoint pred, const Mask& mask) {
  if (!(pred.x >= 0.0 && pred.y >= 0.0)) return false;
  const double fx = std::floor(pred.x);
  const double fy = std::floor(pred.y);
  if (fx >= mask.width || fy >= mask.height) return false;
  return mask.at(static_cast<int>(fx), static_cast<int>(fy));
}

namespace detail {

inline std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

}  // namespace detail

/// Binary PGM (P5); maxval up to 65535.
inline Mask read_pgm_mask(std::istream& in) {
  if (detail::pgm_token(in) != "P5") throw SchemaError("mask: expected P5 graymap");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(detail::pgm_token(in));
    h = std::stoi(detail::pgm_token(in));
    maxval = std::stoi(detail::pgm_token(in));
  } catch (const std::exception&) {
    throw SchemaError("mask: bad header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw SchemaError("mask: bad header values");
  const std::size_t bytes = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * bytes);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw SchemaError("mask: truncated raster");
  Mask m(w, h);
  for (std::size_t i = 0; i < m.inside.size(); ++i)
    m.inside[i] = bytes == 1 ? raw[i] != 0 : (raw[2 * i] != 0 || raw[2 * i + 1] != 0);
  return m;
}

inline void write_pgm_mask(std::ostream& out, const Mask& m) {
  out << "P5\n" << m.width << ' ' << m.height << "\n255\n";
  for (auto v : m.inside) out.put(v ? static_cast<char>(255) : 0);
}

inline Mask load_pgm_mask(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return read_pgm_mask(in);
}

}  // namespace unav
