#pragma once

// Visual-target trajectory collection for embodied scenes, GUI trajectory
// ingestion, thought generation and training-sample assembly.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "unav/actions.hpp"
#include "unav/error.hpp"
#include "unav/geometry.hpp"
#include "unav/pathfind.hpp"
#include "unav/prompts.hpp"
#include "unav/scene.hpp"

namespace unav {

enum class Domain { Gui, Embodied };

inline std::string_view to_string(Domain d) { return d == Domain::Gui ? "gui" : "embodied"; }

struct TrajectoryStep {
  std::string observation_id;
  std::optional<std::string> depth_ref;
  std::string thought;
  Action action;
  std::optional<PixelPoint> gt_point;

  friend bool operator==(const TrajectoryStep&, const TrajectoryStep&) = default;
};

struct Trajectory {
  std::string instruction;
  Domain domain = Domain::Embodied;
  std::vector<TrajectoryStep> steps;
  std::optional<CameraModel> camera;
  std::optional<std::uint64_t> scene_seed;
  bool thinned = false;  // collinear waypoint runs were collapsed before collection

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct HistoryEntry {
  std::string thought;
  Action action;
};

struct TrainingSample {
  std::string sample_id;  // "<trajectory index>:<step index>"
  std::string instruction;
  Domain domain = Domain::Embodied;
  std::vector<HistoryEntry> history;
  std::string observation_id;
  std::optional<std::string> depth_ref;
  Action action;
  std::optional<PixelPoint> gt_point;
  std::optional<CameraModel> camera;
};

// ---------------------------------------------------------------------------
// Thought generation

struct TemplateProvider {};

struct RemoteProvider {
  std::string endpoint;  // http://host:port/path
  double timeout_seconds = 30.0;
  int retries = 3;
};

using ThoughtProvider = std::variant<TemplateProvider, RemoteProvider>;

struct StepContext {
  Domain domain = Domain::Embodied;
  Action action;
  std::string observation_id;
  std::optional<std::string> next_observation_id;  // GUI only
};

inline constexpr std::string_view kThoughtTemplateVersion = "v1";

namespace detail {

inline std::string rounded(double v) { return std::to_string(static_cast<long long>(std::llround(v))); }

inline std::string xy(PixelPoint p) { return "(" + rounded(p.x) + ", " + rounded(p.y) + ")"; }

}  // namespace detail

/// Fixed first-person sentence per action type (table v1, docs/thought_templates.md).
inline std::string template_thought(const Action& a) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        using detail::xy;
        if constexpr (std::is_same_v<T, act::Click>)
          return "Tapping the element at " + xy(x.point) + " is the next step toward finishing the task.";
        else if constexpr (std::is_same_v<T, act::LongPress>)
          return "Pressing and holding the element at " + xy(x.point) + " should open the options this task needs.";
        else if constexpr (std::is_same_v<T, act::InputText>)
          return "Typing \"" + x.text + "\" into the field at " + xy(x.point) + " supplies the input the task asks for.";
        else if constexpr (std::is_same_v<T, act::Scroll>)
          return "Scrolling from " + xy(x.start) + " to " + xy(x.end) + " should reveal the content I still need.";
        else if constexpr (std::is_same_v<T, act::NavigateHome>)
          return "Returning to the home screen gives me a clean place to start the next part of the task.";
        else if constexpr (std::is_same_v<T, act::NavigateBack>)
          return "Going back to the previous screen undoes a detour away from the task.";
        else if constexpr (std::is_same_v<T, act::MoveTo>)
          return "Moving toward the visible waypoint at " + xy(x.point) + " to continue along the planned path.";
        else if constexpr (std::is_same_v<T, act::TurnLeft>)
          return "The way forward lies off to my left, so I turn left to bring it into view.";
        else if constexpr (std::is_same_v<T, act::TurnRight>)
          return "The way forward lies off to my right, so I turn right to bring it into view.";
        else if constexpr (std::is_same_v<T, act::TurnAround>)
          return "Nothing ahead leads toward the target, so I turn around to search behind me.";
        else if constexpr (std::is_same_v<T, act::LookDown>)
          return "The next spot on the floor is below my view, so I look down to find where to step.";
        else
          return "The target is right here within reach, so I stop.";
      },
      a);
}

/// Remote prompt for one step, embodied or GUI variant.
inline std::string thought_prompt(std::string_view instruction, const StepContext& ctx) {
  const std::string action = serialize_action(ctx.action);
  if (ctx.domain == Domain::Embodied)
    return prompts::fill_prompt(prompts::kEmbodiedThought, {{"action", action}, {"task", std::string(instruction)}});
  return prompts::fill_prompt(prompts::kGuiThought, {{"action", action},
                                                     {"task", std::string(instruction)},
                                                     {"instruction", std::string(instruction)},
                                                     {"apps", ""}});
}

namespace detail {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline Endpoint split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ProviderFailure("endpoint must look like http://host:port/path: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

inline std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  std::string out;
  for (char c : s)
    if (!(c == ' ' && (out.empty() || out.back() == ' '))) out.push_back(c);
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

inline std::string remote_thought(const RemoteProvider& p, const std::string& prompt) {
  const auto ep = split_endpoint(p.endpoint);
  httplib::Client client(ep.origin);
  const auto timeout = std::chrono::duration<double>(p.timeout_seconds);
  const auto secs = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
  client.set_connection_timeout(secs);
  client.set_read_timeout(secs);
  client.set_write_timeout(secs);
  const std::string body = nlohmann::json{{"prompt", prompt}}.dump();
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt <= p.retries; ++attempt) {
    auto res = client.Post(ep.path, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      return one_line(j.at("text").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("bad response body: ") + e.what();
    }
  }
  throw ProviderFailure("thought provider " + p.endpoint + " failed after " + std::to_string(p.retries) +
                        " retries: " + last_error);
}

}  // namespace detail

inline std::string generate_thought(std::string_view instruction, const StepContext& ctx,
                                    const ThoughtProvider& provider) {
  if (std::holds_alternative<TemplateProvider>(provider)) return template_thought(ctx.action);
  return detail::remote_thought(std::get<RemoteProvider>(provider), thought_prompt(instruction, ctx));
}

// ---------------------------------------------------------------------------
// Embodied collection

enum class ViewDecision { InView, TurnAround, TurnLeft, TurnRight, LookDown, AboveView };

struct Alignment {
  ViewDecision decision = ViewDecision::InView;
  PixelPoint pixel;  // clamped into the image when InView
  Vec3 camera_point;
};

/// Projects a floor target and picks the next view action in the order
/// w' < 0, x < 0, x > W, y > H. Targets exactly abeam (w' within rounding
/// of 0) turn toward their side; `pixel_tolerance` absorbs rounding at the
/// image border.
inline Alignment align_target(Vec3 target, const Pose& pose, const CameraModel& cam, double pixel_tolerance = 1e-6) {
  Alignment a;
  a.camera_point = to_camera_frame(target, pose);
  const Vec3 c = a.camera_point;
  const double eps = 1e-9 * c.norm();
  if (c.w < -eps) {
    a.decision = ViewDecision::TurnAround;
    return a;
  }
  if (c.w <= eps) {
    a.decision = c.u < -eps ? ViewDecision::TurnLeft : c.u > eps ? ViewDecision::TurnRight : ViewDecision::LookDown;
    return a;
  }
  const auto proj = project(c, cam);
  const PixelPoint p = proj.pixel;
  if (p.x < -pixel_tolerance) a.decision = ViewDecision::TurnLeft;
  else if (p.x > cam.width + pixel_tolerance) a.decision = ViewDecision::TurnRight;
  else if (p.y > cam.height + pixel_tolerance) a.decision = ViewDecision::LookDown;
  else if (p.y < -pixel_tolerance) a.decision = ViewDecision::AboveView;
  else a.decision = ViewDecision::InView;
  a.pixel = {std::clamp(p.x, 0.0, cam.width), std::clamp(p.y, 0.0, cam.height)};
  return a;
}

/// MOVETO execution: the camera stands at the target cell center, keeps its
/// yaw and comes back level.
inline Pose relocate(const Pose& pose, Vec3 floor_point) {
  Pose out = relevel(pose);
  out.position = floor_point + Vec3{0.0, -kCameraHeight, 0.0};
  return out;
}

struct CollectOptions {
  int view_loop_cap = 8;  // view actions allowed per waypoint
  bool thin_waypoints = true;
  bool render_depth = true;
  ViewConfig view;
  std::size_t goal_index = 0;
  std::string depth_prefix = "depth/";
  double pixel_tolerance = 1e-6;
};

struct Collection {
  Trajectory trajectory;
  std::vector<DepthMap> depths;  // parallel to steps when rendering is enabled
  std::vector<Pose> poses;       // observation pose of each step
  Waypoints waypoints;           // the waypoints actually visited
  Pose final_pose;
};

inline std::string embodied_observation_id(std::uint64_t seed, std::size_t step) {
  return "pose:" + std::to_string(seed) + ":" + std::to_string(step);
}

inline Collection collect_embodied(const Scene& scene, const CameraModel& cam, std::string_view instruction,
                                   const ThoughtProvider& provider, const CollectOptions& opt = {}) {
  cam.validate();
  if (scene.goals.empty()) throw DomainError("collect_embodied: scene has no goals");
  if (opt.goal_index >= scene.goals.size()) throw DomainError("collect_embodied: goal index out of range");

  Collection out;
  auto path = shortest_path(scene, scene.spawn.floor_point(), scene.goals[opt.goal_index].position);
  out.waypoints = opt.thin_waypoints ? thin_waypoints(path) : path;
  out.trajectory.instruction = std::string(instruction);
  out.trajectory.domain = Domain::Embodied;
  out.trajectory.camera = cam;
  out.trajectory.scene_seed = scene.seed;
  out.trajectory.thinned = opt.thin_waypoints;

  Pose pose = scene.spawn;
  auto record = [&](const Action& action) {
    const std::size_t i = out.trajectory.steps.size();
    TrajectoryStep step;
    step.observation_id = embodied_observation_id(scene.seed, i);
    if (opt.render_depth) {
      out.depths.push_back(render_depth(scene, pose, cam));
      step.depth_ref = opt.depth_prefix + std::to_string(scene.seed) + "_" + std::to_string(i) + ".nvdm";
    }
    step.action = action;
    step.gt_point = target_point(action);
    step.thought = generate_thought(instruction, {Domain::Embodied, action, step.observation_id, std::nullopt}, provider);
    out.trajectory.steps.push_back(std::move(step));
    out.poses.push_back(pose);
  };

  const auto& points = out.waypoints.points;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    int view_actions = 0;
    Alignment a;
    for (;;) {
      a = align_target(points[k + 1], pose, cam, opt.pixel_tolerance);
      if (a.decision == ViewDecision::InView) break;
      if (a.decision == ViewDecision::AboveView) {
        // no look-up action exists; retry once from a level camera
        if (pose.pitch_deg == 0.0)
          throw ViewLoopExceeded("waypoint " + std::to_string(k + 1) + " lies above the view of a level camera");
        pose = relevel(pose);
        continue;
      }
      if (++view_actions > opt.view_loop_cap)
        throw ViewLoopExceeded("waypoint " + std::to_string(k + 1) + " not in view after " +
                               std::to_string(opt.view_loop_cap) + " view actions");
      ViewAction view = ViewAction::LookDown;
      switch (a.decision) {
        case ViewDecision::TurnAround: view = ViewAction::TurnAround; break;
        case ViewDecision::TurnLeft: view = ViewAction::TurnLeft; break;
        case ViewDecision::TurnRight: view = ViewAction::TurnRight; break;
        default: view = ViewAction::LookDown; break;
      }
      record(to_action(view));
      pose = apply_view_action(pose, view, opt.view);
    }
    record(act::MoveTo{a.pixel});
    pose = relocate(pose, points[k + 1]);
  }
  record(act::Stop{});
  out.final_pose = pose;
  return out;
}

// ---------------------------------------------------------------------------
// Samples

inline std::vector<TrainingSample> build_samples(const Trajectory& t, std::size_t trajectory_index = 0) {
  std::vector<TrainingSample> out;
  out.reserve(t.steps.size());
  std::vector<HistoryEntry> history;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    out.push_back({std::to_string(trajectory_index) + ":" + std::to_string(i), t.instruction, t.domain, history,
                   s.observation_id, s.depth_ref, s.action, s.gt_point, t.camera});
    history.push_back({s.thought, s.action});
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

/// Integral values become JSON integers so they print without a fraction.
inline nlohmann::ordered_json json_number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
  return v;
}

inline nlohmann::ordered_json point_json(PixelPoint p) {
  return nlohmann::ordered_json::array({json_number(p.x), json_number(p.y)});
}

/// Canonical action object, keys in prompt order.
inline nlohmann::ordered_json action_to_json(const Action& a) {
  nlohmann::ordered_json j;
  j["action"] = std::string(action_name(action_type(a)));
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, act::Scroll>) {
          j["start_point"] = point_json(x.start);
          j["end_point"] = point_json(x.end);
        } else if constexpr (std::is_same_v<T, act::InputText>) {
          j["text"] = x.text;
          j["point"] = point_json(x.point);
        } else if constexpr (requires { x.point; }) {
          j["point"] = point_json(x.point);
        }
      },
      a);
  return j;
}

inline nlohmann::ordered_json trajectory_to_json(const Trajectory& t) {
  nlohmann::ordered_json j;
  j["instruction"] = t.instruction;
  j["domain"] = std::string(to_string(t.domain));
  if (t.camera)
    j["camera"] = {{"w", json_number(t.camera->width)}, {"h", json_number(t.camera->height)},
                   {"f", json_number(t.camera->focal)}};
  if (t.scene_seed) j["scene_seed"] = *t.scene_seed;
  if (t.domain == Domain::Embodied) j["thinned"] = t.thinned;
  j["steps"] = nlohmann::ordered_json::array();
  for (const auto& s : t.steps) {
    nlohmann::ordered_json step;
    step["obs"] = s.observation_id;
    step["depth"] = s.depth_ref ? nlohmann::ordered_json(*s.depth_ref) : nlohmann::ordered_json(nullptr);
    step["thought"] = s.thought;
    step["action"] = action_to_json(s.action);
    if (s.gt_point) step["gt_point"] = point_json(*s.gt_point);
    j["steps"].push_back(std::move(step));
  }
  return j;
}

/// Validates and converts one trajectory object; throws SchemaError.
inline Trajectory trajectory_from_json(const nlohmann::json& j, Domain default_domain = Domain::Embodied) {
  if (!j.is_object()) throw SchemaError("trajectory must be a JSON object");
  Trajectory t;
  try {
    t.instruction = j.at("instruction").get<std::string>();
    t.domain = default_domain;
    if (j.contains("domain")) {
      const auto d = j["domain"].get<std::string>();
      if (d == "gui") t.domain = Domain::Gui;
      else if (d == "embodied") t.domain = Domain::Embodied;
      else throw SchemaError("unknown domain \"" + d + "\"");
    }
    if (j.contains("camera") && !j["camera"].is_null()) {
      const auto& c = j["camera"];
      t.camera = CameraModel{c.at("w").get<double>(), c.at("h").get<double>(), c.at("f").get<double>()};
      t.camera->validate();
    }
    if (j.contains("scene_seed") && !j["scene_seed"].is_null()) t.scene_seed = j["scene_seed"].get<std::uint64_t>();
    t.thinned = j.value("thinned", false);
    const auto& steps = j.at("steps");
    if (!steps.is_array() || steps.empty()) throw SchemaError("steps must be a non-empty array");
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const auto& s = steps[i];
      const std::string where = "step " + std::to_string(i) + ": ";
      TrajectoryStep step;
      step.observation_id = s.at("obs").get<std::string>();
      if (s.contains("depth") && !s["depth"].is_null()) step.depth_ref = s["depth"].get<std::string>();
      step.thought = s.value("thought", std::string{});
      auto a = action_from_json(s.at("action"));
      if (auto* e = std::get_if<FormatError>(&a)) {
        if (e->kind == FormatErrorKind::UnknownAction) throw SchemaError(where + "unknown action \"" + e->detail + "\"");
        throw SchemaError(where + e->detail);
      }
      step.action = std::get<Action>(a);
      const auto derived = target_point(step.action);
      if (s.contains("gt_point") && !s["gt_point"].is_null()) {
        if (!derived) throw SchemaError(where + "gt_point given for an action without a point");
        const auto& g = s["gt_point"];
        if (!g.is_array() || g.size() != 2 || !g[0].is_number() || !g[1].is_number())
          throw SchemaError(where + "gt_point must be [x, y]");
        step.gt_point = PixelPoint{g[0].get<double>(), g[1].get<double>()};
      } else {
        step.gt_point = derived;
      }
      if (t.domain == Domain::Embodied && t.camera && step.gt_point) {
        const auto p = *step.gt_point;
        if (p.x < 0.0 || p.y < 0.0 || p.x > t.camera->width || p.y > t.camera->height)
          throw SchemaError(where + "gt_point outside the camera image");
      }
      t.steps.push_back(std::move(step));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(e.what());
  } catch (const DomainError& e) {
    throw SchemaError(e.what());
  }
  if (t.domain == Domain::Embodied && action_type(t.steps.back().action) != ActionType::Stop)
    throw SchemaError("embodied trajectory must end with stop");
  return t;
}

struct LineError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct TrajectoryFile {
  std::vector<Trajectory> trajectories;
  std::vector<LineError> errors;
};

/// One trajectory per line; blank lines are skipped, bad lines are reported
/// and skipped. Only an unreadable file throws.
inline TrajectoryFile read_trajectories(const std::filesystem::path& path, Domain default_domain) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  TrajectoryFile out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.trajectories.push_back(trajectory_from_json(j, default_domain));
    } catch (const nlohmann::json::exception& e) {
      out.errors.push_back({lineno, std::string("invalid JSON: ") + e.what()});
    } catch (const SchemaError& e) {
      out.errors.push_back({lineno, e.what()});
    }
  }
  if (in.bad()) throw IoError("read failed: " + path.string());
  return out;
}

inline TrajectoryFile ingest_gui(const std::filesystem::path& path) { return read_trajectories(path, Domain::Gui); }

inline void write_trajectories(std::ostream& out, const std::vector<Trajectory>& ts) {
  for (const auto& t : ts) out << trajectory_to_json(t).dump() << '\n';
}

}  // namespace unav
