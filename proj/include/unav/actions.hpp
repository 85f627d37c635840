#pragma once

// Unified GUI + embodied action vocabulary and the model response grammar
//
//   <think> ... </think> <answer> [ {"action": "...", ...}, ... ] </answer>
//
// Action names are matched case-insensitively; serialization is lowercase
// with keys in the order the training prompts show them.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "unav/error.hpp"
#include "unav/geometry.hpp"

namespace unav {

namespace act {

struct Click {
  PixelPoint point;
  friend bool operator==(const Click&, const Click&) = default;
};
struct LongPress {
  PixelPoint point;
  friend bool operator==(const LongPress&, const LongPress&) = default;
};
struct InputText {
  std::string text;
  PixelPoint point;
  friend bool operator==(const InputText&, const InputText&) = default;
};
struct Scroll {
  PixelPoint start;
  PixelPoint end;
  friend bool operator==(const Scroll&, const Scroll&) = default;
};
struct NavigateHome {
  friend bool operator==(const NavigateHome&, const NavigateHome&) = default;
};
struct NavigateBack {
  friend bool operator==(const NavigateBack&, const NavigateBack&) = default;
};
struct MoveTo {
  PixelPoint point;
  friend bool operator==(const MoveTo&, const MoveTo&) = default;
};
struct TurnLeft {
  friend bool operator==(const TurnLeft&, const TurnLeft&) = default;
};
struct TurnRight {
  friend bool operator==(const TurnRight&, const TurnRight&) = default;
};
struct TurnAround {
  friend bool operator==(const TurnAround&, const TurnAround&) = default;
};
struct LookDown {
  friend bool operator==(const LookDown&, const LookDown&) = default;
};
struct Stop {
  friend bool operator==(const Stop&, const Stop&) = default;
};

}  // namespace act

using Action = std::variant<act::Click, act::LongPress, act::InputText, act::Scroll, act::NavigateHome,
                            act::NavigateBack, act::MoveTo, act::TurnLeft, act::TurnRight, act::TurnAround,
                            act::LookDown, act::Stop>;

/// Same order as the Action alternatives.
enum class ActionType {
  Click,
  LongPress,
  InputText,
  Scroll,
  NavigateHome,
  NavigateBack,
  MoveTo,
  TurnLeft,
  TurnRight,
  TurnAround,
  LookDown,
  Stop
};

inline constexpr std::size_t kActionTypeCount = std::variant_size_v<Action>;

inline constexpr std::array<std::string_view, kActionTypeCount> kActionNames{
    "click",  "long_press", "input_text", "scroll",      "navigate_home", "navigate_back",
    "moveto", "turn_left",  "turn_right", "turn_around", "look_down",     "stop"};

inline ActionType action_type(const Action& a) { return static_cast<ActionType>(a.index()); }

inline std::string_view action_name(ActionType t) { return kActionNames[static_cast<std::size_t>(t)]; }

inline std::optional<ActionType> parse_action_name(std::string_view name) {
  for (std::size_t i = 0; i < kActionNames.size(); ++i) {
    const auto& canon = kActionNames[i];
    if (canon.size() == name.size() &&
        std::equal(canon.begin(), canon.end(), name.begin(), [](char a, char b) {
          return a == std::tolower(static_cast<unsigned char>(b));
        }))
      return static_cast<ActionType>(i);
  }
  return std::nullopt;
}

inline bool is_gui_type(ActionType t) { return t <= ActionType::NavigateBack; }

/// The point scored for grounding: the target of point actions, the start of a scroll.
inline std::optional<PixelPoint> target_point(const Action& a) {
  return std::visit(
      [](const auto& x) -> std::optional<PixelPoint> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, act::Scroll>)
          return x.start;
        else if constexpr (requires { x.point; })
          return x.point;
        else
          return std::nullopt;
      },
      a);
}

inline bool carries_point(const Action& a) { return target_point(a).has_value(); }

inline std::optional<ViewAction> as_view_action(const Action& a) {
  switch (action_type(a)) {
    case ActionType::TurnLeft: return ViewAction::TurnLeft;
    case ActionType::TurnRight: return ViewAction::TurnRight;
    case ActionType::TurnAround: return ViewAction::TurnAround;
    case ActionType::LookDown: return ViewAction::LookDown;
    default: return std::nullopt;
  }
}

inline Pose apply_view_action(const Pose& pose, const Action& a, const ViewConfig& cfg = {}) {
  const auto view = as_view_action(a);
  if (!view) throw DomainError("apply_view_action: '" + std::string(action_name(action_type(a))) + "' is not a view action");
  return apply_view_action(pose, *view, cfg);
}

inline Action to_action(ViewAction v) {
  switch (v) {
    case ViewAction::TurnLeft: return act::TurnLeft{};
    case ViewAction::TurnRight: return act::TurnRight{};
    case ViewAction::TurnAround: return act::TurnAround{};
    case ViewAction::LookDown: return act::LookDown{};
  }
  return act::Stop{};
}

// ---------------------------------------------------------------------------
// Serialization

/// Shortest decimal that round-trips; integral values print without a fraction.
inline std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_point(PixelPoint p) { return "[" + format_number(p.x) + ", " + format_number(p.y) + "]"; }

inline std::string serialize_action(const Action& a) {
  const std::string head = "{\"action\": \"" + std::string(action_name(action_type(a))) + "\"";
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, act::Scroll>)
          return head + ", \"start_point\": " + format_point(x.start) + ", \"end_point\": " + format_point(x.end) + "}";
        else if constexpr (std::is_same_v<T, act::InputText>)
          return head + ", \"text\": " + nlohmann::json(x.text).dump() + ", \"point\": " + format_point(x.point) + "}";
        else if constexpr (requires { x.point; })
          return head + ", \"point\": " + format_point(x.point) + "}";
        else
          return head + "}";
      },
      a);
}

/// Wraps actions in the response grammar.
inline std::string wrap_response(std::string_view think, const std::vector<Action>& actions) {
  std::string body = "[";
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (i) body += ", ";
    body += serialize_action(actions[i]);
  }
  body += "]";
  return "<think>" + std::string(think) + "</think><answer>" + body + "</answer>";
}

inline std::string wrap_response(std::string_view think, const Action& action) {
  return wrap_response(think, std::vector<Action>{action});
}

// ---------------------------------------------------------------------------
// Parsing

enum class FormatErrorKind { MissingTags, BadJson, UnknownAction, BadArguments };

inline std::string_view to_string(FormatErrorKind k) {
  switch (k) {
    case FormatErrorKind::MissingTags: return "MissingTags";
    case FormatErrorKind::BadJson: return "BadJson";
    case FormatErrorKind::UnknownAction: return "UnknownAction";
    case FormatErrorKind::BadArguments: return "BadArguments";
  }
  return "?";
}

struct FormatError {
  FormatErrorKind kind;
  std::string detail;
};

struct ModelResponse {
  std::string think;
  std::vector<Action> actions;
  std::vector<std::string> warnings;  // e.g. ignored extra keys
};

/// Either a parsed response or the reason it was rejected.
class ParseResult {
 public:
  ParseResult(ModelResponse r) : value_(std::move(r)) {}
  ParseResult(FormatError e) : value_(std::move(e)) {}

  bool ok() const { return value_.index() == 0; }
  explicit operator bool() const { return ok(); }
  const ModelResponse& response() const { return std::get<0>(value_); }
  const FormatError& error() const { return std::get<1>(value_); }

 private:
  std::variant<ModelResponse, FormatError> value_;
};

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::optional<PixelPoint> point_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) return std::nullopt;
  if (!j[0].is_number() || !j[1].is_number()) return std::nullopt;
  const PixelPoint p{j[0].get<double>(), j[1].get<double>()};
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0.0 || p.y < 0.0) return std::nullopt;
  return p;
}

}  // namespace detail

/// Converts one answer object into an Action. Unknown keys are reported in
/// `warnings` when given.
inline std::variant<Action, FormatError> action_from_json(const nlohmann::json& obj,
                                                          std::vector<std::string>* warnings = nullptr) {
  using K = FormatErrorKind;
  if (!obj.is_object()) return FormatError{K::BadArguments, "answer entries must be JSON objects"};
  const auto name_it = obj.find("action");
  if (name_it == obj.end()) return FormatError{K::BadArguments, "missing \"action\" key"};
  if (!name_it->is_string()) return FormatError{K::BadArguments, "\"action\" must be a string"};
  const auto name = name_it->get<std::string>();
  const auto type = parse_action_name(name);
  if (!type) return FormatError{K::UnknownAction, name};

  auto point = [&](const char* key) -> std::variant<PixelPoint, FormatError> {
    const auto it = obj.find(key);
    if (it == obj.end()) return FormatError{K::BadArguments, std::string("missing \"") + key + "\""};
    const auto p = detail::point_from_json(*it);
    if (!p) return FormatError{K::BadArguments, std::string("\"") + key + "\" must be [x, y] with nonnegative numbers"};
    return *p;
  };

  std::vector<std::string_view> allowed{"action"};
  Action out = act::Stop{};
  switch (*type) {
    case ActionType::Click:
    case ActionType::LongPress:
    case ActionType::MoveTo: {
      auto p = point("point");
      if (auto* e = std::get_if<FormatError>(&p)) return *e;
      const PixelPoint pt = std::get<PixelPoint>(p);
      if (*type == ActionType::Click) out = act::Click{pt};
      else if (*type == ActionType::LongPress) out = act::LongPress{pt};
      else out = act::MoveTo{pt};
      allowed.push_back("point");
      break;
    }
    case ActionType::InputText: {
      const auto it = obj.find("text");
      if (it == obj.end()) return FormatError{K::BadArguments, "missing \"text\""};
      if (!it->is_string() || it->get<std::string>().empty())
        return FormatError{K::BadArguments, "\"text\" must be a non-empty string"};
      auto p = point("point");
      if (auto* e = std::get_if<FormatError>(&p)) return *e;
      out = act::InputText{it->get<std::string>(), std::get<PixelPoint>(p)};
      allowed.insert(allowed.end(), {"text", "point"});
      break;
    }
    case ActionType::Scroll: {
      auto s = point("start_point");
      if (auto* e = std::get_if<FormatError>(&s)) return *e;
      auto e2 = point("end_point");
      if (auto* e = std::get_if<FormatError>(&e2)) return *e;
      out = act::Scroll{std::get<PixelPoint>(s), std::get<PixelPoint>(e2)};
      allowed.insert(allowed.end(), {"start_point", "end_point"});
      break;
    }
    case ActionType::NavigateHome: out = act::NavigateHome{}; break;
    case ActionType::NavigateBack: out = act::NavigateBack{}; break;
    case ActionType::TurnLeft: out = act::TurnLeft{}; break;
    case ActionType::TurnRight: out = act::TurnRight{}; break;
    case ActionType::TurnAround: out = act::TurnAround{}; break;
    case ActionType::LookDown: out = act::LookDown{}; break;
    case ActionType::Stop: out = act::Stop{}; break;
  }
  if (warnings)
    for (const auto& [key, _] : obj.items())
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        warnings->push_back("ignored extra key \"" + key + "\" in " + std::string(action_name(*type)));
  return out;
}

/// Strict parse of one think block followed by one answer block holding a
/// non-empty JSON array of action objects.
inline ParseResult parse_response(std::string_view raw) {
  using K = FormatErrorKind;
  constexpr std::string_view kThinkOpen = "<think>", kThinkClose = "</think>";
  constexpr std::string_view kAnswerOpen = "<answer>", kAnswerClose = "</answer>";

  std::string_view s = detail::trim(raw);
  if (!s.starts_with(kThinkOpen)) return FormatError{K::MissingTags, "response must start with <think>"};
  s.remove_prefix(kThinkOpen.size());
  const auto think_end = s.find(kThinkClose);
  if (think_end == std::string_view::npos) return FormatError{K::MissingTags, "missing </think>"};
  const std::string_view think = s.substr(0, think_end);
  if (think.find(kThinkOpen) != std::string_view::npos) return FormatError{K::MissingTags, "nested <think>"};
  s = detail::trim(s.substr(think_end + kThinkClose.size()));
  if (!s.starts_with(kAnswerOpen)) return FormatError{K::MissingTags, "expected <answer> after </think>"};
  s.remove_prefix(kAnswerOpen.size());
  if (!s.ends_with(kAnswerClose)) return FormatError{K::MissingTags, "response must end with </answer>"};
  s.remove_suffix(kAnswerClose.size());

  nlohmann::json body;
  try {
    body = nlohmann::json::parse(s);
  } catch (const nlohmann::json::exception& e) {
    return FormatError{K::BadJson, e.what()};
  }
  if (!body.is_array() || body.empty()) return FormatError{K::BadJson, "answer must be a non-empty JSON array"};

  ModelResponse resp;
  resp.think = std::string(think);
  for (const auto& item : body) {
    auto a = action_from_json(item, &resp.warnings);
    if (auto* e = std::get_if<FormatError>(&a)) return *e;
    resp.actions.push_back(std::move(std::get<Action>(a)));
  }
  return resp;
}

}  // namespace unav
