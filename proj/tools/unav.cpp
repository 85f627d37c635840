// unav: batch front end for scene generation, trajectory collection, reward
// scoring, group advantages, toy training and evaluation.
//
// Exit status: 0 ok, 1 usage, 2 data/schema/domain error, 3 provider or I/O
// failure. Option values resolve as flag > --config JSON > built-in default,
// and every written artifact gets a sibling "<out>.config.json" with the
// effective settings.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "unav/unav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace unav;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Files

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

struct JsonLine {
  std::size_t line;
  ordered_json value;
};

std::vector<JsonLine> read_jsonl(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::vector<JsonLine> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back({n, ordered_json::parse(line)});
    } catch (const json::exception& e) {
      throw SchemaError(path.string() + ":" + std::to_string(n) + ": invalid JSON: " + e.what());
    }
  }
  return out;
}

// Every bad line is fatal here; only GUI ingestion in `collect` skips lines.
std::vector<Trajectory> read_trajectories_strict(const fs::path& path, Domain default_domain) {
  auto f = read_trajectories(path, default_domain);
  if (!f.errors.empty())
    throw SchemaError(path.string() + ":" + std::to_string(f.errors.front().line) + ": " + f.errors.front().message);
  return f.trajectories;
}

Scene load_scene(const fs::path& path) {
  try {
    return scene_from_json(read_text(path));
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Option binding: one registry per subcommand so that flags, config values
// and the echoed effective config stay in sync.

class Settings {
 public:
  explicit Settings(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "JSON file with option values (flags take precedence)")
        ->check(CLI::ExistingFile);
  }

  template <class T>
  CLI::Option* option(const std::string& name, T& field, const std::string& help) {
    CLI::Option* opt = app_->add_option("--" + name, field, help)->capture_default_str();
    bind(name, opt, field);
    return opt;
  }

  CLI::Option* flag(const std::string& name, bool& field, const std::string& help) {
    CLI::Option* opt = app_->add_flag("--" + name, field, help);
    bind(name, opt, field);
    return opt;
  }

  /// Value must be non-empty after flags and config are applied.
  void require(const std::string& name) { required_.push_back(name); }

  void resolve() {
    if (!config_path_.empty()) {
      json cfg;
      try {
        cfg = json::parse(read_text(config_path_));
      } catch (const json::exception& e) {
        throw UsageError("config " + config_path_ + ": " + e.what());
      }
      if (!cfg.is_object()) throw UsageError("config " + config_path_ + " must be a JSON object");
      // a section named after the subcommand is checked strictly; a flat
      // file may carry keys for other subcommands
      const std::string section = app_->get_name();
      if (cfg.contains(section) && cfg[section].is_object()) {
        cfg = cfg[section];
        for (const auto& [key, value] : cfg.items())
          if (!names_.count(key)) throw UsageError("config " + config_path_ + ": unknown key \"" + key + "\"");
      }
      for (const auto& apply : apply_) apply(cfg);
    }
    const auto eff = effective();
    for (const auto& name : required_) {
      const auto& v = eff.at(name);
      if (v.is_null() || (v.is_string() && v.get<std::string>().empty()) || (v.is_array() && v.empty()))
        throw UsageError("--" + name + " is required");
    }
  }

  ordered_json effective() const {
    ordered_json j;
    j["command"] = app_->get_name();
    for (const auto& echo : echo_) echo(j);
    return j;
  }

 private:
  template <class T>
  void bind(const std::string& name, CLI::Option* opt, T& field) {
    names_.insert(name);
    apply_.push_back([this, name, opt, &field](const json& cfg) {
      if (opt->count() > 0 || !cfg.contains(name)) return;
      try {
        field = cfg.at(name).get<T>();
      } catch (const json::exception&) {
        throw UsageError("config key \"" + name + "\" has the wrong type");
      }
    });
    echo_.push_back([name, &field](ordered_json& j) { j[name] = field; });
  }

  CLI::App* app_;
  std::string config_path_;
  std::set<std::string> names_;
  std::vector<std::string> required_;
  std::vector<std::function<void(const json&)>> apply_;
  std::vector<std::function<void(ordered_json&)>> echo_;
};

void write_sidecar(const fs::path& out, const Settings& s) {
  write_text(fs::path(out.string() + ".config.json"), s.effective().dump(2) + "\n");
}

struct CameraArgs {
  double width = 640.0;
  double height = 480.0;
  double focal = 320.0;

  void add(Settings& s) {
    s.option("width", width, "image width in pixels");
    s.option("height", height, "image height in pixels");
    s.option("focal", focal, "focal length in pixels");
  }
  CameraModel model() const {
    const CameraModel c{width, height, focal};
    c.validate();
    return c;
  }
};

struct RewardArgs {
  std::string mode = "dense";
  RewardConfig cfg;

  void add(Settings& s) {
    s.option("mode", mode, "grounding reward: dense or sparse")->check(CLI::IsMember({"dense", "sparse"}));
    s.option("format-weight", cfg.format_weight, "weight of the format reward");
    s.option("type-weight", cfg.type_weight, "weight of the action-type reward");
    s.option("grounding-weight", cfg.grounding_weight, "weight of the grounding reward");
    s.option("distance-threshold", cfg.distance_threshold, "dense decay radius in pixels");
    s.option("depth-threshold", cfg.depth_threshold, "occlusion gate in meters");
    s.option("sparse-threshold", cfg.sparse_threshold, "sparse hit radius in pixels");
  }
  RewardConfig config() const {
    if (mode != "dense" && mode != "sparse") throw UsageError("--mode must be dense or sparse");
    RewardConfig c = cfg;
    c.mode = mode == "sparse" ? GroundingMode::Sparse : GroundingMode::Dense;
    c.validate();
    return c;
  }
};

struct ProviderArgs {
  std::string provider = "template";
  std::string endpoint;
  double timeout = 30.0;
  int retries = 3;

  void add(Settings& s) {
    s.option("provider", provider, "thought provider: template or remote")
        ->check(CLI::IsMember({"template", "remote"}));
    s.option("endpoint", endpoint, "remote provider URL (default: $UNAV_THOUGHT_ENDPOINT)");
    s.option("timeout", timeout, "remote request timeout in seconds");
    s.option("retries", retries, "remote retries after the first attempt");
  }
  ThoughtProvider resolve() {
    if (provider == "template") return TemplateProvider{};
    if (endpoint.empty())
      if (const char* env = std::getenv("UNAV_THOUGHT_ENDPOINT")) endpoint = env;
    if (endpoint.empty()) throw UsageError("remote provider needs --endpoint or UNAV_THOUGHT_ENDPOINT");
    if (!(timeout > 0.0) || retries < 0) throw UsageError("--timeout must be positive and --retries nonnegative");
    return RemoteProvider{endpoint, timeout, retries};
  }
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(digits);
  o << v;
  return o.str();
}

// ---------------------------------------------------------------------------
// scene

struct SceneArgs {
  std::uint64_t seed = 0;
  std::string out;
  SceneParams params;
};

int run_scene(const SceneArgs& a, const Settings& s) {
  const Scene scene = generate_scene(a.seed, a.params);
  write_text(a.out, scene_to_json(scene) + "\n");
  write_sidecar(a.out, s);
  std::cout << "scene seed " << a.seed << ": " << scene.grid.cols() << "x" << scene.grid.rows() << " cells of "
            << fixed(scene.grid.cell_size(), 2) << " m, " << scene.goals.size() << " goal(s) -> " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// collect

struct CollectArgs {
  std::vector<std::string> scenes;
  std::vector<std::string> gui;
  std::string out;
  std::size_t goal = 0;
  std::string instruction;
  bool no_thin = false;
  bool no_depth = false;
  int view_loop_cap = 8;
  CameraArgs camera;
  ProviderArgs provider;
};

int run_collect(CollectArgs& a, const Settings& s) {
  if (a.scenes.empty() && a.gui.empty()) throw UsageError("collect needs --scene and/or --gui");
  const ThoughtProvider provider = a.provider.resolve();
  const CameraModel cam = a.camera.model();
  const fs::path out(a.out);
  const fs::path root = out.has_parent_path() ? out.parent_path() : fs::path(".");

  std::vector<Trajectory> trajectories;
  std::size_t depth_files = 0;
  for (const auto& path : a.scenes) {
    const Scene scene = load_scene(path);
    if (a.goal >= scene.goals.size()) throw DomainError(path + ": scene has no goal " + std::to_string(a.goal));
    CollectOptions opt;
    opt.goal_index = a.goal;
    opt.thin_waypoints = !a.no_thin;
    opt.render_depth = !a.no_depth;
    opt.view_loop_cap = a.view_loop_cap;
    const std::string instruction =
        a.instruction.empty() ? "Find the " + scene.goals[a.goal].label + "." : a.instruction;
    auto c = collect_embodied(scene, cam, instruction, provider, opt);
    for (std::size_t i = 0; i < c.depths.size(); ++i) {
      const fs::path p = root / *c.trajectory.steps[i].depth_ref;
      fs::create_directories(p.parent_path());
      save_depth_map(p, c.depths[i]);
      ++depth_files;
    }
    trajectories.push_back(std::move(c.trajectory));
  }

  for (const auto& path : a.gui) {
    auto f = ingest_gui(path);
    for (const auto& e : f.errors) std::cerr << "unav: warning: " << path << ":" << e.line << ": " << e.message << "\n";
    for (auto& t : f.trajectories) {
      for (std::size_t i = 0; i < t.steps.size(); ++i) {
        auto& step = t.steps[i];
        if (!step.thought.empty()) continue;
        std::optional<std::string> next;
        if (i + 1 < t.steps.size()) next = t.steps[i + 1].observation_id;
        step.thought = generate_thought(t.instruction, {Domain::Gui, step.action, step.observation_id, next}, provider);
      }
      trajectories.push_back(std::move(t));
    }
  }

  std::ostringstream buf;
  write_trajectories(buf, trajectories);
  write_text(out, buf.str());
  write_sidecar(out, s);
  std::size_t steps = 0;
  for (const auto& t : trajectories) steps += t.steps.size();
  std::cout << "collected " << trajectories.size() << " trajectories, " << steps << " steps, " << depth_files
            << " depth maps -> " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// score

struct ScoreArgs {
  std::string rollouts;
  std::string truth;
  std::string out;
  bool no_depth = false;
  RewardArgs reward;
};

int run_score(const ScoreArgs& a, const Settings& s) {
  const RewardConfig cfg = a.reward.config();
  const auto truth = read_trajectories_strict(a.truth, Domain::Embodied);
  const fs::path root = fs::path(a.truth).has_parent_path() ? fs::path(a.truth).parent_path() : fs::path(".");

  std::map<std::string, std::shared_ptr<const DepthMap>> depth_cache;
  std::map<std::string, StepGroundTruth> gts;
  for (std::size_t i = 0; i < truth.size(); ++i)
    for (const auto& sample : build_samples(truth[i], i)) {
      StepGroundTruth gt{sample.action, sample.gt_point, nullptr, std::nullopt};
      if (sample.camera) gt.image = ImageSize{sample.camera->width, sample.camera->height};
      if (sample.depth_ref && !a.no_depth) {
        auto& d = depth_cache[*sample.depth_ref];
        if (!d) d = std::make_shared<const DepthMap>(load_depth_map(root / *sample.depth_ref));
        gt.depth = d;
      }
      gts.emplace(sample.sample_id, std::move(gt));
    }

  std::ostringstream buf;
  std::size_t n = 0, unparsed = 0;
  double sum = 0.0;
  for (auto& [line, rec] : read_jsonl(a.rollouts)) {
    const std::string where = a.rollouts + ":" + std::to_string(line) + ": ";
    if (!rec.is_object() || !rec.contains("sample_id") || !rec["sample_id"].is_string() || !rec.contains("raw") ||
        !rec["raw"].is_string() || !rec.contains("rollout_id"))
      throw SchemaError(where + "expected {\"sample_id\", \"rollout_id\", \"raw\"}");
    const auto it = gts.find(rec["sample_id"].get<std::string>());
    if (it == gts.end()) throw SchemaError(where + "unknown sample_id " + rec["sample_id"].dump());
    const std::string raw = rec["raw"].get<std::string>();
    const auto r = total_reward(raw, it->second, cfg);
    rec["format"] = r.format;
    rec["type"] = r.type;
    rec["grounding"] = r.grounding;
    rec["total"] = r.total;
    if (const auto parsed = parse_response(raw); !parsed) {
      rec["parse_error"] = std::string(to_string(parsed.error().kind));
      ++unparsed;
    }
    buf << rec.dump() << "\n";
    ++n;
    sum += r.total;
  }
  write_text(a.out, buf.str());
  write_sidecar(a.out, s);
  std::cout << "scored " << n << " rollouts (" << a.reward.mode << "), mean total "
            << (n ? fixed(sum / static_cast<double>(n)) : "n/a") << ", " << unparsed << " unparseable -> " << a.out
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// advantages

struct AdvantageArgs {
  std::string scored;
  std::string out;
  std::string reward_key = "total";
  double eps = kAdvantageEpsilon;
};

int run_advantages(const AdvantageArgs& a, const Settings& s) {
  auto records = read_jsonl(a.scored);
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i].value;
    const std::string where = a.scored + ":" + std::to_string(records[i].line) + ": ";
    if (!rec.is_object() || !rec.contains("sample_id") || !rec["sample_id"].is_string())
      throw SchemaError(where + "missing sample_id");
    if (!rec.contains(a.reward_key) || !rec[a.reward_key].is_number())
      throw SchemaError(where + "missing numeric \"" + a.reward_key + "\"");
    const auto id = rec["sample_id"].get<std::string>();
    if (!groups.count(id)) order.push_back(id);
    groups[id].push_back(i);
  }
  std::size_t degenerate = 0;
  for (const auto& id : order) {
    const auto& idx = groups[id];
    if (idx.size() < 2) throw DomainError("sample " + id + " has a single rollout; groups need at least 2");
    std::vector<double> rewards;
    for (auto i : idx) rewards.push_back(records[i].value[a.reward_key].get<double>());
    const auto adv = advantages(rewards, a.eps);
    degenerate += std::all_of(adv.begin(), adv.end(), [](double x) { return x == 0.0; });
    for (std::size_t k = 0; k < idx.size(); ++k) records[idx[k]].value["advantage"] = adv[k];
  }
  std::ostringstream buf;
  for (const auto& r : records) buf << r.value.dump() << "\n";
  write_text(a.out, buf.str());
  write_sidecar(a.out, s);
  std::cout << "advantages for " << order.size() << " groups (" << degenerate << " without signal) -> " << a.out
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train-toy

struct TrainArgs {
  std::string out;
  std::string task = "grounding";
  std::string target_type = "stop";
  int grid = 16;
  double image_width = 640.0;
  double image_height = 480.0;
  ToyTrainConfig train;
  RewardArgs reward;
};

int run_train(TrainArgs& a, const Settings& s) {
  ToyTask task;
  if (a.task == "grounding") {
    task.kind = ToyTaskKind::Grounding;
  } else if (a.task == "action-type") {
    task.kind = ToyTaskKind::ActionType;
    const auto t = parse_action_name(a.target_type);
    if (!t) throw UsageError("unknown --target-type " + a.target_type);
    task.target_type = *t;
  } else {
    throw UsageError("--task must be grounding or action-type");
  }
  task.grid = a.grid;
  task.width = a.image_width;
  task.height = a.image_height;
  a.train.reward = a.reward.config();
  const auto r = toy_train(task, a.train);
  std::ostringstream buf;
  write_curve_csv(buf, r.curve);
  write_text(a.out, buf.str());
  write_sidecar(a.out, s);
  std::cout << a.reward.mode << " seed " << a.train.seed << ": mean reward " << fixed(r.curve.front().mean_reward)
            << " -> " << fixed(r.final_mean_reward()) << " after " << a.train.steps << " updates (max achievable "
            << fixed(r.max_achievable) << ") -> " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string out;
  // embodied
  std::vector<std::string> scenes;
  std::string trajectories;
  std::string policy = "replay";
  std::size_t goal = 0;
  double threshold = 0.3;
  double stop_hint = 1.0;
  int max_steps = 64;
  unsigned threads = 0;
  bool render = false;
  CameraArgs camera;
  // gui
  std::string truth;
  std::string predictions;
  std::string tolerance = "max";
  double screen_width = 1080.0;
  double screen_height = 2400.0;
};

int run_eval_gui(const EvalArgs& a, const Settings& s) {
  if (a.truth.empty()) throw UsageError("--predictions needs --truth");
  ToleranceRule rule = ToleranceRule::MaxDimension;
  if (a.tolerance == "per-axis") rule = ToleranceRule::PerAxis;
  else if (a.tolerance == "diagonal") rule = ToleranceRule::Diagonal;
  else if (a.tolerance != "max") throw UsageError("--tolerance must be max, per-axis or diagonal");

  std::map<std::string, std::string> preds;
  for (const auto& [line, rec] : read_jsonl(a.predictions)) {
    if (!rec.is_object() || !rec.contains("sample_id") || !rec["sample_id"].is_string() || !rec.contains("raw") ||
        !rec["raw"].is_string())
      throw SchemaError(a.predictions + ":" + std::to_string(line) + ": expected {\"sample_id\", \"raw\"}");
    preds[rec["sample_id"].get<std::string>()] = rec["raw"].get<std::string>();
  }

  const auto truth = read_trajectories_strict(a.truth, Domain::Gui);
  std::ostringstream buf;
  std::size_t n = 0, type_hits = 0, correct = 0, missing = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    for (const auto& sample : build_samples(truth[i], i)) {
      const double w = sample.camera ? sample.camera->width : a.screen_width;
      const double h = sample.camera ? sample.camera->height : a.screen_height;
      const StepGroundTruth gt{sample.action, sample.gt_point, nullptr, std::nullopt};
      bool type_match = false, ok = false;
      const auto it = preds.find(sample.sample_id);
      if (it == preds.end()) {
        ++missing;
      } else if (const auto parsed = parse_response(it->second)) {
        const Action& act = parsed.response().actions.front();
        type_match = action_type(act) == action_type(sample.action);
        ok = gui_step_correct(act, gt, w, h, rule);
      }
      ordered_json j;
      j["sample_id"] = sample.sample_id;
      j["type_match"] = type_match;
      j["correct"] = ok;
      buf << j.dump() << "\n";
      ++n;
      type_hits += type_match;
      correct += ok;
    }
  if (n == 0) throw DomainError("no ground-truth steps in " + a.truth);
  ordered_json agg;
  agg["type_accuracy"] = static_cast<double>(type_hits) / static_cast<double>(n);
  agg["step_sr"] = static_cast<double>(correct) / static_cast<double>(n);
  agg["n"] = n;
  buf << agg.dump() << "\n";
  write_text(a.out, buf.str());
  write_sidecar(a.out, s);
  std::cout << "gui steps " << n << ": type accuracy " << fixed(agg["type_accuracy"].get<double>())
            << ", step success " << fixed(agg["step_sr"].get<double>()) << ", " << missing
            << " without prediction -> " << a.out << "\n";
  return 0;
}

int run_eval(const EvalArgs& a, const Settings& s) {
  if (!a.predictions.empty()) return run_eval_gui(a, s);
  if (a.scenes.empty()) throw UsageError("eval needs --scene (embodied) or --predictions with --truth (gui)");

  std::vector<Scene> scenes;
  for (const auto& p : a.scenes) scenes.push_back(load_scene(p));
  const CameraModel cam = a.camera.model();

  std::vector<EpisodeTask> tasks;
  Policy policy;
  if (a.policy == "replay") {
    if (a.trajectories.empty()) throw UsageError("--policy replay needs --trajectories");
    std::vector<Trajectory> ts;
    for (auto& t : read_trajectories_strict(a.trajectories, Domain::Embodied)) {
      if (t.domain != Domain::Embodied) continue;
      if (!t.scene_seed) throw SchemaError(a.trajectories + ": embodied trajectory without scene_seed");
      const auto it = std::find_if(scenes.begin(), scenes.end(), [&](const Scene& sc) { return sc.seed == *t.scene_seed; });
      if (it == scenes.end())
        throw SchemaError(a.trajectories + ": no --scene with seed " + std::to_string(*t.scene_seed));
      tasks.push_back({&*it, a.goal, t.camera.value_or(cam), t.instruction});
      ts.push_back(std::move(t));
    }
    policy = make_replay_policy(std::move(ts));
  } else if (a.policy == "stop") {
    for (const auto& sc : scenes) tasks.push_back({&sc, a.goal, cam, "Find the goal."});
    policy = [](const Observation&) { return wrap_response("I am done.", act::Stop{}); };
  } else {
    throw UsageError("--policy must be replay or stop");
  }
  if (tasks.empty()) throw DomainError("no episodes to run");

  EpisodeConfig cfg;
  cfg.max_steps = a.max_steps;
  cfg.success_threshold = a.threshold;
  cfg.stop_hint_distance = a.stop_hint;
  cfg.render_observations = a.render;
  const auto results = run_episodes(tasks, policy, PolicyConcurrency::Reentrant, cfg, a.threads);
  std::ostringstream buf;
  write_episode_report(buf, results);
  write_text(a.out, buf.str());
  write_sidecar(a.out, s);
  std::cout << "episodes " << results.size() << ": SR " << fixed(success_rate(results)) << ", SPL "
            << fixed(spl(results)) << " -> " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::vector<std::string> curves;
  std::vector<std::string> episodes;
  std::string out;
};

int run_report(const ReportArgs& a, const Settings& s) {
  if (a.curves.empty() && a.episodes.empty()) throw UsageError("report needs --curve and/or --episodes");
  ordered_json summary;
  summary["curves"] = ordered_json::array();
  summary["episodes"] = ordered_json::array();
  for (const auto& path : a.curves) {
    std::istringstream in(read_text(path));
    std::vector<CurvePoint> curve;
    try {
      curve = read_curve_csv(in);
    } catch (const SchemaError& e) {
      throw SchemaError(path + ": " + e.what());
    }
    if (curve.empty()) throw SchemaError(path + ": empty curve");
    double peak = curve.front().mean_reward, area = 0.0;
    for (const auto& p : curve) {
      peak = std::max(peak, p.mean_reward);
      area += p.mean_reward;
    }
    ordered_json j;
    j["path"] = path;
    j["updates"] = curve.back().update;
    j["initial"] = curve.front().mean_reward;
    j["final"] = curve.back().mean_reward;
    j["peak"] = peak;
    j["mean"] = area / static_cast<double>(curve.size());
    j["final_kl"] = curve.back().kl;
    std::cout << "curve " << path << ": " << curve.back().update << " updates, mean reward "
              << fixed(curve.front().mean_reward) << " -> " << fixed(curve.back().mean_reward) << " (peak "
              << fixed(peak) << ", KL " << fixed(curve.back().kl) << ")\n";
    summary["curves"].push_back(j);
  }
  if (a.curves.size() > 1) {
    const auto& cs = summary["curves"];
    const auto best = std::max_element(cs.begin(), cs.end(), [](const auto& x, const auto& y) {
      return x["final"].template get<double>() < y["final"].template get<double>();
    });
    std::cout << "highest final mean reward: " << (*best)["path"].get<std::string>() << "\n";
  }
  for (const auto& path : a.episodes) {
    const auto lines = read_jsonl(path);
    if (lines.empty()) throw SchemaError(path + ": empty episode report");
    const auto& agg = lines.back().value;
    if (!agg.contains("sr") || !agg.contains("spl") || !agg.contains("n"))
      throw SchemaError(path + ": last line must be the {\"sr\", \"spl\", \"n\"} aggregate");
    std::vector<EpisodeResult> rs;
    try {
      for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
        const auto& j = lines[i].value;
        EpisodeResult r;
        r.success = j.at("success").get<bool>();
        r.path_length = j.at("path_length").get<double>();
        r.shortest_length = j.at("shortest_length").get<double>();
        r.steps_taken = j.at("steps_taken").get<int>();
        r.final_distance = j.at("final_distance").get<double>();
        rs.push_back(r);
      }
    } catch (const json::exception& e) {
      throw SchemaError(path + ": " + e.what());
    }
    if (rs.size() != agg["n"].get<std::size_t>()) throw SchemaError(path + ": aggregate n does not match the episodes");
    ordered_json j;
    j["path"] = path;
    j["n"] = rs.size();
    j["sr"] = success_rate(rs);
    j["spl"] = spl(rs);
    double steps = 0.0;
    for (const auto& r : rs) steps += r.steps_taken;
    j["mean_steps"] = steps / static_cast<double>(rs.size());
    std::cout << "episodes " << path << ": n " << rs.size() << ", SR " << fixed(j["sr"].get<double>()) << ", SPL "
              << fixed(j["spl"].get<double>()) << ", mean steps " << fixed(j["mean_steps"].get<double>(), 2) << "\n";
    summary["episodes"].push_back(j);
  }
  if (!a.out.empty()) {
    write_text(a.out, summary.dump(2) + "\n");
    write_sidecar(a.out, s);
  }
  return 0;
}

std::string one_line(std::string msg) {
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return msg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scene generation, trajectory collection, reward scoring and evaluation for unified navigation agents"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "unav 0.1.0");

  struct Command {
    CLI::App* app;
    std::unique_ptr<Settings> settings;
    std::function<int()> run;
  };
  std::vector<Command> commands;
  auto add = [&](const char* name, const char* help) -> Command& {
    auto* sub = app.add_subcommand(name, help);
    commands.push_back({sub, std::make_unique<Settings>(sub), nullptr});
    return commands.back();
  };

  SceneArgs scene;
  {
    auto& c = add("scene", "generate a synthetic occupancy-grid scene");
    auto& s = *c.settings;
    s.option("seed", scene.seed, "generator seed");
    s.option("out", scene.out, "output scene JSON");
    s.option("cols", scene.params.cols, "grid columns");
    s.option("rows", scene.params.rows, "grid rows");
    s.option("cell-size", scene.params.cell_size, "cell edge in meters");
    s.option("rooms", scene.params.rooms, "number of rooms");
    s.option("density", scene.params.obstacle_density, "obstacle density in [0, 1)");
    s.option("goals", scene.params.goal_count, "number of goals");
    s.option("min-goal-hops", scene.params.min_goal_cells, "minimum BFS hops from spawn to a goal");
    s.option("retries", scene.params.max_retries, "generation attempts before giving up");
    s.require("out");
    c.run = [&] { return run_scene(scene, s); };
  }

  CollectArgs collect;
  {
    auto& c = add("collect", "collect embodied trajectories and/or ingest GUI trajectories");
    auto& s = *c.settings;
    s.option("scene", collect.scenes, "scene JSON files (one trajectory each)");
    s.option("gui", collect.gui, "GUI trajectory JSONL files to ingest");
    s.option("out", collect.out, "output trajectory JSONL; depth maps go under depth/ beside it");
    s.option("goal", collect.goal, "goal index in each scene");
    s.option("instruction", collect.instruction, "instruction text (default: \"Find the <goal label>.\")");
    s.flag("no-thin", collect.no_thin, "keep every path cell as a waypoint");
    s.flag("no-depth", collect.no_depth, "skip depth rendering");
    s.option("view-loop-cap", collect.view_loop_cap, "view actions allowed per waypoint");
    collect.camera.add(s);
    collect.provider.add(s);
    s.require("out");
    c.run = [&] { return run_collect(collect, s); };
  }

  ScoreArgs score;
  {
    auto& c = add("score", "score rollouts against ground-truth trajectories");
    auto& s = *c.settings;
    s.option("rollouts", score.rollouts, "rollout JSONL with sample_id, rollout_id, raw");
    s.option("truth", score.truth, "ground-truth trajectory JSONL");
    s.option("out", score.out, "scored JSONL");
    s.flag("no-depth", score.no_depth, "ignore depth maps (no occlusion gate)");
    score.reward.add(s);
    s.require("rollouts");
    s.require("truth");
    s.require("out");
    c.run = [&] { return run_score(score, s); };
  }

  AdvantageArgs adv;
  {
    auto& c = add("advantages", "group-normalized advantages of scored rollouts");
    auto& s = *c.settings;
    s.option("scored", adv.scored, "scored JSONL (output of score)");
    s.option("out", adv.out, "output JSONL with an advantage field");
    s.option("reward-key", adv.reward_key, "field holding the reward");
    s.option("eps", adv.eps, "denominator stabilizer");
    s.require("scored");
    s.require("out");
    c.run = [&] { return run_advantages(adv, s); };
  }

  TrainArgs train;
  {
    auto& c = add("train-toy", "train a categorical toy policy with group-relative updates");
    auto& s = *c.settings;
    s.option("out", train.out, "output curve CSV");
    s.option("seed", train.train.seed, "run seed (target and sampling)");
    s.option("steps", train.train.steps, "number of updates");
    s.option("lr", train.train.learning_rate, "learning rate");
    s.option("group-size", train.train.group_size, "rollouts per group");
    s.option("kl", train.train.kl_coef, "KL penalty coefficient");
    s.option("temperature", train.train.temperature, "softmax temperature");
    s.option("task", train.task, "grounding or action-type")->check(CLI::IsMember({"grounding", "action-type"}));
    s.option("target-type", train.target_type, "target action for the action-type task");
    s.option("grid", train.grid, "K for the KxK grid of grounding choices");
    s.option("image-width", train.image_width, "toy image width");
    s.option("image-height", train.image_height, "toy image height");
    train.reward.add(s);
    s.require("out");
    c.run = [&] { return run_train(train, s); };
  }

  EvalArgs eval;
  {
    auto& c = add("eval", "run embodied episodes or score GUI predictions");
    auto& s = *c.settings;
    s.option("out", eval.out, "episode report JSONL (embodied) or step JSONL (gui)");
    s.option("scene", eval.scenes, "scene JSON files");
    s.option("trajectories", eval.trajectories, "trajectories to replay");
    s.option("policy", eval.policy, "replay or stop")->check(CLI::IsMember({"replay", "stop"}));
    s.option("goal", eval.goal, "goal index in each scene");
    s.option("threshold", eval.threshold, "success radius in meters");
    s.option("stop-hint", eval.stop_hint, "stop distance quoted to the agent, meters (informational)");
    s.option("max-steps", eval.max_steps, "step budget per episode");
    s.option("threads", eval.threads, "worker threads (0 = hardware)");
    s.flag("render", eval.render, "render depth observations for the policy");
    eval.camera.add(s);
    s.option("truth", eval.truth, "GUI ground-truth trajectory JSONL");
    s.option("predictions", eval.predictions, "GUI prediction JSONL with sample_id, raw");
    s.option("tolerance", eval.tolerance, "GUI point tolerance: max, per-axis or diagonal")
        ->check(CLI::IsMember({"max", "per-axis", "diagonal"}));
    s.option("screen-width", eval.screen_width, "GUI screen width when the truth has no camera");
    s.option("screen-height", eval.screen_height, "GUI screen height when the truth has no camera");
    s.require("out");
    c.run = [&] { return run_eval(eval, s); };
  }

  ReportArgs report;
  {
    auto& c = add("report", "summarize training curves and episode reports");
    auto& s = *c.settings;
    s.option("curve", report.curves, "curve CSV files");
    s.option("episodes", report.episodes, "episode report JSONL files");
    s.option("out", report.out, "optional summary JSON");
    c.run = [&] { return run_report(report, s); };
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (auto& c : commands)
      if (c.app->parsed()) {
        c.settings->resolve();
        return c.run();
      }
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "unav: usage error: " << one_line(e.what()) << "\n";
    return 1;
  } catch (const ProviderFailure& e) {
    std::cerr << "unav: provider failure: " << one_line(e.what()) << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "unav: I/O error: " << one_line(e.what()) << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "unav: I/O error: " << one_line(e.what()) << "\n";
    return 3;
  } catch (const std::exception& e) {
    // schema, domain, generation, no-path and view-loop errors
    std::cerr << "unav: error: " << one_line(e.what()) << "\n";
    return 2;
  }
}
