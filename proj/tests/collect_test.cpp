#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "fixtures.hpp"
#include "unav/collect.hpp"

using namespace unav;
using unav::testing::l_path_scene;

namespace {

const CameraModel kCam{640.0, 480.0, 320.0};

std::vector<ActionType> types(const Trajectory& t) {
  std::vector<ActionType> out;
  for (const auto& s : t.steps) out.push_back(action_type(s.action));
  return out;
}

class StubServer {
 public:
  explicit StubServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/think", [this, handler](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      handler(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/think"; }

  std::atomic<int> hits{0};

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto p = std::filesystem::temp_directory_path() / ("unav_test_" + name);
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST(Collect, LPathHandTrace) {
  const Scene s = l_path_scene();
  const auto c = collect_embodied(s, kCam, "go to the chair", TemplateProvider{});
  const std::vector<Action> expected{act::TurnAround{}, act::MoveTo{{320, 432}}, act::TurnRight{},
                                     act::MoveTo{{320, 432}}, act::Stop{}};
  ASSERT_EQ(c.trajectory.steps.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(action_type(c.trajectory.steps[i].action), action_type(expected[i])) << i;
    if (const auto p = target_point(expected[i])) {
      const auto got = *target_point(c.trajectory.steps[i].action);
      EXPECT_NEAR(got.x, p->x, 1e-9) << i;
      EXPECT_NEAR(got.y, p->y, 1e-9) << i;
    }
  }
  EXPECT_EQ(c.waypoints.points.size(), 3u);
  EXPECT_EQ(c.final_pose.floor_point(), s.goals[0].position);
  EXPECT_EQ(c.depths.size(), 5u);
  EXPECT_EQ(*c.trajectory.steps[1].depth_ref, "depth/42_1.nvdm");
  EXPECT_EQ(c.trajectory.steps[0].observation_id, "pose:42:0");
}

TEST(Collect, UnthinnedPathHasOneMovePerCell) {
  const Scene s = l_path_scene();
  CollectOptions opt;
  opt.thin_waypoints = false;
  opt.render_depth = false;
  const auto c = collect_embodied(s, kCam, "go", TemplateProvider{}, opt);
  int moves = 0;
  for (const auto& st : c.trajectory.steps) moves += action_type(st.action) == ActionType::MoveTo;
  EXPECT_EQ(moves, 10);
  EXPECT_FALSE(c.trajectory.thinned);
  EXPECT_FALSE(c.trajectory.steps[0].depth_ref.has_value());
  // the first cell ahead is 0.5 m away, below the bottom edge of a level view
  const auto t = types(c.trajectory);
  EXPECT_EQ(t[0], ActionType::TurnAround);
  EXPECT_EQ(t[1], ActionType::LookDown);
}

TEST(Collect, TargetBehindTurnsAround) {
  Scene s = l_path_scene();
  const auto c = collect_embodied(s, kCam, "go", TemplateProvider{});
  EXPECT_EQ(action_type(c.trajectory.steps.front().action), ActionType::TurnAround);
}

TEST(Collect, TargetInViewMovesDirectly) {
  Scene s = l_path_scene();
  s.spawn = Pose::standing_at(s.grid.cell_center({1, 1}), 0.0);
  const auto t = types(collect_embodied(s, kCam, "go", TemplateProvider{}).trajectory);
  ASSERT_GE(t.size(), 2u);
  EXPECT_EQ(t[0], ActionType::MoveTo);
}

TEST(Collect, RandomScenesTerminateAtGoal) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    SceneParams p;
    p.rooms = 1 + static_cast<int>(seed % 3);
    const Scene s = generate_scene(seed, p);
    CollectOptions opt;
    opt.render_depth = false;
    const auto c = collect_embodied(s, kCam, "find it", TemplateProvider{}, opt);
    ASSERT_EQ(action_type(c.trajectory.steps.back().action), ActionType::Stop);
    EXPECT_EQ(c.final_pose.floor_point(), s.goals[0].position);
    for (const auto& st : c.trajectory.steps)
      if (const auto* m = std::get_if<act::MoveTo>(&st.action)) {
        EXPECT_GE(m->point.x, 0.0);
        EXPECT_LE(m->point.x, kCam.width);
        EXPECT_GE(m->point.y, 0.0);
        EXPECT_LE(m->point.y, kCam.height);
      }
  }
}

TEST(Collect, MoveTargetsHaveFiniteDepth) {
  const Scene s = generate_scene(5);
  const auto c = collect_embodied(s, kCam, "go", TemplateProvider{});
  for (std::size_t i = 0; i < c.trajectory.steps.size(); ++i)
    if (const auto* m = std::get_if<act::MoveTo>(&c.trajectory.steps[i].action))
      EXPECT_TRUE(std::isfinite(cast_depth(s.grid, c.poses[i], kCam, m->point)));
}

TEST(Collect, ViewLoopCap) {
  const Scene s = l_path_scene();
  CollectOptions opt;
  opt.view_loop_cap = 0;
  EXPECT_THROW(collect_embodied(s, kCam, "go", TemplateProvider{}, opt), ViewLoopExceeded);
}

TEST(AlignTarget, BranchOrder) {
  const Pose pose = Pose::standing_at({0, 0, 0}, 0.0);
  EXPECT_EQ(align_target({0, 0, -3}, pose, kCam).decision, ViewDecision::TurnAround);
  EXPECT_EQ(align_target({-20, 0, 3}, pose, kCam).decision, ViewDecision::TurnLeft);
  EXPECT_EQ(align_target({20, 0, 3}, pose, kCam).decision, ViewDecision::TurnRight);
  EXPECT_EQ(align_target({0, 0, 0.5}, pose, kCam).decision, ViewDecision::LookDown);
  EXPECT_EQ(align_target({3, 0, 0}, pose, kCam).decision, ViewDecision::TurnRight);
  EXPECT_EQ(align_target({-3, 0, 0}, pose, kCam).decision, ViewDecision::TurnLeft);
  EXPECT_EQ(align_target({0, -10, 3}, pose, kCam).decision, ViewDecision::AboveView);
  const auto in = align_target({0, 0, 2.5}, pose, kCam);
  EXPECT_EQ(in.decision, ViewDecision::InView);
  EXPECT_NEAR(in.pixel.x, 320.0, 1e-9);
  EXPECT_NEAR(in.pixel.y, 432.0, 1e-9);
}

TEST(Thoughts, TemplateSentences) {
  EXPECT_EQ(template_thought(act::MoveTo{{123, 300}}),
            "Moving toward the visible waypoint at (123, 300) to continue along the planned path.");
  EXPECT_EQ(template_thought(act::TurnAround{}),
            "Nothing ahead leads toward the target, so I turn around to search behind me.");
  EXPECT_EQ(template_thought(act::Scroll{{1.4, 2.6}, {3, 4}}),
            "Scrolling from (1, 3) to (3, 4) should reveal the content I still need.");
}

TEST(Thoughts, RemoteEchoStub) {
  StubServer stub([](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    EXPECT_NE(body.at("prompt").get<std::string>().find("turn_left"), std::string::npos);
    res.set_content(R"({"text": "ok"})", "application/json");
  });
  RemoteProvider p{stub.url(), 5.0, 3};
  const std::string t = generate_thought("task", {Domain::Embodied, act::TurnLeft{}, "pose:1:0", std::nullopt}, p);
  EXPECT_EQ(t, "ok");
}

TEST(Thoughts, RemoteFailureAfterRetries) {
  StubServer stub([](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  RemoteProvider p{stub.url(), 5.0, 3};
  EXPECT_THROW(generate_thought("task", {Domain::Gui, act::NavigateHome{}, "s0", "s1"}, p), ProviderFailure);
  EXPECT_EQ(stub.hits.load(), 4);
}

TEST(Thoughts, RemoteUnreachable) {
  RemoteProvider p{"http://127.0.0.1:1/think", 0.5, 1};
  EXPECT_THROW(generate_thought("task", {Domain::Gui, act::NavigateHome{}, "s0", std::nullopt}, p), ProviderFailure);
  RemoteProvider bad{"not a url", 0.5, 0};
  EXPECT_THROW(generate_thought("task", {Domain::Gui, act::NavigateHome{}, "s0", std::nullopt}, bad), ProviderFailure);
}

TEST(Samples, HistoryGrows) {
  Trajectory t;
  t.instruction = "do it";
  t.domain = Domain::Gui;
  t.steps = {{"s0", std::nullopt, "a", act::Click{{1, 2}}, PixelPoint{1, 2}},
             {"s1", std::nullopt, "b", act::NavigateBack{}, std::nullopt},
             {"s2", std::nullopt, "c", act::Click{{3, 4}}, PixelPoint{3, 4}}};
  const auto samples = build_samples(t, 4);
  ASSERT_EQ(samples.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(samples[i].history.size(), i);
  EXPECT_EQ(samples[2].sample_id, "4:2");
  EXPECT_EQ(samples[2].history[1].thought, "b");
}

TEST(TrajectoryJson, RoundTrip) {
  const Scene s = generate_scene(12);
  const auto c = collect_embodied(s, kCam, "find the sofa", TemplateProvider{});
  const auto j = trajectory_to_json(c.trajectory);
  const auto back = trajectory_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back, c.trajectory);
}

TEST(IngestGui, Fixture) {
  const auto path = temp_file("gui.jsonl",
                              R"({"instruction": "open settings", "steps": [)"
                              R"({"obs": "s0", "thought": "", "action": {"action": "click", "point": [10, 20]}},)"
                              R"({"obs": "s1", "thought": "", "action": {"action": "click", "point": [30, 40]}}]})"
                              "\n"
                              R"({"instruction": "bad", "steps": [{"obs": "s0", "action": {"action": "fly"}}]})"
                              "\n\n");
  const auto f = ingest_gui(path);
  ASSERT_EQ(f.trajectories.size(), 1u);
  EXPECT_EQ(f.trajectories[0].steps.size(), 2u);
  EXPECT_EQ(f.trajectories[0].domain, Domain::Gui);
  EXPECT_EQ(*f.trajectories[0].steps[1].gt_point, (PixelPoint{30, 40}));
  ASSERT_EQ(f.errors.size(), 1u);
  EXPECT_EQ(f.errors[0].line, 2u);
  std::filesystem::remove(path);
}

TEST(IngestGui, EmptyAndMissing) {
  const auto path = temp_file("empty.jsonl", "");
  EXPECT_TRUE(ingest_gui(path).trajectories.empty());
  std::filesystem::remove(path);
  EXPECT_THROW(ingest_gui("/nonexistent/unav.jsonl"), IoError);
}

TEST(TrajectoryJson, SchemaChecks) {
  const auto parse = [](const char* text) { return trajectory_from_json(nlohmann::json::parse(text)); };
  // embodied must end in stop
  EXPECT_THROW(parse(R"({"instruction": "x", "steps": [{"obs": "o", "action": {"action": "turn_left"}}]})"),
               SchemaError);
  // gt_point on a point-free action
  EXPECT_THROW(parse(R"({"instruction": "x", "steps": [{"obs": "o", "action": {"action": "stop"}, "gt_point": [1, 2]}]})"),
               SchemaError);
  // point outside the camera
  EXPECT_THROW(parse(R"({"instruction": "x", "camera": {"w": 64, "h": 48, "f": 32}, "steps": [)"
                     R"({"obs": "o", "action": {"action": "moveto", "point": [100, 2]}},)"
                     R"({"obs": "p", "action": {"action": "stop"}}]})"),
               SchemaError);
  EXPECT_THROW(parse(R"({"instruction": "x", "steps": []})"), SchemaError);
}
