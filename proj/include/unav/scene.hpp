#pragma once

// Synthetic 2.5D worlds: an occupancy grid of full-height wall columns over a
// flat floor, procedural generation, and per-pixel depth rendering.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <deque>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "unav/error.hpp"
#include "unav/geometry.hpp"
#include "unav/random.hpp"

namespace unav {

struct Cell {
  int row = 0;
  int col = 0;

  friend constexpr bool operator==(Cell, Cell) = default;
  friend constexpr auto operator<=>(Cell, Cell) = default;
};

/// Row-major bitmap of blocked cells. Columns run along +u, rows along +w.
class OccupancyGrid {
 public:
  static constexpr double kDefaultWallHeight = 2.5;

  OccupancyGrid() = default;

  /// All interior cells free, boundary ring blocked.
  OccupancyGrid(int cols, int rows, double cell_size, double wall_height = kDefaultWallHeight)
      : cols_(cols), rows_(rows), cell_size_(cell_size), wall_height_(wall_height) {
    if (cols < 3 || rows < 3) throw DomainError("grid must be at least 3x3 cells");
    if (!(cell_size > 0.0)) throw DomainError("cell_size must be positive");
    if (!(wall_height > 0.0)) throw DomainError("wall_height must be positive");
    blocked_.assign(static_cast<std::size_t>(cols) * rows, 0);
    for (int c = 0; c < cols; ++c) {
      set_blocked({0, c}, true);
      set_blocked({rows - 1, c}, true);
    }
    for (int r = 0; r < rows; ++r) {
      set_blocked({r, 0}, true);
      set_blocked({r, cols - 1}, true);
    }
  }

  int cols() const { return cols_; }
  int rows() const { return rows_; }
  double cell_size() const { return cell_size_; }
  double wall_height() const { return wall_height_; }

  bool in_bounds(Cell c) const { return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_; }

  /// Out-of-bounds cells count as blocked.
  bool blocked(Cell c) const { return !in_bounds(c) || blocked_[index(c)] != 0; }
  bool free(Cell c) const { return !blocked(c); }

  void set_blocked(Cell c, bool value) {
    if (!in_bounds(c)) throw DomainError("cell out of bounds");
    blocked_[index(c)] = value ? 1 : 0;
  }

  /// Floor point at the center of a cell.
  Vec3 cell_center(Cell c) const { return {(c.col + 0.5) * cell_size_, 0.0, (c.row + 0.5) * cell_size_}; }

  /// Cell containing the horizontal position of `p`, if inside the grid.
  std::optional<Cell> cell_of(Vec3 p) const {
    if (!std::isfinite(p.u) || !std::isfinite(p.w)) return std::nullopt;
    const Cell c{static_cast<int>(std::floor(p.w / cell_size_)), static_cast<int>(std::floor(p.u / cell_size_))};
    if (!in_bounds(c)) return std::nullopt;
    return c;
  }

  /// 8-connected move rule: diagonal steps need both orthogonal neighbors free.
  bool can_step(Cell from, int dr, int dc) const {
    const Cell to{from.row + dr, from.col + dc};
    if (blocked(to)) return false;
    if (dr != 0 && dc != 0) return free({from.row + dr, from.col}) && free({from.row, from.col + dc});
    return true;
  }

  /// Boundary cells blocked and sizes consistent.
  bool valid() const {
    if (cols_ < 3 || rows_ < 3 || !(cell_size_ > 0.0)) return false;
    if (blocked_.size() != static_cast<std::size_t>(cols_) * rows_) return false;
    for (int c = 0; c < cols_; ++c)
      if (free({0, c}) || free({rows_ - 1, c})) return false;
    for (int r = 0; r < rows_; ++r)
      if (free({r, 0}) || free({r, cols_ - 1})) return false;
    return true;
  }

  /// Row-major '0'/'1' string.
  std::string occupancy_string() const {
    std::string s(blocked_.size(), '0');
    for (std::size_t i = 0; i < blocked_.size(); ++i)
      if (blocked_[i]) s[i] = '1';
    return s;
  }

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row) * cols_ + c.col; }

  int cols_ = 0;
  int rows_ = 0;
  double cell_size_ = 1.0;
  double wall_height_ = kDefaultWallHeight;
  std::vector<std::uint8_t> blocked_;
};

inline constexpr std::array<std::array<int, 2>, 8> kNeighborSteps{
    {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};

struct Goal {
  std::string label;
  Vec3 position;  // floor point at a cell center

  friend bool operator==(const Goal&, const Goal&) = default;
};

struct Scene {
  OccupancyGrid grid;
  Pose spawn;
  std::vector<Goal> goals;
  std::uint64_t seed = 0;
};

inline bool is_navigable(const OccupancyGrid& grid, Vec3 position) {
  const auto cell = grid.cell_of(position);
  return cell && grid.free(*cell);
}

inline bool is_navigable(const Scene& scene, Vec3 position) { return is_navigable(scene.grid, position); }

/// Cells reachable from `start` under the 8-connected move rule.
inline std::vector<std::uint8_t> reachable_cells(const OccupancyGrid& grid, Cell start) {
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(grid.cols()) * grid.rows(), 0);
  if (grid.blocked(start)) return seen;
  auto idx = [&](Cell c) { return static_cast<std::size_t>(c.row) * grid.cols() + c.col; };
  std::deque<Cell> queue{start};
  seen[idx(start)] = 1;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (auto [dr, dc] : kNeighborSteps) {
      if (!grid.can_step(c, dr, dc)) continue;
      const Cell n{c.row + dr, c.col + dc};
      if (!seen[idx(n)]) {
        seen[idx(n)] = 1;
        queue.push_back(n);
      }
    }
  }
  return seen;
}

struct SceneParams {
  int rooms = 1;  // >1 splits the interior into a grid of rooms joined by doorways
  double obstacle_density = 0.12;
  int cols = 20;
  int rows = 20;
  double cell_size = 0.5;
  int goal_count = 1;
  int min_goal_cells = 4;  // minimum 8-connected BFS hops from spawn to each goal
  int max_retries = 64;
};

namespace detail {

inline constexpr std::array<const char*, 8> kGoalLabels{"chair", "bed", "sofa", "toilet", "tv_monitor", "plant",
                                                        "table", "sink"};

inline void carve_rooms(OccupancyGrid& grid, int rooms, Rng& rng, std::vector<std::uint8_t>& keep_free) {
  if (rooms <= 1) return;
  const int across = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(rooms))));
  const int down = (rooms + across - 1) / across;
  const int inner_cols = grid.cols() - 2;
  const int inner_rows = grid.rows() - 2;
  auto mark_door = [&](Cell c) { keep_free[static_cast<std::size_t>(c.row) * grid.cols() + c.col] = 1; };

  std::vector<int> wall_cols;
  std::vector<int> wall_rows;
  for (int i = 1; i < across; ++i) wall_cols.push_back(1 + i * inner_cols / across);
  for (int i = 1; i < down; ++i) wall_rows.push_back(1 + i * inner_rows / down);

  for (int wc : wall_cols)
    for (int r = 1; r < grid.rows() - 1; ++r) grid.set_blocked({r, wc}, true);
  for (int wr : wall_rows)
    for (int c = 1; c < grid.cols() - 1; ++c) grid.set_blocked({wr, c}, true);

  // one two-cell doorway per wall segment between adjacent rooms
  std::vector<int> row_edges{0};
  row_edges.insert(row_edges.end(), wall_rows.begin(), wall_rows.end());
  row_edges.push_back(grid.rows() - 1);
  std::vector<int> col_edges{0};
  col_edges.insert(col_edges.end(), wall_cols.begin(), wall_cols.end());
  col_edges.push_back(grid.cols() - 1);

  for (int wc : wall_cols)
    for (std::size_t k = 0; k + 1 < row_edges.size(); ++k) {
      const int lo = row_edges[k] + 1;
      const int hi = row_edges[k + 1] - 1;
      if (hi - lo < 1) continue;
      const int r = lo + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo)));
      for (int d = 0; d < 2; ++d) {
        grid.set_blocked({r + d, wc}, false);
        mark_door({r + d, wc});
        mark_door({r + d, wc - 1});
        mark_door({r + d, wc + 1});
      }
    }
  for (int wr : wall_rows)
    for (std::size_t k = 0; k + 1 < col_edges.size(); ++k) {
      const int lo = col_edges[k] + 1;
      const int hi = col_edges[k + 1] - 1;
      if (hi - lo < 1) continue;
      const int c = lo + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo)));
      for (int d = 0; d < 2; ++d) {
        grid.set_blocked({wr, c + d}, false);
        mark_door({wr, c + d});
        mark_door({wr - 1, c + d});
        mark_door({wr + 1, c + d});
      }
    }
}

inline std::vector<int> bfs_hops(const OccupancyGrid& grid, Cell start) {
  std::vector<int> hops(static_cast<std::size_t>(grid.cols()) * grid.rows(), -1);
  auto idx = [&](Cell c) { return static_cast<std::size_t>(c.row) * grid.cols() + c.col; };
  std::deque<Cell> queue{start};
  hops[idx(start)] = 0;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (auto [dr, dc] : kNeighborSteps) {
      if (!grid.can_step(c, dr, dc)) continue;
      const Cell n{c.row + dr, c.col + dc};
      if (hops[idx(n)] < 0) {
        hops[idx(n)] = hops[idx(c)] + 1;
        queue.push_back(n);
      }
    }
  }
  return hops;
}

}  // namespace detail

/// Deterministic for a fixed (seed, params). Spawn yaw is one of the four
/// cardinal headings; every goal is reachable from the spawn cell.
inline Scene generate_scene(std::uint64_t seed, const SceneParams& params = {}) {
  if (params.cols < 8 || params.rows < 8) throw DomainError("scene size must be at least 8x8 cells");
  if (!(params.obstacle_density >= 0.0 && params.obstacle_density <= 1.0))
    throw DomainError("obstacle_density must lie in [0, 1]");
  if (params.goal_count < 1) throw DomainError("goal_count must be at least 1");
  if (params.rooms < 1) throw DomainError("rooms must be at least 1");

  Rng rng(seed);
  for (int attempt = 0; attempt <= params.max_retries; ++attempt) {
    OccupancyGrid grid(params.cols, params.rows, params.cell_size);
    std::vector<std::uint8_t> keep_free(static_cast<std::size_t>(params.cols) * params.rows, 0);
    detail::carve_rooms(grid, params.rooms, rng, keep_free);

    for (int r = 1; r < params.rows - 1; ++r)
      for (int c = 1; c < params.cols - 1; ++c) {
        const double draw = uniform01(rng);
        if (keep_free[static_cast<std::size_t>(r) * params.cols + c]) continue;
        if (grid.free({r, c}) && draw < params.obstacle_density) grid.set_blocked({r, c}, true);
      }

    std::vector<Cell> free_cells;
    for (int r = 1; r < params.rows - 1; ++r)
      for (int c = 1; c < params.cols - 1; ++c)
        if (grid.free({r, c})) free_cells.push_back({r, c});
    if (free_cells.empty()) continue;

    const Cell spawn = free_cells[uniform_index(rng, free_cells.size())];
    const auto hops = detail::bfs_hops(grid, spawn);
    std::vector<Cell> candidates;
    for (Cell c : free_cells)
      if (hops[static_cast<std::size_t>(c.row) * params.cols + c.col] >= params.min_goal_cells) candidates.push_back(c);
    if (static_cast<int>(candidates.size()) < params.goal_count) continue;

    Scene scene;
    scene.seed = seed;
    const double yaw = 90.0 * static_cast<double>(uniform_index(rng, 4));
    scene.spawn = Pose::standing_at(grid.cell_center(spawn), yaw);
    for (int g = 0; g < params.goal_count; ++g) {
      const std::size_t pick = uniform_index(rng, candidates.size());
      const Cell cell = candidates[pick];
      candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
      const char* label = detail::kGoalLabels[uniform_index(rng, detail::kGoalLabels.size())];
      scene.goals.push_back({label, grid.cell_center(cell)});
    }
    scene.grid = std::move(grid);
    return scene;
  }
  throw GenerationError("no navigable layout after " + std::to_string(params.max_retries + 1) + " attempts");
}

// ---------------------------------------------------------------------------
// Depth rendering

/// Per-pixel depth along the camera z axis; +inf marks rays that hit nothing.
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw DomainError("depth map dimensions must be positive");
    depths_.assign(static_cast<std::size_t>(width) * height, std::numeric_limits<float>::infinity());
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const float> data() const { return depths_; }

  float at(int x, int y) const { return depths_[static_cast<std::size_t>(y) * width_ + x]; }
  void set(int x, int y, float d) { depths_[static_cast<std::size_t>(y) * width_ + x] = d; }

  /// Depth of the pixel containing a continuous point; x == width and
  /// y == height fold into the last column/row. Out of range: nullopt.
  std::optional<float> sample(PixelPoint p) const {
    if (!(p.x >= 0.0 && p.y >= 0.0 && p.x <= width_ && p.y <= height_)) return std::nullopt;
    const int x = std::min(static_cast<int>(p.x), width_ - 1);
    const int y = std::min(static_cast<int>(p.y), height_ - 1);
    return at(x, y);
  }

  friend bool operator==(const DepthMap&, const DepthMap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> depths_;
};

/// Ray parameter t of the first surface hit by origin + t * dir (t >= 0),
/// or +inf. Surfaces: the floor v = 0 inside the grid and blocked cells as
/// columns spanning v in [-wall_height, 0]. Exact voxel traversal.
inline double cast_ray(const OccupancyGrid& grid, Vec3 origin, Vec3 dir) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double cs = grid.cell_size();
  const double top = -grid.wall_height();
  const double t_floor = dir.v > 0.0 ? -origin.v / dir.v : kInf;

  Cell cell{static_cast<int>(std::floor(origin.w / cs)), static_cast<int>(std::floor(origin.u / cs))};
  const int step_c = dir.u > 0.0 ? 1 : (dir.u < 0.0 ? -1 : 0);
  const int step_r = dir.w > 0.0 ? 1 : (dir.w < 0.0 ? -1 : 0);
  double t_next_c = step_c > 0 ? ((cell.col + 1) * cs - origin.u) / dir.u
                    : step_c < 0 ? (cell.col * cs - origin.u) / dir.u
                                 : kInf;
  double t_next_r = step_r > 0 ? ((cell.row + 1) * cs - origin.w) / dir.w
                    : step_r < 0 ? (cell.row * cs - origin.w) / dir.w
                                 : kInf;
  const double dt_c = step_c != 0 ? cs / std::abs(dir.u) : kInf;
  const double dt_r = step_r != 0 ? cs / std::abs(dir.w) : kInf;

  double t_enter = 0.0;
  for (;;) {
    const double t_exit = std::min(t_next_c, t_next_r);
    if (!grid.in_bounds(cell)) return kInf;
    if (grid.blocked(cell)) {
      const double v_enter = origin.v + t_enter * dir.v;
      if (v_enter >= top && v_enter <= 0.0) return t_enter;
      if (v_enter < top && dir.v > 0.0) {
        const double t_top = (top - origin.v) / dir.v;
        if (t_top <= t_exit) return t_top;
      }
    } else if (t_floor <= t_exit) {
      return t_floor;
    }
    if (t_exit == kInf) return kInf;
    // above every wall and not descending: nothing left to hit
    if (dir.v <= 0.0 && origin.v + t_exit * dir.v < top) return kInf;
    t_enter = t_exit;
    if (t_next_c <= t_next_r) {
      cell.col += step_c;
      t_next_c += dt_c;
    } else {
      cell.row += step_r;
      t_next_r += dt_r;
    }
  }
}

/// Depth along the camera z axis of the ray through a continuous pixel.
inline double cast_depth(const OccupancyGrid& grid, const Pose& pose, const CameraModel& cam, PixelPoint pixel) {
  const Vec3 d_cam{(pixel.x - cam.width / 2.0) / cam.focal, (pixel.y - cam.height / 2.0) / cam.focal, 1.0};
  return cast_ray(grid, pose.position, pose.rotation.rotate(d_cam));
}

inline DepthMap render_depth(const Scene& scene, const Pose& pose, const CameraModel& cam) {
  cam.validate();
  if (!is_navigable(scene, pose.position)) throw DomainError("render_depth: pose is not inside a navigable cell");
  const int width = static_cast<int>(std::lround(cam.width));
  const int height = static_cast<int>(std::lround(cam.height));
  DepthMap map(width, height);
  const Vec3 ex = pose.rotation.rotate({1.0, 0.0, 0.0});
  const Vec3 ey = pose.rotation.rotate({0.0, 1.0, 0.0});
  const Vec3 ez = pose.rotation.rotate({0.0, 0.0, 1.0});
  for (int y = 0; y < height; ++y) {
    const double b = (y + 0.5 - cam.height / 2.0) / cam.focal;
    for (int x = 0; x < width; ++x) {
      const double a = (x + 0.5 - cam.width / 2.0) / cam.focal;
      const Vec3 dir = a * ex + b * ey + ez;
      map.set(x, y, static_cast<float>(cast_ray(scene.grid, pose.position, dir)));
    }
  }
  return map;
}

// ---------------------------------------------------------------------------
// Files

namespace detail {

inline void put_u32_le(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                     static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(b, 4);
}

inline std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline nlohmann::ordered_json vec_json(Vec3 v) { return nlohmann::ordered_json::array({v.u, v.v, v.w}); }

inline Vec3 vec_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw SchemaError("expected [u, v, w]");
  for (const auto& x : j)
    if (!x.is_number()) throw SchemaError("expected numeric coordinates");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

/// Canonical scene JSON: keys in a fixed order, compact dump.
inline std::string scene_to_json(const Scene& scene) {
  nlohmann::ordered_json j;
  j["cell_size"] = scene.grid.cell_size();
  j["cols"] = scene.grid.cols();
  j["rows"] = scene.grid.rows();
  j["occupancy"] = scene.grid.occupancy_string();
  const auto& r = scene.spawn.rotation;
  j["spawn"] = {{"position", detail::vec_json(scene.spawn.position)},
                {"rotation", nlohmann::ordered_json::array({r.s(), r.x(), r.y(), r.z()})},
                {"pitch_deg", scene.spawn.pitch_deg}};
  j["goals"] = nlohmann::ordered_json::array();
  for (const auto& g : scene.goals)
    j["goals"].push_back({{"label", g.label}, {"position", detail::vec_json(g.position)}});
  j["seed"] = scene.seed;
  if (scene.grid.wall_height() != OccupancyGrid::kDefaultWallHeight) j["wall_height"] = scene.grid.wall_height();
  return j.dump();
}

inline Scene scene_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("scene: invalid JSON: ") + e.what());
  }
  try {
    const double cell_size = j.at("cell_size").get<double>();
    const int cols = j.at("cols").get<int>();
    const int rows = j.at("rows").get<int>();
    const auto occ = j.at("occupancy").get<std::string>();
    const double wall_height = j.value("wall_height", OccupancyGrid::kDefaultWallHeight);
    if (occ.size() != static_cast<std::size_t>(cols) * rows) throw SchemaError("scene: occupancy length mismatch");
    Scene scene;
    scene.grid = OccupancyGrid(cols, rows, cell_size, wall_height);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        const char ch = occ[static_cast<std::size_t>(r) * cols + c];
        if (ch != '0' && ch != '1') throw SchemaError("scene: occupancy must contain only 0/1");
        scene.grid.set_blocked({r, c}, ch == '1');
      }
    if (!scene.grid.valid()) throw SchemaError("scene: boundary cells must be blocked");
    const auto& sp = j.at("spawn");
    const auto& q = sp.at("rotation");
    if (!q.is_array() || q.size() != 4) throw SchemaError("scene: spawn.rotation must be [s, x, y, z]");
    scene.spawn.position = detail::vec_from_json(sp.at("position"));
    scene.spawn.rotation = UnitRotation(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
    scene.spawn.pitch_deg = sp.value("pitch_deg", 0.0);
    for (const auto& g : j.at("goals"))
      scene.goals.push_back({g.at("label").get<std::string>(), detail::vec_from_json(g.at("position"))});
    scene.seed = j.at("seed").get<std::uint64_t>();
    if (!is_navigable(scene, scene.spawn.position)) throw SchemaError("scene: spawn is not navigable");
    for (const auto& g : scene.goals)
      if (!is_navigable(scene, g.position)) throw SchemaError("scene: goal '" + g.label + "' is not navigable");
    return scene;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("scene: ") + e.what());
  } catch (const DomainError& e) {
    throw SchemaError(std::string("scene: ") + e.what());
  }
}

inline constexpr std::array<char, 4> kDepthMagic{'N', 'V', 'D', 'M'};

/// 16-byte header (magic, u32 width, u32 height, u32 reserved = 0), then
/// row-major little-endian float32. +inf is written as FLT_MAX.
inline void write_depth_map(std::ostream& out, const DepthMap& map) {
  out.write(kDepthMagic.data(), 4);
  detail::put_u32_le(out, static_cast<std::uint32_t>(map.width()));
  detail::put_u32_le(out, static_cast<std::uint32_t>(map.height()));
  detail::put_u32_le(out, 0);
  for (float d : map.data()) {
    const float stored = std::isinf(d) ? std::numeric_limits<float>::max() : d;
    detail::put_u32_le(out, std::bit_cast<std::uint32_t>(stored));
  }
}

inline DepthMap read_depth_map(std::istream& in) {
  unsigned char header[16];
  if (!in.read(reinterpret_cast<char*>(header), 16)) throw SchemaError("depth map: truncated header");
  if (std::memcmp(header, kDepthMagic.data(), 4) != 0) throw SchemaError("depth map: bad magic");
  const std::uint32_t width = detail::get_u32_le(header + 4);
  const std::uint32_t height = detail::get_u32_le(header + 8);
  if (width == 0 || height == 0 || width > (1u << 16) || height > (1u << 16))
    throw SchemaError("depth map: bad dimensions");
  DepthMap map(static_cast<int>(width), static_cast<int>(height));
  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height * 4);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw SchemaError("depth map: truncated raster");
  for (std::uint32_t y = 0; y < height; ++y)
    for (std::uint32_t x = 0; x < width; ++x) {
      const float d = std::bit_cast<float>(detail::get_u32_le(raw.data() + 4 * (static_cast<std::size_t>(y) * width + x)));
      map.set(static_cast<int>(x), static_cast<int>(y), d == std::numeric_limits<float>::max() ? std::numeric_limits<float>::infinity() : d);
    }
  return map;
}

inline void save_depth_map(const std::filesystem::path& path, const DepthMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_depth_map(out, map);
  if (!out) throw IoError("write failed: " + path.string());
}

inline DepthMap load_depth_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return read_depth_map(in);
}

}  // namespace unav
