#pragma once

// Shortest paths on the 8-connected occupancy grid.
//
// Costs are kept as exact counts of straight and diagonal moves
// (a + b*sqrt(2) cell units) and compared exactly, so A* and the Dijkstra
// oracle agree bit for bit whenever they find equal-cost paths.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include "unav/error.hpp"
#include "unav/scene.hpp"

namespace unav {

struct GridCost {
  std::int64_t straight = 0;
  std::int64_t diagonal = 0;

  /// Length in meters.
  double meters(double cell_size) const {
    return (static_cast<double>(straight) + static_cast<double>(diagonal) * std::numbers::sqrt2) * cell_size;
  }

  friend constexpr GridCost operator+(GridCost a, GridCost b) {
    return {a.straight + b.straight, a.diagonal + b.diagonal};
  }
  friend constexpr bool operator==(GridCost, GridCost) = default;

  /// Exact three-way comparison of a1 + b1 sqrt2 against a2 + b2 sqrt2.
  friend constexpr int compare(GridCost x, GridCost y) {
    const std::int64_t da = x.straight - y.straight;  // x < y  <=>  da < db * sqrt2
    const std::int64_t db = y.diagonal - x.diagonal;
    if (da == 0 && db == 0) return 0;
    if (da >= 0 && db <= 0) return 1;
    if (da <= 0 && db >= 0) return -1;
    // same strict sign: compare squares (equality impossible, sqrt2 is irrational)
    const bool mag_lt = da * da < 2 * db * db;  // |da| < |db| sqrt2
    if (da > 0) return mag_lt ? -1 : 1;
    return mag_lt ? 1 : -1;
  }
  friend constexpr bool operator<(GridCost x, GridCost y) { return compare(x, y) < 0; }
};

/// Octile distance: exact cost of the unobstructed path between two cells.
inline constexpr GridCost octile(Cell a, Cell b) {
  const std::int64_t dr = a.row > b.row ? a.row - b.row : b.row - a.row;
  const std::int64_t dc = a.col > b.col ? a.col - b.col : b.col - a.col;
  const std::int64_t diag = dr < dc ? dr : dc;
  return {(dr > dc ? dr : dc) - diag, diag};
}

struct Waypoints {
  std::vector<Vec3> points;  // floor points at cell centers, start first
  std::vector<Cell> cells;
  GridCost moves;
  double cost = 0.0;  // meters
};

namespace detail {

inline Cell endpoint_cell(const OccupancyGrid& grid, Vec3 p, const char* what) {
  const auto c = grid.cell_of(p);
  if (!c || grid.blocked(*c)) throw DomainError(std::string("path ") + what + " is not navigable");
  return *c;
}

inline GridCost step_cost(int dr, int dc) { return (dr != 0 && dc != 0) ? GridCost{0, 1} : GridCost{1, 0}; }

struct OpenEntry {
  GridCost f;
  Cell cell;
};

// min-heap on f, ties by (row, col)
struct OpenAfter {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    const int c = compare(a.f, b.f);
    if (c != 0) return c > 0;
    return b.cell < a.cell;
  }
};

inline Waypoints build_waypoints(const OccupancyGrid& grid, const std::vector<int>& parent, Cell start, Cell goal,
                                 GridCost total) {
  Waypoints out;
  const auto idx = [&](Cell c) { return c.row * grid.cols() + c.col; };
  for (Cell c = goal;;) {
    out.cells.push_back(c);
    if (c == start) break;
    const int p = parent[static_cast<std::size_t>(idx(c))];
    c = {p / grid.cols(), p % grid.cols()};
  }
  std::reverse(out.cells.begin(), out.cells.end());
  for (Cell c : out.cells) out.points.push_back(grid.cell_center(c));
  out.moves = total;
  out.cost = total.meters(grid.cell_size());
  return out;
}

}  // namespace detail

/// A* over 8-connected moves with octile heuristic. Open-list ties are
/// expanded in lexicographic (row, col) order.
inline Waypoints shortest_path(const OccupancyGrid& grid, Vec3 start, Vec3 goal) {
  const Cell s = detail::endpoint_cell(grid, start, "start");
  const Cell g = detail::endpoint_cell(grid, goal, "goal");
  const std::size_t n = static_cast<std::size_t>(grid.cols()) * grid.rows();
  const auto idx = [&](Cell c) { return static_cast<std::size_t>(c.row) * grid.cols() + c.col; };

  std::vector<GridCost> best(n);
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::uint8_t> closed(n, 0);
  std::vector<int> parent(n, -1);
  std::priority_queue<detail::OpenEntry, std::vector<detail::OpenEntry>, detail::OpenAfter> open;

  best[idx(s)] = {};
  seen[idx(s)] = 1;
  open.push({octile(s, g), s});
  while (!open.empty()) {
    const Cell c = open.top().cell;
    open.pop();
    if (closed[idx(c)]) continue;
    closed[idx(c)] = 1;
    if (c == g) return detail::build_waypoints(grid, parent, s, g, best[idx(g)]);
    for (auto [dr, dc] : kNeighborSteps) {
      if (!grid.can_step(c, dr, dc)) continue;
      const Cell nb{c.row + dr, c.col + dc};
      if (closed[idx(nb)]) continue;
      const GridCost cand = best[idx(c)] + detail::step_cost(dr, dc);
      if (!seen[idx(nb)] || cand < best[idx(nb)]) {
        seen[idx(nb)] = 1;
        best[idx(nb)] = cand;
        parent[idx(nb)] = static_cast<int>(idx(c));
        open.push({cand + octile(nb, g), nb});
      }
    }
  }
  throw NoPathError("goal is unreachable from start");
}

inline Waypoints shortest_path(const Scene& scene, Vec3 start, Vec3 goal) {
  return shortest_path(scene.grid, start, goal);
}

/// Exact move counts of the cheapest path, found without a heuristic.
inline GridCost dijkstra_moves(const OccupancyGrid& grid, Vec3 start, Vec3 goal) {
  const Cell s = detail::endpoint_cell(grid, start, "start");
  const Cell g = detail::endpoint_cell(grid, goal, "goal");
  const std::size_t n = static_cast<std::size_t>(grid.cols()) * grid.rows();
  const auto idx = [&](Cell c) { return static_cast<std::size_t>(c.row) * grid.cols() + c.col; };

  std::vector<GridCost> dist(n);
  std::vector<std::uint8_t> reached(n, 0);
  std::vector<std::uint8_t> done(n, 0);
  std::priority_queue<detail::OpenEntry, std::vector<detail::OpenEntry>, detail::OpenAfter> queue;
  reached[idx(s)] = 1;
  queue.push({{}, s});
  while (!queue.empty()) {
    const auto [d, c] = queue.top();
    queue.pop();
    if (done[idx(c)]) continue;
    done[idx(c)] = 1;
    if (c == g) return d;
    for (auto [dr, dc] : kNeighborSteps) {
      if (!grid.can_step(c, dr, dc)) continue;
      const Cell nb{c.row + dr, c.col + dc};
      const GridCost cand = d + detail::step_cost(dr, dc);
      if (!reached[idx(nb)] || cand < dist[idx(nb)]) {
        reached[idx(nb)] = 1;
        dist[idx(nb)] = cand;
        queue.push({cand, nb});
      }
    }
  }
  throw NoPathError("goal is unreachable from start");
}

/// Cost in meters; test oracle for `shortest_path`.
inline double dijkstra_oracle(const OccupancyGrid& grid, Vec3 start, Vec3 goal) {
  return dijkstra_moves(grid, start, goal).meters(grid.cell_size());
}

inline double dijkstra_oracle(const Scene& scene, Vec3 start, Vec3 goal) {
  return dijkstra_oracle(scene.grid, start, goal);
}

/// Collapses collinear runs to their endpoints. Cost is unchanged.
inline Waypoints thin_waypoints(const Waypoints& path) {
  if (path.cells.size() <= 2) return path;
  Waypoints out;
  out.moves = path.moves;
  out.cost = path.cost;
  const auto dir = [&](std::size_t i) {
    return std::pair{path.cells[i + 1].row - path.cells[i].row, path.cells[i + 1].col - path.cells[i].col};
  };
  out.cells.push_back(path.cells.front());
  out.points.push_back(path.points.front());
  for (std::size_t i = 1; i + 1 < path.cells.size(); ++i) {
    if (dir(i - 1) != dir(i)) {
      out.cells.push_back(path.cells[i]);
      out.points.push_back(path.points[i]);
    }
  }
  out.cells.push_back(path.cells.back());
  out.points.push_back(path.points.back());
  return out;
}

}  // namespace unav
