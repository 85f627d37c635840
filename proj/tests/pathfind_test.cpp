#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "unav/pathfind.hpp"
#include "unav/random.hpp"

using namespace unav;

namespace {

OccupancyGrid random_grid(Rng& rng, int max_side) {
  const int cols = 3 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(max_side - 2)));
  const int rows = 3 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(max_side - 2)));
  OccupancyGrid g(cols, rows, 0.5);
  const double density = 0.4 * uniform01(rng);
  for (int r = 1; r < rows - 1; ++r)
    for (int c = 1; c < cols - 1; ++c)
      if (uniform01(rng) < density) g.set_blocked({r, c}, true);
  return g;
}

std::vector<Cell> free_cells(const OccupancyGrid& g) {
  std::vector<Cell> out;
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols(); ++c)
      if (g.free({r, c})) out.push_back({r, c});
  return out;
}

}  // namespace

TEST(GridCost, ExactComparison) {
  EXPECT_TRUE((GridCost{1, 0} < GridCost{0, 1}));
  EXPECT_TRUE((GridCost{0, 1} < GridCost{2, 0}));
  EXPECT_TRUE((GridCost{3, 0} < GridCost{0, 3}));
  EXPECT_TRUE((GridCost{7, 0} < GridCost{0, 5}));   // 7 < 7.07
  EXPECT_TRUE((GridCost{0, 5} < GridCost{8, 0}));   // 7.07 < 8
  EXPECT_TRUE((GridCost{10, 0} < GridCost{3, 5}));  // 10 < 10.07
  EXPECT_EQ(compare(GridCost{2, 3}, GridCost{2, 3}), 0);
  EXPECT_EQ(octile({0, 0}, {3, 5}), (GridCost{2, 3}));
}

TEST(ShortestPath, UnobstructedRow) {
  const OccupancyGrid g(7, 7, 0.5);
  const auto p = shortest_path(g, g.cell_center({1, 1}), g.cell_center({1, 5}));
  EXPECT_EQ(p.cost, 4 * 0.5);
  ASSERT_EQ(p.cells.size(), 5u);
  for (std::size_t i = 0; i < p.cells.size(); ++i) EXPECT_EQ(p.cells[i], (Cell{1, static_cast<int>(1 + i)}));
}

TEST(ShortestPath, PureDiagonal) {
  const OccupancyGrid g(6, 6, 0.5);
  const double d = dijkstra_oracle(g, g.cell_center({1, 1}), g.cell_center({4, 4}));
  EXPECT_DOUBLE_EQ(d, 3 * std::numbers::sqrt2 * 0.5);
}

TEST(ShortestPath, UShapedWallMatchesOracle) {
  OccupancyGrid g(9, 9, 0.5);
  for (int r = 2; r <= 6; ++r) g.set_blocked({r, 6}, true);
  for (int c = 2; c <= 6; ++c) g.set_blocked({6, c}, true);
  for (int c = 2; c <= 6; ++c) g.set_blocked({2, c}, true);
  const Vec3 a = g.cell_center({4, 4});
  const Vec3 b = g.cell_center({4, 7});
  const auto p = shortest_path(g, a, b);
  EXPECT_EQ(p.cost, dijkstra_oracle(g, a, b));
  EXPECT_GT(p.cost, 3 * 0.5);
}

TEST(ShortestPath, Errors) {
  OccupancyGrid g(8, 8, 0.5);
  EXPECT_THROW(shortest_path(g, g.cell_center({1, 1}), g.cell_center({0, 0})), DomainError);
  for (int r = 1; r < 7; ++r) g.set_blocked({r, 4}, true);
  EXPECT_THROW(shortest_path(g, g.cell_center({1, 1}), g.cell_center({1, 6})), NoPathError);
  EXPECT_THROW(dijkstra_oracle(g, g.cell_center({1, 1}), g.cell_center({1, 6})), NoPathError);
}

TEST(ShortestPath, NoCornerCutting) {
  OccupancyGrid g(5, 5, 1.0);
  g.set_blocked({1, 2}, true);
  g.set_blocked({2, 1}, true);
  // (1,1) -> (2,2) only diagonal, blocked by both orthogonal neighbors
  EXPECT_THROW(shortest_path(g, g.cell_center({1, 1}), g.cell_center({2, 2})), NoPathError);
}

TEST(ShortestPath, MatchesDijkstraOnRandomGrids) {
  Rng rng(2024);
  int compared = 0;
  for (int i = 0; i < 200; ++i) {
    const OccupancyGrid g = random_grid(rng, 40);
    const auto cells = free_cells(g);
    if (cells.size() < 2) continue;
    const Cell a = cells[uniform_index(rng, cells.size())];
    const Cell b = cells[uniform_index(rng, cells.size())];
    const Vec3 pa = g.cell_center(a), pb = g.cell_center(b);
    try {
      const auto p = shortest_path(g, pa, pb);
      ASSERT_EQ(p.moves, dijkstra_moves(g, pa, pb));
      ASSERT_EQ(p.cost, dijkstra_oracle(g, pa, pb));
      // admissibility and validity
      ASSERT_LE(std::hypot(pa.u - pb.u, pa.w - pb.w), p.cost + 1e-12);
      ASSERT_EQ(p.cells.front(), a);
      ASSERT_EQ(p.cells.back(), b);
      GridCost sum;
      for (std::size_t k = 0; k + 1 < p.cells.size(); ++k) {
        const int dr = p.cells[k + 1].row - p.cells[k].row, dc = p.cells[k + 1].col - p.cells[k].col;
        ASSERT_LE(std::abs(dr), 1);
        ASSERT_LE(std::abs(dc), 1);
        ASSERT_TRUE(g.can_step(p.cells[k], dr, dc));
        sum = sum + octile(p.cells[k], p.cells[k + 1]);
      }
      ASSERT_EQ(sum, p.moves);
      ++compared;
    } catch (const NoPathError&) {
      EXPECT_THROW(dijkstra_moves(g, pa, pb), NoPathError);
    }
  }
  EXPECT_GT(compared, 100);
}

TEST(ThinWaypoints, CollapsesCollinearRuns) {
  OccupancyGrid g(10, 10, 0.5);
  for (int r = 1; r < 9; ++r)
    for (int c = 2; c < 9; ++c)
      if (r != 6) g.set_blocked({r, c}, true);
  const auto p = shortest_path(g, g.cell_center({1, 1}), g.cell_center({6, 6}));
  const auto t = thin_waypoints(p);
  ASSERT_EQ(t.cells.size(), 3u);
  EXPECT_EQ(t.cells[0], (Cell{1, 1}));
  EXPECT_EQ(t.cells[1], (Cell{6, 1}));
  EXPECT_EQ(t.cells[2], (Cell{6, 6}));
  EXPECT_EQ(t.cost, p.cost);
}
