#pragma once

#include "unav/scene.hpp"

namespace unav::testing {

// 10x10 grid, 0.5 m cells. Free corridor: column 1 for rows 1..6, then row 6
// for columns 1..6. Spawn at (1,1) facing -w, goal at (6,6).
inline Scene l_path_scene() {
  Scene s;
  s.grid = OccupancyGrid(10, 10, 0.5);
  for (int r = 1; r < 9; ++r)
    for (int c = 1; c < 9; ++c)
      if (!(c == 1 && r <= 6) && !(r == 6 && c <= 6)) s.grid.set_blocked({r, c}, true);
  s.spawn = Pose::standing_at(s.grid.cell_center({1, 1}), 180.0);
  s.goals.push_back({"chair", s.grid.cell_center({6, 6})});
  s.seed = 42;
  return s;
}

}  // namespace unav::testing
