#pragma once

#include "unav/error.hpp"
#include "unav/geometry.hpp"
#include "unav/random.hpp"
#include "unav/scene.hpp"
#include "unav/pathfind.hpp"
#include "unav/actions.hpp"
#include "unav/reward.hpp"
#include "unav/grpo.hpp"
#include "unav/prompts.hpp"
#include "unav/collect.hpp"
#include "unav/eval.hpp"
