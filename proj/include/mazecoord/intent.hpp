#pragma once

#include <vector>

#include <json.hpp>

#include "mazecoord/belief.hpp"
#include "mazecoord/game.hpp"

namespace mazecoord {

// Ordered cells a player asks its partner to visit next. May be empty,
// meaning "no intent".
struct IntentTrajectory {
  std::vector<GridPos> cells;

  bool empty() const { return cells.empty(); }
  std::size_t size() const { return cells.size(); }
  bool operator==(const IntentTrajectory&) const = default;
};

// Consecutive cells grid-adjacent and no cell repeated.
bool is_valid_intent(const std::vector<GridPos>& cells);

struct EdgeCostModel {
  double own_move_cost = 1.0;
  double wall_penalty_scale = 10.0;
};

// Lowest-cost path from `from` (excluded) to `goal` (included). An edge open
// on the own side costs own_move_cost; a blocked one costs
// own_move_cost + wall_penalty_scale * (1 - b), b the partner belief for
// that move. Equal-cost branches resolve to the smaller (col, row) cell.
IntentTrajectory plan_intent(const MazeSide& own_side, const BeliefTable& partner_belief,
                             GridPos from, GridPos goal, const EdgeCostModel& costs = {});

// Cost of walking `from` -> path[0] -> ... under the same edge costs.
double path_cost(const MazeSide& own_side, const BeliefTable& partner_belief, GridPos from,
                 const std::vector<GridPos>& path, const EdgeCostModel& costs = {});

IntentTrajectory trim_intent(const IntentTrajectory& intent, GridPos current);

nlohmann::json intent_to_json(const IntentTrajectory& intent);
IntentTrajectory intent_from_json(const nlohmann::json& doc);

}  // namespace mazecoord
