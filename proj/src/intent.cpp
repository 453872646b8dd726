#include "mazecoord/intent.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>

#include "mazecoord/maze.hpp"

namespace mazecoord {

namespace {

constexpr double kTieEps = 1e-9;

double edge_cost(const MazeSide& own, const BeliefTable& belief, GridPos from, Action a,
                 const EdgeCostModel& costs) {
  if (own.passable(from, a)) return costs.own_move_cost;
  return costs.own_move_cost + costs.wall_penalty_scale * (1.0 - belief.mean(from, a));
}

bool adjacent(GridPos a, GridPos b) {
  return std::abs(a.col - b.col) + std::abs(a.row - b.row) == 1;
}

std::optional<Action> direction_to(GridPos from, GridPos to) {
  for (Action a : kMoveActions) {
    if (offset(from, a) == to) return a;
  }
  return std::nullopt;
}

}  // namespace

bool is_valid_intent(const std::vector<GridPos>& cells) {
  std::set<GridPos> seen;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!seen.insert(cells[i]).second) return false;
    if (i > 0 && !adjacent(cells[i - 1], cells[i])) return false;
  }
  return true;
}

IntentTrajectory plan_intent(const MazeSide& own_side, const BeliefTable& partner_belief,
                             GridPos from, GridPos goal, const EdgeCostModel& costs) {
  if (!own_side.contains(from) || !own_side.contains(goal)) {
    throw std::invalid_argument("plan_intent: position outside the maze");
  }
  if (from == goal) return {};

  // Cost-to-goal over the directed edge costs, computed backwards from goal.
  const int n = own_side.cell_count();
  std::vector<double> to_goal(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  to_goal[own_side.index(goal)] = 0.0;
  open.push({0.0, own_side.index(goal)});
  while (!open.empty()) {
    auto [d, v] = open.top();
    open.pop();
    if (d > to_goal[v]) continue;
    const GridPos vp = own_side.pos(v);
    for (Action a : kMoveActions) {
      const GridPos up = offset(vp, a);
      if (!own_side.contains(up)) continue;
      const int u = own_side.index(up);
      const double nd = d + edge_cost(own_side, partner_belief, up, opposite(a), costs);
      if (nd < to_goal[u]) {
        to_goal[u] = nd;
        open.push({nd, u});
      }
    }
  }

  IntentTrajectory out;
  GridPos cur = from;
  while (cur != goal) {
    std::array<double, 4> via{};
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 4; ++i) {
      const GridPos next = offset(cur, kMoveActions[i]);
      via[i] = own_side.contains(next)
                   ? edge_cost(own_side, partner_belief, cur, kMoveActions[i], costs) +
                         to_goal[own_side.index(next)]
                   : std::numeric_limits<double>::infinity();
      lowest = std::min(lowest, via[i]);
    }
    std::optional<GridPos> best;
    for (std::size_t i = 0; i < 4; ++i) {
      const GridPos next = offset(cur, kMoveActions[i]);
      if (via[i] <= lowest + kTieEps && (!best || next < *best)) best = next;
    }
    out.cells.push_back(*best);
    cur = *best;
  }
  return out;
}

double path_cost(const MazeSide& own_side, const BeliefTable& partner_belief, GridPos from,
                 const std::vector<GridPos>& path, const EdgeCostModel& costs) {
  double total = 0.0;
  GridPos cur = from;
  for (GridPos next : path) {
    auto dir = direction_to(cur, next);
    if (!dir || !own_side.contains(next)) throw std::invalid_argument("path is not grid-adjacent");
    total += edge_cost(own_side, partner_belief, cur, *dir, costs);
    cur = next;
  }
  return total;
}

IntentTrajectory trim_intent(const IntentTrajectory& intent, GridPos current) {
  auto it = std::find(intent.cells.begin(), intent.cells.end(), current);
  if (it == intent.cells.end()) return intent;
  return {std::vector<GridPos>(it + 1, intent.cells.end())};
}

nlohmann::json intent_to_json(const IntentTrajectory& intent) {
  auto list = nlohmann::json::array();
  for (GridPos p : intent.cells) list.push_back(pos_to_json(p));
  return list;
}

IntentTrajectory intent_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw std::invalid_argument("intent: expected list of [col,row] pairs");
  IntentTrajectory out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    out.cells.push_back(pos_from_json(doc[i], "intent[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace mazecoord
