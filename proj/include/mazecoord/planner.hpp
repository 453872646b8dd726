#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mazecoord/belief.hpp"
#include "mazecoord/game.hpp"
#include "mazecoord/intent.hpp"

namespace mazecoord {

using Rng = std::mt19937_64;

enum class RewardScheme : std::uint8_t { None, Discounted, Fixed, FirstStepOnly, LengthInverse };

// "none", "discounted", "fixed", "fso", "linv".
std::string_view to_string(RewardScheme s);
RewardScheme parse_scheme(std::string_view s);

struct PlannerParams {
  int iterations = 100;
  double exploration = std::sqrt(2.0);
  double gamma = 0.99;
  int horizon = 100;
  double intent_discount = 0.5;
  RewardScheme scheme = RewardScheme::Discounted;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct Transition {
  ControllerState next;
  double delta = 1.0;
};

// The searching player is `ego`; the other player's moves are all assumed
// possible and weighted by belief.
std::vector<Action> feasible_actions(const ControllerState& state, const MazeSide& own_side,
                                     PlayerId ego = PlayerId::E);

// Partner moves land on the neighbor cell as if open, with delta the belief
// mean. A partner move off the grid stays put with delta 0.
Transition forward(const ControllerState& state, Action action, const MazeSide& own_side,
                   const BeliefTable& belief, PlayerId ego = PlayerId::E);

double intent_bonus(RewardScheme scheme, const ControllerState& state,
                    const IntentTrajectory& intent, double lambda);

double augmented_reward(const ControllerState& state, GridPos goal, const IntentTrajectory& intent,
                        RewardScheme scheme, double lambda, PlayerId ego = PlayerId::E);

// r + gamma * (delta * q_child + (1 - delta) * w)
double backprop_return(double step_reward, double gamma, double delta_child, double q_child,
                       double value_estimate);

struct SearchNode {
  ControllerState state;
  std::optional<Action> incoming_action;
  double delta = 1.0;
  double step_reward = 0.0;
  int visits = 0;
  double total_return = 0.0;
  int parent = -1;
  bool terminal = false;
  std::vector<int> children;
  std::vector<Action> untried;
};

struct ChildStats {
  Action action;
  int visits;
  double total_return;
  double delta;
  GridPos next_cell;
};

struct SearchResult {
  Action action;
  std::vector<ChildStats> root_children;  // ordered by action
};

class IntentMcts {
 public:
  // Belief means and intent bonuses are copied; later changes to the
  // arguments do not affect this planner.
  IntentMcts(const MazeSide& own_side, const BeliefTable& belief, const IntentTrajectory& intent,
             GridPos goal, const PlannerParams& params, PlayerId ego = PlayerId::E);

  SearchResult search(const ControllerState& root, Rng& rng);

  const std::vector<SearchNode>& tree() const { return tree_; }

  // Exposed for tests; same reward the tree and rollouts use.
  double reward(const ControllerState& s) const;

 private:
  int expand(int node, Rng& rng);
  int select_child(int node) const;
  double rollout(ControllerState s, Rng& rng) const;
  void backprop(int leaf, double q);

  const MazeSide& own_;
  PlannerParams params_;
  PlayerId ego_;
  GridPos goal_;
  std::vector<double> partner_delta_;  // cell * 4 + move, 0 off-grid
  std::vector<double> bonus_;          // per cell, ego-controlled states only
  std::vector<SearchNode> tree_;
};

// Seeds a fresh generator from params.rng_seed.
SearchResult search(const ControllerState& root, const MazeSide& own_side,
                    const BeliefTable& belief, const IntentTrajectory& intent, GridPos goal,
                    const PlannerParams& params, PlayerId ego = PlayerId::E);

// [{action, N, Q, delta}] for the root's children.
nlohmann::json tree_to_json(const SearchResult& result);

}  // namespace mazecoord
