#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mazecoord/belief.hpp"
#include "mazecoord/game.hpp"
#include "mazecoord/intent.hpp"
#include "mazecoord/planner.hpp"

namespace mazecoord {

enum class AgentKind : std::uint8_t { Heuristic, NoIntentMcts, SingleStepMcts, IntentMcts };

// "heuristic", "mcts-none", "mcts-single", "mcts-intent".
std::string_view to_string(AgentKind k);
AgentKind parse_agent_kind(std::string_view s);

struct HeuristicConfig {
  double random_action_prob = 0.2;
  void validate() const;
};

struct AgentParams {
  AgentKind kind = AgentKind::IntentMcts;
  PlannerParams planner;  // planner.scheme applies to IntentMcts only
  HeuristicConfig heuristic;
  EdgeCostModel costs;
  ConfidenceFactors factors;

  void validate() const;
};

// Scheme the agent actually plans with (None for every non-intent kind).
RewardScheme effective_scheme(const AgentParams& params);

// Follows the belief-conditioned lowest-cost path, handing over control when
// the next edge is closed on the own side. With probability
// random_action_prob it plays a uniformly random feasible action instead.
Action heuristic_action(const ControllerState& state, const MazeSide& own_side,
                        const BeliefTable& partner_belief, GridPos goal,
                        const HeuristicConfig& cfg, Rng& rng, const EdgeCostModel& costs = {},
                        PlayerId self = PlayerId::E);

// Most-visited root child; among equals, the one stepping onto the first
// intent cell, otherwise the lowest action.
Action single_step_tiebreak(const std::vector<ChildStats>& root_children,
                            const IntentTrajectory& intent);

struct Decision {
  Action action;
  std::optional<IntentTrajectory> outgoing_intent;  // set on Switch
};

// One player's policy plus its memory: belief over the partner's maze,
// the partner's move history and the last intent the partner sent.
class Agent {
 public:
  Agent(AgentParams params, PlayerId self, const MazeSide& own_side, GridPos goal,
        std::uint64_t seed);

  void record_partner_move(GridPos cell, Action action) { partner_history_.push(cell, action); }
  void receive_intent(IntentTrajectory intent) { received_ = std::move(intent); }

  // Folds new partner history into the belief, trims the received intent
  // and picks an action for `state` (which this agent must control).
  Decision act(const ControllerState& state);

  PlayerId self() const { return self_; }
  const AgentParams& params() const { return params_; }
  const BeliefTable& belief() const { return belief_; }
  const IntentTrajectory& received_intent() const { return received_; }
  const std::optional<SearchResult>& last_search() const { return last_search_; }

 private:
  AgentParams params_;
  PlayerId self_;
  const MazeSide* own_;
  GridPos goal_;
  Rng rng_;
  BeliefTable belief_;
  PartnerHistory partner_history_;
  IntentTrajectory received_;
  std::optional<SearchResult> last_search_;
};

Agent make_agent(const AgentParams& params, PlayerId self, const MazeSide& own_side, GridPos goal,
                 std::uint64_t seed);

}  // namespace mazecoord
