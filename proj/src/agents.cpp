#include "mazecoord/agents.hpp"

#include <stdexcept>
#include <string>

namespace mazecoord {

std::string_view to_string(AgentKind k) {
  switch (k) {
    case AgentKind::Heuristic: return "heuristic";
    case AgentKind::NoIntentMcts: return "mcts-none";
    case AgentKind::SingleStepMcts: return "mcts-single";
    case AgentKind::IntentMcts: return "mcts-intent";
  }
  return "?";
}

AgentKind parse_agent_kind(std::string_view s) {
  for (auto k : {AgentKind::Heuristic, AgentKind::NoIntentMcts, AgentKind::SingleStepMcts,
                 AgentKind::IntentMcts}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown agent kind '" + std::string(s) + "'");
}

void HeuristicConfig::validate() const {
  if (!(random_action_prob >= 0.0 && random_action_prob <= 1.0)) {
    throw std::invalid_argument("random_action_prob must lie in [0, 1]");
  }
}

void AgentParams::validate() const {
  planner.validate();
  heuristic.validate();
  factors.validate();
  if (!(costs.own_move_cost > 0.0) || !(costs.wall_penalty_scale > 0.0)) {
    throw std::invalid_argument("edge costs must be positive");
  }
}

RewardScheme effective_scheme(const AgentParams& params) {
  return params.kind == AgentKind::IntentMcts ? params.planner.scheme : RewardScheme::None;
}

Action heuristic_action(const ControllerState& state, const MazeSide& own_side,
                        const BeliefTable& partner_belief, GridPos goal,
                        const HeuristicConfig& cfg, Rng& rng, const EdgeCostModel& costs,
                        PlayerId self) {
  if (cfg.random_action_prob > 0.0 &&
      std::uniform_real_distribution<double>(0.0, 1.0)(rng) < cfg.random_action_prob) {
    const auto options = feasible_actions(state, own_side, self);
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    return options[pick(rng)];
  }
  const auto plan = plan_intent(own_side, partner_belief, state.cell, goal, costs);
  for (Action a : kMoveActions) {
    if (offset(state.cell, a) == plan.cells.front()) {
      return own_side.passable(state.cell, a) ? a : Action::Switch;
    }
  }
  return Action::Switch;
}

Action single_step_tiebreak(const std::vector<ChildStats>& root_children,
                            const IntentTrajectory& intent) {
  if (root_children.empty()) throw std::invalid_argument("single_step_tiebreak: no children");
  int best_visits = -1;
  for (const auto& c : root_children) best_visits = std::max(best_visits, c.visits);

  std::optional<Action> fallback;
  for (const auto& c : root_children) {
    if (c.visits != best_visits) continue;
    if (!intent.empty() && c.next_cell == intent.cells.front()) return c.action;
    if (!fallback || c.action < *fallback) fallback = c.action;
  }
  return *fallback;
}

Agent::Agent(AgentParams params, PlayerId self, const MazeSide& own_side, GridPos goal,
             std::uint64_t seed)
    : params_(std::move(params)),
      self_(self),
      own_(&own_side),
      goal_(goal),
      rng_(seed),
      belief_(init_belief(own_side.width(), own_side.height())) {
  params_.validate();
}

Decision Agent::act(const ControllerState& state) {
  if (state.controller != self_) throw std::logic_error("agent asked to act out of turn");
  if (state.cell == goal_) throw std::logic_error("agent asked to act in a terminal state");
  ingest_history(belief_, partner_history_, params_.factors);
  received_ = trim_intent(received_, state.cell);
  last_search_.reset();

  Action action = Action::Switch;
  switch (params_.kind) {
    case AgentKind::Heuristic:
      action = heuristic_action(state, *own_, belief_, goal_, params_.heuristic, rng_,
                                params_.costs, self_);
      break;
    case AgentKind::NoIntentMcts:
    case AgentKind::SingleStepMcts:
    case AgentKind::IntentMcts: {
      PlannerParams planner = params_.planner;
      planner.scheme = effective_scheme(params_);
      const IntentTrajectory& intent =
          planner.scheme == RewardScheme::None ? IntentTrajectory{} : received_;
      IntentMcts mcts(*own_, belief_, intent, goal_, planner, self_);
      last_search_ = mcts.search(state, rng_);
      action = params_.kind == AgentKind::SingleStepMcts
                   ? single_step_tiebreak(last_search_->root_children, received_)
                   : last_search_->action;
      break;
    }
  }

  Decision decision{action, std::nullopt};
  if (action == Action::Switch) {
    decision.outgoing_intent = plan_intent(*own_, belief_, state.cell, goal_, params_.costs);
  }
  return decision;
}

Agent make_agent(const AgentParams& params, PlayerId self, const MazeSide& own_side, GridPos goal,
                 std::uint64_t seed) {
  return Agent(params, self, own_side, goal, seed);
}

}  // namespace mazecoord
