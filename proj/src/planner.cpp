#include "mazecoord/planner.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>
#include <string>

namespace mazecoord {

std::string_view to_string(RewardScheme s) {
  switch (s) {
    case RewardScheme::None: return "none";
    case RewardScheme::Discounted: return "discounted";
    case RewardScheme::Fixed: return "fixed";
    case RewardScheme::FirstStepOnly: return "fso";
    case RewardScheme::LengthInverse: return "linv";
  }
  return "?";
}

RewardScheme parse_scheme(std::string_view s) {
  for (auto scheme : {RewardScheme::None, RewardScheme::Discounted, RewardScheme::Fixed,
                      RewardScheme::FirstStepOnly, RewardScheme::LengthInverse}) {
    if (to_string(scheme) == s) return scheme;
  }
  throw std::invalid_argument("unknown reward scheme '" + std::string(s) + "'");
}

void PlannerParams::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(intent_discount > 0.0 && intent_discount < 1.0)) {
    throw std::invalid_argument("intent discount must lie in (0, 1)");
  }
  if (!(intent_discount < gamma)) throw std::invalid_argument("intent discount must be below gamma");
  if (!(exploration >= 0.0)) throw std::invalid_argument("exploration must be non-negative");
}

std::vector<Action> feasible_actions(const ControllerState& state, const MazeSide& own_side,
                                     PlayerId ego) {
  if (state.controller != ego) return {kAllActions.begin(), kAllActions.end()};
  std::vector<Action> out;
  for (Action a : kMoveActions) {
    if (own_side.passable(state.cell, a)) out.push_back(a);
  }
  out.push_back(Action::Switch);
  return out;
}

Transition forward(const ControllerState& state, Action action, const MazeSide& own_side,
                   const BeliefTable& belief, PlayerId ego) {
  if (action == Action::Switch) return {{state.cell, -state.controller}, 1.0};
  if (state.controller == ego) {
    auto next = step(own_side, state, action);
    if (!next) throw std::invalid_argument("forward: action blocked on the planner's own side");
    return {*next, 1.0};
  }
  const GridPos target = offset(state.cell, action);
  if (!own_side.contains(target)) return {state, 0.0};
  return {{target, state.controller}, belief.mean(state.cell, action)};
}

double intent_bonus(RewardScheme scheme, const ControllerState& state,
                    const IntentTrajectory& intent, double lambda) {
  if (scheme == RewardScheme::None || intent.empty()) return 0.0;
  const auto& cells = intent.cells;
  const auto it = std::find(cells.begin(), cells.end(), state.cell);
  if (it == cells.end()) return 0.0;
  const auto m = static_cast<int>(cells.size());
  const auto i = static_cast<int>(it - cells.begin()) + 1;
  switch (scheme) {
    case RewardScheme::Discounted: return std::pow(lambda, m - i);
    case RewardScheme::Fixed: return 0.5;
    case RewardScheme::FirstStepOnly: return i == 1 ? 0.5 : 0.0;
    case RewardScheme::LengthInverse: return i == m ? 1.0 : 1.0 / m;
    case RewardScheme::None: break;
  }
  return 0.0;
}

double augmented_reward(const ControllerState& state, GridPos goal, const IntentTrajectory& intent,
                        RewardScheme scheme, double lambda, PlayerId ego) {
  const double bonus = state.controller == ego ? intent_bonus(scheme, state, intent, lambda) : 0.0;
  return env_reward(state, goal) + bonus;
}

double backprop_return(double step_reward, double gamma, double delta_child, double q_child,
                       double value_estimate) {
  return step_reward + gamma * (delta_child * q_child + (1.0 - delta_child) * value_estimate);
}

IntentMcts::IntentMcts(const MazeSide& own_side, const BeliefTable& belief,
                       const IntentTrajectory& intent, GridPos goal, const PlannerParams& params,
                       PlayerId ego)
    : own_(own_side), params_(params), ego_(ego), goal_(goal) {
  params_.validate();
  if (belief.width() != own_side.width() || belief.height() != own_side.height()) {
    throw std::invalid_argument("belief table does not match maze dimensions");
  }
  const int cells = own_side.cell_count();
  partner_delta_.assign(static_cast<std::size_t>(cells) * 4, 0.0);
  bonus_.assign(cells, 0.0);
  for (int c = 0; c < cells; ++c) {
    const GridPos p = own_side.pos(c);
    for (Action a : kMoveActions) {
      if (own_side.contains(offset(p, a))) partner_delta_[c * 4 + move_index(a)] = belief.mean(p, a);
    }
    bonus_[c] = intent_bonus(params_.scheme, {p, ego}, intent, params_.intent_discount);
  }
}

double IntentMcts::reward(const ControllerState& s) const {
  const double env = s.cell == goal_ ? kGoalReward : kStepPenalty;
  return s.controller == ego_ ? env + bonus_[own_.index(s.cell)] : env;
}

int IntentMcts::expand(int node, Rng& rng) {
  auto& untried = tree_[node].untried;
  std::uniform_int_distribution<std::size_t> pick(0, untried.size() - 1);
  const std::size_t k = pick(rng);
  const Action a = untried[k];
  untried[k] = untried.back();
  untried.pop_back();

  const ControllerState s = tree_[node].state;
  SearchNode child;
  child.incoming_action = a;
  child.parent = node;
  if (a == Action::Switch) {
    child.state = {s.cell, -s.controller};
    child.delta = 1.0;
    child.step_reward = kStepPenalty;
  } else if (s.controller == ego_) {
    child.state = {offset(s.cell, a), s.controller};
    child.delta = 1.0;
    child.step_reward = reward(child.state);
  } else {
    const GridPos target = offset(s.cell, a);
    if (own_.contains(target)) {
      child.state = {target, s.controller};
      child.delta = partner_delta_[own_.index(s.cell) * 4 + move_index(a)];
    } else {
      child.state = s;
      child.delta = 0.0;
    }
    child.step_reward = reward(child.state);
  }
  child.terminal = child.state.cell == goal_;
  if (!child.terminal) child.untried = feasible_actions(child.state, own_, ego_);

  const int index = static_cast<int>(tree_.size());
  tree_.push_back(std::move(child));
  tree_[node].children.push_back(index);
  return index;
}

int IntentMcts::select_child(int node) const {
  const SearchNode& v = tree_[node];
  const double log_n = std::log(static_cast<double>(v.visits));
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c : v.children) {
    const SearchNode& child = tree_[c];
    double score;
    if (child.visits == 0) {
      score = std::numeric_limits<double>::infinity();
    } else {
      score = child.total_return / child.visits +
              params_.exploration * std::sqrt(log_n / child.visits);
    }
    if (best < 0 || score > best_score) {
      best = c;
      best_score = score;
    }
  }
  return best;
}

double IntentMcts::rollout(ControllerState s, Rng& rng) const {
  const int width = own_.width();
  const int goal = own_.index(goal_);
  int cell = own_.index(s.cell);
  bool ego_in_control = s.controller == ego_;
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  auto neighbor = [width](int c, int move) {
    switch (move) {
      case 0: return c + 1;
      case 1: return c + width;
      case 2: return c - 1;
      default: return c - width;
    }
  };

  double q = 0.0;
  double discount = 1.0;
  for (int d = 0; d < params_.horizon && cell != goal; ++d) {
    if (ego_in_control) {
      const std::uint8_t mask = own_.open_mask(own_.pos(cell));
      const int options = std::popcount(mask) + 1;
      int k = std::uniform_int_distribution<int>(0, options - 1)(rng);
      if (k == options - 1) {
        ego_in_control = false;
      } else {
        int move = 0;
        for (;; ++move) {
          if ((mask >> move) & 1u) {
            if (k == 0) break;
            --k;
          }
        }
        cell = neighbor(cell, move);
      }
    } else {
      const int k = std::uniform_int_distribution<int>(0, 4)(rng);
      if (k == 4) {
        ego_in_control = true;
      } else {
        const double delta = partner_delta_[cell * 4 + k];
        if (delta >= 1.0 || (delta > 0.0 && coin(rng) < delta)) cell = neighbor(cell, k);
      }
    }
    const double env = cell == goal ? kGoalReward : kStepPenalty;
    q += discount * (ego_in_control ? env + bonus_[cell] : env);
    discount *= params_.gamma;
  }
  return q;
}

void IntentMcts::backprop(int leaf, double q) {
  double sample = q;
  double delta = 1.0;
  for (int v = leaf; v >= 0; v = tree_[v].parent) {
    SearchNode& node = tree_[v];
    const double w = node.visits > 0 ? node.total_return / node.visits : 0.0;
    sample = backprop_return(node.step_reward, params_.gamma, delta, sample, w);
    node.total_return += sample;
    node.visits += 1;
    delta = node.delta;
  }
}

SearchResult IntentMcts::search(const ControllerState& root, Rng& rng) {
  if (!own_.contains(root.cell)) throw std::invalid_argument("search: root outside the maze");
  if (root.cell == goal_) throw std::invalid_argument("search: root state is terminal");
  tree_.clear();
  tree_.reserve(static_cast<std::size_t>(params_.iterations) + 1);
  SearchNode r;
  r.state = root;
  r.untried = feasible_actions(root, own_, ego_);
  tree_.push_back(std::move(r));

  for (int it = 0; it < params_.iterations; ++it) {
    int v = 0;
    while (!tree_[v].terminal) {
      if (!tree_[v].untried.empty()) {
        v = expand(v, rng);
        break;
      }
      v = select_child(v);
    }
    const double q = tree_[v].terminal ? 0.0 : rollout(tree_[v].state, rng);
    backprop(v, q);
  }

  SearchResult result{Action::Switch, {}};
  for (int c : tree_[0].children) {
    const SearchNode& child = tree_[c];
    result.root_children.push_back(
        {*child.incoming_action, child.visits, child.total_return, child.delta, child.state.cell});
  }
  std::sort(result.root_children.begin(), result.root_children.end(),
            [](const ChildStats& a, const ChildStats& b) { return a.action < b.action; });
  int best_visits = -1;
  for (const auto& c : result.root_children) {
    if (c.visits > best_visits) {
      best_visits = c.visits;
      result.action = c.action;
    }
  }
  return result;
}

SearchResult search(const ControllerState& root, const MazeSide& own_side,
                    const BeliefTable& belief, const IntentTrajectory& intent, GridPos goal,
                    const PlannerParams& params, PlayerId ego) {
  Rng rng(params.rng_seed);
  IntentMcts planner(own_side, belief, intent, goal, params, ego);
  return planner.search(root, rng);
}

nlohmann::json tree_to_json(const SearchResult& result) {
  auto list = nlohmann::json::array();
  for (const auto& c : result.root_children) {
    list.push_back({{"action", std::string(to_string(c.action))},
                    {"N", c.visits},
                    {"Q", c.total_return},
                    {"delta", c.delta}});
  }
  return list;
}

}  // namespace mazecoord
