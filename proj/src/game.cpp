#include "mazecoord/game.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace mazecoord {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Right: return "Right";
    case Action::Up: return "Up";
    case Action::Left: return "Left";
    case Action::Down: return "Down";
    case Action::Switch: return "Switch";
  }
  return "?";
}

std::string_view to_string(PlayerId p) { return p == PlayerId::E ? "E" : "H"; }

Action parse_action(std::string_view s) {
  for (Action a : kAllActions) {
    if (to_string(a) == s) return a;
  }
  throw std::invalid_argument("unknown action '" + std::string(s) + "'");
}

PlayerId parse_player(std::string_view s) {
  if (s == "E") return PlayerId::E;
  if (s == "H") return PlayerId::H;
  throw std::invalid_argument("unknown player '" + std::string(s) + "'");
}

MazeSide::MazeSide(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw std::invalid_argument("maze dimensions must be positive");
  open_.assign(static_cast<std::size_t>(width) * height, 0);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      std::uint8_t m = 0;
      for (int i = 0; i < 4; ++i) {
        if (contains(offset({c, r}, kMoveActions[i]))) m |= 1u << i;
      }
      open_[index({c, r})] = m;
    }
  }
}

MazeSide MazeSide::closed(int width, int height) {
  MazeSide side(width, height);
  std::fill(side.open_.begin(), side.open_.end(), 0);
  return side;
}

bool MazeSide::passable(GridPos p, Action a) const {
  if (!is_move(a) || !contains(p)) return false;
  return (open_[index(p)] >> move_index(a)) & 1u;
}

void MazeSide::set_open(GridPos p, Action dir, bool open) {
  GridPos q = offset(p, dir);
  if (!is_move(dir) || !contains(p) || !contains(q)) {
    throw std::out_of_range("edge is not an interior edge");
  }
  auto apply = [&](GridPos cell, Action a) {
    auto bit = static_cast<std::uint8_t>(1u << move_index(a));
    auto& m = open_[index(cell)];
    m = open ? (m | bit) : (m & ~bit);
  };
  apply(p, dir);
  apply(q, opposite(dir));
}

std::optional<ControllerState> step(const MazeSide& side, const ControllerState& state,
                                    Action action) {
  if (action == Action::Switch) return ControllerState{state.cell, -state.controller};
  if (!side.passable(state.cell, action)) return std::nullopt;
  return ControllerState{offset(state.cell, action), state.controller};
}

double env_reward(const ControllerState& state, GridPos goal) {
  return state.cell == goal ? kGoalReward : kStepPenalty;
}

bool is_terminal(const ControllerState& state, GridPos goal, int steps_elapsed, int cap) {
  return state.cell == goal || steps_elapsed >= cap;
}

namespace {

std::vector<int> reachable_from(int width, int height, int start,
                                const std::vector<const MazeSide*>& sides) {
  std::vector<int> seen(static_cast<std::size_t>(width) * height, 0);
  std::deque<int> queue{start};
  seen[start] = 1;
  const MazeSide& ref = *sides.front();
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (Action a : kMoveActions) {
      bool open = false;
      for (const MazeSide* s : sides) open = open || s->passable(ref.pos(u), a);
      if (!open) continue;
      int v = ref.index(offset(ref.pos(u), a));
      if (!seen[v]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return seen;
}

bool all_seen(const std::vector<int>& seen) {
  for (int s : seen) {
    if (!s) return false;
  }
  return true;
}

}  // namespace

bool union_connected(const MazePair& pair) {
  return all_seen(reachable_from(pair.width(), pair.height(), 0, {&pair.side_e, &pair.side_h}));
}

bool side_connected(const MazeSide& side) {
  return all_seen(reachable_from(side.width(), side.height(), 0, {&side}));
}

void validate_pair(const MazePair& pair) {
  if (pair.side_e.width() != pair.side_h.width() ||
      pair.side_e.height() != pair.side_h.height()) {
    throw std::invalid_argument("maze sides differ in dimensions");
  }
  if (pair.width() < 1 || pair.height() < 1) throw std::invalid_argument("empty maze");
  if (!union_connected(pair)) throw std::invalid_argument("maze pair is not union-connected");
}

void validate_config(const MazePair& pair, const GameConfig& config) {
  if (!pair.side_e.contains(config.init) || !pair.side_e.contains(config.goal)) {
    throw std::invalid_argument("config position outside the maze");
  }
  if (config.init == config.goal) throw std::invalid_argument("init equals goal");
}

int oracle_episode_length(const MazePair& pair, const GameConfig& config, bool min_over_start) {
  validate_config(pair, config);
  const int cells = pair.side_e.cell_count();
  auto node = [&](GridPos p, PlayerId c) { return pair.side_e.index(p) * 2 + static_cast<int>(c); };

  std::vector<int> dist(static_cast<std::size_t>(cells) * 2, -1);
  std::deque<ControllerState> queue;
  auto seed = [&](PlayerId c) {
    dist[node(config.init, c)] = 0;
    queue.push_back({config.init, c});
  };
  seed(config.initial_controller);
  if (min_over_start) seed(-config.initial_controller);

  while (!queue.empty()) {
    ControllerState s = queue.front();
    queue.pop_front();
    int d = dist[node(s.cell, s.controller)];
    if (s.cell == config.goal) return d;
    for (Action a : kAllActions) {
      auto next = step(pair.side(s.controller), s, a);
      if (!next) continue;
      int n = node(next->cell, next->controller);
      if (dist[n] < 0) {
        dist[n] = d + 1;
        queue.push_back(*next);
      }
    }
  }
  throw std::runtime_error("goal unreachable: maze pair violates union connectivity");
}

std::vector<GameConfig> all_configs(int width, int height, PlayerId start) {
  std::vector<GameConfig> out;
  out.reserve(static_cast<std::size_t>(width) * height * (width * height - 1));
  for (int i = 0; i < width * height; ++i) {
    for (int g = 0; g < width * height; ++g) {
      if (i == g) continue;
      out.push_back({{i % width, i / width}, {g % width, g / width}, start});
    }
  }
  return out;
}

}  // namespace mazecoord
