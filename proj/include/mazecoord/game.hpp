#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mazecoord {

struct GridPos {
  int col = 0;
  int row = 0;

  auto operator<=>(const GridPos&) const = default;
};

enum class PlayerId : std::uint8_t { E, H };

constexpr PlayerId operator-(PlayerId p) {
  return p == PlayerId::E ? PlayerId::H : PlayerId::E;
}

// Up increases the row index, Down decreases it.
enum class Action : std::uint8_t { Right, Up, Left, Down, Switch };

inline constexpr std::array<Action, 4> kMoveActions = {Action::Right, Action::Up, Action::Left,
                                                       Action::Down};
inline constexpr std::array<Action, 5> kAllActions = {Action::Right, Action::Up, Action::Left,
                                                      Action::Down, Action::Switch};

constexpr bool is_move(Action a) { return a != Action::Switch; }
constexpr int move_index(Action a) { return static_cast<int>(a); }

constexpr Action opposite(Action a) {
  switch (a) {
    case Action::Right: return Action::Left;
    case Action::Up: return Action::Down;
    case Action::Left: return Action::Right;
    case Action::Down: return Action::Up;
    case Action::Switch: return Action::Switch;
  }
  return Action::Switch;
}

// Neighbor in the given direction, ignoring grid bounds.
constexpr GridPos offset(GridPos p, Action a) {
  switch (a) {
    case Action::Right: return {p.col + 1, p.row};
    case Action::Up: return {p.col, p.row + 1};
    case Action::Left: return {p.col - 1, p.row};
    case Action::Down: return {p.col, p.row - 1};
    case Action::Switch: return p;
  }
  return p;
}

std::string_view to_string(Action a);
std::string_view to_string(PlayerId p);
Action parse_action(std::string_view s);
PlayerId parse_player(std::string_view s);

// Passability of one player's maze. Edges are undirected; border edges are
// always blocked.
class MazeSide {
 public:
  MazeSide() = default;
  // All interior edges open.
  MazeSide(int width, int height);

  static MazeSide closed(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  int cell_count() const { return width_ * height_; }

  bool contains(GridPos p) const {
    return p.col >= 0 && p.row >= 0 && p.col < width_ && p.row < height_;
  }
  int index(GridPos p) const { return p.row * width_ + p.col; }
  GridPos pos(int index) const { return {index % width_, index / width_}; }

  bool passable(GridPos p, Action a) const;
  // Bit i set when kMoveActions[i] is passable from p.
  std::uint8_t open_mask(GridPos p) const { return open_[index(p)]; }

  // Sets the undirected edge from p in direction dir. Throws on border edges.
  void set_open(GridPos p, Action dir, bool open);

  bool operator==(const MazeSide&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> open_;
};

struct MazePair {
  MazeSide side_e;
  MazeSide side_h;

  int width() const { return side_e.width(); }
  int height() const { return side_e.height(); }
  const MazeSide& side(PlayerId p) const { return p == PlayerId::E ? side_e : side_h; }

  bool operator==(const MazePair&) const = default;
};

struct GameConfig {
  GridPos init;
  GridPos goal;
  PlayerId initial_controller = PlayerId::E;

  bool operator==(const GameConfig&) const = default;
};

struct ControllerState {
  GridPos cell;
  PlayerId controller = PlayerId::E;

  bool operator==(const ControllerState&) const = default;
};

inline constexpr int kDefaultStepCap = 1000;
inline constexpr double kGoalReward = 100.0;
inline constexpr double kStepPenalty = -1.0;

std::optional<ControllerState> step(const MazeSide& side, const ControllerState& state,
                                    Action action);

double env_reward(const ControllerState& state, GridPos goal);

bool is_terminal(const ControllerState& state, GridPos goal, int steps_elapsed,
                 int cap = kDefaultStepCap);

// True when every cell is reachable using edges open on either side.
bool union_connected(const MazePair& pair);
bool side_connected(const MazeSide& side);

void validate_pair(const MazePair& pair);
void validate_config(const MazePair& pair, const GameConfig& config);

// Minimum moves plus switches from (init, initial_controller) to the goal.
// With min_over_start, the smaller of both starting controllers is returned.
int oracle_episode_length(const MazePair& pair, const GameConfig& config,
                          bool min_over_start = false);

// All ordered (init, goal) pairs with init != goal, starting controller `start`.
std::vector<GameConfig> all_configs(int width, int height, PlayerId start = PlayerId::E);

}  // namespace mazecoord
