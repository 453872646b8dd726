#include <doctest.h>

#include <algorithm>
#include <random>

#include "mazecoord/maze.hpp"
#include "mazecoord/planner.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mazecoord;

namespace {

// Expected discounted return of the best depth-limited action sequence,
// partner moves succeeding with probability equal to the belief mean.
double expectimax(const MazeSide& own, const BeliefTable& b, ControllerState s, GridPos goal,
                  int depth, double gamma, Action* best_first = nullptr) {
  if (depth == 0 || s.cell == goal) return 0.0;
  double best = -1e300;
  for (Action a : kAllActions) {
    double value;
    if (a == Action::Switch) {
      const ControllerState n{s.cell, -s.controller};
      value = -1.0 + gamma * expectimax(own, b, n, goal, depth - 1, gamma);
    } else if (s.controller == PlayerId::E) {
      if (!own.passable(s.cell, a)) continue;
      const ControllerState n{offset(s.cell, a), s.controller};
      value = env_reward(n, goal) + gamma * expectimax(own, b, n, goal, depth - 1, gamma);
    } else {
      if (!own.contains(offset(s.cell, a))) continue;
      const double d = b.mean(s.cell, a);
      const ControllerState moved{offset(s.cell, a), s.controller};
      value = d * (env_reward(moved, goal) + gamma * expectimax(own, b, moved, goal, depth - 1, gamma)) +
              (1 - d) * (env_reward(s, goal) + gamma * expectimax(own, b, s, goal, depth - 1, gamma));
    }
    if (value > best) {
      best = value;
      if (best_first) *best_first = a;
    }
  }
  return best;
}

MazeSide corridor() {
  return testutil::open_only(3, 2, {{{0, 0}, Action::Right}, {{1, 0}, Action::Right}});
}

}  // namespace

TEST_CASE("feasible actions") {
  MazeSide open(3, 3);
  CHECK(feasible_actions({{1, 1}, PlayerId::H}, open).size() == 5);
  CHECK(feasible_actions({{0, 0}, PlayerId::H}, MazeSide::closed(3, 3)).size() == 5);
  CHECK(feasible_actions({{1, 1}, PlayerId::E}, open).size() == 5);
  MazeSide walled = testutil::walls(3, 3, {{{1, 1}, Action::Right}, {{1, 1}, Action::Up}});
  CHECK(feasible_actions({{1, 1}, PlayerId::E}, walled) ==
        std::vector<Action>{Action::Left, Action::Down, Action::Switch});
}

TEST_CASE("forward model") {
  MazeSide open(3, 3);
  BeliefTable b = init_belief(3, 3);
  auto t = forward({{0, 0}, PlayerId::E}, Action::Right, open, b);
  CHECK(t.next == ControllerState{{1, 0}, PlayerId::E});
  CHECK(t.delta == 1.0);
  t = forward({{0, 0}, PlayerId::H}, Action::Up, MazeSide::closed(3, 3), b);
  CHECK(t.next == ControllerState{{0, 1}, PlayerId::H});
  CHECK(t.delta == 0.5);
  t = forward({{0, 0}, PlayerId::E}, Action::Switch, open, b);
  CHECK(t.next == ControllerState{{0, 0}, PlayerId::H});
  CHECK(t.delta == 1.0);
  t = forward({{0, 0}, PlayerId::H}, Action::Left, open, b);
  CHECK(t.next == ControllerState{{0, 0}, PlayerId::H});
  CHECK(t.delta == 0.0);
  CHECK_THROWS(forward({{0, 0}, PlayerId::E}, Action::Right, MazeSide::closed(3, 3), b));
}

TEST_CASE("bonus schemes") {
  const IntentTrajectory z{{{0, 0}, {1, 0}, {2, 0}}};
  auto at = [](GridPos p) { return ControllerState{p, PlayerId::E}; };
  CHECK(intent_bonus(RewardScheme::Discounted, at({0, 0}), z, 0.5) == 0.25);
  CHECK(intent_bonus(RewardScheme::Discounted, at({1, 0}), z, 0.5) == 0.5);
  CHECK(intent_bonus(RewardScheme::Discounted, at({2, 0}), z, 0.5) == 1.0);
  CHECK(intent_bonus(RewardScheme::Fixed, at({1, 0}), z, 0.5) == 0.5);
  CHECK(intent_bonus(RewardScheme::FirstStepOnly, at({0, 0}), z, 0.5) == 0.5);
  CHECK(intent_bonus(RewardScheme::FirstStepOnly, at({1, 0}), z, 0.5) == 0.0);
  const IntentTrajectory z4{{{0, 0}, {1, 0}, {2, 0}, {2, 1}}};
  CHECK(intent_bonus(RewardScheme::LengthInverse, at({1, 0}), z4, 0.5) == 0.25);
  CHECK(intent_bonus(RewardScheme::LengthInverse, at({2, 1}), z4, 0.5) == 1.0);
  for (auto s : {RewardScheme::None, RewardScheme::Discounted, RewardScheme::Fixed,
                 RewardScheme::FirstStepOnly, RewardScheme::LengthInverse}) {
    CHECK(intent_bonus(s, at({2, 2}), z, 0.5) == 0.0);
    CHECK(intent_bonus(s, at({0, 0}), IntentTrajectory{}, 0.5) == 0.0);
  }
  CHECK(intent_bonus(RewardScheme::None, at({2, 0}), z, 0.5) == 0.0);
}

TEST_CASE("augmented reward applies the bonus only under own control") {
  const IntentTrajectory z{{{0, 0}, {1, 0}, {2, 0}}};
  CHECK(augmented_reward({{1, 0}, PlayerId::H}, {2, 2}, z, RewardScheme::Fixed, 0.5) == -1.0);
  CHECK(augmented_reward({{2, 0}, PlayerId::E}, {2, 2}, z, RewardScheme::Discounted, 0.5) == 0.0);
  CHECK(augmented_reward({{2, 0}, PlayerId::E}, {2, 0}, z, RewardScheme::Discounted, 0.5) == 101.0);
  CHECK(augmented_reward({{2, 0}, PlayerId::H}, {2, 0}, z, RewardScheme::Discounted, 0.5) == 100.0);
}

TEST_CASE("backprop return") {
  CHECK(backprop_return(-1, 0.99, 0.5, 10, 4) == doctest::Approx(5.93));
  CHECK(backprop_return(-1, 0.99, 1.0, 10, 4) == doctest::Approx(-1 + 0.99 * 10));
  CHECK(backprop_return(-1, 0.99, 0.0, 10, 4) == doctest::Approx(-1 + 0.99 * 4));
}

TEST_CASE("planner parameter checks") {
  PlannerParams p;
  CHECK_NOTHROW(p.validate());
  p.intent_discount = 0.995;
  CHECK_THROWS(p.validate());
  p = {};
  p.iterations = 0;
  CHECK_THROWS(p.validate());
  p = {};
  p.gamma = 1.0;
  CHECK_THROWS(p.validate());
  CHECK(parse_scheme("linv") == RewardScheme::LengthInverse);
  CHECK(parse_scheme("fso") == RewardScheme::FirstStepOnly);
  CHECK_THROWS(parse_scheme("bogus"));
}

TEST_CASE("corridor to a nearby goal: search takes the first corridor move") {
  const MazeSide own = corridor();
  const BeliefTable b = init_belief(3, 2);
  Action best = Action::Switch;
  expectimax(own, b, {{0, 0}, PlayerId::E}, {2, 0}, 2, 0.99, &best);
  REQUIRE(best == Action::Right);
  CHECK(search({{0, 0}, PlayerId::E}, own, b, {}, {2, 0}, PlannerParams{}).action == Action::Right);
  // Returns near 100 dwarf the exploration term, so an unlucky first rollout
  // can pin the root on Switch; most seeds still find the corridor.
  int right = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PlannerParams p;
    p.rng_seed = seed;
    right += search({{0, 0}, PlayerId::E}, own, b, {}, {2, 0}, p).action == Action::Right;
  }
  CHECK(right >= 12);
}

TEST_CASE("single feasible action is returned") {
  PlannerParams p;
  const auto r = search({{1, 1}, PlayerId::E}, MazeSide::closed(3, 3), init_belief(3, 3), {}, {0, 0}, p);
  CHECK(r.action == Action::Switch);
  REQUIRE(r.root_children.size() == 1);
  CHECK(r.root_children[0].visits == p.iterations);
}

TEST_CASE("search rejects terminal roots") {
  PlannerParams p;
  CHECK_THROWS(search({{0, 0}, PlayerId::E}, MazeSide(2, 2), init_belief(2, 2), {}, {0, 0}, p));
}

TEST_CASE("seeded search is reproducible") {
  const MazePair pair = generate_maze_pair(5, 9, 9, 0.7);
  BeliefTable b = init_belief(9, 9);
  b.observe({3, 3}, Action::Up, {});
  const IntentTrajectory z{{{4, 4}, {4, 5}, {4, 6}}};
  PlannerParams p;
  p.rng_seed = 1234;
  const auto a = search({{4, 4}, PlayerId::E}, pair.side_e, b, z, {8, 8}, p);
  const auto c = search({{4, 4}, PlayerId::E}, pair.side_e, b, z, {8, 8}, p);
  CHECK(a.action == c.action);
  REQUIRE(a.root_children.size() == c.root_children.size());
  for (std::size_t i = 0; i < a.root_children.size(); ++i) {
    CHECK(a.root_children[i].visits == c.root_children[i].visits);
    CHECK(a.root_children[i].total_return == c.root_children[i].total_return);
  }
}

TEST_CASE("tree structure after every iteration count") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 6; ++trial) {
    const MazePair pair = generate_maze_pair(trial, 6, 6, 0.6);
    BeliefTable b = init_belief(6, 6);
    for (int k = 0; k < 20; ++k) {
      b.observe({int(rng() % 6), int(rng() % 6)}, kMoveActions[rng() % 4], {});
    }
    const GridPos goal{5, 5};
    for (int n = 1; n <= 60; n += 7) {
      PlannerParams p;
      p.iterations = n;
      IntentMcts mcts(pair.side_e, b, IntentTrajectory{{{0, 1}, {1, 1}}}, goal, p);
      Rng r(trial * 100 + n);
      const ControllerState root{{0, 0}, trial % 2 ? PlayerId::H : PlayerId::E};
      mcts.search(root, r);
      const auto& tree = mcts.tree();
      REQUIRE(oracle::tree_consistent(tree));
      CHECK(tree[0].visits == n);
      for (const auto& v : tree) {
        if (v.state.controller == PlayerId::H) CHECK(v.children.size() <= 5);
        for (int ci : v.children) {
          const SearchNode& c = tree[ci];
          const Action a = *c.incoming_action;
          if (a == Action::Switch) {
            CHECK(c.delta == 1.0);
            CHECK(c.step_reward == -1.0);
            CHECK(c.state == ControllerState{v.state.cell, -v.state.controller});
          } else if (v.state.controller == PlayerId::E) {
            CHECK(pair.side_e.passable(v.state.cell, a));
            CHECK(c.delta == 1.0);
          } else if (pair.side_e.contains(offset(v.state.cell, a))) {
            CHECK(c.delta == b.mean(v.state.cell, a));
          } else {
            CHECK(c.delta == 0.0);
            CHECK(c.state == v.state);
          }
        }
      }
    }
  }
}

TEST_CASE("scheme None leaves the environment reward untouched") {
  const MazePair pair = generate_maze_pair(2, 5, 5, 0.5);
  const IntentTrajectory z{{{0, 0}, {1, 0}, {2, 0}, {2, 1}}};
  PlannerParams p;
  p.scheme = RewardScheme::None;
  IntentMcts mcts(pair.side_e, init_belief(5, 5), z, {4, 4}, p);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) {
      for (PlayerId who : {PlayerId::E, PlayerId::H}) {
        CHECK(mcts.reward({{c, r}, who}) == env_reward({{c, r}, who}, {4, 4}));
      }
    }
  }
  p.scheme = RewardScheme::Discounted;
  IntentMcts with(pair.side_e, init_belief(5, 5), z, {4, 4}, p);
  CHECK(with.reward({{2, 1}, PlayerId::E}) == 0.0);
  CHECK(with.reward({{2, 1}, PlayerId::H}) == -1.0);
}

TEST_CASE("no-bonus search equals discounted search without intent") {
  const MazePair pair = generate_maze_pair(11, 9, 9, 0.7);
  PlannerParams none;
  none.scheme = RewardScheme::None;
  none.rng_seed = 5;
  PlannerParams disc = none;
  disc.scheme = RewardScheme::Discounted;
  const BeliefTable b = init_belief(9, 9);
  for (int c = 0; c < 8; ++c) {
    const ControllerState root{{c, c / 2}, PlayerId::E};
    const auto a = search(root, pair.side_e, b, {}, {8, 8}, none);
    const auto d = search(root, pair.side_e, b, {}, {8, 8}, disc);
    CHECK(a.action == d.action);
    for (std::size_t i = 0; i < a.root_children.size(); ++i) {
      CHECK(a.root_children[i].total_return == d.root_children[i].total_return);
    }
  }
}

TEST_CASE("the planner can search on behalf of either player") {
  const MazeSide own = corridor();
  PlannerParams p;
  const auto r = search({{0, 0}, PlayerId::H}, own, init_belief(3, 2), {}, {2, 0}, p, PlayerId::H);
  CHECK(r.action == Action::Right);
}

TEST_CASE("tree dump") {
  PlannerParams p;
  const auto r = search({{0, 0}, PlayerId::E}, corridor(), init_belief(3, 2), {}, {2, 0}, p);
  const auto j = tree_to_json(r);
  REQUIRE(j.size() == r.root_children.size());
  CHECK(j[0].contains("action"));
  CHECK(j[0].contains("N"));
  CHECK(j[0].contains("Q"));
  CHECK(j[0].contains("delta"));
}
