#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mazecoord/harness.hpp"
#include "mazecoord/maze.hpp"
#include "test_util.hpp"

using namespace mazecoord;

namespace {

AgentParams heuristic(double p) {
  AgentParams a;
  a.kind = AgentKind::Heuristic;
  a.heuristic.random_action_prob = p;
  return a;
}

AgentParams mcts(int iterations) {
  AgentParams a;
  a.kind = AgentKind::IntentMcts;
  a.planner.iterations = iterations;
  return a;
}

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.mazes = {{"small", generate_maze_pair(7, 3, 3, 0.3)}};
  spec.trials = 2;
  spec.agent_e = mcts(20);
  spec.agent_h = mcts(20);
  spec.base_seed = 11;
  return spec;
}

}  // namespace

TEST_CASE("E-only corridor with a deterministic heuristic") {
  const MazePair pair{MazeSide(4, 1), MazeSide::closed(4, 1)};
  const GameConfig config{{0, 0}, {3, 0}, PlayerId::E};
  std::vector<TraceEntry> trace;
  const auto rec = run_episode(pair, config, heuristic(0), heuristic(0), 1000, 5, &trace);
  CHECK(rec.success);
  CHECK(rec.steps == 3);
  CHECK(rec.switches == 0);
  CHECK(rec.oracle_length == 3);
  REQUIRE(trace.size() == 3);
  for (const auto& t : trace) {
    CHECK(t.player == PlayerId::E);
    CHECK(t.action == Action::Right);
  }
}

TEST_CASE("cap ends an episode as a failure") {
  const MazePair pair = generate_maze_pair(1, 9, 9, 0.7);
  const auto rec = run_episode(pair, {{0, 0}, {8, 8}, PlayerId::E}, heuristic(0.2), heuristic(0.2), 1, 3);
  CHECK_FALSE(rec.success);
  CHECK(rec.steps == 1);
  CHECK_THROWS(run_episode(pair, {{0, 0}, {8, 8}, PlayerId::E}, heuristic(0), heuristic(0), 0, 3));
  CHECK_THROWS(run_episode(pair, {{0, 0}, {0, 0}, PlayerId::E}, heuristic(0), heuristic(0), 10, 3));
}

TEST_CASE("episodes are reproducible from their seed") {
  const MazePair pair = generate_maze_pair(2, 9, 9, 0.7);
  const GameConfig config{{1, 2}, {7, 6}, PlayerId::H};
  std::vector<TraceEntry> t1, t2;
  const auto a = run_episode(pair, config, mcts(50), mcts(50), 1000, 77, &t1);
  const auto b = run_episode(pair, config, mcts(50), mcts(50), 1000, 77, &t2);
  CHECK(a == b);
  CHECK(t1 == t2);
  CHECK(a.switches <= a.steps);
  CHECK(a.oracle_length <= a.steps);
  int trace_switches = 0;
  for (const auto& t : t1) trace_switches += t.action == Action::Switch;
  CHECK(trace_switches == a.switches);
  CHECK(static_cast<int>(t1.size()) == a.steps);
}

TEST_CASE("full configuration sweep on a small maze") {
  const ExperimentSpec spec = small_spec();
  const auto result = run_experiment(spec);
  REQUIRE(result.records.size() == 144);
  CHECK(result.stats.overall.count == 144);
  std::set<std::tuple<int, int, int, int>> seen;
  for (const auto& r : result.records) {
    seen.insert({r.config.init.col, r.config.init.row, r.config.goal.col, r.config.goal.row});
    CHECK(r.switches <= r.steps);
    if (r.success) CHECK(r.oracle_length <= r.steps);
    CHECK(r.scheme == "discounted");
  }
  CHECK(seen.size() == 72);

  const std::string csv = records_to_csv(result.records);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 145);
  const auto back = records_from_csv(csv);
  CHECK(back == result.records);
  const auto again = aggregate(back);
  CHECK(std::abs(again.overall.steps.geo_mean - result.stats.overall.steps.geo_mean) < 1e-9);
  CHECK(std::abs(again.overall.switches.geo_std - result.stats.overall.switches.geo_std) < 1e-9);

  const auto j = stats_to_json(result.stats);
  REQUIRE(j["scheme_table"].size() == 1);
  CHECK(j["scheme_table"][0]["Bonus Scheme"] == "discounted");
  CHECK(j["scheme_table"][0].contains("Steps Taken"));
  CHECK(j["scheme_table"][0].contains("Control Switches Taken"));
}

TEST_CASE("trials get distinct seeds") {
  ExperimentSpec spec = small_spec();
  spec.trials = 10;
  spec.config_sample = 1;
  spec.agent_e = heuristic(0.2);
  spec.agent_h = heuristic(0.2);
  const auto result = run_experiment(spec);
  REQUIRE(result.records.size() == 10);
  std::set<std::uint64_t> seeds;
  for (const auto& r : result.records) seeds.insert(r.seed);
  CHECK(seeds.size() == 10);
}

TEST_CASE("parallel runs reproduce serial runs") {
  ExperimentSpec spec = small_spec();
  spec.mazes.push_back({"other", generate_maze_pair(3, 4, 4, 0.5)});
  spec.config_sample = 12;
  spec.schemes = {RewardScheme::Discounted, RewardScheme::Fixed};
  const auto serial = run_experiment(spec);
  spec.workers = 4;
  const auto parallel = run_experiment(spec);
  CHECK(records_to_csv(serial.records) == records_to_csv(parallel.records));
  CHECK(serial.stats.by_scheme.size() == 2);
}

TEST_CASE("geometric statistics") {
  auto g = geometric_stats({4, 16});
  CHECK(g.geo_mean == doctest::Approx(8));
  g = geometric_stats({5, 5, 5});
  CHECK(g.geo_mean == doctest::Approx(5));
  CHECK(g.geo_std == doctest::Approx(1));
  g = geometric_stats({1, 10, 100});
  CHECK(g.geo_mean == doctest::Approx(10));
  CHECK(g.geo_std == doctest::Approx(10));
  CHECK(geometric_stats({3}).geo_std == 1.0);
  CHECK_THROWS(geometric_stats({}));
  CHECK_THROWS(geometric_stats({1, 0}));
}

TEST_CASE("switch statistics tolerate zero switches") {
  EpisodeRecord r;
  r.steps = 4;
  r.switches = 0;
  EpisodeRecord s = r;
  s.steps = 16;
  s.switches = 3;
  const auto sum = summarize({r, s});
  CHECK(sum.steps.geo_mean == doctest::Approx(8));
  CHECK(sum.switches.geo_mean == doctest::Approx(1.0));
}

TEST_CASE("results are written to disk") {
  const auto dir = std::filesystem::temp_directory_path() / "mazecoord_results_test";
  std::filesystem::remove_all(dir);
  ExperimentSpec spec = small_spec();
  spec.config_sample = 3;
  const auto result = run_experiment(spec);
  emit_results(result.records, result.stats, dir);
  std::ifstream csv(dir / "records.csv");
  std::stringstream ss;
  ss << csv.rdbuf();
  CHECK(records_from_csv(ss.str()) == result.records);
  std::ifstream js(dir / "summary.json");
  const auto j = nlohmann::json::parse(js);
  CHECK(j["overall"]["count"] == 6);
  std::filesystem::remove_all(dir);
}

TEST_CASE("spec validation") {
  ExperimentSpec spec = small_spec();
  spec.trials = 0;
  CHECK_THROWS(run_experiment(spec));
  spec = small_spec();
  spec.mazes.clear();
  CHECK_THROWS(run_experiment(spec));
  spec = small_spec();
  spec.mazes[0].id = "a,b";
  CHECK_THROWS(run_experiment(spec));
  CHECK_THROWS(records_from_csv("bad header\n"));
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed({1, 2}) == derive_seed({1, 2}));
  CHECK(derive_seed({1, 2}) != derive_seed({2, 1}));
  CHECK(agent_seed(5, PlayerId::E) != agent_seed(5, PlayerId::H));
}
