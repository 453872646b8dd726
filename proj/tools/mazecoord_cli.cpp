#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mazecoord/harness.hpp"
#include "mazecoord/maze.hpp"
#include "mazecoord/server.hpp"
#include "mazecoord/service.hpp"

using namespace mazecoord;

namespace {

std::pair<int, int> parse_size(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw CLI::ValidationError("--size", "expected WxH, e.g. 9x9");
  return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
}

GridPos parse_cell(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("cell", "expected col,row");
  return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
}

// "gen:SEED,COUNT" or a maze file path.
std::vector<MazeEntry> load_mazes(const std::vector<std::string>& sources, int width, int height,
                                  double density) {
  std::vector<MazeEntry> out;
  for (const auto& src : sources) {
    if (src.rfind("gen:", 0) == 0) {
      const auto spec = src.substr(4);
      const auto comma = spec.find(',');
      const std::uint64_t seed = std::stoull(spec.substr(0, comma));
      const int count = comma == std::string::npos ? 1 : std::stoi(spec.substr(comma + 1));
      for (int i = 0; i < count; ++i) {
        out.push_back({"gen-" + std::to_string(seed + i),
                       generate_maze_pair(seed + i, width, height, density)});
      }
    } else {
      out.push_back({std::filesystem::path(src).stem().string(), load_maze(src)});
    }
  }
  return out;
}

void print_summary(const char* label, const StatSummary& s) {
  std::printf("%-44s n=%-6d success=%.4f steps=%.2f*/%.2f switches=%.2f*/%.2f\n", label, s.count,
              s.success_rate, s.steps.geo_mean, s.steps.geo_std, s.switches.geo_mean,
              s.switches.geo_std);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shared-control maze coordination: simulation, tooling and play service"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run agent-vs-agent episodes and write records.csv + summary.json");
  std::vector<std::string> maze_sources{"gen:1,5"};
  std::vector<std::string> agents;
  std::vector<std::string> schemes{"discounted"};
  std::string configs = "sample:200";
  std::string out_dir = "results";
  std::string size = "9x9";
  int trials = 3;
  int cap = kDefaultStepCap;
  std::uint64_t seed = 0;
  double density = 0.7;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string start = "E";
  bool full = false;
  PlannerParams planner;
  HeuristicConfig heuristic;
  sim->add_option("--mazes", maze_sources, "Maze files or gen:SEED,COUNT")->expected(1, -1);
  sim->add_option("--agents", agents, "E=<kind> H=<kind>; kinds: heuristic, mcts-none, mcts-single, mcts-intent")
      ->expected(1, 2);
  sim->add_option("--scheme", schemes, "Bonus schemes for mcts-intent: discounted, fixed, fso, linv, none")
      ->delimiter(',');
  sim->add_option("--trials", trials, "Trials per configuration")->capture_default_str();
  sim->add_option("--configs", configs, "all | sample:K")->capture_default_str();
  sim->add_flag("--full", full, "Every configuration, 10 trials");
  sim->add_option("--start", start, "Initial controller")->check(CLI::IsMember({"E", "H"}));
  sim->add_option("--cap", cap, "Step cap")->capture_default_str();
  sim->add_option("--seed", seed, "Base seed")->capture_default_str();
  sim->add_option("--out", out_dir, "Output directory")->capture_default_str();
  sim->add_option("--workers", workers, "Worker threads");
  sim->add_option("--density", density, "Wall density for generated mazes")->capture_default_str();
  sim->add_option("--size", size, "Generated maze size WxH")->capture_default_str();
  sim->add_option("--iterations", planner.iterations, "MCTS iterations per move")->capture_default_str();
  sim->add_option("--exploration", planner.exploration, "UCB exploration constant");
  sim->add_option("--gamma", planner.gamma, "Planning discount")->capture_default_str();
  sim->add_option("--horizon", planner.horizon, "Rollout depth")->capture_default_str();
  sim->add_option("--lambda", planner.intent_discount, "Intent discount")->capture_default_str();
  sim->add_option("--random-action", heuristic.random_action_prob, "Heuristic random action probability")
      ->capture_default_str();

  // gen-maze
  auto* gen = app.add_subcommand("gen-maze", "Generate a maze pair file");
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--seed", gen_seed)->required();
  gen->add_option("--size", size)->capture_default_str();
  gen->add_option("--density", density)->capture_default_str();
  gen->add_option("--out", gen_out, "Output file (stdout when omitted)");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Minimum moves plus switches for one configuration");
  std::string maze_file;
  std::string init_cell;
  std::string goal_cell;
  bool min_over_start = false;
  oracle->add_option("--maze", maze_file)->required()->check(CLI::ExistingFile);
  oracle->add_option("--init", init_cell, "col,row")->required();
  oracle->add_option("--goal", goal_cell, "col,row")->required();
  oracle->add_option("--start", start)->check(CLI::IsMember({"E", "H"}));
  oracle->add_flag("--min-over-start", min_over_start, "Best of both starting controllers");

  // render
  auto* render = app.add_subcommand("render", "Draw both sides of a maze file");
  render->add_option("maze", maze_file)->required()->check(CLI::ExistingFile);

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP + WebSocket play service");
  std::string address = "127.0.0.1";
  unsigned short port = 8080;
  std::string fixtures = "fixtures/mazes";
  std::string log_dir;
  serve->add_option("--address", address)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--mazes-dir", fixtures, "Directory of maze fixtures")->capture_default_str();
  serve->add_option("--log-dir", log_dir, "Append-only per-session message logs");

  // replay
  auto* replay = app.add_subcommand("replay", "Re-run a session log and print the final state");
  std::string log_file;
  replay->add_option("log", log_file)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      const auto [w, h] = parse_size(size);
      ExperimentSpec spec;
      spec.mazes = load_mazes(maze_sources, w, h, density);
      spec.trials = full ? 10 : trials;
      if (!full && configs != "all") {
        if (configs.rfind("sample:", 0) != 0) throw CLI::ValidationError("--configs", "all | sample:K");
        spec.config_sample = std::stoi(configs.substr(7));
      }
      spec.start = parse_player(start);
      spec.cap = cap;
      spec.base_seed = seed;
      spec.workers = workers;
      AgentParams base;
      base.planner = planner;
      base.heuristic = heuristic;
      spec.agent_e = base;
      spec.agent_h = base;
      bool h_given = false;
      for (const auto& a : agents) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--agents", "expected E=<kind> or H=<kind>");
        const PlayerId p = parse_player(a.substr(0, eq));
        (p == PlayerId::E ? spec.agent_e : spec.agent_h).kind = parse_agent_kind(a.substr(eq + 1));
        if (p == PlayerId::H) h_given = true;
      }
      if (!h_given) spec.agent_h.kind = spec.agent_e.kind;
      spec.schemes.clear();
      for (const auto& s : schemes) spec.schemes.push_back(parse_scheme(s));

      const auto result = run_experiment(spec);
      emit_results(result.records, result.stats, out_dir);
      print_summary("overall", result.stats.overall);
      for (const auto& [k, v] : result.stats.by_agents) print_summary(k.c_str(), v);
      std::printf("wrote %s/records.csv and %s/summary.json\n", out_dir.c_str(), out_dir.c_str());
    } else if (gen->parsed()) {
      const auto [w, h] = parse_size(size);
      const auto pair = generate_maze_pair(gen_seed, w, h, density);
      if (gen_out.empty()) {
        std::cout << serialize_maze(pair);
      } else {
        save_maze(pair, gen_out);
      }
    } else if (oracle->parsed()) {
      const auto pair = load_maze(maze_file);
      const GameConfig config{parse_cell(init_cell), parse_cell(goal_cell), parse_player(start)};
      std::cout << oracle_episode_length(pair, config, min_over_start) << "\n";
    } else if (render->parsed()) {
      const auto pair = load_maze(maze_file);
      std::cout << "E\n" << render_side(pair.side_e) << "H\n" << render_side(pair.side_h);
    } else if (serve->parsed()) {
      auto catalog = std::filesystem::is_directory(fixtures) ? load_maze_catalog(fixtures)
                                                             : std::map<std::string, MazePair>{};
      SessionManager manager(std::move(catalog),
                             log_dir.empty() ? std::nullopt
                                             : std::optional<std::filesystem::path>(log_dir));
      Server server(manager, address, port);
      std::printf("listening on %s:%u\n", address.c_str(), server.port());
      std::fflush(stdout);
      server.run();
    } else if (replay->parsed()) {
      const auto result = replay_log(log_file);
      std::cout << result.state.dump(2) << "\n";
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
