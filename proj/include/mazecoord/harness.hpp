#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mazecoord/agents.hpp"
#include "mazecoord/game.hpp"

namespace mazecoord {

// splitmix64 fold over the parts; stable across platforms.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

// Seed of the agent playing `player` in an episode seeded with `episode_seed`.
std::uint64_t agent_seed(std::uint64_t episode_seed, PlayerId player);

class ProtocolViolation : public std::runtime_error {
 public:
  explicit ProtocolViolation(const std::string& what) : std::runtime_error(what) {}
};

struct EpisodeRecord {
  std::string maze_id;
  GameConfig config;
  std::uint64_t seed = 0;
  int oracle_length = 0;
  int steps = 0;
  int switches = 0;
  bool success = false;
  std::string agent_e;
  std::string agent_h;
  std::string scheme;

  bool operator==(const EpisodeRecord&) const = default;
};

struct TraceEntry {
  PlayerId player;
  Action action;
  IntentTrajectory intent;  // sent with a Switch, empty otherwise
  bool operator==(const TraceEntry&) const = default;
};

// Plays one game. Control alternates whenever the acting agent plays Switch;
// the outgoing agent's intent goes to the partner and each agent sees the
// partner's executed moves.
EpisodeRecord run_episode(const MazePair& pair, const GameConfig& config,
                          const AgentParams& agent_e, const AgentParams& agent_h, int cap,
                          std::uint64_t seed, std::vector<TraceEntry>* trace = nullptr);

struct MazeEntry {
  std::string id;
  MazePair pair;
};

struct ExperimentSpec {
  std::vector<MazeEntry> mazes;
  // nullopt: every ordered (init, goal) pair; otherwise a seeded sample of
  // that many configurations per maze.
  std::optional<int> config_sample;
  PlayerId start = PlayerId::E;
  int trials = 10;
  AgentParams agent_e;
  AgentParams agent_h;
  // Each scheme runs the full job list on the same seeds. Only affects
  // agents of kind mcts-intent.
  std::vector<RewardScheme> schemes = {RewardScheme::Discounted};
  int cap = kDefaultStepCap;
  std::uint64_t base_seed = 0;
  int workers = 1;

  void validate() const;
};

struct GeoStats {
  double geo_mean = 0.0;
  double geo_std = 1.0;
};

// exp(mean(log v)) and exp(sample stddev(log v)); geo_std is 1 for a single
// value.
GeoStats geometric_stats(const std::vector<double>& values);

struct StatSummary {
  int count = 0;
  double success_rate = 0.0;
  GeoStats steps;
  // Geometric statistics of (switches + 1), reported with the shift undone
  // on the mean: zero switches is a valid outcome.
  GeoStats switches;
};

StatSummary summarize(const std::vector<EpisodeRecord>& records);

struct AggregateStats {
  StatSummary overall;
  std::map<int, StatSummary> by_oracle_length;
  std::map<std::string, StatSummary> by_scheme;
  std::map<std::string, StatSummary> by_agents;
};

AggregateStats aggregate(const std::vector<EpisodeRecord>& records);

struct ExperimentResult {
  std::vector<EpisodeRecord> records;
  AggregateStats stats;
};

// Configurations a spec runs on one maze, in job order.
std::vector<GameConfig> experiment_configs(const ExperimentSpec& spec, std::size_t maze_index);

ExperimentResult run_experiment(const ExperimentSpec& spec);

std::string records_to_csv(const std::vector<EpisodeRecord>& records);
std::vector<EpisodeRecord> records_from_csv(const std::string& text);
nlohmann::json stats_to_json(const AggregateStats& stats);

// Writes records.csv and summary.json into `dir`.
void emit_results(const std::vector<EpisodeRecord>& records, const AggregateStats& stats,
                  const std::filesystem::path& dir);

}  // namespace mazecoord
