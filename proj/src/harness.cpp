#include "mazecoord/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace mazecoord {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6A09E667F3BCC908ULL;
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

std::uint64_t agent_seed(std::uint64_t episode_seed, PlayerId player) {
  return derive_seed({episode_seed, static_cast<std::uint64_t>(player) + 1});
}

EpisodeRecord run_episode(const MazePair& pair, const GameConfig& config,
                          const AgentParams& agent_e, const AgentParams& agent_h, int cap,
                          std::uint64_t seed, std::vector<TraceEntry>* trace) {
  validate_pair(pair);
  validate_config(pair, config);
  if (cap < 1) throw std::invalid_argument("step cap must be positive");

  EpisodeRecord rec;
  rec.config = config;
  rec.seed = seed;
  rec.oracle_length = oracle_episode_length(pair, config);
  rec.agent_e = std::string(to_string(agent_e.kind));
  rec.agent_h = std::string(to_string(agent_h.kind));
  const bool uses_intent =
      agent_e.kind == AgentKind::IntentMcts || agent_h.kind == AgentKind::IntentMcts;
  rec.scheme = std::string(to_string(uses_intent ? (agent_e.kind == AgentKind::IntentMcts
                                                        ? agent_e.planner.scheme
                                                        : agent_h.planner.scheme)
                                                 : RewardScheme::None));

  Agent e(agent_e, PlayerId::E, pair.side_e, config.goal, agent_seed(seed, PlayerId::E));
  Agent h(agent_h, PlayerId::H, pair.side_h, config.goal, agent_seed(seed, PlayerId::H));

  ControllerState state{config.init, config.initial_controller};
  while (!is_terminal(state, config.goal, rec.steps, cap)) {
    Agent& actor = state.controller == PlayerId::E ? e : h;
    Agent& partner = state.controller == PlayerId::E ? h : e;
    const Decision d = actor.act(state);
    const auto next = step(pair.side(state.controller), state, d.action);
    if (!next) {
      throw ProtocolViolation(std::string(to_string(state.controller)) + " played blocked " +
                              std::string(to_string(d.action)) + " at (" +
                              std::to_string(state.cell.col) + "," +
                              std::to_string(state.cell.row) + ")");
    }
    if (d.action == Action::Switch) {
      ++rec.switches;
      partner.receive_intent(d.outgoing_intent.value_or(IntentTrajectory{}));
    } else {
      partner.record_partner_move(state.cell, d.action);
    }
    if (trace) {
      trace->push_back(
          {state.controller, d.action, d.outgoing_intent.value_or(IntentTrajectory{})});
    }
    state = *next;
    ++rec.steps;
  }
  rec.success = state.cell == config.goal;
  return rec;
}

void ExperimentSpec::validate() const {
  if (mazes.empty()) throw std::invalid_argument("experiment has no mazes");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (cap < 1) throw std::invalid_argument("cap must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (config_sample && *config_sample < 1) throw std::invalid_argument("config sample must be >= 1");
  if (schemes.empty()) throw std::invalid_argument("experiment has no reward schemes");
  agent_e.validate();
  agent_h.validate();
  for (const auto& m : mazes) {
    if (m.id.find_first_of(",\n\"") != std::string::npos) {
      throw std::invalid_argument("maze id '" + m.id + "' contains a CSV delimiter");
    }
    validate_pair(m.pair);
  }
}

std::vector<GameConfig> experiment_configs(const ExperimentSpec& spec, std::size_t maze_index) {
  const MazePair& pair = spec.mazes.at(maze_index).pair;
  auto configs = all_configs(pair.width(), pair.height(), spec.start);
  if (spec.config_sample && static_cast<std::size_t>(*spec.config_sample) < configs.size()) {
    Rng rng(derive_seed({spec.base_seed, maze_index, 0xC0F1ULL}));
    std::shuffle(configs.begin(), configs.end(), rng);
    configs.resize(static_cast<std::size_t>(*spec.config_sample));
  }
  return configs;
}

namespace {

struct Job {
  std::size_t maze;
  GameConfig config;
  int trial;
  RewardScheme scheme;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<Job> jobs;
  for (RewardScheme scheme : spec.schemes) {
    for (std::size_t m = 0; m < spec.mazes.size(); ++m) {
      for (const auto& config : experiment_configs(spec, m)) {
        for (int t = 0; t < spec.trials; ++t) jobs.push_back({m, config, t, scheme});
      }
    }
  }

  std::vector<EpisodeRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::string error_context;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      const MazeEntry& maze = spec.mazes[job.maze];
      const std::uint64_t seed = derive_seed(
          {spec.base_seed, job.maze, static_cast<std::uint64_t>(maze.pair.side_e.index(job.config.init)),
           static_cast<std::uint64_t>(maze.pair.side_e.index(job.config.goal)),
           static_cast<std::uint64_t>(job.config.initial_controller),
           static_cast<std::uint64_t>(job.trial)});
      AgentParams e = spec.agent_e;
      AgentParams h = spec.agent_h;
      e.planner.scheme = job.scheme;
      h.planner.scheme = job.scheme;
      try {
        records[i] = run_episode(maze.pair, job.config, e, h, spec.cap, seed);
        records[i].maze_id = maze.id;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) {
          error = std::current_exception();
          std::ostringstream ctx;
          ctx << "maze " << maze.id << " init (" << job.config.init.col << ","
              << job.config.init.row << ") goal (" << job.config.goal.col << ","
              << job.config.goal.row << ") trial " << job.trial << " scheme "
              << to_string(job.scheme);
          error_context = ctx.str();
        }
        next.store(jobs.size());
        return;
      }
    }
  };

  const int n_threads = std::min<int>(spec.workers, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const ProtocolViolation& e) {
      throw ProtocolViolation(error_context + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error(error_context + ": " + e.what());
    }
  }
  ExperimentResult result;
  result.stats = aggregate(records);
  result.records = std::move(records);
  return result;
}

GeoStats geometric_stats(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("geometric_stats: empty input");
  std::vector<double> logs;
  logs.reserve(values.size());
  for (double v : values) {
    if (!(v > 0.0)) throw std::invalid_argument("geometric_stats: values must be positive");
    logs.push_back(std::log(v));
  }
  const double n = static_cast<double>(logs.size());
  const double mean = std::accumulate(logs.begin(), logs.end(), 0.0) / n;
  if (logs.size() == 1) return {std::exp(mean), 1.0};
  double ss = 0.0;
  for (double l : logs) ss += (l - mean) * (l - mean);
  return {std::exp(mean), std::exp(std::sqrt(ss / (n - 1.0)))};
}

StatSummary summarize(const std::vector<EpisodeRecord>& records) {
  StatSummary s;
  s.count = static_cast<int>(records.size());
  if (records.empty()) return s;
  std::vector<double> steps;
  std::vector<double> switches;
  int successes = 0;
  for (const auto& r : records) {
    steps.push_back(r.steps);
    switches.push_back(r.switches + 1.0);
    successes += r.success ? 1 : 0;
  }
  s.success_rate = static_cast<double>(successes) / records.size();
  s.steps = geometric_stats(steps);
  s.switches = geometric_stats(switches);
  s.switches.geo_mean -= 1.0;
  return s;
}

AggregateStats aggregate(const std::vector<EpisodeRecord>& records) {
  AggregateStats out;
  out.overall = summarize(records);
  std::map<int, std::vector<EpisodeRecord>> by_len;
  std::map<std::string, std::vector<EpisodeRecord>> by_scheme;
  std::map<std::string, std::vector<EpisodeRecord>> by_agents;
  for (const auto& r : records) {
    by_len[r.oracle_length].push_back(r);
    by_scheme[r.scheme].push_back(r);
    by_agents["E=" + r.agent_e + ",H=" + r.agent_h + ",scheme=" + r.scheme].push_back(r);
  }
  for (const auto& [k, v] : by_len) out.by_oracle_length[k] = summarize(v);
  for (const auto& [k, v] : by_scheme) out.by_scheme[k] = summarize(v);
  for (const auto& [k, v] : by_agents) out.by_agents[k] = summarize(v);
  return out;
}

namespace {

constexpr const char* kCsvHeader =
    "maze_id,init_col,init_row,goal_col,goal_row,start,seed,oracle_length,steps,switches,success,"
    "agent_e,agent_h,scheme";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

nlohmann::json summary_json(const StatSummary& s) {
  return {{"count", s.count},
          {"success_rate", s.success_rate},
          {"steps", {{"geo_mean", s.steps.geo_mean}, {"geo_std", s.steps.geo_std}}},
          {"switches", {{"geo_mean", s.switches.geo_mean}, {"geo_std", s.switches.geo_std}}}};
}

}  // namespace

std::string records_to_csv(const std::vector<EpisodeRecord>& records) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const auto& r : records) {
    out << r.maze_id << "," << r.config.init.col << "," << r.config.init.row << ","
        << r.config.goal.col << "," << r.config.goal.row << ","
        << to_string(r.config.initial_controller) << "," << r.seed << "," << r.oracle_length << ","
        << r.steps << "," << r.switches << "," << (r.success ? 1 : 0) << "," << r.agent_e << ","
        << r.agent_h << "," << r.scheme << "\n";
  }
  return out.str();
}

std::vector<EpisodeRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("records.csv: unexpected header");
  }
  std::vector<EpisodeRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 14) {
      throw std::runtime_error("records.csv line " + std::to_string(line_no) + ": expected 14 fields");
    }
    try {
      EpisodeRecord r;
      r.maze_id = f[0];
      r.config = {{std::stoi(f[1]), std::stoi(f[2])}, {std::stoi(f[3]), std::stoi(f[4])},
                  parse_player(f[5])};
      r.seed = std::stoull(f[6]);
      r.oracle_length = std::stoi(f[7]);
      r.steps = std::stoi(f[8]);
      r.switches = std::stoi(f[9]);
      r.success = f[10] == "1";
      r.agent_e = f[11];
      r.agent_h = f[12];
      r.scheme = f[13];
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("records.csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

nlohmann::json stats_to_json(const AggregateStats& stats) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["metadata"] = {
      {"geo_std_convention", "sample (n-1) standard deviation of natural logs"},
      {"steps", "geometric statistics of steps per episode, failed episodes counted at the cap"},
      {"switches", "geometric statistics of (switches + 1); geo_mean has the +1 removed"}};
  j["overall"] = summary_json(stats.overall);
  j["by_oracle_length"] = nlohmann::json::object();
  for (const auto& [k, v] : stats.by_oracle_length) j["by_oracle_length"][std::to_string(k)] = summary_json(v);
  j["by_scheme"] = nlohmann::json::object();
  for (const auto& [k, v] : stats.by_scheme) j["by_scheme"][k] = summary_json(v);
  j["by_agents"] = nlohmann::json::object();
  for (const auto& [k, v] : stats.by_agents) j["by_agents"][k] = summary_json(v);
  auto table = nlohmann::json::array();
  for (const auto& [k, v] : stats.by_scheme) {
    table.push_back({{"Bonus Scheme", k},
                     {"Steps Taken", {{"geo_mean", v.steps.geo_mean}, {"geo_std", v.steps.geo_std}}},
                     {"Control Switches Taken",
                      {{"geo_mean", v.switches.geo_mean}, {"geo_std", v.switches.geo_std}}}});
  }
  j["scheme_table"] = table;
  return j;
}

void emit_results(const std::vector<EpisodeRecord>& records, const AggregateStats& stats,
                  const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  auto write = [](const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
    if (!out) throw std::runtime_error("write failed for " + path.string());
  };
  write(dir / "records.csv", records_to_csv(records));
  write(dir / "summary.json", stats_to_json(stats).dump(2) + "\n");
}

}  // namespace mazecoord
