#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mazecoord/agents.hpp"
#include "mazecoord/game.hpp"
#include "mazecoord/intent.hpp"

namespace mazecoord {

inline constexpr int kWireFormatVersion = 1;

// {type, session_id, seq, payload}. Inbound messages may omit seq.
struct WireMessage {
  std::string type;
  std::string session_id;
  std::uint64_t seq = 0;
  nlohmann::json payload = nlohmann::json::object();

  bool operator==(const WireMessage&) const = default;
};

nlohmann::json wire_to_json(const WireMessage& m);
WireMessage wire_from_json(const nlohmann::json& doc);

// Failure that has no session to report through (bad create request,
// unknown session id, malformed message).
class ServiceError : public std::runtime_error {
 public:
  ServiceError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

enum class Phase : std::uint8_t { HumanTurn, AgentTurn, Finished };
std::string_view to_string(Phase p);

struct CreateRequest {
  std::string session_id;  // empty: the manager assigns one
  std::string maze_ref;
  std::optional<MazePair> maze;  // inline maze, takes precedence over maze_ref
  GameConfig config;
  PlayerId human_side = PlayerId::H;
  AgentParams agent;
  std::uint64_t seed = 0;
  int cap = kDefaultStepCap;
};

// Payload of a "create" message:
// {maze_ref | maze, init, goal, start, human_side, agent, scheme, seed, cap, session_id}
CreateRequest create_request_from_json(const nlohmann::json& payload);
nlohmann::json create_request_to_json(const CreateRequest& req);

// One human-vs-agent game. The agent is the same Agent the harness uses,
// seeded with agent_seed(seed, agent side), so its moves match a harness
// episode fed the same human moves and intents.
class Session {
 public:
  Session(std::string id, std::string maze_ref, MazePair pair, const CreateRequest& req);
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  // created + state_update, followed by the agent's turn when it starts.
  std::vector<WireMessage> start();
  std::vector<WireMessage> human_action(Action a);
  std::vector<WireMessage> human_intent(const std::vector<GridPos>& cells);
  WireMessage belief_message();

  const std::string& id() const { return id_; }
  Phase phase() const { return phase_; }
  const ControllerState& current() const { return current_; }
  int steps() const { return steps_; }
  int switches() const { return switches_; }
  const Agent& agent() const { return agent_; }

  nlohmann::json state_json() const;
  nlohmann::json belief_json() const;

 private:
  WireMessage push(std::string type, nlohmann::json payload);
  WireMessage error(const std::string& code, const std::string& message);
  void apply(Action a);
  void finish_if_terminal(std::vector<WireMessage>& out);
  void run_agent_turn(std::vector<WireMessage>& out);

  std::string id_;
  std::string maze_ref_;
  std::unique_ptr<const MazePair> pair_;
  GameConfig config_;
  PlayerId human_side_;
  int cap_;
  Agent agent_;
  ControllerState current_;
  Phase phase_ = Phase::HumanTurn;
  int steps_ = 0;
  int switches_ = 0;
  IntentTrajectory human_intent_;
  IntentTrajectory agent_intent_;
  std::uint64_t seq_ = 0;
};

// Maze fixtures by id (file stem of every *.json in `dir`).
std::map<std::string, MazePair> load_maze_catalog(const std::filesystem::path& dir);

// Owns all sessions. Calls on different sessions run concurrently; calls on
// one session are serialized. With a log directory, every inbound and
// outbound message of a session is appended to <dir>/<id>.jsonl.
class SessionManager {
 public:
  explicit SessionManager(std::map<std::string, MazePair> catalog = {},
                          std::optional<std::filesystem::path> log_dir = std::nullopt);

  std::vector<WireMessage> create_session(const CreateRequest& req);
  std::vector<WireMessage> submit_human_action(const std::string& id, Action a);
  std::vector<WireMessage> submit_human_intent(const std::string& id,
                                               const std::vector<GridPos>& cells);
  // Belief export plus format_version; reading does not touch the session.
  nlohmann::json belief_snapshot(const std::string& id);
  nlohmann::json state(const std::string& id);
  nlohmann::json maze_list() const;

  // Dispatches an inbound wire message. Session-less failures come back as
  // an error message with seq 0.
  std::vector<WireMessage> handle(const WireMessage& inbound);

 private:
  struct Slot {
    std::mutex mu;
    std::unique_ptr<Session> session;
    std::ofstream log;
  };

  std::shared_ptr<Slot> find(const std::string& id);
  static void log_line(Slot& slot, const char* dir, const WireMessage& m);
  std::vector<WireMessage> with_session(const std::string& id, const WireMessage& inbound,
                                        const std::function<std::vector<WireMessage>(Session&)>& fn);

  std::map<std::string, MazePair> catalog_;
  std::optional<std::filesystem::path> log_dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::uint64_t next_id_ = 1;
};

struct ReplayResult {
  nlohmann::json state;
  nlohmann::json belief;
  std::size_t messages = 0;
};

// Re-runs the inbound half of a session log on a fresh manager and checks
// that every regenerated outbound message equals the logged one.
ReplayResult replay_log(const std::filesystem::path& path);

}  // namespace mazecoord
