#include "mazecoord/service.hpp"

#include "mazecoord/harness.hpp"
#include "mazecoord/maze.hpp"

namespace mazecoord {

using nlohmann::json;

json wire_to_json(const WireMessage& m) {
  return {{"type", m.type}, {"session_id", m.session_id}, {"seq", m.seq}, {"payload", m.payload}};
}

WireMessage wire_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string()) {
    throw ServiceError("bad_request", "message must be an object with a string 'type'");
  }
  WireMessage m;
  m.type = doc["type"].get<std::string>();
  if (doc.contains("session_id")) {
    if (!doc["session_id"].is_string()) throw ServiceError("bad_request", "session_id must be a string");
    m.session_id = doc["session_id"].get<std::string>();
  }
  if (doc.contains("seq")) {
    if (!doc["seq"].is_number_unsigned()) throw ServiceError("bad_request", "seq must be unsigned");
    m.seq = doc["seq"].get<std::uint64_t>();
  }
  if (doc.contains("payload")) {
    if (!doc["payload"].is_object()) throw ServiceError("bad_request", "payload must be an object");
    m.payload = doc["payload"];
  }
  return m;
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::HumanTurn: return "human_turn";
    case Phase::AgentTurn: return "agent_turn";
    case Phase::Finished: return "finished";
  }
  return "?";
}

namespace {

template <typename F>
auto bad_request(const std::string& field, F&& parse) {
  try {
    return parse();
  } catch (const ServiceError&) {
    throw;
  } catch (const std::exception& e) {
    throw ServiceError("bad_request", field + ": " + e.what());
  }
}

std::string string_field(const json& p, const char* key, std::string fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_string()) throw ServiceError("bad_request", std::string(key) + ": expected string");
  return p[key].get<std::string>();
}

}  // namespace

CreateRequest create_request_from_json(const json& p) {
  if (!p.is_object()) throw ServiceError("bad_request", "create payload must be an object");
  CreateRequest req;
  req.session_id = string_field(p, "session_id", "");
  req.maze_ref = string_field(p, "maze_ref", "");
  if (p.contains("maze")) {
    req.maze = bad_request("maze", [&] { return maze_from_json(p["maze"]); });
  }
  if (!req.maze && req.maze_ref.empty()) {
    throw ServiceError("bad_request", "create needs maze_ref or maze");
  }
  if (!p.contains("init") || !p.contains("goal")) {
    throw ServiceError("bad_request", "create needs init and goal");
  }
  req.config.init = bad_request("init", [&] { return pos_from_json(p["init"], "init"); });
  req.config.goal = bad_request("goal", [&] { return pos_from_json(p["goal"], "goal"); });
  req.config.initial_controller =
      bad_request("start", [&] { return parse_player(string_field(p, "start", "E")); });
  req.human_side =
      bad_request("human_side", [&] { return parse_player(string_field(p, "human_side", "H")); });
  req.agent.kind =
      bad_request("agent", [&] { return parse_agent_kind(string_field(p, "agent", "mcts-intent")); });
  req.agent.planner.scheme =
      bad_request("scheme", [&] { return parse_scheme(string_field(p, "scheme", "discounted")); });
  if (p.contains("seed")) {
    if (!p["seed"].is_number_unsigned()) throw ServiceError("bad_request", "seed: expected unsigned integer");
    req.seed = p["seed"].get<std::uint64_t>();
  }
  if (p.contains("cap")) {
    if (!p["cap"].is_number_integer()) throw ServiceError("bad_request", "cap: expected integer");
    req.cap = p["cap"].get<int>();
  }
  return req;
}

json create_request_to_json(const CreateRequest& req) {
  json p = {{"init", pos_to_json(req.config.init)},
            {"goal", pos_to_json(req.config.goal)},
            {"start", to_string(req.config.initial_controller)},
            {"human_side", to_string(req.human_side)},
            {"agent", to_string(req.agent.kind)},
            {"scheme", to_string(req.agent.planner.scheme)},
            {"seed", req.seed},
            {"cap", req.cap}};
  if (!req.session_id.empty()) p["session_id"] = req.session_id;
  if (!req.maze_ref.empty()) p["maze_ref"] = req.maze_ref;
  if (req.maze) p["maze"] = maze_to_json(*req.maze);
  return p;
}

Session::Session(std::string id, std::string maze_ref, MazePair pair, const CreateRequest& req)
    : id_(std::move(id)),
      maze_ref_(std::move(maze_ref)),
      pair_(std::make_unique<const MazePair>(std::move(pair))),
      config_(req.config),
      human_side_(req.human_side),
      cap_(req.cap),
      agent_(req.agent, -req.human_side, pair_->side(-req.human_side), req.config.goal,
             agent_seed(req.seed, -req.human_side)),
      current_{req.config.init, req.config.initial_controller} {
  validate_pair(*pair_);
  validate_config(*pair_, config_);
  if (cap_ < 1) throw std::invalid_argument("cap must be positive");
}

WireMessage Session::push(std::string type, json payload) {
  return {std::move(type), id_, ++seq_, std::move(payload)};
}

WireMessage Session::error(const std::string& code, const std::string& message) {
  return push("error", {{"code", code}, {"message", message}});
}

json Session::state_json() const {
  return {{"format_version", kWireFormatVersion},
          {"session_id", id_},
          {"maze_ref", maze_ref_},
          {"width", pair_->width()},
          {"height", pair_->height()},
          {"human_side", to_string(human_side_)},
          {"agent", to_string(agent_.params().kind)},
          {"scheme", to_string(effective_scheme(agent_.params()))},
          {"init", pos_to_json(config_.init)},
          {"goal", pos_to_json(config_.goal)},
          {"start", to_string(config_.initial_controller)},
          {"cell", pos_to_json(current_.cell)},
          {"controller", to_string(current_.controller)},
          {"phase", to_string(phase_)},
          {"steps", steps_},
          {"switches", switches_},
          {"success", current_.cell == config_.goal},
          {"human_intent", intent_to_json(human_intent_)},
          {"agent_intent", intent_to_json(agent_intent_)}};
}

json Session::belief_json() const {
  return {{"format_version", kWireFormatVersion},
          {"width", pair_->width()},
          {"height", pair_->height()},
          {"belief", belief_to_json(agent_.belief())}};
}

WireMessage Session::belief_message() { return push("belief_snapshot", belief_json()); }

std::vector<WireMessage> Session::start() {
  json created = state_json();
  created["walls"] = maze_to_json(*pair_)["sides"][std::string(to_string(human_side_))];
  std::vector<WireMessage> out{push("created", std::move(created))};
  phase_ = current_.controller == human_side_ ? Phase::HumanTurn : Phase::AgentTurn;
  out.push_back(push("state_update", state_json()));
  if (phase_ == Phase::AgentTurn) run_agent_turn(out);
  return out;
}

void Session::apply(Action a) {
  current_ = step(pair_->side(current_.controller), current_, a).value();
  ++steps_;
  if (a == Action::Switch) ++switches_;
}

void Session::finish_if_terminal(std::vector<WireMessage>& out) {
  if (phase_ == Phase::Finished || !is_terminal(current_, config_.goal, steps_, cap_)) return;
  phase_ = Phase::Finished;
  out.push_back(push("finished", {{"success", current_.cell == config_.goal},
                                  {"steps", steps_},
                                  {"switches", switches_}}));
}

void Session::run_agent_turn(std::vector<WireMessage>& out) {
  while (phase_ == Phase::AgentTurn) {
    const GridPos from = current_.cell;
    const Decision d = agent_.act(current_);
    apply(d.action);
    out.push_back(push("agent_moved", {{"action", to_string(d.action)},
                                       {"from", pos_to_json(from)},
                                       {"cell", pos_to_json(current_.cell)},
                                       {"controller", to_string(current_.controller)},
                                       {"steps", steps_},
                                       {"switches", switches_}}));
    if (d.action == Action::Switch) {
      agent_intent_ = d.outgoing_intent.value_or(IntentTrajectory{});
      out.push_back(push("intent_received", {{"cells", intent_to_json(agent_intent_)}}));
      phase_ = Phase::HumanTurn;
    }
    finish_if_terminal(out);
  }
  if (phase_ == Phase::HumanTurn) out.push_back(push("state_update", state_json()));
}

std::vector<WireMessage> Session::human_action(Action a) {
  if (phase_ == Phase::Finished) return {error("finished", "game is over")};
  if (phase_ != Phase::HumanTurn) return {error("not_your_turn", "agent is in control")};
  std::vector<WireMessage> out;
  if (a == Action::Switch) {
    agent_.receive_intent(human_intent_);
    human_intent_ = {};
    apply(a);
    phase_ = Phase::AgentTurn;
    out.push_back(push("state_update", state_json()));
    finish_if_terminal(out);
    run_agent_turn(out);
    return out;
  }
  if (!pair_->side(human_side_).passable(current_.cell, a)) {
    return {error("blocked", std::string(to_string(a)) + " is blocked on your side")};
  }
  agent_.record_partner_move(current_.cell, a);
  apply(a);
  agent_intent_ = trim_intent(agent_intent_, current_.cell);
  out.push_back(push("state_update", state_json()));
  finish_if_terminal(out);
  return out;
}

std::vector<WireMessage> Session::human_intent(const std::vector<GridPos>& cells) {
  if (phase_ == Phase::Finished) return {error("finished", "game is over")};
  if (phase_ != Phase::HumanTurn) return {error("not_your_turn", "agent is in control")};
  for (GridPos p : cells) {
    if (!pair_->side_e.contains(p)) return {error("invalid_intent", "intent cell outside the maze")};
  }
  if (!is_valid_intent(cells)) {
    return {error("invalid_intent", "intent cells must be adjacent and distinct")};
  }
  human_intent_.cells = cells;
  return {push("state_update", state_json())};
}

std::map<std::string, MazePair> load_maze_catalog(const std::filesystem::path& dir) {
  std::map<std::string, MazePair> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    out.emplace(entry.path().stem().string(), load_maze(entry.path()));
  }
  return out;
}

SessionManager::SessionManager(std::map<std::string, MazePair> catalog,
                               std::optional<std::filesystem::path> log_dir)
    : catalog_(std::move(catalog)), log_dir_(std::move(log_dir)) {
  if (log_dir_) std::filesystem::create_directories(*log_dir_);
}

void SessionManager::log_line(Slot& slot, const char* dir, const WireMessage& m) {
  if (!slot.log.is_open()) return;
  slot.log << json{{"dir", dir}, {"msg", wire_to_json(m)}}.dump() << '\n';
  slot.log.flush();
}

std::shared_ptr<SessionManager::Slot> SessionManager::find(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError("unknown_session", "no session '" + id + "'");
  return it->second;
}

std::vector<WireMessage> SessionManager::create_session(const CreateRequest& request) {
  CreateRequest req = request;
  if (!req.maze) {
    auto it = catalog_.find(req.maze_ref);
    if (it == catalog_.end()) throw ServiceError("unknown_maze", "no maze '" + req.maze_ref + "'");
    req.maze = it->second;
  }

  auto slot = std::make_shared<Slot>();
  std::unique_lock slot_lock(slot->mu);
  {
    std::lock_guard lock(mu_);
    if (req.session_id.empty()) {
      do {
        req.session_id = "s" + std::to_string(next_id_++);
      } while (sessions_.count(req.session_id));
    } else if (sessions_.count(req.session_id)) {
      throw ServiceError("duplicate_session", "session '" + req.session_id + "' already exists");
    }
    try {
      slot->session = std::make_unique<Session>(req.session_id, req.maze_ref, *req.maze, req);
    } catch (const std::exception& e) {
      throw ServiceError("invalid_session", e.what());
    }
    sessions_.emplace(req.session_id, slot);
  }

  if (log_dir_) {
    slot->log.open(*log_dir_ / (req.session_id + ".jsonl"), std::ios::app);
    if (!slot->log) throw ServiceError("io_error", "cannot open session log");
  }
  log_line(*slot, "in", {"create", req.session_id, 0, create_request_to_json(req)});
  auto out = slot->session->start();
  for (const auto& m : out) log_line(*slot, "out", m);
  return out;
}

std::vector<WireMessage> SessionManager::with_session(
    const std::string& id, const WireMessage& inbound,
    const std::function<std::vector<WireMessage>(Session&)>& fn) {
  auto slot = find(id);
  std::lock_guard lock(slot->mu);
  log_line(*slot, "in", inbound);
  auto out = fn(*slot->session);
  for (const auto& m : out) log_line(*slot, "out", m);
  return out;
}

std::vector<WireMessage> SessionManager::submit_human_action(const std::string& id, Action a) {
  WireMessage in{"human_action", id, 0, {{"action", to_string(a)}}};
  return with_session(id, in, [a](Session& s) { return s.human_action(a); });
}

std::vector<WireMessage> SessionManager::submit_human_intent(const std::string& id,
                                                             const std::vector<GridPos>& cells) {
  WireMessage in{"human_intent", id, 0, {{"cells", intent_to_json(IntentTrajectory{cells})}}};
  return with_session(id, in, [&cells](Session& s) { return s.human_intent(cells); });
}

json SessionManager::belief_snapshot(const std::string& id) {
  auto slot = find(id);
  std::lock_guard lock(slot->mu);
  return slot->session->belief_json();
}

json SessionManager::state(const std::string& id) {
  auto slot = find(id);
  std::lock_guard lock(slot->mu);
  return slot->session->state_json();
}

json SessionManager::maze_list() const {
  auto list = json::array();
  for (const auto& [id, pair] : catalog_) {
    list.push_back({{"id", id}, {"width", pair.width()}, {"height", pair.height()}});
  }
  return {{"format_version", kWireFormatVersion}, {"mazes", list}};
}

std::vector<WireMessage> SessionManager::handle(const WireMessage& in) {
  try {
    if (in.type == "create") return create_session(create_request_from_json(in.payload));
    if (in.type == "human_action") {
      const Action a = bad_request("action", [&] {
        return parse_action(in.payload.value("action", std::string()));
      });
      return submit_human_action(in.session_id, a);
    }
    if (in.type == "human_intent") {
      const json cells = in.payload.value("cells", json::array());
      const auto intent = bad_request("cells", [&] { return intent_from_json(cells); });
      return submit_human_intent(in.session_id, intent.cells);
    }
    if (in.type == "belief_snapshot") {
      return with_session(in.session_id, in,
                          [](Session& s) { return std::vector<WireMessage>{s.belief_message()}; });
    }
    throw ServiceError("bad_request", "unknown message type '" + in.type + "'");
  } catch (const ServiceError& e) {
    return {{"error", in.session_id, 0, {{"code", e.code()}, {"message", e.what()}}}};
  }
}

ReplayResult replay_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  SessionManager manager;
  std::vector<WireMessage> expected;
  std::vector<WireMessage> produced;
  std::string session_id;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json rec = json::parse(line);
    const WireMessage m = wire_from_json(rec.at("msg"));
    if (rec.at("dir") == "out") {
      expected.push_back(m);
      continue;
    }
    if (session_id.empty()) session_id = m.session_id;
    for (auto& out : manager.handle(m)) produced.push_back(std::move(out));
  }
  if (session_id.empty()) throw std::runtime_error(path.string() + ": empty log");
  if (produced.size() != expected.size()) {
    throw std::runtime_error(path.string() + ": replay produced " + std::to_string(produced.size()) +
                             " messages, log has " + std::to_string(expected.size()));
  }
  for (std::size_t i = 0; i < produced.size(); ++i) {
    if (!(produced[i] == expected[i])) {
      throw std::runtime_error(path.string() + ": replay diverges at outbound message " +
                               std::to_string(i) + " (seq " + std::to_string(expected[i].seq) + ")");
    }
  }
  return {manager.state(session_id), manager.belief_snapshot(session_id), produced.size()};
}

}  // namespace mazecoord
