#include "mazecoord/maze.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

namespace mazecoord {

namespace {

struct Edge {
  GridPos from;
  Action dir;  // Right or Up
};

std::vector<Edge> interior_edges(int width, int height) {
  std::vector<Edge> edges;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (c + 1 < width) edges.push_back({{c, r}, Action::Right});
      if (r + 1 < height) edges.push_back({{c, r}, Action::Up});
    }
  }
  return edges;
}

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

MazePair generate_maze_pair(std::uint64_t seed, int width, int height, double wall_density) {
  if (width < 2 || height < 2) throw std::invalid_argument("maze must be at least 2x2");
  if (!(wall_density >= 0.0 && wall_density < 1.0)) {
    throw std::invalid_argument("wall_density must be in [0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto edges = interior_edges(width, height);

  for (int attempt = 0; attempt < kMazeGenRetries; ++attempt) {
    MazePair pair{MazeSide::closed(width, height), MazeSide::closed(width, height)};

    std::vector<std::size_t> order(edges.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    DisjointSets sets(width * height);
    std::vector<bool> in_tree(edges.size(), false);
    for (std::size_t i : order) {
      const Edge& e = edges[i];
      int u = pair.side_e.index(e.from);
      int v = pair.side_e.index(offset(e.from, e.dir));
      if (sets.unite(u, v)) in_tree[i] = true;
    }

    for (std::size_t i = 0; i < edges.size(); ++i) {
      const Edge& e = edges[i];
      bool open_e = unit(rng) >= wall_density;
      bool open_h = unit(rng) >= wall_density;
      if (in_tree[i]) {
        if (unit(rng) < 0.5) {
          open_e = true;
        } else {
          open_h = true;
        }
      }
      pair.side_e.set_open(e.from, e.dir, open_e);
      pair.side_h.set_open(e.from, e.dir, open_h);
    }

    if (!side_connected(pair.side_e) && !side_connected(pair.side_h)) return pair;
  }
  throw std::runtime_error("no maze pair requiring coordination found within retry budget");
}

std::string render_side(const MazeSide& side) {
  std::string out;
  auto horizontal = [&](int r) {
    // wall line above row r
    std::string line = "+";
    for (int c = 0; c < side.width(); ++c) {
      const bool open = r >= 0 && r + 1 < side.height() && side.passable({c, r}, Action::Up);
      line += open ? "   +" : "---+";
    }
    return line + "\n";
  };
  for (int r = side.height() - 1; r >= 0; --r) {
    out += horizontal(r);
    std::string line = "|";
    for (int c = 0; c < side.width(); ++c) {
      line += "   ";
      line += side.passable({c, r}, Action::Right) ? " " : "|";
    }
    out += line + "\n";
  }
  out += horizontal(-1);
  return out;
}

nlohmann::json pos_to_json(GridPos p) { return nlohmann::json::array({p.col, p.row}); }

GridPos pos_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw MazeParseError(field + ": expected [col, row] integer pair");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

nlohmann::json maze_to_json(const MazePair& pair) {
  auto walls = [&](const MazeSide& side) {
    auto list = nlohmann::json::array();
    for (const Edge& e : interior_edges(side.width(), side.height())) {
      if (!side.passable(e.from, e.dir)) {
        list.push_back({{"col", e.from.col},
                        {"row", e.from.row},
                        {"dir", e.dir == Action::Right ? "R" : "U"}});
      }
    }
    return list;
  };
  return {{"format_version", kMazeFormatVersion},
          {"width", pair.width()},
          {"height", pair.height()},
          {"sides", {{"E", walls(pair.side_e)}, {"H", walls(pair.side_h)}}}};
}

namespace {

int require_int(const nlohmann::json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw MazeParseError(path + ": missing field '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw MazeParseError(path + "." + key + ": expected integer");
  return v.get<int>();
}

MazeSide side_from_json(const nlohmann::json& list, int width, int height,
                        const std::string& path) {
  if (!list.is_array()) throw MazeParseError(path + ": expected list of wall records");
  MazeSide side(width, height);
  std::set<std::tuple<int, int, char>> seen;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string here = path + "[" + std::to_string(i) + "]";
    const auto& rec = list[i];
    int col = require_int(rec, "col", here);
    int row = require_int(rec, "row", here);
    if (!rec.contains("dir") || !rec["dir"].is_string()) {
      throw MazeParseError(here + ".dir: expected \"R\" or \"U\"");
    }
    const auto dir = rec["dir"].get<std::string>();
    if (dir == "L" || dir == "D") {
      throw MazeParseError(here + ".dir: asymmetric edge declaration '" + dir +
                           "' (walls are declared once, as R or U)");
    }
    if (dir != "R" && dir != "U") throw MazeParseError(here + ".dir: expected \"R\" or \"U\"");
    const Action a = dir == "R" ? Action::Right : Action::Up;
    if (!side.contains({col, row}) || !side.contains(offset({col, row}, a))) {
      throw MazeParseError(here + ": wall is not on an interior edge");
    }
    if (!seen.insert({col, row, dir[0]}).second) throw MazeParseError(here + ": duplicate wall");
    side.set_open({col, row}, a, false);
  }
  return side;
}

}  // namespace

MazePair maze_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw MazeParseError("maze: expected JSON object");
  int version = require_int(doc, "format_version", "maze");
  if (version != kMazeFormatVersion) {
    throw MazeParseError("maze.format_version: unsupported version " + std::to_string(version));
  }
  int width = require_int(doc, "width", "maze");
  int height = require_int(doc, "height", "maze");
  if (width < 2 || height < 2) throw MazeParseError("maze: width and height must be >= 2");
  if (!doc.contains("sides") || !doc["sides"].is_object()) {
    throw MazeParseError("maze: missing field 'sides'");
  }
  const auto& sides = doc["sides"];
  for (const char* key : {"E", "H"}) {
    if (!sides.contains(key)) throw MazeParseError(std::string("maze.sides: missing side '") + key + "'");
  }
  MazePair pair{side_from_json(sides["E"], width, height, "maze.sides.E"),
                side_from_json(sides["H"], width, height, "maze.sides.H")};
  if (!union_connected(pair)) throw MazeParseError("maze: union of both sides is not connected");
  return pair;
}

std::string serialize_maze(const MazePair& pair) { return maze_to_json(pair).dump(2) + "\n"; }

MazePair parse_maze(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is a 1-based offset; translate into line/column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw MazeParseError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                         ": malformed JSON");
  }
  return maze_from_json(doc);
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

MazePair load_maze(const std::filesystem::path& path) {
  try {
    return parse_maze(read_file(path));
  } catch (const MazeParseError& e) {
    throw MazeParseError(path.string() + ": " + e.what());
  }
}

void save_maze(const MazePair& pair, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_maze(pair);
}

nlohmann::json configs_to_json(const std::vector<GameConfig>& configs) {
  auto list = nlohmann::json::array();
  for (const auto& c : configs) {
    list.push_back({{"init", pos_to_json(c.init)},
                    {"goal", pos_to_json(c.goal)},
                    {"start", std::string(to_string(c.initial_controller))}});
  }
  return list;
}

std::vector<GameConfig> configs_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw MazeParseError("configs: expected JSON list");
  std::vector<GameConfig> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string here = "configs[" + std::to_string(i) + "]";
    const auto& rec = doc[i];
    if (!rec.is_object() || !rec.contains("init") || !rec.contains("goal")) {
      throw MazeParseError(here + ": expected object with init and goal");
    }
    GameConfig c{pos_from_json(rec["init"], here + ".init"), pos_from_json(rec["goal"], here + ".goal"),
                 PlayerId::E};
    if (rec.contains("start")) {
      if (!rec["start"].is_string()) throw MazeParseError(here + ".start: expected \"E\" or \"H\"");
      try {
        c.initial_controller = parse_player(rec["start"].get<std::string>());
      } catch (const std::invalid_argument&) {
        throw MazeParseError(here + ".start: expected \"E\" or \"H\"");
      }
    }
    if (c.init == c.goal) throw MazeParseError(here + ": init equals goal");
    out.push_back(c);
  }
  return out;
}

std::vector<GameConfig> load_configs(const std::filesystem::path& path) {
  try {
    return configs_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw MazeParseError(path.string() + ": malformed JSON: " + e.what());
  } catch (const MazeParseError& e) {
    throw MazeParseError(path.string() + ": " + e.what());
  }
}

}  // namespace mazecoord
