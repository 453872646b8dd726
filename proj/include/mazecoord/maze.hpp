#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mazecoord/game.hpp"

namespace mazecoord {

inline constexpr int kMazeFormatVersion = 1;
inline constexpr int kMazeGenRetries = 256;

// Random spanning tree over the grid, each tree edge opened on one random
// side, then every edge opened independently per side with probability
// 1 - wall_density. Rejects pairs where either side alone is connected.
MazePair generate_maze_pair(std::uint64_t seed, int width, int height, double wall_density);

class MazeParseError : public std::runtime_error {
 public:
  explicit MazeParseError(const std::string& what) : std::runtime_error(what) {}
};

nlohmann::json maze_to_json(const MazePair& pair);
MazePair maze_from_json(const nlohmann::json& doc);

std::string serialize_maze(const MazePair& pair);
MazePair parse_maze(const std::string& text);

MazePair load_maze(const std::filesystem::path& path);
void save_maze(const MazePair& pair, const std::filesystem::path& path);

nlohmann::json configs_to_json(const std::vector<GameConfig>& configs);
std::vector<GameConfig> configs_from_json(const nlohmann::json& doc);
std::vector<GameConfig> load_configs(const std::filesystem::path& path);

// Text drawing of one side, row 0 at the bottom.
std::string render_side(const MazeSide& side);

nlohmann::json pos_to_json(GridPos p);
GridPos pos_from_json(const nlohmann::json& j, const std::string& field);

}  // namespace mazecoord
