#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rshape/rng.hpp"

namespace rshape {

/// Board dimensions. Both axes need at least two cells so that hunter and
/// prey can always occupy distinct positions.
struct GridConfig {
  int width = 10;
  int height = 10;

  void validate() const;
  int cells() const noexcept { return width * height; }
  /// Number of (hunter, prey) combinations, including coincident ones.
  std::size_t state_count() const noexcept {
    return static_cast<std::size_t>(cells()) * static_cast<std::size_t>(cells());
  }

  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

/// Parses "WxH" (e.g. "10x10"). Throws std::invalid_argument.
GridConfig parse_grid(std::string_view spec);
std::string format_grid(const GridConfig& grid);

/// Cell coordinates. (0,0) is the top-left corner; y grows downward.
struct Position {
  int x = 0;
  int y = 0;

  friend bool operator==(const Position&, const Position&) = default;
};

struct GameState {
  Position hunter;
  Position prey;

  bool captured() const noexcept { return hunter == prey; }

  friend bool operator==(const GameState&, const GameState&) = default;
};

enum class Action : std::uint8_t { Down = 0, Right = 1, Up = 2, Left = 3 };

inline constexpr int kActionCount = 4;
inline constexpr std::array<Action, kActionCount> kAllActions = {
    Action::Down, Action::Right, Action::Up, Action::Left};

constexpr int action_code(Action a) noexcept { return static_cast<int>(a); }
/// Throws std::out_of_range for codes outside [0, 4).
Action action_from_code(int code);

/// Moves one cell in the given direction; moves into a wall are no-ops.
Position move(Position p, Action a, const GridConfig& grid) noexcept;

bool in_bounds(Position p, const GridConfig& grid) noexcept;

struct StepOutcome {
  GameState next_state;
  double reward = 0.0;
  bool terminal = false;
};

/// Places hunter and prey uniformly at random on distinct cells.
GameState reset(const GridConfig& grid, Rng& rng);

/// Advances the game by one hunter move.
///
/// The hunter moves first. Landing on the prey ends the episode with reward 0
/// and the prey does not move. Otherwise the reward is -1 and the prey takes
/// one uniformly random (wall-clamped) step, re-drawn whenever it would land
/// on the hunter. Throws std::invalid_argument for an already-captured state.
StepOutcome step(const GameState& state, Action action, const GridConfig& grid, Rng& rng);

/// Dense index of a state: ((hy*W + hx) * H*W) + (py*W + px).
std::size_t state_index(const GameState& state, const GridConfig& grid) noexcept;
/// Inverse of state_index. Throws std::out_of_range past state_count().
GameState state_from_index(std::size_t index, const GridConfig& grid);

struct Transition {
  GameState next_state;
  double probability = 0.0;
  double reward = 0.0;
  bool terminal = false;
};

/// Exact distribution over the outcomes of step(). Duplicate successor
/// states (e.g. two wall-clamped prey moves) are merged into one entry.
std::vector<Transition> transition_distribution(const GameState& state, Action action,
                                                const GridConfig& grid);

}  // namespace rshape
