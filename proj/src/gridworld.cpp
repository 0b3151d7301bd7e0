#include "rshape/gridworld.hpp"

#include <charconv>

namespace rshape {

namespace {

constexpr std::array<Position, kActionCount> kOffsets = {{
    {0, 1},   // down
    {1, 0},   // right
    {0, -1},  // up
    {-1, 0},  // left
}};

void require_live(const GameState& state, const GridConfig& grid) {
  if (!in_bounds(state.hunter, grid) || !in_bounds(state.prey, grid)) {
    throw std::invalid_argument("game state lies outside the " + format_grid(grid) + " grid");
  }
  if (state.captured()) {
    throw std::invalid_argument("cannot step a captured (terminal) state");
  }
}

int parse_dimension(std::string_view text, std::string_view whole) {
  int value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last) {
    throw std::invalid_argument("malformed grid spec '" + std::string(whole) +
                                "' (expected WxH, e.g. 10x10)");
  }
  return value;
}

}  // namespace

void GridConfig::validate() const {
  if (width < 2 || height < 2) {
    throw std::invalid_argument("grid must be at least 2x2, got " + format_grid(*this));
  }
  // Keeps (W*H)^2 * 4 table entries addressable.
  if (width > 1000 || height > 1000) {
    throw std::invalid_argument("grid too large: " + format_grid(*this));
  }
}

GridConfig parse_grid(std::string_view spec) {
  const auto sep = spec.find_first_of("xX");
  if (sep == std::string_view::npos) {
    throw std::invalid_argument("malformed grid spec '" + std::string(spec) +
                                "' (expected WxH, e.g. 10x10)");
  }
  GridConfig grid{parse_dimension(spec.substr(0, sep), spec),
                  parse_dimension(spec.substr(sep + 1), spec)};
  grid.validate();
  return grid;
}

std::string format_grid(const GridConfig& grid) {
  return std::to_string(grid.width) + "x" + std::to_string(grid.height);
}

Action action_from_code(int code) {
  if (code < 0 || code >= kActionCount) {
    throw std::out_of_range("action code " + std::to_string(code) + " outside [0, 4)");
  }
  return static_cast<Action>(code);
}

bool in_bounds(Position p, const GridConfig& grid) noexcept {
  return p.x >= 0 && p.x < grid.width && p.y >= 0 && p.y < grid.height;
}

Position move(Position p, Action a, const GridConfig& grid) noexcept {
  const Position d = kOffsets[action_code(a)];
  const Position next{p.x + d.x, p.y + d.y};
  return in_bounds(next, grid) ? next : p;
}

GameState reset(const GridConfig& grid, Rng& rng) {
  const auto cells = static_cast<std::uint64_t>(grid.cells());
  const auto hunter = static_cast<int>(rng.uniform_below(cells));
  auto prey = static_cast<int>(rng.uniform_below(cells - 1));
  if (prey >= hunter) ++prey;
  return GameState{{hunter % grid.width, hunter / grid.width},
                   {prey % grid.width, prey / grid.width}};
}

StepOutcome step(const GameState& state, Action action, const GridConfig& grid, Rng& rng) {
  require_live(state, grid);
  GameState next{move(state.hunter, action, grid), state.prey};
  if (next.captured()) {
    return {next, 0.0, true};
  }
  // At least one of the four prey moves avoids the hunter: an interior prey
  // has four distinct neighbours, and an edge prey can always stay put.
  for (;;) {
    const Position candidate = move(state.prey, action_from_code(static_cast<int>(rng.uniform_below(kActionCount))), grid);
    if (candidate != next.hunter) {
      next.prey = candidate;
      break;
    }
  }
  return {next, -1.0, false};
}

std::size_t state_index(const GameState& state, const GridConfig& grid) noexcept {
  const auto w = static_cast<std::size_t>(grid.width);
  const auto cells = static_cast<std::size_t>(grid.cells());
  const auto hunter = static_cast<std::size_t>(state.hunter.y) * w + static_cast<std::size_t>(state.hunter.x);
  const auto prey = static_cast<std::size_t>(state.prey.y) * w + static_cast<std::size_t>(state.prey.x);
  return hunter * cells + prey;
}

GameState state_from_index(std::size_t index, const GridConfig& grid) {
  if (index >= grid.state_count()) {
    throw std::out_of_range("state index " + std::to_string(index) + " outside " +
                            format_grid(grid) + " state space");
  }
  const auto cells = static_cast<std::size_t>(grid.cells());
  const auto hunter = static_cast<int>(index / cells);
  const auto prey = static_cast<int>(index % cells);
  return GameState{{hunter % grid.width, hunter / grid.width},
                   {prey % grid.width, prey / grid.width}};
}

std::vector<Transition> transition_distribution(const GameState& state, Action action,
                                                const GridConfig& grid) {
  require_live(state, grid);
  const Position hunter = move(state.hunter, action, grid);
  if (hunter == state.prey) {
    return {Transition{GameState{hunter, state.prey}, 1.0, 0.0, true}};
  }

  // Re-drawing on collision makes the prey uniform over the admissible draws.
  std::array<Position, kActionCount> landing{};
  std::array<int, kActionCount> weight{};
  int distinct = 0;
  int admissible = 0;
  for (const Action dir : kAllActions) {
    const Position p = move(state.prey, dir, grid);
    if (p == hunter) continue;
    ++admissible;
    int slot = 0;
    while (slot < distinct && landing[slot] != p) ++slot;
    if (slot == distinct) landing[distinct++] = p;
    ++weight[slot];
  }

  std::vector<Transition> out;
  out.reserve(distinct);
  for (int i = 0; i < distinct; ++i) {
    out.push_back(Transition{GameState{hunter, landing[i]},
                             static_cast<double>(weight[i]) / admissible, -1.0, false});
  }
  return out;
}

}  // namespace rshape
