#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rshape/gridworld.hpp"
#include "rshape/rng.hpp"

namespace rshape {

using QRow = std::span<const double, kActionCount>;

/// Dense action-value table with one row of four entries per state index.
/// Rows for coincident (captured) states exist but are never read by the
/// learner.
class QTable {
 public:
  explicit QTable(const GridConfig& grid);

  const GridConfig& grid() const noexcept { return grid_; }
  std::size_t state_count() const noexcept { return values_.size() / kActionCount; }

  QRow row(std::size_t state) const noexcept {
    return QRow(values_.data() + state * kActionCount, kActionCount);
  }
  QRow row(const GameState& s) const noexcept { return row(state_index(s, grid_)); }

  double& at(std::size_t state, Action a) noexcept {
    return values_[state * kActionCount + action_code(a)];
  }
  double at(std::size_t state, Action a) const noexcept {
    return values_[state * kActionCount + action_code(a)];
  }

  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  GridConfig grid_;
  std::vector<double> values_;
};

struct LearningParams {
  double alpha = 0.1;    // step size, (0, 1]
  double gamma = 1.0;    // discount, [0, 1]
  double epsilon = 0.1;  // exploration probability, [0, 1]

  void validate() const;
};

/// Epsilon-greedy: with probability epsilon a uniform action, otherwise a
/// maximizing action with ties broken uniformly at random.
Action select_action(const QTable& q, const GameState& s, double epsilon, Rng& rng);
Action select_action(QRow row, double epsilon, Rng& rng);

/// Deterministic argmax; ties resolve to the lowest action code.
Action greedy_action(const QTable& q, const GameState& s);
Action greedy_action(QRow row) noexcept;

/// One-step Q-learning backup,
///   Q(s,a) += alpha * (r + gamma * max_b Q(s',b) - Q(s,a)),
/// with the bootstrap term dropped when s' is terminal. Returns the new
/// Q(s,a). Throws std::invalid_argument for a non-finite reward.
double update(QTable& q, const GameState& s, Action a, double r, const GameState& s_next,
              bool terminal, const LearningParams& params);

/// Episodes longer than this are cut off and flagged as truncated.
inline constexpr int kDefaultStepCap = 10000;

struct EpisodeOutcome {
  int steps = 0;
  double env_return = 0.0;
  double shaped_return = 0.0;
  bool truncated = false;
};

/// Plays one episode from a fresh reset, learning online.
///
/// learning_reward(s, a, env_reward) gives the reward the update consumes;
/// it is invoked once per step for the action chosen in s. The episode ends
/// on capture or after step_cap steps.
template <typename RewardFn>
EpisodeOutcome run_episode(QTable& q, const LearningParams& params, int step_cap, Rng& rng,
                           RewardFn&& learning_reward) {
  const GridConfig& grid = q.grid();
  EpisodeOutcome out;
  GameState s = reset(grid, rng);
  while (out.steps < step_cap) {
    const Action a = select_action(q, s, params.epsilon, rng);
    const StepOutcome o = step(s, a, grid, rng);
    const double r = learning_reward(s, a, o.reward);
    update(q, s, a, r, o.next_state, o.terminal, params);
    ++out.steps;
    out.env_return += o.reward;
    out.shaped_return += r;
    if (o.terminal) return out;
    s = o.next_state;
  }
  out.truncated = true;
  return out;
}

/// Greedy action of every state index (coincident states map to Down).
std::vector<Action> greedy_policy(const QTable& q);

}  // namespace rshape
