#include "rshape/qlearn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rshape {

QTable::QTable(const GridConfig& grid) : grid_(grid) {
  grid_.validate();
  values_.assign(grid_.state_count() * kActionCount, 0.0);
}

void LearningParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1], got " + std::to_string(gamma));
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1], got " + std::to_string(epsilon));
  }
}

Action select_action(QRow row, double epsilon, Rng& rng) {
  if (rng.uniform01() < epsilon) {
    return static_cast<Action>(rng.uniform_below(kActionCount));
  }
  double best = row[0];
  for (int i = 1; i < kActionCount; ++i) best = std::max(best, row[i]);
  std::array<int, kActionCount> tied{};
  int count = 0;
  for (int i = 0; i < kActionCount; ++i) {
    if (row[i] == best) tied[count++] = i;
  }
  if (count == 1) return static_cast<Action>(tied[0]);
  return static_cast<Action>(tied[rng.uniform_below(static_cast<std::uint64_t>(count))]);
}

Action select_action(const QTable& q, const GameState& s, double epsilon, Rng& rng) {
  return select_action(q.row(s), epsilon, rng);
}

Action greedy_action(QRow row) noexcept {
  int best = 0;
  for (int i = 1; i < kActionCount; ++i) {
    if (row[i] > row[best]) best = i;
  }
  return static_cast<Action>(best);
}

Action greedy_action(const QTable& q, const GameState& s) { return greedy_action(q.row(s)); }

double update(QTable& q, const GameState& s, Action a, double r, const GameState& s_next,
              bool terminal, const LearningParams& params) {
  if (!std::isfinite(r)) {
    throw std::invalid_argument("Q update received a non-finite reward");
  }
  double target = r;
  if (!terminal) {
    const QRow next = q.row(s_next);
    double best = next[0];
    for (int i = 1; i < kActionCount; ++i) best = std::max(best, next[i]);
    target += params.gamma * best;
  }
  double& entry = q.at(state_index(s, q.grid()), a);
  entry += params.alpha * (target - entry);
  return entry;
}

std::vector<Action> greedy_policy(const QTable& q) {
  std::vector<Action> policy(q.state_count(), Action::Down);
  for (std::size_t i = 0; i < policy.size(); ++i) policy[i] = greedy_action(q.row(i));
  return policy;
}

}  // namespace rshape
