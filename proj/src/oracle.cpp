#include "rshape/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rshape {

namespace {

struct Edge {
  std::size_t next;
  double probability;
  double reward;
  bool terminal;
};

/// Successor lists for every live state and action.
class Dynamics {
 public:
  explicit Dynamics(const GridConfig& grid) : grid_(grid) {
    grid.validate();
    const std::size_t n = grid.state_count();
    offsets_.assign(n * kActionCount + 1, 0);
    for (std::size_t s = 0; s < n; ++s) {
      const GameState state = state_from_index(s, grid);
      for (const Action a : kAllActions) {
        const std::size_t slot = s * kActionCount + action_code(a);
        if (!state.captured()) {
          for (const Transition& t : transition_distribution(state, a, grid)) {
            edges_.push_back({state_index(t.next_state, grid), t.probability, t.reward, t.terminal});
          }
        }
        offsets_[slot + 1] = edges_.size();
      }
    }
  }

  bool live(std::size_t s) const noexcept {
    return offsets_[s * kActionCount] != offsets_[(s + 1) * kActionCount];
  }

  double backup(std::size_t s, Action a, std::span<const double> values, double gamma) const {
    const std::size_t slot = s * kActionCount + action_code(a);
    double sum = 0.0;
    for (std::size_t e = offsets_[slot]; e < offsets_[slot + 1]; ++e) {
      const Edge& edge = edges_[e];
      sum += edge.probability * (edge.reward + (edge.terminal ? 0.0 : gamma * values[edge.next]));
    }
    return sum;
  }

  std::size_t size() const noexcept { return grid_.state_count(); }

 private:
  GridConfig grid_;
  std::vector<std::size_t> offsets_;
  std::vector<Edge> edges_;
};

}  // namespace

OracleSolution value_iteration_oracle(const GridConfig& grid, double gamma, double tolerance,
                                      int sweep_cap) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("oracle tolerance must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  const Dynamics dyn(grid);
  const std::size_t n = dyn.size();

  OracleSolution sol{grid, std::vector<double>(n, 0.0), {}, {}, 0};
  std::vector<double> next(n, 0.0);
  bool converged = false;
  while (sol.sweeps < sweep_cap) {
    double delta = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (!dyn.live(s)) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (const Action a : kAllActions) best = std::max(best, dyn.backup(s, a, sol.values, gamma));
      next[s] = best;
      delta = std::max(delta, std::abs(best - sol.values[s]));
    }
    sol.values.swap(next);
    ++sol.sweeps;
    if (delta < tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw std::runtime_error("value iteration did not converge within " +
                             std::to_string(sweep_cap) + " sweeps on " + format_grid(grid));
  }

  sol.action_values.assign(n, {0.0, 0.0, 0.0, 0.0});
  sol.policy.assign(n, Action::Down);
  for (std::size_t s = 0; s < n; ++s) {
    if (!dyn.live(s)) continue;
    for (const Action a : kAllActions) {
      sol.action_values[s][action_code(a)] = dyn.backup(s, a, sol.values, gamma);
    }
    sol.policy[s] = greedy_action(QRow(sol.action_values[s]));
  }
  return sol;
}

PolicyEvaluation evaluate_policy(const GridConfig& grid, std::span<const Action> policy,
                                 double gamma, double tolerance, int sweep_cap) {
  const Dynamics dyn(grid);
  const std::size_t n = dyn.size();
  if (policy.size() != n) {
    throw std::invalid_argument("policy covers " + std::to_string(policy.size()) +
                                " states, grid has " + std::to_string(n));
  }
  PolicyEvaluation eval{std::vector<double>(n, 0.0), false, 0};
  std::vector<double> next(n, 0.0);
  while (eval.sweeps < sweep_cap) {
    double delta = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (!dyn.live(s)) continue;
      next[s] = dyn.backup(s, policy[s], eval.values, gamma);
      delta = std::max(delta, std::abs(next[s] - eval.values[s]));
    }
    eval.values.swap(next);
    ++eval.sweeps;
    if (delta < tolerance) {
      eval.converged = true;
      break;
    }
  }
  return eval;
}

double mean_steps_to_capture(const GridConfig& grid, std::span<const double> values) {
  double total = 0.0;
  std::size_t live = 0;
  for (std::size_t s = 0; s < values.size(); ++s) {
    if (state_from_index(s, grid).captured()) continue;
    total += 1.0 - values[s];
    ++live;
  }
  return total / static_cast<double>(live);
}

double policy_agreement(const OracleSolution& oracle, std::span<const Action> policy,
                        double slack) {
  std::size_t agree = 0;
  std::size_t live = 0;
  for (std::size_t s = 0; s < oracle.values.size(); ++s) {
    if (state_from_index(s, oracle.grid).captured()) continue;
    ++live;
    if (oracle.action_values[s][action_code(policy[s])] >= oracle.values[s] - slack) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(live);
}

}  // namespace rshape
