#pragma once

#include <array>
#include <span>
#include <vector>

#include "rshape/gridworld.hpp"
#include "rshape/qlearn.hpp"

namespace rshape {

/// Exact optimal solution of the pursuit MDP. All vectors are indexed by
/// state_index; coincident (captured) states hold value 0.
struct OracleSolution {
  GridConfig grid;
  std::vector<double> values;
  std::vector<std::array<double, kActionCount>> action_values;
  std::vector<Action> policy;
  int sweeps = 0;
};

/// Synchronous Bellman optimality sweeps over transition_distribution until
/// the max-norm change drops below tolerance. With gamma = 1 the values are
/// negated expected steps-to-capture, less the final free step. Throws
/// std::runtime_error if sweep_cap sweeps do not converge.
OracleSolution value_iteration_oracle(const GridConfig& grid, double gamma,
                                      double tolerance = 1e-9, int sweep_cap = 100000);

struct PolicyEvaluation {
  std::vector<double> values;
  bool converged = false;  // false: some state never reaches capture
  int sweeps = 0;
};

/// Iterative evaluation of a fixed deterministic policy (one action per
/// state index).
PolicyEvaluation evaluate_policy(const GridConfig& grid, std::span<const Action> policy,
                                 double gamma, double tolerance = 1e-9,
                                 int sweep_cap = 1000000);

/// Expected episode length from a uniformly random reset, given state
/// values under gamma = 1 (steps = 1 - value).
double mean_steps_to_capture(const GridConfig& grid, std::span<const double> values);

/// Fraction of live states where policy picks an action whose optimal
/// action value lies within slack of the optimum.
double policy_agreement(const OracleSolution& oracle, std::span<const Action> policy,
                        double slack = 1e-6);

}  // namespace rshape
