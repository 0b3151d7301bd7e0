#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rshape/gridworld.hpp"
#include "rshape/qlearn.hpp"
#include "rshape/rng.hpp"

namespace rshape {

/// A trained advisor. The table is frozen at construction.
class Teacher {
 public:
  explicit Teacher(QTable q) : q_(std::move(q)) {}

  const QTable& q() const noexcept { return q_; }
  const GridConfig& grid() const noexcept { return q_.grid(); }

 private:
  QTable q_;
};

enum class ScheduleKind { None, Suboptimal, AntiOptimal, Continuous, Encouragement };

/// Accepts the short CLI names none|sub|anti|cont|enc.
ScheduleKind parse_schedule_kind(std::string_view name);
std::string_view schedule_name(ScheduleKind kind) noexcept;

struct Schedule {
  ScheduleKind kind = ScheduleKind::None;
  double c = 10.0;      // punishment magnitude
  double bonus = 10.0;  // encouragement reward, Encouragement only

  void validate() const;
};

/// Shaping value for taking action a given the teacher's row for the state.
/// Positive values are costs. Ties with the row maximum count as optimal,
/// ties with the minimum count as worst.
///
///   Suboptimal     C if Q(a) < max Q
///   AntiOptimal    C if Q(a) == min Q
///   Continuous     C * (max Q - Q(a))
///   Encouragement  -B if Q(a) == max Q, plus C if Q(a) == min Q
double punishment(QRow teacher_row, const Schedule& schedule, Action a) noexcept;

/// Throws std::invalid_argument if s is captured or off the teacher's grid.
double punishment(const Teacher& teacher, const Schedule& schedule, const GameState& s, Action a);

/// Reward the student learns from: env_reward - pun.
constexpr double shaped_reward(double env_reward, double pun) noexcept { return env_reward - pun; }

/// Plain (unshaped) Q-learning from a zero table. Throws std::invalid_argument
/// for episodes < 1. When log is given it receives one entry per episode.
Teacher train_teacher(const GridConfig& grid, const LearningParams& params, int episodes, Rng& rng,
                      int step_cap = kDefaultStepCap,
                      std::vector<EpisodeOutcome>* log = nullptr);

void save_teacher(const std::filesystem::path& path, const Teacher& teacher);
Teacher load_teacher(const std::filesystem::path& path);

}  // namespace rshape
