#include "rshape/advisor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rshape/qtable_io.hpp"

namespace rshape {

ScheduleKind parse_schedule_kind(std::string_view name) {
  if (name == "none") return ScheduleKind::None;
  if (name == "sub") return ScheduleKind::Suboptimal;
  if (name == "anti") return ScheduleKind::AntiOptimal;
  if (name == "cont") return ScheduleKind::Continuous;
  if (name == "enc") return ScheduleKind::Encouragement;
  throw std::invalid_argument("unknown schedule '" + std::string(name) +
                              "' (expected none|sub|anti|cont|enc)");
}

std::string_view schedule_name(ScheduleKind kind) noexcept {
  switch (kind) {
    case ScheduleKind::None: return "none";
    case ScheduleKind::Suboptimal: return "sub";
    case ScheduleKind::AntiOptimal: return "anti";
    case ScheduleKind::Continuous: return "cont";
    case ScheduleKind::Encouragement: return "enc";
  }
  return "?";
}

void Schedule::validate() const {
  if (!(std::isfinite(c) && c >= 0.0)) {
    throw std::invalid_argument("punishment magnitude C must be finite and >= 0");
  }
  if (!(std::isfinite(bonus) && bonus >= 0.0)) {
    throw std::invalid_argument("encouragement bonus B must be finite and >= 0");
  }
}

double punishment(QRow row, const Schedule& schedule, Action a) noexcept {
  if (schedule.kind == ScheduleKind::None) return 0.0;
  const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
  const double q = row[action_code(a)];
  switch (schedule.kind) {
    case ScheduleKind::Suboptimal:
      return q < *hi ? schedule.c : 0.0;
    case ScheduleKind::AntiOptimal:
      return q == *lo ? schedule.c : 0.0;
    case ScheduleKind::Continuous:
      return schedule.c * (*hi - q);
    case ScheduleKind::Encouragement:
      return (q == *hi ? -schedule.bonus : 0.0) + (q == *lo ? schedule.c : 0.0);
    case ScheduleKind::None:
      break;
  }
  return 0.0;
}

double punishment(const Teacher& teacher, const Schedule& schedule, const GameState& s, Action a) {
  if (!in_bounds(s.hunter, teacher.grid()) || !in_bounds(s.prey, teacher.grid())) {
    throw std::invalid_argument("state lies outside the teacher's " + format_grid(teacher.grid()) +
                                " grid");
  }
  if (s.captured()) throw std::invalid_argument("no advice exists for a captured state");
  return punishment(teacher.q().row(s), schedule, a);
}

Teacher train_teacher(const GridConfig& grid, const LearningParams& params, int episodes, Rng& rng,
                      int step_cap, std::vector<EpisodeOutcome>* log) {
  if (episodes < 1) throw std::invalid_argument("teacher training needs at least one episode");
  if (step_cap < 1) throw std::invalid_argument("step cap must be at least 1");
  params.validate();
  QTable q(grid);
  const auto env_only = [](const GameState&, Action, double env_reward) { return env_reward; };
  if (log != nullptr) log->reserve(log->size() + static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    const EpisodeOutcome o = run_episode(q, params, step_cap, rng, env_only);
    if (log != nullptr) log->push_back(o);
  }
  return Teacher(std::move(q));
}

void save_teacher(const std::filesystem::path& path, const Teacher& teacher) {
  save_qtable(path, teacher.q());
}

Teacher load_teacher(const std::filesystem::path& path) { return Teacher(load_qtable(path)); }

}  // namespace rshape
