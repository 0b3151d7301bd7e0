#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <filesystem>

#include "rshape/advisor.hpp"
#include "rshape/oracle.hpp"

using namespace rshape;

namespace {

using Row = std::array<double, 4>;

double pun(const Row& row, ScheduleKind kind, int a, double c = 10.0, double b = 10.0) {
  return punishment(QRow(row), Schedule{kind, c, b}, static_cast<Action>(a));
}

// Literal transcriptions of the three indicator/difference definitions,
// written against the row directly.
double ref_sub(const Row& q, int a, double c) {
  double best = q[0];
  for (int b = 1; b < 4; ++b) if (q[b] > best) best = q[b];
  const int indicator = (q[a] != best) ? 1 : 0;  // a is not an argmax
  return c * indicator;
}

double ref_anti(const Row& q, int a, double c) {
  double worst = q[0];
  for (int b = 1; b < 4; ++b) if (q[b] < worst) worst = q[b];
  const int indicator = (q[a] == worst) ? 1 : 0;  // a is an argmin
  return c * indicator;
}

double ref_cont(const Row& q, int a, double c) {
  double best = q[0];
  for (int b = 1; b < 4; ++b) if (q[b] > best) best = q[b];
  // C * (Q(s,a) - max_b Q(s,b)), negated so that the cost is non-negative.
  return -(c * (q[a] - best));
}

Row random_row(Rng& rng) {
  Row row{};
  const bool tie_heavy = rng.uniform_below(2) == 0;
  for (auto& v : row) {
    v = tie_heavy ? -static_cast<double>(rng.uniform_below(4)) : -40.0 * rng.uniform01();
  }
  return row;
}

}  // namespace

TEST(ScheduleTest, ParsesNames) {
  EXPECT_EQ(parse_schedule_kind("none"), ScheduleKind::None);
  EXPECT_EQ(parse_schedule_kind("sub"), ScheduleKind::Suboptimal);
  EXPECT_EQ(parse_schedule_kind("anti"), ScheduleKind::AntiOptimal);
  EXPECT_EQ(parse_schedule_kind("cont"), ScheduleKind::Continuous);
  EXPECT_EQ(parse_schedule_kind("enc"), ScheduleKind::Encouragement);
  EXPECT_THROW(parse_schedule_kind("bogus"), std::invalid_argument);
  for (const auto k : {ScheduleKind::None, ScheduleKind::Suboptimal, ScheduleKind::AntiOptimal,
                       ScheduleKind::Continuous, ScheduleKind::Encouragement}) {
    EXPECT_EQ(parse_schedule_kind(schedule_name(k)), k);
  }
}

TEST(ScheduleTest, RejectsNegativeMagnitudes) {
  EXPECT_THROW((Schedule{ScheduleKind::Suboptimal, -1.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((Schedule{ScheduleKind::Encouragement, 1.0, -1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((Schedule{ScheduleKind::Continuous, NAN, 0.0}.validate()), std::invalid_argument);
}

TEST(PunishmentTest, WorkedRow) {
  const Row row{-3, -5, -4, -6};
  EXPECT_EQ(pun(row, ScheduleKind::Suboptimal, 0), 0.0);
  EXPECT_EQ(pun(row, ScheduleKind::Suboptimal, 2), 10.0);
  EXPECT_EQ(pun(row, ScheduleKind::AntiOptimal, 3), 10.0);
  EXPECT_EQ(pun(row, ScheduleKind::AntiOptimal, 2), 0.0);
  EXPECT_EQ(pun(row, ScheduleKind::Continuous, 1), 20.0);
  EXPECT_EQ(pun(row, ScheduleKind::Continuous, 0), 0.0);
  EXPECT_EQ(pun(row, ScheduleKind::Encouragement, 0), -10.0);
  EXPECT_EQ(pun(row, ScheduleKind::Encouragement, 3), 10.0);
  EXPECT_EQ(pun(row, ScheduleKind::Encouragement, 2), 0.0);
  for (int a = 0; a < 4; ++a) EXPECT_EQ(pun(row, ScheduleKind::None, a), 0.0);
}

TEST(PunishmentTest, FlatRow) {
  const Row row{-4, -4, -4, -4};
  for (int a = 0; a < 4; ++a) {
    EXPECT_EQ(pun(row, ScheduleKind::Suboptimal, a), 0.0);
    EXPECT_EQ(pun(row, ScheduleKind::AntiOptimal, a), 10.0);
    EXPECT_EQ(pun(row, ScheduleKind::Continuous, a), 0.0);
  }
}

TEST(PunishmentTest, TeacherLookupChecksState) {
  const Teacher teacher{QTable(GridConfig{3, 3})};
  const Schedule sub{ScheduleKind::Suboptimal, 10.0, 0.0};
  EXPECT_THROW(punishment(teacher, sub, GameState{{0, 0}, {5, 5}}, Action::Down), std::invalid_argument);
  EXPECT_THROW(punishment(teacher, sub, GameState{{1, 1}, {1, 1}}, Action::Down), std::invalid_argument);
  // Unvisited (all-zero) rows: every action ties for best and worst.
  EXPECT_EQ(punishment(teacher, sub, GameState{{0, 0}, {2, 2}}, Action::Left), 0.0);
  EXPECT_EQ(punishment(teacher, Schedule{ScheduleKind::AntiOptimal, 10.0, 0.0},
                       GameState{{0, 0}, {2, 2}}, Action::Left),
            10.0);
}

TEST(PunishmentPropertyTest, MatchesBruteForceTranscription) {
  Rng rng(1000);
  for (int i = 0; i < 1000; ++i) {
    const Row row = random_row(rng);
    const double c = rng.uniform_below(2) == 0 ? 10.0 : 50.0 * rng.uniform01();
    for (int a = 0; a < 4; ++a) {
      ASSERT_EQ(pun(row, ScheduleKind::Suboptimal, a, c), ref_sub(row, a, c));
      ASSERT_EQ(pun(row, ScheduleKind::AntiOptimal, a, c), ref_anti(row, a, c));
      ASSERT_EQ(pun(row, ScheduleKind::Continuous, a, c), ref_cont(row, a, c));
    }
  }
}

TEST(PunishmentPropertyTest, SignsAndZeroSets) {
  Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    const Row row = random_row(rng);
    const double best = *std::max_element(row.begin(), row.end());
    const double worst = *std::min_element(row.begin(), row.end());
    for (int a = 0; a < 4; ++a) {
      const double sub = pun(row, ScheduleKind::Suboptimal, a);
      const double anti = pun(row, ScheduleKind::AntiOptimal, a);
      const double cont = pun(row, ScheduleKind::Continuous, a);
      ASSERT_GE(sub, 0.0);
      ASSERT_GE(anti, 0.0);
      ASSERT_GE(cont, 0.0);
      ASSERT_EQ(pun(row, ScheduleKind::None, a), 0.0);
      ASSERT_EQ(cont == 0.0, row[a] == best);
      ASSERT_EQ(sub == 0.0, row[a] == best);
      ASSERT_EQ(anti == 10.0, row[a] == worst);
    }
  }
}

TEST(PunishmentPropertyTest, ScaleEquivariance) {
  Rng rng(22);
  const ScheduleKind kinds[] = {ScheduleKind::Suboptimal, ScheduleKind::AntiOptimal,
                                ScheduleKind::Continuous, ScheduleKind::Encouragement};
  for (int i = 0; i < 1000; ++i) {
    const Row row = random_row(rng);
    const double c = 20.0 * rng.uniform01();
    const double k = 5.0 * rng.uniform01();
    for (const auto kind : kinds) {
      for (int a = 0; a < 4; ++a) {
        const double scaled = pun(row, kind, a, k * c, k * c);
        const double base = k * pun(row, kind, a, c, c);
        ASSERT_NEAR(scaled, base, 1e-12 * (1.0 + std::abs(base)));
      }
    }
  }
}

TEST(PunishmentPropertyTest, ShiftInvariance) {
  // Integer-valued rows and shifts keep the arithmetic exact.
  Rng rng(23);
  const ScheduleKind kinds[] = {ScheduleKind::Suboptimal, ScheduleKind::AntiOptimal,
                                ScheduleKind::Continuous, ScheduleKind::Encouragement};
  for (int i = 0; i < 1000; ++i) {
    Row row{};
    for (auto& v : row) v = -static_cast<double>(rng.uniform_below(6));
    const double shift = static_cast<double>(rng.uniform_below(200)) - 100.0;
    Row shifted = row;
    for (auto& v : shifted) v += shift;
    for (const auto kind : kinds) {
      for (int a = 0; a < 4; ++a) ASSERT_EQ(pun(row, kind, a), pun(shifted, kind, a));
    }
  }
}

TEST(ShapedRewardTest, Subtracts) {
  EXPECT_EQ(shaped_reward(-1.0, 10.0), -11.0);
  EXPECT_EQ(shaped_reward(-1.0, 0.0), -1.0);
  EXPECT_EQ(shaped_reward(-1.0, -10.0), 9.0);
}

TEST(TrainTeacherTest, RejectsZeroEpisodes) {
  Rng rng(0);
  EXPECT_THROW(train_teacher(GridConfig{3, 3}, LearningParams{}, 0, rng), std::invalid_argument);
}

TEST(TrainTeacherTest, DeterministicAndLogged) {
  Rng a(5), b(5);
  std::vector<EpisodeOutcome> log;
  const Teacher ta = train_teacher(GridConfig{4, 4}, LearningParams{}, 300, a, kDefaultStepCap, &log);
  const Teacher tb = train_teacher(GridConfig{4, 4}, LearningParams{}, 300, b);
  EXPECT_EQ(ta.q(), tb.q());
  ASSERT_EQ(log.size(), 300u);
  for (const auto& o : log) {
    EXPECT_EQ(o.env_return, o.shaped_return);
    EXPECT_EQ(o.env_return, -(o.steps - 1));
  }
}

TEST(TrainTeacherTest, FullScaleTeacherCapturesInFiniteTime) {
  const GridConfig grid{10, 10};
  Rng rng(0);
  const Teacher teacher = train_teacher(grid, LearningParams{0.1, 1.0, 0.1}, 20000, rng);
  // Greedy rollouts from random starts all end in capture.
  Rng eval(1);
  long long total = 0;
  constexpr int kRollouts = 2000;
  for (int i = 0; i < kRollouts; ++i) {
    GameState s = reset(grid, eval);
    int steps = 0;
    for (;;) {
      const StepOutcome o = step(s, greedy_action(teacher.q(), s), grid, eval);
      ++steps;
      if (o.terminal) break;
      s = o.next_state;
      ASSERT_LT(steps, 100000) << "greedy teacher failed to capture";
    }
    total += steps;
  }
  const double mean = static_cast<double>(total) / kRollouts;
  EXPECT_TRUE(std::isfinite(mean));
  std::printf("teacher greedy mean steps: %.3f\n", mean);
}

TEST(TrainTeacherTest, SmallGridTeacherMatchesOracle) {
  const GridConfig grid{3, 3};
  Rng rng(0);
  const Teacher teacher = train_teacher(grid, LearningParams{0.1, 1.0, 0.1}, 50000, rng);
  const auto oracle = value_iteration_oracle(grid, 1.0);
  EXPECT_GE(policy_agreement(oracle, greedy_policy(teacher.q())), 0.95);
}

TEST(TeacherFileTest, SaveLoadRoundTrip) {
  Rng rng(3);
  const Teacher teacher = train_teacher(GridConfig{3, 4}, LearningParams{}, 200, rng);
  const auto path = std::filesystem::temp_directory_path() / "rshape_teacher_roundtrip.qtable";
  save_teacher(path, teacher);
  const Teacher loaded = load_teacher(path);
  EXPECT_EQ(loaded.q(), teacher.q());
  EXPECT_EQ(loaded.grid(), (GridConfig{3, 4}));
  std::filesystem::remove(path);
}
