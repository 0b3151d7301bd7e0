#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rshape/errors.hpp"
#include "rshape/experiment.hpp"
#include "rshape/figures.hpp"

using namespace rshape;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.grid = GridConfig{5, 5};
  c.episodes = 400;
  c.trials = 3;
  c.smoothing_window = 50;
  c.base_seed = 17;
  return c;
}

const Teacher& small_teacher() {
  static const Teacher t = [] {
    Rng rng(99);
    return train_teacher(GridConfig{5, 5}, LearningParams{}, 3000, rng);
  }();
  return t;
}

const Teacher& full_teacher() {
  static const Teacher t = [] {
    Rng rng(0);
    return train_teacher(GridConfig{10, 10}, LearningParams{}, 20000, rng);
  }();
  return t;
}

TrialRecords constant_trial(int episodes, int steps) {
  TrialRecords r;
  for (int e = 0; e < episodes; ++e) r.push_back({e, steps, -(steps - 1.0), -(steps - 1.0), false});
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("rshape_experiment_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(SmoothTest, WorkedExamples) {
  const std::vector<double> series{4, 2};
  EXPECT_EQ(smooth(series, 2), (std::vector<double>{4, 3}));
  const std::vector<double> ramp{1, 2, 3, 4, 5, 6};
  EXPECT_EQ(smooth(ramp, 1), ramp);
  EXPECT_EQ(smooth(ramp, 3), (std::vector<double>{1, 1.5, 2, 3, 4, 5}));
  const std::vector<double> flat(50, 7.0);
  EXPECT_EQ(smooth(flat, 8), flat);
  EXPECT_THROW(smooth(ramp, 0), std::invalid_argument);
}

TEST(AggregateTest, ConstantTrialsHaveZeroSpread) {
  const std::vector<TrialRecords> trials(4, constant_trial(10, 12));
  const LearningCurve c = aggregate(trials, 3);
  ASSERT_EQ(c.size(), 10u);
  for (std::size_t e = 0; e < 10; ++e) {
    EXPECT_EQ(c.mean_steps[e], 12.0);
    EXPECT_EQ(c.std_steps[e], 0.0);
    EXPECT_EQ(c.smoothed[e], 12.0);
  }
}

TEST(AggregateTest, PopulationDeviation) {
  const std::vector<TrialRecords> trials{constant_trial(2, 2), constant_trial(2, 4)};
  const LearningCurve c = aggregate(trials, 1);
  EXPECT_EQ(c.mean_steps[0], 3.0);
  EXPECT_EQ(c.std_steps[0], 1.0);
}

TEST(AggregateTest, RejectsRaggedTrials) {
  const std::vector<TrialRecords> trials{constant_trial(2, 2), constant_trial(3, 4)};
  EXPECT_THROW(aggregate(trials, 1), std::invalid_argument);
}

TEST(RunTrialTest, DeterministicGivenSeed) {
  const auto config = small_config();
  EXPECT_EQ(run_trial(config, nullptr, 5), run_trial(config, nullptr, 5));
  EXPECT_NE(run_trial(config, nullptr, 5), run_trial(config, nullptr, 6));
}

TEST(RunTrialTest, RecordInvariants) {
  auto config = small_config();
  config.schedule = {ScheduleKind::Suboptimal, 10.0, 0.0};
  config.step_cap = 60;
  const auto records = run_trial(config, &small_teacher(), 3);
  ASSERT_EQ(records.size(), 400u);
  bool saw_truncation = false;
  for (std::size_t e = 0; e < records.size(); ++e) {
    const auto& r = records[e];
    EXPECT_EQ(r.episode, static_cast<int>(e));
    EXPECT_LE(r.shaped_return, r.env_return);
    if (r.truncated) {
      saw_truncation = true;
      EXPECT_EQ(r.steps, 60);
      EXPECT_EQ(r.env_return, -60.0);
    } else {
      EXPECT_EQ(r.env_return, -(r.steps - 1.0));
    }
  }
  EXPECT_TRUE(saw_truncation) << "cap of 60 steps should bite early in training";
}

TEST(RunTrialTest, NoneScheduleLogsEqualReturns) {
  for (const auto& r : run_trial(small_config(), nullptr, 2)) EXPECT_EQ(r.shaped_return, r.env_return);
}

TEST(RunTrialTest, ZeroMagnitudeMatchesBaseline) {
  const auto config = small_config();
  const auto baseline = run_trial(config, nullptr, 8);
  for (const auto kind : {ScheduleKind::Suboptimal, ScheduleKind::AntiOptimal, ScheduleKind::Continuous,
                          ScheduleKind::Encouragement}) {
    auto shaped = config;
    shaped.schedule = {kind, 0.0, 0.0};
    EXPECT_EQ(run_trial(shaped, &small_teacher(), 8), baseline) << schedule_name(kind);
  }
}

TEST(RunTrialTest, EncouragementBonusAloneChangesLearning) {
  auto config = small_config();
  config.schedule = {ScheduleKind::Encouragement, 0.0, 10.0};
  EXPECT_NE(run_trial(config, &small_teacher(), 8), run_trial(small_config(), nullptr, 8));
}

TEST(RunTrialTest, TeacherChecks) {
  auto config = small_config();
  config.schedule = {ScheduleKind::AntiOptimal, 10.0, 0.0};
  EXPECT_THROW(run_trial(config, nullptr, 1), std::invalid_argument);
  const Teacher wrong{QTable(GridConfig{4, 4})};
  EXPECT_THROW(run_trial(config, &wrong, 1), std::invalid_argument);
}

TEST(RunExperimentTest, SingleTrialCurveIsThatTrial) {
  auto config = small_config();
  config.trials = 1;
  const auto result = run_experiment(config, nullptr, 1);
  const auto trial = run_trial(config, nullptr, config.base_seed);
  ASSERT_EQ(result.curve.size(), trial.size());
  for (std::size_t e = 0; e < trial.size(); ++e) {
    EXPECT_EQ(result.curve.mean_steps[e], trial[e].steps);
    EXPECT_EQ(result.curve.std_steps[e], 0.0);
  }
}

TEST(RunExperimentTest, JobCountDoesNotChangeOutput) {
  auto config = small_config();
  config.trials = 5;
  config.schedule = {ScheduleKind::Continuous, 10.0, 0.0};
  const auto serial = run_experiment(config, &small_teacher(), 1);
  const auto parallel = run_experiment(config, &small_teacher(), 4);
  EXPECT_EQ(serial.trials, parallel.trials);
  EXPECT_EQ(serial.curve, parallel.curve);
}

TEST(RunExperimentTest, TrialOrderDoesNotChangeCurve) {
  auto config = small_config();
  config.trials = 4;
  auto result = run_experiment(config, nullptr, 1);
  auto reversed = result.trials;
  std::reverse(reversed.begin(), reversed.end());
  std::rotate(reversed.begin(), reversed.begin() + 1, reversed.end());
  EXPECT_EQ(aggregate(reversed, config.smoothing_window), result.curve);
}

TEST(RunExperimentTest, WritesCsvArtifacts) {
  const auto dir = scratch("artifacts");
  auto config = small_config();
  config.episodes = 5;
  config.trials = 2;
  run_experiment(config, dir, 1);
  ASSERT_TRUE(fs::exists(dir / "trial_000.csv"));
  ASSERT_TRUE(fs::exists(dir / "trial_001.csv"));
  const std::string trial = slurp(dir / "trial_000.csv");
  EXPECT_EQ(trial.substr(0, trial.find('\n')), "episode,steps,env_return,shaped_return,truncated");
  const std::string curve = slurp(dir / "curve.csv");
  EXPECT_EQ(curve.substr(0, curve.find('\n')), "episode,mean_steps,std_steps,smoothed_mean_steps");
  EXPECT_EQ(std::count(curve.begin(), curve.end(), '\n'), 6);
  EXPECT_EQ(curve.back(), '\n');
  fs::remove_all(dir);
}

TEST(RunExperimentTest, UnwritableDirectoryIsIoError) {
  auto config = small_config();
  config.episodes = 2;
  config.trials = 1;
  EXPECT_THROW(run_experiment(config, fs::path("/proc/rshape-forbidden"), 1), IoError);
}

TEST(SweepTest, SingleValueMatchesDirectRun) {
  auto config = small_config();
  config.schedule = {ScheduleKind::AntiOptimal, 0.0, 0.0};
  const std::vector<double> ten{10.0};
  const auto curves = sweep(config, ten, &small_teacher(), 1);
  auto direct = config;
  direct.schedule.c = 10.0;
  EXPECT_EQ(curves.at(10.0), run_experiment(direct, &small_teacher(), 1).curve);

  const std::vector<double> zero{0.0};
  EXPECT_EQ(sweep(config, zero, &small_teacher(), 1).at(0.0), run_experiment(small_config(), nullptr, 1).curve);
  EXPECT_THROW(sweep(config, std::vector<double>{}, &small_teacher(), 1), std::invalid_argument);
}

TEST(CompareTest, BaselineAgainstItself) {
  const std::vector<TrialRecords> a{constant_trial(20, 5), constant_trial(20, 9)};
  const auto curve = aggregate(a, 4);
  const std::vector<NamedCurve> curves{{"base", &curve}, {"copy", &curve}};
  const std::vector<EpisodeRange> ranges{{0, 10}, {5, 20}};
  const auto rows = compare(curves, ranges, "base");
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.delta_vs_baseline, 0.0);
    EXPECT_EQ(r.mean_steps, 7.0);
    EXPECT_EQ(r.std_steps, 2.0);
  }
}

TEST(CompareTest, RejectsBadInput) {
  const auto c10 = aggregate(std::vector<TrialRecords>{constant_trial(10, 3)}, 1);
  const auto c12 = aggregate(std::vector<TrialRecords>{constant_trial(12, 3)}, 1);
  const std::vector<NamedCurve> mismatch{{"a", &c10}, {"b", &c12}};
  const std::vector<EpisodeRange> ok{{0, 10}};
  EXPECT_THROW(compare(mismatch, ok), std::invalid_argument);
  const std::vector<NamedCurve> one{{"a", &c10}};
  const std::vector<EpisodeRange> past_end{{5, 11}};
  EXPECT_THROW(compare(one, past_end), std::invalid_argument);
  EXPECT_THROW(compare(one, ok, "missing"), std::invalid_argument);
}

// Recompute the summary from the written curve CSV with a naive reader.
TEST(CompareTest, SummaryMatchesSpreadsheetRecomputation) {
  const auto dir = scratch("summary");
  auto config = small_config();
  config.trials = 4;
  const auto base = run_experiment(config, nullptr, 1);
  auto shaped_cfg = config;
  shaped_cfg.schedule = {ScheduleKind::Suboptimal, 10.0, 0.0};
  const auto shaped = run_experiment(shaped_cfg, &small_teacher(), 1);
  fs::create_directories(dir);
  write_curve_csv(dir / "base.csv", base.curve);
  write_curve_csv(dir / "shaped.csv", shaped.curve);

  const std::vector<NamedCurve> curves{{"base", &base.curve}, {"shaped", &shaped.curve}};
  const std::vector<EpisodeRange> ranges{{0, 100}, {250, 400}};
  const auto rows = compare(curves, ranges, "base");
  write_summary_csv(dir / "summary.csv", rows);

  const auto column = [](const fs::path& p, int col) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<double> values;
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string cell;
      for (int i = 0; i <= col; ++i) std::getline(ss, cell, ',');
      values.push_back(std::stod(cell));
    }
    return values;
  };
  const auto base_mean = column(dir / "base.csv", 1);
  const auto shaped_mean = column(dir / "shaped.csv", 1);
  const auto summary_mean = column(dir / "summary.csv", 3);
  const auto summary_delta = column(dir / "summary.csv", 5);
  ASSERT_EQ(summary_mean.size(), 4u);
  std::size_t row = 0;
  for (const auto* series : {&base_mean, &shaped_mean}) {
    for (const auto& r : ranges) {
      double sum = 0.0;
      for (int i = r.start; i < r.end; ++i) sum += (*series)[static_cast<std::size_t>(i)];
      double base_sum = 0.0;
      for (int i = r.start; i < r.end; ++i) base_sum += base_mean[static_cast<std::size_t>(i)];
      EXPECT_EQ(summary_mean[row], sum / (r.end - r.start));
      EXPECT_EQ(summary_delta[row], sum / (r.end - r.start) - base_sum / (r.end - r.start));
      ++row;
    }
  }
  fs::remove_all(dir);
}

// Full-scale directional checks (10x10, 20,000 episodes, 10 seeds).

TEST(FullScaleTest, SuboptimalPunishmentSpeedsUpEarlyLearning) {
  ExperimentConfig config;
  const auto base = run_experiment(config, nullptr);
  config.schedule = {ScheduleKind::Suboptimal, 10.0, 0.0};
  const auto sub = run_experiment(config, &full_teacher());
  const EpisodeRange early{500, 2000};
  EXPECT_LT(range_mean(sub.curve.mean_steps, early), range_mean(base.curve.mean_steps, early));
}

TEST(FullScaleTest, AntiOptimalSweepEarlyPhaseDecreasesWithC) {
  ExperimentConfig config;
  config.schedule = {ScheduleKind::AntiOptimal, 0.0, 0.0};
  const std::vector<double> cs{1.0, 10.0, 50.0};
  const auto curves = sweep(config, cs, &full_teacher());
  const EpisodeRange early{0, 2000};
  const double m1 = range_mean(curves.at(1.0).mean_steps, early);
  const double m10 = range_mean(curves.at(10.0).mean_steps, early);
  const double m50 = range_mean(curves.at(50.0).mean_steps, early);
  std::printf("anti early-phase means: C=1 %.6f, C=10 %.6f, C=50 %.6f\n", m1, m10, m50);
  EXPECT_GT(m1, m10);
  EXPECT_GT(m10, m50);
}
