#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rshape/advisor.hpp"
#include "rshape/gridworld.hpp"
#include "rshape/qlearn.hpp"

namespace rshape {

inline constexpr const char* kTrainFresh = "train-fresh";

struct ExperimentConfig {
  GridConfig grid;
  LearningParams params;
  Schedule schedule;
  int episodes = 20000;
  int step_cap = kDefaultStepCap;
  int trials = 10;
  std::uint64_t base_seed = 1;
  int smoothing_window = 500;
  // A teacher file path, or kTrainFresh to train one with the fields below.
  std::string teacher_source = kTrainFresh;
  int teacher_episodes = 20000;
  std::uint64_t teacher_seed = 0;

  void validate() const;
};

struct EpisodeRecord {
  int episode = 0;
  int steps = 0;
  double env_return = 0.0;
  double shaped_return = 0.0;
  bool truncated = false;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

using TrialRecords = std::vector<EpisodeRecord>;

/// Per-episode statistics of steps-to-capture across trials. std_steps is
/// the population deviation (zero for a single trial).
struct LearningCurve {
  std::vector<double> mean_steps;
  std::vector<double> std_steps;
  std::vector<double> smoothed;

  std::size_t size() const noexcept { return mean_steps.size(); }
  friend bool operator==(const LearningCurve&, const LearningCurve&) = default;
};

/// Trailing moving average; the first window-1 entries average the
/// available prefix. Throws std::invalid_argument for window < 1.
std::vector<double> smooth(std::span<const double> series, int window);
/// Copy of curve with smoothed recomputed from mean_steps.
LearningCurve smooth(const LearningCurve& curve, int window);

/// Exact, order-independent aggregation of trial step counts. All trials
/// must have the same length.
LearningCurve aggregate(std::span<const TrialRecords> trials, int smoothing_window);

/// One seeded learner run: epsilon-greedy student, teacher shaping on the
/// chosen (s, a), Q update on the shaped reward. teacher may be null only
/// for ScheduleKind::None.
TrialRecords run_trial(const ExperimentConfig& config, const Teacher* teacher, std::uint64_t seed);

struct ExperimentResult {
  std::vector<TrialRecords> trials;
  LearningCurve curve;
};

/// Runs trials with seeds base_seed + i on up to `jobs` threads (0 picks the
/// hardware concurrency). Output does not depend on jobs.
ExperimentResult run_experiment(const ExperimentConfig& config, const Teacher* teacher,
                                unsigned jobs = 0);

/// Loads or trains the teacher named by config.teacher_source. Returns
/// nullopt for ScheduleKind::None. Throws on grid mismatch.
std::optional<Teacher> resolve_teacher(const ExperimentConfig& config);

/// Resolves the teacher, runs, and writes trial_NNN.csv and curve.csv into
/// out_dir.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir, unsigned jobs = 0);

/// Paired sweep over punishment magnitudes: every run shares base_seed.
std::map<double, LearningCurve> sweep(const ExperimentConfig& config,
                                      std::span<const double> c_values, const Teacher* teacher,
                                      unsigned jobs = 0);

/// Half-open episode range [start, end).
struct EpisodeRange {
  int start = 0;
  int end = 0;
};

struct NamedCurve {
  std::string name;
  const LearningCurve* curve = nullptr;
};

struct SummaryRow {
  std::string name;
  EpisodeRange range;
  double mean_steps = 0.0;
  // Pooled across-trial deviation: sqrt of the mean per-episode variance.
  double std_steps = 0.0;
  double delta_vs_baseline = 0.0;
};

/// Mean and pooled deviation of every curve over every range, plus the
/// difference in means against the curve named `baseline` (the first curve
/// when empty). Throws std::invalid_argument on length mismatch or a range
/// outside the curves.
std::vector<SummaryRow> compare(std::span<const NamedCurve> curves,
                                std::span<const EpisodeRange> ranges,
                                const std::string& baseline = {});

/// Clamps [start, end) into [0, episodes).
EpisodeRange clip_range(EpisodeRange range, int episodes) noexcept;

// CSV writers. Every writer throws IoError carrying the offending path.
void write_trial_csv(const std::filesystem::path& path, const TrialRecords& records);
void write_curve_csv(const std::filesystem::path& path, const LearningCurve& curve);
void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows);
void write_experiment(const std::filesystem::path& out_dir, const ExperimentResult& result);

}  // namespace rshape
