#pragma once

#include <map>
#include <string>
#include <vector>

#include "rshape/advisor.hpp"
#include "rshape/experiment.hpp"

namespace rshape {

/// What a `reproduce --figure N` bundle runs.
///
/// Figures 5 and 6 follow the section text, not the captions (the captions
/// swap the two schedules): 5 sweeps the anti-optimal schedule, 6 the
/// suboptimal one.
struct FigurePlan {
  int figure = 0;
  std::string title;
  ScheduleKind schedule = ScheduleKind::None;
  std::vector<double> c_values;  // one value for single comparisons
  bool is_sweep = false;
};

/// Throws std::invalid_argument outside 1..7.
FigurePlan figure_plan(int figure);

struct ClaimResult {
  std::string claim;
  bool passed = false;
  std::string detail;
};

// Episode windows the claims are judged on, clipped to the run length.
EpisodeRange early_range(int episodes) noexcept;        // [500, 2000)
EpisodeRange early_phase_range(int episodes) noexcept;  // [0, 2000)
EpisodeRange final_range(int episodes) noexcept;        // last 1000

double range_mean(const std::vector<double>& series, EpisodeRange range);

/// Mean of the shaped curve below the baseline's over range.
ClaimResult claim_faster_early(const LearningCurve& baseline, const LearningCurve& shaped,
                               EpisodeRange range);
/// Mean of the shaped curve at or above the baseline's over range.
ClaimResult claim_plateau_inferior(const LearningCurve& baseline, const LearningCurve& shaped,
                                   EpisodeRange range);
/// Smoothed shaped curve at or below the smoothed baseline on at least
/// `fraction` of the checkpoints taken every `spacing` episodes.
ClaimResult claim_dominates(const LearningCurve& baseline, const LearningCurve& shaped, int window,
                            int spacing, double fraction);
/// Final-range mean at least `factor` times the baseline's, or at least
/// `capped_fraction` of all episodes truncated.
ClaimResult claim_hindered(const LearningCurve& baseline, const ExperimentResult& shaped,
                           EpisodeRange range, double factor, double capped_fraction);
/// Range means strictly decreasing in C.
ClaimResult claim_decreasing_in_c(const std::map<double, ExperimentResult>& runs,
                                  EpisodeRange range);
/// Range means non-increasing in C, each step allowed to rise by at most one
/// pooled seed-level standard deviation.
ClaimResult claim_nonincreasing_in_c(const std::map<double, ExperimentResult>& runs,
                                     EpisodeRange range);

/// Mean of each trial's steps over range.
std::vector<double> per_trial_means(const ExperimentResult& result, EpisodeRange range);
/// sqrt of the average unbiased variance of the per-trial range means
/// across groups of runs.
double pooled_seed_sd(const std::vector<const ExperimentResult*>& runs, EpisodeRange range);

/// Claims attached to a figure, judged on a baseline run and the figure's
/// shaped run(s), keyed by C.
std::vector<ClaimResult> evaluate_figure(const FigurePlan& plan, const ExperimentResult& baseline,
                                         const std::map<double, ExperimentResult>& runs,
                                         int episodes);

}  // namespace rshape
