#include "rshape/figures.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rshape/numeric_format.hpp"

namespace rshape {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << std::fixed << v;
  return os.str();
}

std::string c_label(double c) { return "C=" + format_double(c); }

}  // namespace

FigurePlan figure_plan(int figure) {
  const std::vector<double> sweep_values{1.0, 5.0, 10.0, 50.0};
  switch (figure) {
    case 1: return {1, "Q-learning vs suboptimal action punishment", ScheduleKind::Suboptimal, {10.0}, false};
    case 2: return {2, "Q-learning vs anti-optimal action punishment", ScheduleKind::AntiOptimal, {10.0}, false};
    case 3: return {3, "Q-learning vs continuous proportional punishment", ScheduleKind::Continuous, {10.0}, false};
    case 4: return {4, "Q-learning with encouragement", ScheduleKind::Encouragement, {10.0}, false};
    case 5: return {5, "C sweep, anti-optimal schedule", ScheduleKind::AntiOptimal, sweep_values, true};
    case 6: return {6, "C sweep, suboptimal schedule", ScheduleKind::Suboptimal, sweep_values, true};
    case 7: return {7, "C sweep, continuous schedule", ScheduleKind::Continuous, sweep_values, true};
    default: break;
  }
  throw std::invalid_argument("figure must be 1..7, got " + std::to_string(figure));
}

EpisodeRange early_range(int episodes) noexcept { return clip_range({500, 2000}, episodes); }
EpisodeRange early_phase_range(int episodes) noexcept { return clip_range({0, 2000}, episodes); }
EpisodeRange final_range(int episodes) noexcept {
  return clip_range({episodes - 1000, episodes}, episodes);
}

double range_mean(const std::vector<double>& series, EpisodeRange range) {
  if (range.end <= range.start) throw std::invalid_argument("empty episode range");
  double sum = 0.0;
  for (int i = range.start; i < range.end; ++i) sum += series[static_cast<std::size_t>(i)];
  return sum / (range.end - range.start);
}

ClaimResult claim_faster_early(const LearningCurve& baseline, const LearningCurve& shaped,
                               EpisodeRange range) {
  const double b = range_mean(baseline.mean_steps, range);
  const double s = range_mean(shaped.mean_steps, range);
  return {"shaped learner faster over episodes [" + std::to_string(range.start) + ", " +
              std::to_string(range.end) + ")",
          s < b, "shaped " + fmt(s) + " vs baseline " + fmt(b) + " mean steps"};
}

ClaimResult claim_plateau_inferior(const LearningCurve& baseline, const LearningCurve& shaped,
                                   EpisodeRange range) {
  const double b = range_mean(baseline.mean_steps, range);
  const double s = range_mean(shaped.mean_steps, range);
  return {"shaped learner plateaus no better than baseline over episodes [" +
              std::to_string(range.start) + ", " + std::to_string(range.end) + ")",
          s >= b, "shaped " + fmt(s) + " vs baseline " + fmt(b) + " mean steps"};
}

ClaimResult claim_dominates(const LearningCurve& baseline, const LearningCurve& shaped, int window,
                            int spacing, double fraction) {
  const auto b = smooth(baseline.mean_steps, window);
  const auto s = smooth(shaped.mean_steps, window);
  int total = 0;
  int below = 0;
  for (std::size_t i = static_cast<std::size_t>(spacing) - 1; i < b.size();
       i += static_cast<std::size_t>(spacing)) {
    ++total;
    if (s[i] <= b[i]) ++below;
  }
  const bool ok = total > 0 && below >= fraction * total;
  return {"smoothed shaped curve at or below baseline on >= " + fmt(100.0 * fraction) +
              "% of checkpoints",
          ok, std::to_string(below) + " of " + std::to_string(total) + " checkpoints"};
}

ClaimResult claim_hindered(const LearningCurve& baseline, const ExperimentResult& shaped,
                           EpisodeRange range, double factor, double capped_fraction) {
  const double b = range_mean(baseline.mean_steps, range);
  const double s = range_mean(shaped.curve.mean_steps, range);
  std::size_t capped = 0;
  std::size_t episodes = 0;
  for (const auto& trial : shaped.trials) {
    for (const auto& r : trial) {
      ++episodes;
      if (r.truncated) ++capped;
    }
  }
  const double frac = static_cast<double>(capped) / static_cast<double>(episodes);
  return {"training severely hindered (final mean >= " + fmt(factor) +
              "x baseline, or >= " + fmt(100.0 * capped_fraction) + "% episodes capped)",
          s >= factor * b || frac >= capped_fraction,
          "shaped " + fmt(s) + " vs baseline " + fmt(b) + " (ratio " + fmt(s / b) + "), capped " +
              fmt(100.0 * frac) + "%"};
}

std::vector<double> per_trial_means(const ExperimentResult& result, EpisodeRange range) {
  std::vector<double> means;
  means.reserve(result.trials.size());
  for (const auto& trial : result.trials) {
    double sum = 0.0;
    for (int i = range.start; i < range.end; ++i) sum += trial[static_cast<std::size_t>(i)].steps;
    means.push_back(sum / (range.end - range.start));
  }
  return means;
}

double pooled_seed_sd(const std::vector<const ExperimentResult*>& runs, EpisodeRange range) {
  double ss = 0.0;
  std::size_t dof = 0;
  for (const auto* run : runs) {
    const auto means = per_trial_means(*run, range);
    if (means.size() < 2) continue;
    double mu = 0.0;
    for (const double m : means) mu += m;
    mu /= static_cast<double>(means.size());
    for (const double m : means) ss += (m - mu) * (m - mu);
    dof += means.size() - 1;
  }
  return dof == 0 ? 0.0 : std::sqrt(ss / static_cast<double>(dof));
}

ClaimResult claim_decreasing_in_c(const std::map<double, ExperimentResult>& runs,
                                  EpisodeRange range) {
  bool ok = true;
  std::string detail;
  double prev = 0.0;
  bool first = true;
  for (const auto& [c, run] : runs) {
    const double m = range_mean(run.curve.mean_steps, range);
    if (!first && !(m < prev)) ok = false;
    detail += (first ? "" : ", ") + c_label(c) + ": " + fmt(m);
    prev = m;
    first = false;
  }
  return {"mean steps over episodes [" + std::to_string(range.start) + ", " +
              std::to_string(range.end) + ") strictly decreasing in C",
          ok, detail};
}

ClaimResult claim_nonincreasing_in_c(const std::map<double, ExperimentResult>& runs,
                                     EpisodeRange range) {
  std::vector<const ExperimentResult*> all;
  for (const auto& [c, run] : runs) all.push_back(&run);
  const double sd = pooled_seed_sd(all, range);
  bool ok = true;
  std::string detail;
  double prev = 0.0;
  bool first = true;
  for (const auto& [c, run] : runs) {
    const double m = range_mean(run.curve.mean_steps, range);
    if (!first && m > prev + sd) ok = false;
    detail += (first ? "" : ", ") + c_label(c) + ": " + fmt(m);
    prev = m;
    first = false;
  }
  detail += " (pooled seed sd " + fmt(sd) + ")";
  return {"mean steps over episodes [" + std::to_string(range.start) + ", " +
              std::to_string(range.end) + ") non-increasing in C within one pooled sd",
          ok, detail};
}

std::vector<ClaimResult> evaluate_figure(const FigurePlan& plan, const ExperimentResult& baseline,
                                         const std::map<double, ExperimentResult>& runs,
                                         int episodes) {
  if (runs.empty()) throw std::invalid_argument("figure claims need at least one shaped run");
  const LearningCurve& base = baseline.curve;
  const ExperimentResult& first = runs.begin()->second;
  const EpisodeRange needed = plan.figure == 1 || plan.figure == 3 ? early_range(episodes)
                              : plan.figure >= 5                   ? early_phase_range(episodes)
                                                                   : final_range(episodes);
  if (needed.end <= needed.start || (plan.figure == 2 && episodes < 500)) {
    return {{"figure " + std::to_string(plan.figure) + " claims", false,
             "not evaluated: " + std::to_string(episodes) + " episodes is too short for the claim's episode window"}};
  }
  switch (plan.figure) {
    case 1:
      return {claim_faster_early(base, first.curve, early_range(episodes)),
              claim_plateau_inferior(base, first.curve, final_range(episodes))};
    case 2:
      return {claim_dominates(base, first.curve, 500, 500, 0.9)};
    case 3:
      return {claim_faster_early(base, first.curve, early_range(episodes))};
    case 4:
      return {claim_hindered(base, first, final_range(episodes), 5.0, 0.5)};
    case 5:
      return {claim_decreasing_in_c(runs, early_phase_range(episodes))};
    case 6:
      return {claim_nonincreasing_in_c(runs, final_range(episodes))};
    case 7:
      return {claim_decreasing_in_c(runs, early_phase_range(episodes)),
              claim_nonincreasing_in_c(runs, final_range(episodes))};
    default:
      break;
  }
  throw std::invalid_argument("figure must be 1..7");
}

}  // namespace rshape
