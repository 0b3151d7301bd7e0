// rshape: teacher-advised reward shaping experiments on the hunter/prey grid.
//
// Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rshape/advisor.hpp"
#include "rshape/errors.hpp"
#include "rshape/experiment.hpp"
#include "rshape/figures.hpp"
#include "rshape/numeric_format.hpp"
#include "rshape/oracle.hpp"

namespace fs = std::filesystem;
using namespace rshape;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerify = 2;
constexpr int kExitIo = 3;

constexpr int kVerifyCellCap = 36;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Flags shared by the learning commands.
struct CommonFlags {
  std::string grid = "10x10";
  double alpha = 0.1;
  double gamma = 1.0;
  double epsilon = 0.1;
  int step_cap = kDefaultStepCap;
  unsigned jobs = 0;

  GridConfig grid_config() const { return parse_grid(grid); }
  LearningParams params() const {
    LearningParams p{alpha, gamma, epsilon};
    p.validate();
    return p;
  }
};

void add_learning_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--grid", f.grid, "Grid size WxH")->capture_default_str();
  cmd->add_option("--alpha", f.alpha, "Learning rate")->capture_default_str();
  cmd->add_option("--gamma", f.gamma, "Discount factor (1.0 = undiscounted)")->capture_default_str();
  cmd->add_option("--epsilon", f.epsilon, "Exploration probability")->capture_default_str();
  cmd->add_option("--step-cap", f.step_cap, "Maximum steps per episode")->capture_default_str();
}

void add_jobs_flag(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--jobs", f.jobs, "Parallel trials (0 = all cores); output is identical for any value")
      ->capture_default_str();
}

std::vector<double> parse_c_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = parse_double(item);
    if (!v || !std::isfinite(*v) || *v < 0.0) {
      throw UsageError("--c-list entry '" + item + "' is not a non-negative number");
    }
    values.push_back(*v);
  }
  if (values.empty()) throw UsageError("--c-list must name at least one value");
  return values;
}

std::string c_tag(double c) { return "C" + format_double(c); }

double mean_of_last(const std::vector<EpisodeOutcome>& log, std::size_t n) {
  const std::size_t first = log.size() > n ? log.size() - n : 0;
  double sum = 0.0;
  for (std::size_t i = first; i < log.size(); ++i) sum += log[i].steps;
  return sum / static_cast<double>(log.size() - first);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir, "cannot create directory: " + ec.message());
}

/// Trains a teacher or reuses a cached copy keyed by every training input.
Teacher cached_teacher(const fs::path& cache_dir, const GridConfig& grid,
                       const LearningParams& params, int episodes, int step_cap,
                       std::uint64_t seed) {
  const std::string key = "teacher_" + format_grid(grid) + "_e" + std::to_string(episodes) +
                          "_a" + format_double(params.alpha) + "_g" + format_double(params.gamma) +
                          "_eps" + format_double(params.epsilon) + "_cap" +
                          std::to_string(step_cap) + "_s" + std::to_string(seed) + ".qtable";
  const fs::path path = cache_dir / key;
  if (fs::exists(path)) {
    std::cout << "using cached teacher " << path.string() << '\n';
    return load_teacher(path);
  }
  Rng rng(seed);
  Teacher teacher = train_teacher(grid, params, episodes, rng, step_cap);
  ensure_dir(cache_dir);
  save_teacher(path, teacher);
  std::cout << "trained teacher cached at " << path.string() << '\n';
  return teacher;
}

// ---------------------------------------------------------------- train-advisor

struct TrainFlags {
  CommonFlags common;
  int episodes = 20000;
  std::uint64_t seed = 0;
  std::string out = "teacher.qtable";
};

int cmd_train_advisor(const TrainFlags& f) {
  if (f.episodes < 1) throw UsageError("--episodes must be at least 1");
  const GridConfig grid = f.common.grid_config();
  Rng rng(f.seed);
  std::vector<EpisodeOutcome> log;
  const Teacher teacher = train_teacher(grid, f.common.params(), f.episodes, rng, f.common.step_cap, &log);
  save_teacher(f.out, teacher);
  std::printf("teacher: %s grid, %d episodes, seed %llu -> %s\n", format_grid(grid).c_str(),
              f.episodes, static_cast<unsigned long long>(f.seed), f.out.c_str());
  std::printf("mean steps over final %zu episodes: %.4f\n", std::min<std::size_t>(1000, log.size()),
              mean_of_last(log, 1000));
  return kExitOk;
}

// ---------------------------------------------------------------- run / sweep

struct RunFlags {
  CommonFlags common;
  std::string schedule = "none";
  double c = 10.0;
  double bonus = 10.0;
  std::string teacher;
  int episodes = 20000;
  int trials = 10;
  std::uint64_t seed = 1;
  int window = 500;
  std::string out = "out";
  std::string c_list;
};

ExperimentConfig experiment_config(const RunFlags& f) {
  ExperimentConfig config;
  config.grid = f.common.grid_config();
  config.params = f.common.params();
  config.schedule = {parse_schedule_kind(f.schedule), f.c, f.bonus};
  config.episodes = f.episodes;
  config.step_cap = f.common.step_cap;
  config.trials = f.trials;
  config.base_seed = f.seed;
  config.smoothing_window = f.window;
  config.teacher_source = f.teacher;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (config.schedule.kind != ScheduleKind::None && f.teacher.empty()) {
    throw UsageError("--teacher is required for schedule '" + f.schedule + "'");
  }
  return config;
}

void print_phase_means(const std::string& label, const LearningCurve& curve, int episodes) {
  const auto early = early_range(episodes);
  const auto last = final_range(episodes);
  std::printf("%-12s early [%d,%d) %.4f   final [%d,%d) %.4f mean steps\n", label.c_str(),
              early.start, early.end,
              early.end > early.start ? range_mean(curve.mean_steps, early) : NAN, last.start,
              last.end, range_mean(curve.mean_steps, last));
}

int cmd_run(const RunFlags& f) {
  const ExperimentConfig config = experiment_config(f);
  const ExperimentResult result = run_experiment(config, fs::path(f.out), f.common.jobs);
  std::printf("schedule %s, C=%s, B=%s, %d trials x %d episodes -> %s\n", f.schedule.c_str(),
              format_double(f.c).c_str(), format_double(f.bonus).c_str(), f.trials, f.episodes,
              f.out.c_str());
  print_phase_means(f.schedule, result.curve, f.episodes);
  return kExitOk;
}

std::vector<EpisodeRange> summary_ranges(int episodes) {
  std::vector<EpisodeRange> ranges;
  for (const EpisodeRange r : {early_phase_range(episodes), early_range(episodes), final_range(episodes)}) {
    if (r.end > r.start) ranges.push_back(r);
  }
  return ranges;
}

int cmd_sweep(const RunFlags& f) {
  const std::vector<double> c_values = parse_c_list(f.c_list);
  const ExperimentConfig config = experiment_config(f);
  const auto teacher = resolve_teacher(config);
  const auto curves = sweep(config, c_values, teacher ? &*teacher : nullptr, f.common.jobs);

  ensure_dir(f.out);
  std::vector<std::string> names;
  std::vector<NamedCurve> named;
  for (const auto& [c, curve] : curves) {
    write_curve_csv(fs::path(f.out) / ("curve_" + c_tag(c) + ".csv"), curve);
    names.push_back("C=" + format_double(c));
  }
  std::size_t i = 0;
  for (const auto& [c, curve] : curves) named.push_back({names[i++], &curve});
  const auto rows = compare(named, summary_ranges(f.episodes));
  write_summary_csv(fs::path(f.out) / "summary.csv", rows);
  std::printf("sweep: schedule %s over %zu C values -> %s\n", f.schedule.c_str(), curves.size(),
              f.out.c_str());
  i = 0;
  for (const auto& [c, curve] : curves) print_phase_means(names[i++], curve, f.episodes);
  return kExitOk;
}

// ---------------------------------------------------------------- reproduce

struct ReproduceFlags {
  CommonFlags common;
  int figure = 1;
  std::string out = "reproduce";
  std::string cache_dir = ".rshape-cache";
  int episodes = 20000;
  int trials = 10;
  std::uint64_t seed = 1;
  std::uint64_t teacher_seed = 0;
  int teacher_episodes = 20000;
  std::string c_list;
};

int cmd_reproduce(const ReproduceFlags& f) {
  FigurePlan plan;
  try {
    plan = figure_plan(f.figure);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!f.c_list.empty()) {
    if (!plan.is_sweep) throw UsageError("--c-list only applies to sweep figures 5-7");
    plan.c_values = parse_c_list(f.c_list);
  }
  if (f.teacher_episodes < 1) throw UsageError("--teacher-episodes must be at least 1");

  ExperimentConfig config;
  config.grid = f.common.grid_config();
  config.params = f.common.params();
  config.episodes = f.episodes;
  config.step_cap = f.common.step_cap;
  config.trials = f.trials;
  config.base_seed = f.seed;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const Teacher teacher = cached_teacher(f.cache_dir, config.grid, config.params,
                                         f.teacher_episodes, config.step_cap, f.teacher_seed);
  const fs::path out = fs::path(f.out);
  ensure_dir(out);

  std::printf("figure %d: %s\n", plan.figure, plan.title.c_str());
  const ExperimentResult baseline = run_experiment(config, nullptr, f.common.jobs);
  write_experiment(out / "baseline", baseline);

  std::map<double, ExperimentResult> runs;
  for (const double c : plan.c_values) {
    ExperimentConfig point = config;
    point.schedule = {plan.schedule, c, 10.0};
    auto result = run_experiment(point, &teacher, f.common.jobs);
    write_experiment(out / (std::string(schedule_name(plan.schedule)) + "_" + c_tag(c)), result);
    runs.emplace(c, std::move(result));
  }

  std::vector<NamedCurve> named{{"baseline", &baseline.curve}};
  std::vector<std::string> names;
  names.reserve(runs.size());
  for (const auto& [c, run] : runs) names.push_back(std::string(schedule_name(plan.schedule)) + " C=" + format_double(c));
  std::size_t i = 0;
  for (const auto& [c, run] : runs) named.push_back({names[i++], &run.curve});
  write_summary_csv(out / "summary.csv", compare(named, summary_ranges(config.episodes), "baseline"));

  const auto claims = evaluate_figure(plan, baseline, runs, config.episodes);
  std::ofstream claim_file(out / "claims.txt", std::ios::binary | std::ios::trunc);
  if (!claim_file) throw IoError(out / "claims.txt", "cannot open for writing");
  bool all = true;
  for (const auto& claim : claims) {
    const std::string line =
        std::string(claim.passed ? "PASS" : "FAIL") + "  " + claim.claim + "  [" + claim.detail + "]";
    std::cout << line << '\n';
    claim_file << line << '\n';
    all = all && claim.passed;
  }
  if (plan.figure == 5 || plan.figure == 6) {
    std::cout << "note: the captions of figures 5 and 6 name the opposite schedules; this bundle "
                 "follows the section text\n";
  }
  claim_file.flush();
  if (!claim_file) throw IoError(out / "claims.txt", "write failed");
  return all ? kExitOk : kExitVerify;
}

// ---------------------------------------------------------------- verify

struct VerifyFlags {
  CommonFlags common;
  int episodes = 50000;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
};

int cmd_verify(VerifyFlags f) {
  const GridConfig grid = f.common.grid_config();
  if (grid.cells() > kVerifyCellCap) {
    throw UsageError("grid " + format_grid(grid) + " has " + std::to_string(grid.cells()) +
                     " cells; exact verification is capped at " + std::to_string(kVerifyCellCap));
  }
  if (f.episodes < 1) throw UsageError("--episodes must be at least 1");
  const LearningParams params = f.common.params();

  const OracleSolution oracle = value_iteration_oracle(grid, params.gamma, f.tolerance);
  Rng rng(f.seed);
  const Teacher learner = train_teacher(grid, params, f.episodes, rng, f.common.step_cap);
  const auto policy = greedy_policy(learner.q());

  const double agreement = policy_agreement(oracle, policy);
  double max_error = 0.0;
  for (std::size_t s = 0; s < oracle.values.size(); ++s) {
    if (state_from_index(s, grid).captured()) continue;
    const auto row = learner.q().row(s);
    max_error = std::max(max_error, std::abs(row[action_code(greedy_action(row))] - oracle.values[s]));
  }

  std::printf("verify %s: %d episodes, seed %llu, oracle converged in %d sweeps\n",
              format_grid(grid).c_str(), f.episodes, static_cast<unsigned long long>(f.seed),
              oracle.sweeps);
  std::printf("policy agreement: %.4f%% of live states (threshold 95%%)\n", 100.0 * agreement);
  std::printf("value max-error:  %.6g\n", max_error);
  if (params.gamma == 1.0) {
    const auto eval = evaluate_policy(grid, policy, params.gamma, f.tolerance);
    const double optimal = mean_steps_to_capture(grid, oracle.values);
    if (eval.converged) {
      const double learned = mean_steps_to_capture(grid, eval.values);
      std::printf("expected steps to capture: learned %.6f, optimal %.6f (+%.3f%%)\n", learned,
                  optimal, 100.0 * (learned / optimal - 1.0));
    } else {
      std::printf("expected steps to capture: learned policy never captures from some state, "
                  "optimal %.6f\n", optimal);
    }
  }

  bool ok = agreement >= 0.95;
  if (grid.width == 2 && grid.height == 2 && params.gamma == 1.0) {
    // Adjacent pairs are captured at once. From a diagonal pair the prey
    // escapes back to a diagonal with probability 1/3, so V = -1 + V/3.
    bool exact = true;
    for (std::size_t s = 0; s < oracle.values.size(); ++s) {
      const GameState st = state_from_index(s, grid);
      if (st.captured()) continue;
      const bool diagonal = st.hunter.x != st.prey.x && st.hunter.y != st.prey.y;
      exact = exact && std::abs(oracle.values[s] - (diagonal ? -1.5 : 0.0)) < 1e-8;
    }
    std::printf("2x2 closed form (adjacent 0, diagonal -1.5): %s\n", exact ? "match" : "MISMATCH");
    ok = ok && exact;
  }
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Teacher-advised reward shaping on a hunter/prey gridworld"};
  app.require_subcommand(1);

  TrainFlags train;
  auto* train_cmd = app.add_subcommand("train-advisor", "Train and save a teacher Q-table");
  add_learning_flags(train_cmd, train.common);
  train_cmd->add_option("--episodes", train.episodes, "Training episodes")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--out", train.out, "Teacher file to write")->capture_default_str();

  RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Run seeded student trials under one schedule");
  RunFlags sweep_flags;
  sweep_flags.schedule = "anti";
  auto* sweep_cmd = app.add_subcommand("sweep", "Paired-seed sweep over punishment magnitudes C");
  for (auto [cmd, f] : {std::pair{run_cmd, &run}, std::pair{sweep_cmd, &sweep_flags}}) {
    add_learning_flags(cmd, f->common);
    add_jobs_flag(cmd, f->common);
    cmd->add_option("--schedule", f->schedule, "none|sub|anti|cont|enc")->capture_default_str();
    cmd->add_option("--bonus", f->bonus, "Encouragement bonus B (enc only)")->capture_default_str();
    cmd->add_option("--teacher", f->teacher, "Teacher file (ignored for schedule none)");
    cmd->add_option("--episodes", f->episodes, "Episodes per trial")->capture_default_str();
    cmd->add_option("--trials", f->trials, "Independent trials (seeds seed, seed+1, ...)")
        ->capture_default_str();
    cmd->add_option("--seed", f->seed, "Base seed")->capture_default_str();
    cmd->add_option("--window", f->window, "Smoothing window (episodes)")->capture_default_str();
    cmd->add_option("--out", f->out, "Output directory")->capture_default_str();
  }
  run_cmd->add_option("--c", run.c, "Punishment magnitude C")->capture_default_str();
  sweep_cmd->add_option("--c-list", sweep_flags.c_list, "Comma-separated C values, e.g. 1,5,10,50")
      ->required();

  ReproduceFlags repro;
  auto* repro_cmd = app.add_subcommand("reproduce", "Regenerate one figure's comparison and check its claim");
  add_learning_flags(repro_cmd, repro.common);
  add_jobs_flag(repro_cmd, repro.common);
  repro_cmd->add_option("--figure", repro.figure, "Figure number 1-7")->required();
  repro_cmd->add_option("--out", repro.out, "Output directory")->capture_default_str();
  repro_cmd->add_option("--cache-dir", repro.cache_dir, "Teacher cache directory")->capture_default_str();
  repro_cmd->add_option("--episodes", repro.episodes, "Episodes per trial")->capture_default_str();
  repro_cmd->add_option("--trials", repro.trials, "Trials per curve")->capture_default_str();
  repro_cmd->add_option("--seed", repro.seed, "Base seed for student trials")->capture_default_str();
  repro_cmd->add_option("--teacher-seed", repro.teacher_seed, "Teacher training seed")->capture_default_str();
  repro_cmd->add_option("--teacher-episodes", repro.teacher_episodes, "Teacher training episodes")
      ->capture_default_str();
  repro_cmd->add_option("--c-list", repro.c_list, "Override sweep C values (figures 5-7; default 1,5,10,50)");

  VerifyFlags verify;
  verify.common.grid = "3x3";
  auto* verify_cmd = app.add_subcommand("verify", "Check learned policy against exact value iteration");
  add_learning_flags(verify_cmd, verify.common);
  verify_cmd->add_option("--episodes", verify.episodes, "Learning episodes")->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed, "Random seed")->capture_default_str();
  verify_cmd->add_option("--tolerance", verify.tolerance, "Value iteration tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train_advisor(train);
    if (*run_cmd) return cmd_run(run);
    if (*sweep_cmd) return cmd_sweep(sweep_flags);
    if (*repro_cmd) return cmd_reproduce(repro);
    if (*verify_cmd) return cmd_verify(verify);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "error: malformed input: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerify;
  }
  return kExitUsage;
}
