#include "rshape/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "rshape/errors.hpp"
#include "rshape/numeric_format.hpp"

namespace rshape {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

void require_teacher(const ExperimentConfig& config, const Teacher* teacher) {
  if (config.schedule.kind == ScheduleKind::None) return;
  if (teacher == nullptr) {
    throw std::invalid_argument(std::string("schedule '") +
                                std::string(schedule_name(config.schedule.kind)) +
                                "' needs a teacher");
  }
  if (teacher->grid() != config.grid) {
    throw std::invalid_argument("teacher was trained on a " + format_grid(teacher->grid()) +
                                " grid, experiment uses " + format_grid(config.grid));
  }
}

/// Runs body(i) for i in [0, count) on up to jobs threads.
template <typename Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  grid.validate();
  params.validate();
  schedule.validate();
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (step_cap < 1) throw std::invalid_argument("step cap must be >= 1");
  if (smoothing_window < 1) throw std::invalid_argument("smoothing window must be >= 1");
  if (teacher_source == kTrainFresh && teacher_episodes < 1) {
    throw std::invalid_argument("teacher episodes must be >= 1");
  }
}

std::vector<double> smooth(std::span<const double> series, int window) {
  if (window < 1) throw std::invalid_argument("smoothing window must be >= 1");
  const auto w = static_cast<std::size_t>(window);
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t first = i + 1 >= w ? i + 1 - w : 0;
    double sum = 0.0;
    for (std::size_t j = first; j <= i; ++j) sum += series[j];
    out[i] = sum / static_cast<double>(i + 1 - first);
  }
  return out;
}

LearningCurve smooth(const LearningCurve& curve, int window) {
  LearningCurve out = curve;
  out.smoothed = smooth(curve.mean_steps, window);
  return out;
}

LearningCurve aggregate(std::span<const TrialRecords> trials, int smoothing_window) {
  if (trials.empty()) throw std::invalid_argument("cannot aggregate zero trials");
  const std::size_t length = trials.front().size();
  for (const auto& t : trials) {
    if (t.size() != length) throw std::invalid_argument("trials differ in episode count");
  }
  // Integer sums keep the statistics independent of trial order.
  const auto n = static_cast<long long>(trials.size());
  LearningCurve curve;
  curve.mean_steps.resize(length);
  curve.std_steps.resize(length);
  for (std::size_t e = 0; e < length; ++e) {
    long long sum = 0;
    long long sum_sq = 0;
    for (const auto& t : trials) {
      const long long x = t[e].steps;
      sum += x;
      sum_sq += x * x;
    }
    const double nn = static_cast<double>(n);
    curve.mean_steps[e] = static_cast<double>(sum) / nn;
    curve.std_steps[e] = std::sqrt(static_cast<double>(n * sum_sq - sum * sum)) / nn;
  }
  curve.smoothed = smooth(curve.mean_steps, smoothing_window);
  return curve;
}

TrialRecords run_trial(const ExperimentConfig& config, const Teacher* teacher, std::uint64_t seed) {
  config.validate();
  require_teacher(config, teacher);

  Rng rng(seed);
  QTable q(config.grid);
  const Schedule& schedule = config.schedule;
  const auto learning_reward = [&](const GameState& s, Action a, double env_reward) {
    const double pun =
        schedule.kind == ScheduleKind::None ? 0.0 : punishment(teacher->q().row(s), schedule, a);
    return shaped_reward(env_reward, pun);
  };

  TrialRecords records;
  records.reserve(static_cast<std::size_t>(config.episodes));
  for (int e = 0; e < config.episodes; ++e) {
    const EpisodeOutcome o = run_episode(q, config.params, config.step_cap, rng, learning_reward);
    records.push_back({e, o.steps, o.env_return, o.shaped_return, o.truncated});
  }
  return records;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const Teacher* teacher,
                                unsigned jobs) {
  config.validate();
  require_teacher(config, teacher);
  ExperimentResult result;
  result.trials.resize(static_cast<std::size_t>(config.trials));
  parallel_for(result.trials.size(), jobs, [&](std::size_t i) {
    result.trials[i] = run_trial(config, teacher, config.base_seed + i);
  });
  result.curve = aggregate(result.trials, config.smoothing_window);
  return result;
}

std::optional<Teacher> resolve_teacher(const ExperimentConfig& config) {
  if (config.schedule.kind == ScheduleKind::None) return std::nullopt;
  std::optional<Teacher> teacher;
  if (config.teacher_source == kTrainFresh) {
    Rng rng(config.teacher_seed);
    teacher.emplace(train_teacher(config.grid, config.params, config.teacher_episodes, rng,
                                  config.step_cap));
  } else {
    teacher.emplace(load_teacher(config.teacher_source));
  }
  require_teacher(config, &*teacher);
  return teacher;
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir, unsigned jobs) {
  config.validate();
  const auto teacher = resolve_teacher(config);
  ExperimentResult result = run_experiment(config, teacher ? &*teacher : nullptr, jobs);
  write_experiment(out_dir, result);
  return result;
}

std::map<double, LearningCurve> sweep(const ExperimentConfig& config,
                                      std::span<const double> c_values, const Teacher* teacher,
                                      unsigned jobs) {
  if (c_values.empty()) throw std::invalid_argument("sweep needs at least one C value");
  std::map<double, LearningCurve> curves;
  for (const double c : c_values) {
    ExperimentConfig point = config;
    point.schedule.c = c;
    curves[c] = run_experiment(point, teacher, jobs).curve;
  }
  return curves;
}

EpisodeRange clip_range(EpisodeRange range, int episodes) noexcept {
  range.start = std::clamp(range.start, 0, episodes);
  range.end = std::clamp(range.end, range.start, episodes);
  return range;
}

std::vector<SummaryRow> compare(std::span<const NamedCurve> curves,
                                std::span<const EpisodeRange> ranges,
                                const std::string& baseline) {
  if (curves.empty()) throw std::invalid_argument("compare needs at least one curve");
  const std::size_t length = curves.front().curve->size();
  const LearningCurve* base = nullptr;
  for (const auto& nc : curves) {
    if (nc.curve->size() != length) {
      throw std::invalid_argument("curve '" + nc.name + "' has " +
                                  std::to_string(nc.curve->size()) + " episodes, expected " +
                                  std::to_string(length));
    }
    if (nc.name == baseline) base = nc.curve;
  }
  if (baseline.empty()) base = curves.front().curve;
  if (base == nullptr) throw std::invalid_argument("no curve named '" + baseline + "'");
  for (const auto& r : ranges) {
    if (r.start < 0 || r.end <= r.start || static_cast<std::size_t>(r.end) > length) {
      throw std::invalid_argument("episode range [" + std::to_string(r.start) + ", " +
                                  std::to_string(r.end) + ") outside curve of length " +
                                  std::to_string(length));
    }
  }

  const auto range_mean = [](const std::vector<double>& v, EpisodeRange r) {
    double sum = 0.0;
    for (int i = r.start; i < r.end; ++i) sum += v[static_cast<std::size_t>(i)];
    return sum / (r.end - r.start);
  };
  const auto pooled_std = [](const std::vector<double>& sd, EpisodeRange r) {
    double sum = 0.0;
    for (int i = r.start; i < r.end; ++i) sum += sd[static_cast<std::size_t>(i)] * sd[static_cast<std::size_t>(i)];
    return std::sqrt(sum / (r.end - r.start));
  };

  std::vector<SummaryRow> rows;
  for (const auto& nc : curves) {
    for (const auto& r : ranges) {
      const double mean = range_mean(nc.curve->mean_steps, r);
      rows.push_back({nc.name, r, mean, pooled_std(nc.curve->std_steps, r),
                      mean - range_mean(base->mean_steps, r)});
    }
  }
  return rows;
}

void write_trial_csv(const std::filesystem::path& path, const TrialRecords& records) {
  auto out = open_for_write(path);
  out << "episode,steps,env_return,shaped_return,truncated\n";
  for (const auto& r : records) {
    out << r.episode << ',' << r.steps << ',' << format_double(r.env_return) << ','
        << format_double(r.shaped_return) << ',' << (r.truncated ? 1 : 0) << '\n';
  }
  finish_write(out, path);
}

void write_curve_csv(const std::filesystem::path& path, const LearningCurve& curve) {
  auto out = open_for_write(path);
  out << "episode,mean_steps,std_steps,smoothed_mean_steps\n";
  for (std::size_t e = 0; e < curve.size(); ++e) {
    out << e << ',' << format_double(curve.mean_steps[e]) << ','
        << format_double(curve.std_steps[e]) << ',' << format_double(curve.smoothed[e]) << '\n';
  }
  finish_write(out, path);
}

void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows) {
  auto out = open_for_write(path);
  out << "name,range_start,range_end,mean_steps,std_steps,delta_vs_baseline\n";
  for (const auto& r : rows) {
    out << r.name << ',' << r.range.start << ',' << r.range.end << ','
        << format_double(r.mean_steps) << ',' << format_double(r.std_steps) << ','
        << format_double(r.delta_vs_baseline) << '\n';
  }
  finish_write(out, path);
}

void write_experiment(const std::filesystem::path& out_dir, const ExperimentResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir, "cannot create directory: " + ec.message());
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "trial_%03zu.csv", i);
    write_trial_csv(out_dir / name, result.trials[i]);
  }
  write_curve_csv(out_dir / "curve.csv", result.curve);
}

}  // namespace rshape
