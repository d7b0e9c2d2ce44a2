#include "ivos/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <spdlog/spdlog.h>

namespace ivos {

void RunConfig::validate() const {
  if (max_clicks < 1) throw std::invalid_argument("max_clicks must be >= 1");
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  if (memory_stride < 1) throw std::invalid_argument("memory stride must be >= 1");
  if (!(min_region_area >= 0.0 && min_region_area <= 1.0)) {
    throw std::invalid_argument("min_region_area must be a fraction in [0, 1]");
  }
  if (click_radius && *click_radius < 0) throw std::invalid_argument("click radius must be >= 0");
  if (boundary_tolerance && *boundary_tolerance < 0) {
    throw std::invalid_argument("boundary tolerance must be >= 0");
  }
  if (backends.color_tolerance < 0) throw std::invalid_argument("color tolerance must be >= 0");
  if (!(backends.decay_lambda >= 0.0)) throw std::invalid_argument("decay lambda must be >= 0");
  if (!(time_budget_per_object_seconds > 0.0)) {
    throw std::invalid_argument("time budget must be positive");
  }
  validate_backend_names(backends);
}

RoundCurve SequenceResult::curve() const {
  RoundCurve c;
  for (const auto& r : rounds) c.append({r.round, r.global_jf, std::nullopt});
  return c;
}

SequenceResult run_sequence(const SequenceDataset& dataset, const RunConfig& config,
                            std::vector<double>* round_seconds) {
  config.validate();
  if (dataset.frame_count() < 1) throw std::invalid_argument(dataset.name + ": no frames");
  if (dataset.object_ids.empty()) throw std::invalid_argument(dataset.name + ": no objects");
  for (const auto& a : dataset.annotations) {
    if (!a.same_shape(dataset.annotations.front())) {
      throw std::invalid_argument(dataset.name + ": annotations differ in size");
    }
  }
  const SequenceView view = dataset.view();
  const int w = view.width();
  const int h = view.height();

  SequenceResult result;
  result.name = dataset.name;
  result.frames = dataset.frame_count();
  result.objects = dataset.object_ids;
  result.pairs = static_cast<std::size_t>(result.frames) * result.objects.size();

  RoundConfig round_config;
  round_config.memory_stride = config.memory_stride;
  round_config.click_radius = config.click_radius.value_or(default_click_radius(w, h));
  round_config.boundary_tolerance =
      config.boundary_tolerance.value_or(default_boundary_tolerance(w, h));
  const auto start = std::chrono::steady_clock::now();
  if (config.timing) {
    round_config.clock = [start] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
  }

  RobotConfig robot;
  robot.strategy = config.strategy;
  robot.max_clicks = config.max_clicks;
  robot.budget = {config.max_rounds, config.time_budget_per_object_seconds};
  robot.min_region_fraction = config.min_region_area;

  const OracleContext context{dataset.annotations, dataset.object_ids};
  Backends backends = make_backends(config.backends, context);
  SessionState state = SessionState::initial(view, round_config.boundary_tolerance);
  for (const auto& fs : state.scores) {
    for (const auto& [id, s] : fs.per_object) result.initial_jf_sum += s.jf;
  }

  const ScribbleFrames* recorded = dataset.scribbles ? &*dataset.scribbles : nullptr;
  while (state.round < config.max_rounds && !state.stopped) {
    const RoundAnnotation annotation = next_annotation(state, view, robot, recorded);
    run_round(state, annotation, backends, round_config, view);
  }
  result.early_stop = state.stopped;
  for (std::size_t i = 0; i < state.logs.size(); ++i) {
    const auto& log = state.logs[i];
    const auto& sample = state.curve.samples()[i];
    result.rounds.push_back({log.round, log.frame_index, static_cast<int>(log.clicks), log.jf_sum,
                             sample.global_jf});
    if (round_seconds && sample.wall_clock_seconds) {
      round_seconds->push_back(*sample.wall_clock_seconds);
    }
  }
  return result;
}

RoundCurve global_curve(const std::vector<SequenceResult>& sequences) {
  int last = 0;
  bool any = false;
  for (const auto& s : sequences) {
    if (s.error) continue;
    any = true;
    if (!s.rounds.empty()) last = std::max(last, s.rounds.back().round);
  }
  RoundCurve curve;
  if (!any) return curve;
  for (int r = 1; r <= std::max(last, 1); ++r) {
    double sum = 0.0;
    std::size_t pairs = 0;
    for (const auto& s : sequences) {
      if (s.error) continue;
      double value = s.initial_jf_sum;
      for (const auto& rec : s.rounds) {
        if (rec.round > r) break;
        value = rec.jf_sum;
      }
      sum += value;
      pairs += s.pairs;
    }
    curve.append({r, pairs ? sum / static_cast<double>(pairs) : 0.0, std::nullopt});
  }
  return curve;
}

EvaluationReport run_evaluation(const std::vector<SequenceDataset>& datasets,
                                const RunConfig& config, int workers) {
  config.validate();
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  const std::size_t n = datasets.size();
  std::vector<SequenceResult> results(n);
  std::vector<std::vector<double>> seconds(n);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto& ds = datasets[i];
      try {
        results[i] = run_sequence(ds, config, config.timing ? &seconds[i] : nullptr);
      } catch (const std::exception& e) {
        spdlog::error("sequence {} failed: {}", ds.name, e.what());
        SequenceResult failed;
        failed.name = ds.name;
        failed.frames = ds.frame_count();
        failed.objects = ds.object_ids;
        failed.error = e.what();
        results[i] = std::move(failed);
        seconds[i].clear();
      }
    }
  };
  const int threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), n));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return results[a].name < results[b].name; });

  EvaluationReport report;
  report.config = config;
  for (std::size_t i : order) {
    report.partial = report.partial || results[i].error.has_value();
    report.sequences.push_back(results[i]);
  }
  report.global_curve = global_curve(report.sequences);
  report.r_auc = report.global_curve.empty() ? 0.0 : r_auc(report.global_curve, config.max_rounds);

  if (config.timing) {
    TimingReport timing;
    std::size_t counted = 0;
    for (std::size_t i : order) {
      const auto& res = results[i];
      if (res.error) continue;
      SequenceTiming st;
      st.name = res.name;
      st.seconds = seconds[i];
      if (!res.rounds.empty()) {
        RoundCurve timed;
        double prev = -1.0;
        for (std::size_t k = 0; k < res.rounds.size(); ++k) {
          // Coarse clocks can repeat a reading; keep timestamps strictly increasing.
          const double t = std::max(st.seconds[k], std::nextafter(prev, 1e300));
          timed.append({res.rounds[k].round, res.rounds[k].global_jf, t});
          prev = t;
        }
        const double budget = config.time_budget_per_object_seconds * res.objects.size();
        st.auc_time = auc_time(timed, budget);
        st.jf_at_60 = jf_at(timed, 60.0);
      }
      timing.mean_auc_time += st.auc_time;
      timing.mean_jf_at_60 += st.jf_at_60;
      ++counted;
      timing.sequences.push_back(std::move(st));
    }
    if (counted) {
      timing.mean_auc_time /= static_cast<double>(counted);
      timing.mean_jf_at_60 /= static_cast<double>(counted);
    }
    report.timing = std::move(timing);
  }
  return report;
}

namespace {

// <root>/Annotations/<res>/<seq> when present, else <root>/<seq>.
std::filesystem::path sequence_dir(const std::filesystem::path& root, std::string_view resolution,
                                   const std::string& name) {
  const auto davis = root / "Annotations" / resolution / name;
  return std::filesystem::is_directory(davis) ? davis : root / name;
}

}  // namespace

std::vector<ScoreResult> score_sequences(const std::filesystem::path& pred_root,
                                         const std::filesystem::path& gt_root,
                                         const std::vector<std::string>& names,
                                         std::string_view resolution) {
  std::vector<std::string> sequences = names;
  if (sequences.empty()) {
    auto base = gt_root / "Annotations" / resolution;
    if (!std::filesystem::is_directory(base)) base = gt_root;
    if (!std::filesystem::is_directory(base)) throw LoadError(base.string() + ": missing directory");
    for (const auto& e : std::filesystem::directory_iterator(base)) {
      if (e.is_directory()) sequences.push_back(e.path().filename().string());
    }
    std::sort(sequences.begin(), sequences.end());
  }
  std::vector<ScoreResult> out;
  for (const auto& name : sequences) {
    const auto gt = load_annotations(sequence_dir(gt_root, resolution, name));
    const auto pred = load_annotations(sequence_dir(pred_root, resolution, name));
    if (gt.size() != pred.size()) {
      throw LoadError("sequence " + name + ": " + std::to_string(pred.size()) +
                      " predicted frames but " + std::to_string(gt.size()) + " annotations");
    }
    const auto objects = collect_object_ids(gt);
    if (objects.empty()) throw LoadError("sequence " + name + ": ground truth has no objects");
    const int tol = default_boundary_tolerance(gt.front().width(), gt.front().height());
    ScoreResult r;
    r.name = name;
    for (const auto& fs : score_frames(pred, gt, objects, tol)) {
      for (const auto& [id, s] : fs.per_object) {
        r.mean_j += s.j;
        r.mean_f += s.f;
        r.mean_jf += s.jf;
        ++r.pairs;
      }
    }
    r.mean_j /= static_cast<double>(r.pairs);
    r.mean_f /= static_cast<double>(r.pairs);
    r.mean_jf /= static_cast<double>(r.pairs);
    out.push_back(r);
  }
  return out;
}

}  // namespace ivos
