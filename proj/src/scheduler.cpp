#include "ivos/scheduler.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ivos {

PropagationBounds propagation_bounds(std::span<const int> prev_annotated, int i_r, int j0, int jn) {
  if (j0 > jn) throw std::invalid_argument("propagation_bounds: empty sequence");
  if (i_r < j0 || i_r > jn) {
    throw std::invalid_argument("propagation_bounds: annotated frame " + std::to_string(i_r) +
                                " outside [" + std::to_string(j0) + ", " + std::to_string(jn) + "]");
  }
  PropagationBounds b{j0, jn};
  for (int i : prev_annotated) {
    if (i < j0 || i > jn) throw std::invalid_argument("propagation_bounds: history out of range");
    if (i < i_r) b.p_b = std::max(b.p_b, i + 1);
    if (i > i_r) b.p_f = std::min(b.p_f, i - 1);
  }
  return b;
}

PropagationRanges propagation_ranges(int p_b, int p_f, int i_r) {
  if (p_b > i_r || i_r > p_f) throw std::invalid_argument("propagation_ranges: need p_b <= i_r <= p_f");
  return {{p_b, i_r - 1}, {i_r + 1, p_f}};
}

MemorySelection memory_indices(int i_r, int step, int stride, Direction direction,
                               FrameRange range) {
  if (step < 1 || stride < 1) throw std::invalid_argument("memory_indices: step and stride must be >= 1");
  const int sign = direction == Direction::backward ? -1 : 1;
  MemorySelection sel{direction, step, stride, {i_r}};
  for (int k = 1; k < step; ++k) {  // strictly between i_r and the target
    const int m = i_r + sign * k;
    if (k % stride == 0 && range.contains(m)) sel.indices.push_back(m);
  }
  const int adjacent = i_r + sign * (step - 1);
  if (range.contains(adjacent)) sel.indices.push_back(adjacent);
  std::sort(sel.indices.begin(), sel.indices.end());
  sel.indices.erase(std::unique(sel.indices.begin(), sel.indices.end()), sel.indices.end());
  return sel;
}

FusionFlags fusion_flags(std::span<const int> prev_annotated, int p_b, int p_f) {
  FusionFlags f;
  for (int i : prev_annotated) {
    f.backward = f.backward || i == p_b - 1;
    f.forward = f.forward || i == p_f + 1;
  }
  return f;
}

PropagationPlan plan_round(std::span<const int> prev_annotated, int i_r, int j0, int jn) {
  const auto bounds = propagation_bounds(prev_annotated, i_r, j0, jn);
  const auto ranges = propagation_ranges(bounds.p_b, bounds.p_f, i_r);
  const auto flags = fusion_flags(prev_annotated, bounds.p_b, bounds.p_f);
  return {i_r, bounds.p_b, bounds.p_f, ranges.backward, ranges.forward, flags.backward,
          flags.forward};
}

std::vector<FrameScore> score_frames(std::span<const LabelMask> predictions,
                                     std::span<const LabelMask> ground_truth,
                                     std::span<const int> objects, int tolerance) {
  if (predictions.size() != ground_truth.size()) {
    throw std::invalid_argument("score_frames: prediction and ground-truth lengths differ");
  }
  std::vector<FrameScore> out;
  out.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    out.push_back(frame_score(predictions[i], ground_truth[i], objects, tolerance,
                              static_cast<int>(i)));
  }
  return out;
}

SessionState SessionState::initial(const SequenceView& sequence, int boundary_tolerance) {
  if (sequence.frame_count() < 1) throw std::invalid_argument("session: sequence has no frames");
  SessionState s;
  s.masks.assign(sequence.ground_truth.size(), LabelMask(sequence.width(), sequence.height()));
  s.scores = score_frames(s.masks, sequence.ground_truth, sequence.objects, boundary_tolerance);
  return s;
}

namespace {

void check_output(const ProbMask& m, const SequenceView& seq, const char* who) {
  if (m.width() != seq.width() || m.height() != seq.height()) {
    throw std::runtime_error(std::string(who) + " backend returned a mask of the wrong size");
  }
  m.validate();
}

}  // namespace

void run_round(SessionState& state, const RoundAnnotation& annotation, Backends& backends,
               const RoundConfig& config, const SequenceView& sequence) {
  if (state.stopped) throw std::logic_error("run_round: session already stopped");
  if (annotation.empty()) {
    ++state.round;
    state.stopped = true;
    return;
  }
  const int n = sequence.frame_count();
  const int i_r = annotation.frame_index;
  if (annotation.round != state.round + 1) {
    throw std::invalid_argument("run_round: expected round " + std::to_string(state.round + 1) +
                                ", got " + std::to_string(annotation.round));
  }
  if (i_r < 0 || i_r >= n) throw std::invalid_argument("run_round: annotated frame out of range");
  for (const auto& c : annotation.clicks) {
    if (c.frame_index != i_r) throw std::invalid_argument("run_round: click on a different frame");
    if (std::find(sequence.objects.begin(), sequence.objects.end(), c.object_id) ==
        sequence.objects.end()) {
      throw std::invalid_argument("run_round: click for unknown object " +
                                  std::to_string(c.object_id));
    }
  }
  if (!backends.interaction || !backends.propagation) {
    throw std::invalid_argument("run_round: interaction and propagation backends are required");
  }

  const PropagationPlan plan = plan_round(state.annotated, i_r, 0, n - 1);
  const int w = sequence.width();
  const int h = sequence.height();

  // Propagation outputs of this round, indexed by frame - p_b. Memory reads
  // from these; fused results only go to the committed masks.
  std::vector<ProbMask> fresh(static_cast<std::size_t>(plan.p_f - plan.p_b + 1));
  std::vector<LabelMask> committed(fresh.size());
  auto slot = [&](int frame) { return static_cast<std::size_t>(frame - plan.p_b); };

  const ProbMask previous_ir = ProbMask::one_hot(state.masks[i_r], sequence.objects);
  const InteractionMaps maps = rasterize_clicks(annotation.clicks, w, h, config.click_radius);
  fresh[slot(i_r)] = backends.interaction->interact(i_r, sequence.frame(i_r), previous_ir,
                                                    annotation.clicks, maps);
  check_output(fresh[slot(i_r)], sequence, "interaction");
  committed[slot(i_r)] = aggregate_objects(fresh[slot(i_r)]);

  auto pass = [&](Direction dir, FrameRange range, bool fuse, int far_anchor) {
    const int sign = dir == Direction::backward ? -1 : 1;
    for (int s = 1; s <= range.size(); ++s) {
      const int target = i_r + sign * s;
      const auto sel = memory_indices(i_r, s, config.memory_stride, dir, range);
      std::vector<MemoryEntry> memory;
      memory.reserve(sel.indices.size());
      for (int m : sel.indices) memory.push_back({m, sequence.frame(m), &fresh[slot(m)]});
      ProbMask out = backends.propagation->propagate(target, sequence.frame(target), memory);
      check_output(out, sequence, "propagation");
      if (fuse && backends.fusion) {
        const ProbMask retained = ProbMask::one_hot(state.masks[target], sequence.objects);
        ProbMask fused = backends.fusion->fuse(out, retained, s, std::abs(far_anchor - target));
        check_output(fused, sequence, "fusion");
        committed[slot(target)] = aggregate_objects(fused);
      } else {
        committed[slot(target)] = aggregate_objects(out);
      }
      fresh[slot(target)] = std::move(out);
    }
  };
  pass(Direction::backward, plan.backward, plan.fuse_backward, plan.p_b - 1);
  pass(Direction::forward, plan.forward, plan.fuse_forward, plan.p_f + 1);

  // Score on copies so a failure here still leaves the state untouched.
  std::vector<FrameScore> scores = state.scores;
  for (int f = plan.p_b; f <= plan.p_f; ++f) {
    scores[f] = frame_score(committed[slot(f)], sequence.ground_truth[f], sequence.objects,
                            config.boundary_tolerance, f);
  }
  RoundLog log;
  log.round = annotation.round;
  log.frame_index = i_r;
  log.clicks = annotation.clicks.size();
  log.bounds = {plan.p_b, plan.p_f};
  log.fusion = {plan.fuse_backward, plan.fuse_forward};
  for (const auto& fs : scores) {
    for (const auto& [id, score] : fs.per_object) {
      log.jf_sum += score.jf;
      ++log.pairs;
    }
  }
  CurveSample sample{annotation.round, log.jf_sum / static_cast<double>(log.pairs), std::nullopt};
  if (config.clock) sample.wall_clock_seconds = config.clock();
  RoundCurve curve = state.curve;
  curve.append(sample);

  for (int f = plan.p_b; f <= plan.p_f; ++f) state.masks[f] = std::move(committed[slot(f)]);
  state.scores = std::move(scores);
  state.curve = std::move(curve);
  state.annotated.push_back(i_r);
  state.logs.push_back(log);
  state.round = annotation.round;
}

}  // namespace ivos
