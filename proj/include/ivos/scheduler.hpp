#pragma once

// Round orchestration: propagation bounds and ranges, memory-frame selection
// and the interaction -> propagation -> fusion state machine.
//
// Notation: frames j0..jn, I(r) the annotated frame of each round so far,
// i_r the frame annotated in round r. A round propagates backward over
// [p_b, i_r) and forward over (i_r, p_f], where p_b and p_f stop one frame
// short of the nearest earlier annotation on each side.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ivos/backends.hpp"
#include "ivos/metrics.hpp"

namespace ivos {

// Inclusive frame interval; empty when first > last.
struct FrameRange {
  int first = 0;
  int last = -1;

  bool empty() const { return first > last; }
  bool contains(int i) const { return i >= first && i <= last; }
  int size() const { return empty() ? 0 : last - first + 1; }
  friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

enum class Direction { backward, forward };

struct PropagationBounds {
  int p_b = 0;
  int p_f = 0;
  friend bool operator==(const PropagationBounds&, const PropagationBounds&) = default;
};

PropagationBounds propagation_bounds(std::span<const int> prev_annotated, int i_r, int j0, int jn);

struct PropagationRanges {
  FrameRange backward;  // p_b .. i_r - 1
  FrameRange forward;   // i_r + 1 .. p_f
};

PropagationRanges propagation_ranges(int p_b, int p_f, int i_r);

struct MemorySelection {
  Direction direction = Direction::backward;
  int step = 1;
  int stride = 1;
  std::vector<int> indices;  // ascending
};

// Memory for the step that segments i_r - s (backward) or i_r + s (forward):
// i_r, the frames strictly between i_r and the target that sit a multiple of
// d away from i_r, and the frame segmented in the previous step if it lies in
// range.
MemorySelection memory_indices(int i_r, int step, int stride, Direction direction,
                               FrameRange range);

struct FusionFlags {
  bool backward = false;
  bool forward = false;
  friend bool operator==(const FusionFlags&, const FusionFlags&) = default;
};

FusionFlags fusion_flags(std::span<const int> prev_annotated, int p_b, int p_f);

struct PropagationPlan {
  int i_r = 0;
  int p_b = 0;
  int p_f = 0;
  FrameRange backward;
  FrameRange forward;
  bool fuse_backward = false;
  bool fuse_forward = false;
};

PropagationPlan plan_round(std::span<const int> prev_annotated, int i_r, int j0, int jn);

inline constexpr int kDefaultMemoryStride = 5;

// What the engine needs to know about a sequence.
struct SequenceView {
  std::span<const LabelMask> ground_truth;
  std::vector<int> objects;
  // Frame pixels by index; may be empty or return null.
  std::function<const Image*(int)> pixels;

  int frame_count() const { return static_cast<int>(ground_truth.size()); }
  int width() const { return ground_truth.front().width(); }
  int height() const { return ground_truth.front().height(); }
  const Image* frame(int i) const { return pixels ? pixels(i) : nullptr; }
};

struct RoundLog {
  int round = 0;
  int frame_index = 0;
  std::size_t clicks = 0;
  PropagationBounds bounds;
  FusionFlags fusion;
  double jf_sum = 0.0;  // over all (frame, object) pairs
  std::size_t pairs = 0;
};

struct SessionState {
  int round = 0;
  std::vector<int> annotated;      // i(1), i(2), ...
  std::vector<LabelMask> masks;    // latest mask per frame
  std::vector<FrameScore> scores;  // scores of `masks`, one per frame
  RoundCurve curve;
  std::vector<RoundLog> logs;
  bool stopped = false;  // set by an empty annotation

  // All frames background, scored against the ground truth.
  static SessionState initial(const SequenceView& sequence, int boundary_tolerance);
};

struct RoundConfig {
  int memory_stride = kDefaultMemoryStride;
  int click_radius = 0;
  int boundary_tolerance = 0;
  // Stamps each curve sample when set.
  std::function<double()> clock;
};

// Runs one round and commits it; on any exception `state` is left unchanged.
// An empty annotation only advances the round counter and marks the session
// stopped.
void run_round(SessionState& state, const RoundAnnotation& annotation, Backends& backends,
               const RoundConfig& config, const SequenceView& sequence);

// Scores every frame and returns the per-frame results in frame order.
std::vector<FrameScore> score_frames(std::span<const LabelMask> predictions,
                                     std::span<const LabelMask> ground_truth,
                                     std::span<const int> objects, int tolerance);

}  // namespace ivos
