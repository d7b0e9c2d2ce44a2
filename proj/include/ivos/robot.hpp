#pragma once

// The simulated user. Each round it looks at the current masks, picks the
// frame with the lowest mean J&F and turns the errors on that frame into
// clicks with the configured strategy.

#include <optional>
#include <span>
#include <vector>

#include "ivos/interactions.hpp"
#include "ivos/scheduler.hpp"

namespace ivos {

struct BudgetConfig {
  int max_rounds = 8;
  double time_budget_per_object_seconds = 30.0;  // time metrics only
};

struct RobotConfig {
  Strategy strategy = Strategy::f3;
  int max_clicks = 3;  // per object and round
  BudgetConfig budget;
  // Error regions smaller than this fraction of the frame area are ignored.
  double min_region_fraction = 0.001;
  // Scribbles synthesised per object and round (f1/f2); defaults to max_clicks.
  int scribbles_per_object = 0;
};

// Recorded scribbles, indexed by frame (empty lists for frames without any).
using ScribbleFrames = std::vector<std::vector<Scribble>>;

// Lowest mean J&F; ties go to the lowest frame index.
int worst_frame(std::span<const FrameScore> scores);

// One scribble per qualifying region, largest first, at most per_object of
// them: the skeleton path of the region, labelled object_id for false
// negatives and 0 for false positives.
std::vector<Scribble> synthesize_scribbles(const ErrorRegions& regions, int object_id,
                                           int frame_index, int per_object,
                                           double min_region_area);

// The annotation for round state.round + 1. Returns an empty annotation when
// there is nothing left to correct.
RoundAnnotation next_annotation(const SessionState& state, const SequenceView& sequence,
                                const RobotConfig& config,
                                const ScribbleFrames* recorded = nullptr);

}  // namespace ivos
