#pragma once

// Segmentation backend contracts and the reference implementations.
//
// The harness only sees three interfaces: interaction (refine one frame from
// clicks), propagation (segment a target frame from memory frames) and fusion
// (merge a freshly propagated mask with the retained one). The oracle
// implementations read ground truth and exist for testing the harness; they
// say nothing about any segmentation method.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ivos/image.hpp"
#include "ivos/interactions.hpp"
#include "ivos/prob_mask.hpp"

namespace ivos {

struct MemoryEntry {
  int frame_index = 0;
  const Image* pixels = nullptr;  // may be null
  const ProbMask* mask = nullptr;  // borrowed for the duration of the call
};

class InteractionBackend {
 public:
  virtual ~InteractionBackend() = default;
  virtual ProbMask interact(int frame_index, const Image* pixels, const ProbMask& previous,
                            std::span<const Click> clicks, const InteractionMaps& maps) = 0;
};

class PropagationBackend {
 public:
  virtual ~PropagationBackend() = default;
  virtual ProbMask propagate(int target_index, const Image* target_pixels,
                             std::span<const MemoryEntry> memory) = 0;
};

class FusionBackend {
 public:
  virtual ~FusionBackend() = default;
  virtual ProbMask fuse(const ProbMask& fresh, const ProbMask& previous, int distance_to_near_anchor,
                        int distance_to_far_anchor) = 0;
};

// For each positive click of object o, the 8-connected component of
// (gt == o and prediction != o) under the click is set to o; for a negative
// click the component of (prediction == o and gt != o) is cleared for o.
// Prediction means aggregate_objects(previous), updated click by click.
// Clicks outside a matching error region do nothing.
ProbMask oracle_interaction(const LabelMask& gt, const ProbMask& previous,
                            std::span<const Click> clicks);

inline constexpr int kDefaultColorTolerance = 24;

// Positive clicks flood-fill (4-connected) pixels whose colour is within
// color_tolerance of the seed in every channel; negative clicks erase the
// predicted component (8-connected) they land on.
ProbMask region_grow_interaction(const Image& frame, const ProbMask& previous,
                                 std::span<const Click> clicks,
                                 int color_tolerance = kDefaultColorTolerance);

// Mask of the closest memory frame; ties go to the smaller index.
ProbMask copy_nearest_propagator(int target_index, std::span<const MemoryEntry> memory);

// Ground truth of the target frame, each object eroded by
// floor(lambda * distance to the closest memory frame).
ProbMask decay_oracle_propagator(int target_index, std::span<const MemoryEntry> memory,
                                 const LabelMask& gt, std::span<const int> objects, double lambda);

// w * fresh + (1 - w) * previous with w = d_far / (d_near + d_far).
ProbMask distance_weighted_fusion(const ProbMask& fresh, const ProbMask& previous, int d_near,
                                  int d_far);

// Ground truth handed to the oracle backends.
struct OracleContext {
  std::span<const LabelMask> frames;
  std::vector<int> objects;
};

struct BackendOptions {
  std::string interaction = "oracle";
  std::string propagator = "copy";
  std::string fusion = "distance-weighted";
  int color_tolerance = kDefaultColorTolerance;
  double decay_lambda = 1.0;
  friend bool operator==(const BackendOptions&, const BackendOptions&) = default;
};

struct Backends {
  std::unique_ptr<InteractionBackend> interaction;
  std::unique_ptr<PropagationBackend> propagation;
  std::unique_ptr<FusionBackend> fusion;  // null for "none"
};

// Names: interaction oracle|region-grow, propagator copy|decay-oracle,
// fusion distance-weighted|none. The context must outlive the backends.
Backends make_backends(const BackendOptions& options, const OracleContext& context);

void validate_backend_names(const BackendOptions& options);

}  // namespace ivos
