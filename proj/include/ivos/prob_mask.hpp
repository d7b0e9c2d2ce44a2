#pragma once

#include <map>
#include <span>

#include "ivos/mask.hpp"

namespace ivos {

struct ProbTag;
using ProbGrid = Grid<float, ProbTag>;

// Soft per-object segmentation: one probability grid per object id. Objects
// without a channel are treated as probability 0 everywhere.
class ProbMask {
 public:
  ProbMask() = default;
  ProbMask(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  const std::map<int, ProbGrid>& channels() const { return channels_; }
  // Returns the channel, creating a zero-filled one if needed.
  ProbGrid& channel(int object_id);
  const ProbGrid* find(int object_id) const;
  float at(int object_id, int x, int y) const;

  // Throws if any value is outside [0, 1] or a channel has the wrong shape.
  void validate() const;

  static ProbMask one_hot(const LabelMask& labels, std::span<const int> objects);

  friend bool operator==(const ProbMask&, const ProbMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::map<int, ProbGrid> channels_;
};

// Soft aggregation: background scores prod(1 - p_o); each pixel takes the
// argmax over background and objects. Background wins exact ties with an
// object; tied objects resolve to the lower id. Throws on malformed input.
LabelMask aggregate_objects(const ProbMask& probs);

// The same rule at one pixel.
int aggregate_at(const ProbMask& probs, PixelCoord p);

}  // namespace ivos
