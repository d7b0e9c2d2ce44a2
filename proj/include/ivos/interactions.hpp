#pragma once

// Click and scribble data model, the three click-generation strategies and
// click-map rasterisation.
//
//   f1  one click per scribble group: mean of all points, snapped to the
//       nearest scribble point
//   f2  one click per scribble, same snapping
//   f3  one click at the interior centre of each large-enough error region

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ivos/mask.hpp"

namespace ivos {

enum class Polarity { positive, negative };

struct Click {
  PixelCoord position;
  int object_id = 1;
  Polarity polarity = Polarity::positive;
  int frame_index = 0;

  friend bool operator==(const Click&, const Click&) = default;
};

// object_id 0 marks a background (correction) scribble.
struct Scribble {
  int object_id = 0;
  std::vector<PixelCoord> path;
  int frame_index = 0;

  friend bool operator==(const Scribble&, const Scribble&) = default;
};

// One round of user input on a single frame.
struct RoundAnnotation {
  int round = 1;
  int frame_index = 0;
  std::vector<Click> clicks;

  bool empty() const { return clicks.empty(); }
  friend bool operator==(const RoundAnnotation&, const RoundAnnotation&) = default;
};

struct InteractionMaps {
  BinaryMask positive;
  BinaryMask negative;
};

struct ErrorRegions {
  int width = 0;
  int height = 0;
  std::vector<Region> false_negatives;  // gt == o, pred != o
  std::vector<Region> false_positives;  // pred == o, gt != o
};

enum class Strategy { f1, f2, f3 };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

ErrorRegions error_regions(const LabelMask& pred, const LabelMask& gt, int object_id);

// Tie-break used by f1/f2 snapping: Euclidean distance, then (y, x).
PixelCoord closest_point(std::span<const PixelCoord> points, double mean_x, double mean_y);

// Polarity mapping for scribble-derived clicks. A scribble of object o >= 1
// gives a positive click for o. A background scribble gives a negative click
// for the object currently predicted at the click position, or nothing when
// that position is predicted as background.
std::optional<Click> click_from_scribble_point(PixelCoord p, int scribble_object, int frame_index,
                                               const LabelMask& current_pred);

// Scribbles must be nonempty and share object id and frame. Returns nullopt
// only when a background click cannot be attributed to an object.
std::optional<Click> strategy_f1(std::span<const Scribble> scribbles,
                                 const LabelMask& current_pred);

// One click per scribble, in input order (unattributable background clicks
// are dropped).
std::vector<Click> strategy_f2(std::span<const Scribble> scribbles,
                               const LabelMask& current_pred);

// Regions below min_region_area are ignored; the rest, largest first, give
// up to max_clicks clicks (FN -> positive, FP -> negative).
std::vector<Click> strategy_f3(const ErrorRegions& regions, int object_id, int frame_index,
                               int max_clicks, double min_region_area);

// Keeps the first max_clicks clicks per object, in order. Round 1 allows one
// click per object regardless of max_clicks.
std::vector<Click> cap_per_round(std::span<const Click> clicks, int max_clicks, int round);

InteractionMaps rasterize_clicks(std::span<const Click> clicks, int width, int height, int radius);

// 0.1% of the frame area.
double default_min_region_area(int width, int height);

// 5 px at 854x480, scaled with the frame diagonal.
int default_click_radius(int width, int height);

}  // namespace ivos
