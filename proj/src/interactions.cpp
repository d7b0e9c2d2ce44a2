#include "ivos/interactions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace ivos {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::f1:
      return "f1";
    case Strategy::f2:
      return "f2";
    case Strategy::f3:
      return "f3";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "f1") return Strategy::f1;
  if (name == "f2") return Strategy::f2;
  if (name == "f3") return Strategy::f3;
  throw std::invalid_argument("unknown click strategy '" + std::string(name) + "'");
}

ErrorRegions error_regions(const LabelMask& pred, const LabelMask& gt, int object_id) {
  if (!pred.same_shape(gt)) throw std::invalid_argument("error_regions: mask dimensions differ");
  BinaryMask missed(gt.width(), gt.height());
  BinaryMask extra(gt.width(), gt.height());
  const auto p = pred.values();
  const auto g = gt.values();
  auto fn = missed.values();
  auto fp = extra.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool in_pred = p[i] == object_id;
    const bool in_gt = g[i] == object_id;
    fn[i] = in_gt && !in_pred;
    fp[i] = in_pred && !in_gt;
  }
  return {gt.width(), gt.height(), connected_components(missed, Connectivity::eight),
          connected_components(extra, Connectivity::eight)};
}

PixelCoord closest_point(std::span<const PixelCoord> points, double mean_x, double mean_y) {
  if (points.empty()) throw std::invalid_argument("closest_point: no points");
  PixelCoord best = points.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    const double dx = p.x - mean_x;
    const double dy = p.y - mean_y;
    const double d = dx * dx + dy * dy;
    if (d < best_d || (d == best_d && p < best)) {
      best_d = d;
      best = p;
    }
  }
  return best;
}

std::optional<Click> click_from_scribble_point(PixelCoord p, int scribble_object, int frame_index,
                                               const LabelMask& current_pred) {
  if (scribble_object >= 1) return Click{p, scribble_object, Polarity::positive, frame_index};
  if (!current_pred.contains(p)) return std::nullopt;
  const int predicted = current_pred[p];
  if (predicted == 0) return std::nullopt;
  return Click{p, predicted, Polarity::negative, frame_index};
}

namespace {

std::optional<Click> snap(std::span<const Scribble> scribbles, const LabelMask& current_pred) {
  std::vector<PixelCoord> points;
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& s : scribbles) {
    for (const auto& p : s.path) {
      points.push_back(p);
      sx += p.x;
      sy += p.y;
    }
  }
  if (points.empty()) throw std::invalid_argument("scribble without points");
  const double n = static_cast<double>(points.size());
  const PixelCoord target = closest_point(points, sx / n, sy / n);
  return click_from_scribble_point(target, scribbles.front().object_id,
                                   scribbles.front().frame_index, current_pred);
}

}  // namespace

std::optional<Click> strategy_f1(std::span<const Scribble> scribbles,
                                 const LabelMask& current_pred) {
  if (scribbles.empty()) throw std::invalid_argument("strategy_f1: no scribbles");
  for (const auto& s : scribbles) {
    if (s.object_id != scribbles.front().object_id ||
        s.frame_index != scribbles.front().frame_index) {
      throw std::invalid_argument("strategy_f1: scribbles must share object and frame");
    }
  }
  return snap(scribbles, current_pred);
}

std::vector<Click> strategy_f2(std::span<const Scribble> scribbles,
                               const LabelMask& current_pred) {
  if (scribbles.empty()) throw std::invalid_argument("strategy_f2: no scribbles");
  std::vector<Click> out;
  for (std::size_t i = 0; i < scribbles.size(); ++i) {
    if (auto c = snap(scribbles.subspan(i, 1), current_pred)) out.push_back(*c);
  }
  return out;
}

std::vector<Click> strategy_f3(const ErrorRegions& regions, int object_id, int frame_index,
                               int max_clicks, double min_region_area) {
  if (max_clicks < 1) throw std::invalid_argument("strategy_f3: max_clicks must be >= 1");
  struct Candidate {
    const Region* region;
    Polarity polarity;
  };
  std::vector<Candidate> candidates;
  for (const auto& r : regions.false_negatives) candidates.push_back({&r, Polarity::positive});
  for (const auto& r : regions.false_positives) candidates.push_back({&r, Polarity::negative});
  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.region->area() != b.region->area()) return a.region->area() > b.region->area();
    const auto& ba = a.region->bounding_box;
    const auto& bb = b.region->bounding_box;
    if (ba.y_min != bb.y_min) return ba.y_min < bb.y_min;
    return ba.x_min < bb.x_min;
  });

  std::vector<Click> out;
  for (const auto& c : candidates) {
    if (static_cast<int>(out.size()) >= max_clicks) break;
    if (static_cast<double>(c.region->area()) < min_region_area) continue;
    const BinaryMask within = mask_of(*c.region, regions.width, regions.height);
    out.push_back({interior_center(*c.region, within), object_id, c.polarity, frame_index});
  }
  return out;
}

std::vector<Click> cap_per_round(std::span<const Click> clicks, int max_clicks, int round) {
  if (max_clicks < 1) throw std::invalid_argument("cap_per_round: max_clicks must be >= 1");
  const int cap = round == 1 ? 1 : max_clicks;
  std::map<int, int> used;
  std::vector<Click> out;
  for (const auto& c : clicks) {
    if (used[c.object_id]++ < cap) out.push_back(c);
  }
  return out;
}

InteractionMaps rasterize_clicks(std::span<const Click> clicks, int width, int height,
                                 int radius) {
  if (radius < 0) throw std::invalid_argument("rasterize_clicks: radius must be >= 0");
  InteractionMaps maps{BinaryMask(width, height), BinaryMask(width, height)};
  for (const auto& c : clicks) {
    if (!maps.positive.contains(c.position)) {
      throw std::invalid_argument("rasterize_clicks: click at (" + std::to_string(c.position.x) +
                                  ", " + std::to_string(c.position.y) + ") outside " +
                                  std::to_string(width) + "x" + std::to_string(height));
    }
    BinaryMask& target = c.polarity == Polarity::positive ? maps.positive : maps.negative;
    const int y0 = std::max(0, c.position.y - radius);
    const int y1 = std::min(height - 1, c.position.y + radius);
    const int x0 = std::max(0, c.position.x - radius);
    const int x1 = std::min(width - 1, c.position.x + radius);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) target(x, y) = 1;
    }
  }
  return maps;
}

double default_min_region_area(int width, int height) {
  return 0.001 * static_cast<double>(width) * static_cast<double>(height);
}

int default_click_radius(int width, int height) {
  static const double kReferenceDiagonal = std::hypot(854.0, 480.0);
  return static_cast<int>(std::lround(5.0 * std::hypot(width, height) / kReferenceDiagonal));
}

}  // namespace ivos
