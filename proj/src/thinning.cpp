#include <algorithm>
#include <array>

#include "ivos/mask.hpp"

namespace ivos {
namespace {

// One Zhang-Suen subiteration. Returns true if any pixel was removed.
//
//   p9 p2 p3
//   p8 p1 p4
//   p7 p6 p5
bool thin_pass(BinaryMask& img, int step, std::vector<PixelCoord>& doomed) {
  doomed.clear();
  auto at = [&](int x, int y) -> int { return img.contains(x, y) ? img(x, y) : 0; };
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!img(x, y)) continue;
      const int p2 = at(x, y - 1), p3 = at(x + 1, y - 1), p4 = at(x + 1, y);
      const int p5 = at(x + 1, y + 1), p6 = at(x, y + 1), p7 = at(x - 1, y + 1);
      const int p8 = at(x - 1, y), p9 = at(x - 1, y - 1);
      const std::array<int, 9> ring{p2, p3, p4, p5, p6, p7, p8, p9, p2};
      int neighbours = 0;
      int transitions = 0;
      for (int i = 0; i < 8; ++i) {
        neighbours += ring[i];
        transitions += (!ring[i] && ring[i + 1]) ? 1 : 0;
      }
      if (neighbours < 2 || neighbours > 6 || transitions != 1) continue;
      const bool removable = step == 0 ? (p2 * p4 * p6 == 0 && p4 * p6 * p8 == 0)
                                       : (p2 * p4 * p8 == 0 && p2 * p6 * p8 == 0);
      if (removable) doomed.push_back({x, y});
    }
  }
  for (const auto& p : doomed) img[p] = 0;
  return !doomed.empty();
}

std::vector<PixelCoord> neighbours_of(const BinaryMask& img, PixelCoord p) {
  std::vector<PixelCoord> out;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const PixelCoord q{p.x + dx, p.y + dy};
      if (img.contains(q) && img[q]) out.push_back(q);
    }
  }
  return out;  // generated in raster order already
}

// Depth-first walk from the smallest endpoint; neighbours are visited in
// raster order and any disconnected leftovers are appended the same way.
std::vector<PixelCoord> walk(const BinaryMask& img) {
  std::vector<PixelCoord> pixels;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img(x, y)) pixels.push_back({x, y});
    }
  }
  std::vector<PixelCoord> starts;
  for (const auto& p : pixels) {
    if (neighbours_of(img, p).size() <= 1) {
      starts.push_back(p);
      break;
    }
  }
  starts.insert(starts.end(), pixels.begin(), pixels.end());

  BinaryMask seen(img.width(), img.height());
  std::vector<PixelCoord> order;
  std::vector<PixelCoord> stack;
  for (const auto& start : starts) {
    if (seen[start]) continue;
    stack.push_back(start);
    while (!stack.empty()) {
      const PixelCoord p = stack.back();
      stack.pop_back();
      if (seen[p]) continue;
      seen[p] = 1;
      order.push_back(p);
      const auto next = neighbours_of(img, p);
      for (auto it = next.rbegin(); it != next.rend(); ++it) {
        if (!seen[*it]) stack.push_back(*it);
      }
    }
  }
  return order;
}

}  // namespace

std::vector<PixelCoord> skeletonize(const Region& region, const BinaryMask& within) {
  if (region.pixels.empty()) throw std::invalid_argument("skeletonize of empty region");
  BoundingBox bb{region.pixels.front().x, region.pixels.front().y, region.pixels.front().x,
                 region.pixels.front().y};
  for (const auto& p : region.pixels) {
    if (!within.contains(p)) throw std::invalid_argument("region pixel outside frame");
    bb.x_min = std::min(bb.x_min, p.x);
    bb.x_max = std::max(bb.x_max, p.x);
    bb.y_min = std::min(bb.y_min, p.y);
    bb.y_max = std::max(bb.y_max, p.y);
  }

  // Thin inside a crop with a one-pixel empty margin.
  BinaryMask img(bb.x_max - bb.x_min + 3, bb.y_max - bb.y_min + 3);
  for (const auto& p : region.pixels) img(p.x - bb.x_min + 1, p.y - bb.y_min + 1) = 1;
  std::vector<PixelCoord> doomed;
  bool changed = true;
  while (changed) {
    const bool first = thin_pass(img, 0, doomed);
    const bool second = thin_pass(img, 1, doomed);
    changed = first || second;
  }

  std::vector<PixelCoord> path = walk(img);
  if (path.empty()) {
    // Zhang-Suen erases 2x2 blocks completely.
    BinaryMask region_mask(within.width(), within.height());
    for (const auto& p : region.pixels) region_mask[p] = 1;
    return {interior_center(region, region_mask)};
  }
  for (auto& p : path) p = {p.x + bb.x_min - 1, p.y + bb.y_min - 1};
  return path;
}

}  // namespace ivos
