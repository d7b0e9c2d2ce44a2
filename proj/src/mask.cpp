#include <algorithm>
#include <array>
#include <limits>

#include "ivos/kernels.hpp"
#include "ivos/mask.hpp"

namespace ivos {

BinaryMask binary_of(const LabelMask& mask, int object_id) {
  if (object_id < 1) throw std::invalid_argument("object id must be >= 1");
  BinaryMask out(mask.width(), mask.height());
  if (object_id > kMaxObjectId) return out;
  kernels::equal_to(mask.values(), static_cast<std::uint8_t>(object_id), out.values());
  return out;
}

std::size_t count(const BinaryMask& mask) { return kernels::count_nonzero(mask.values()); }

std::vector<Region> connected_components(const BinaryMask& mask, Connectivity connectivity) {
  static constexpr std::array<PixelCoord, 8> kOffsets{
      PixelCoord{1, 0}, PixelCoord{-1, 0}, PixelCoord{0, 1},   PixelCoord{0, -1},
      PixelCoord{1, 1}, PixelCoord{-1, 1}, PixelCoord{1, -1}, PixelCoord{-1, -1}};
  const std::size_t neighbours = connectivity == Connectivity::eight ? 8 : 4;

  std::vector<Region> regions;
  if (mask.empty()) return regions;
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<PixelCoord> stack;
  const int w = mask.width();

  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (!mask(x, y) || seen[idx]) continue;
      Region region;
      region.bounding_box = {x, y, x, y};
      seen[idx] = 1;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const PixelCoord p = stack.back();
        stack.pop_back();
        region.pixels.push_back(p);
        auto& bb = region.bounding_box;
        bb.x_min = std::min(bb.x_min, p.x);
        bb.x_max = std::max(bb.x_max, p.x);
        bb.y_min = std::min(bb.y_min, p.y);
        bb.y_max = std::max(bb.y_max, p.y);
        for (std::size_t k = 0; k < neighbours; ++k) {
          const PixelCoord q{p.x + kOffsets[k].x, p.y + kOffsets[k].y};
          if (!mask.contains(q) || !mask[q]) continue;
          const std::size_t qi = static_cast<std::size_t>(q.y) * w + q.x;
          if (seen[qi]) continue;
          seen[qi] = 1;
          stack.push_back(q);
        }
      }
      std::sort(region.pixels.begin(), region.pixels.end());
      regions.push_back(std::move(region));
    }
  }

  // Discovery order is raster order of the first pixel, so a stable sort
  // leaves the final tie-break on that pixel.
  std::stable_sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) {
    if (a.area() != b.area()) return a.area() > b.area();
    const auto& ba = a.bounding_box;
    const auto& bb = b.bounding_box;
    if (ba.y_min != bb.y_min) return ba.y_min < bb.y_min;
    return ba.x_min < bb.x_min;
  });
  return regions;
}

BinaryMask boundary(const BinaryMask& mask) {
  BinaryMask out(mask.width(), mask.height());
  const int w = mask.width();
  const int h = mask.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y)) continue;
      const bool edge = x == 0 || y == 0 || x == w - 1 || y == h - 1 || !mask(x - 1, y) ||
                        !mask(x + 1, y) || !mask(x, y - 1) || !mask(x, y + 1);
      out(x, y) = edge ? 1 : 0;
    }
  }
  return out;
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
  if (radius < 0) throw std::invalid_argument("dilation radius must be >= 0");
  if (radius == 0) return mask;
  const int w = mask.width();
  const int h = mask.height();

  // Horizontal pass: a cell is set if its row window [x-r, x+r] holds any
  // true pixel (running prefix count).
  BinaryMask horizontal(w, h);
  std::vector<int> prefix(static_cast<std::size_t>(w) + 1);
  for (int y = 0; y < h; ++y) {
    const auto src = mask.row(y);
    for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + src[x];
    auto dst = horizontal.row(y);
    for (int x = 0; x < w; ++x) {
      const int lo = std::max(0, x - radius);
      const int hi = std::min(w, x + radius + 1);
      dst[x] = prefix[hi] - prefix[lo] > 0 ? 1 : 0;
    }
  }

  // Vertical pass: OR of the 2r+1 neighbouring rows.
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    auto dst = out.row(y);
    const int lo = std::max(0, y - radius);
    const int hi = std::min(h - 1, y + radius);
    for (int yy = lo; yy <= hi; ++yy) kernels::or_into(dst, horizontal.row(yy));
  }
  return out;
}

BinaryMask erode(const BinaryMask& mask, int radius) {
  if (radius < 0) throw std::invalid_argument("erosion radius must be >= 0");
  if (radius == 0) return mask;
  BinaryMask inverse(mask.width(), mask.height());
  auto src = mask.values();
  auto inv = inverse.values();
  for (std::size_t i = 0; i < src.size(); ++i) inv[i] = src[i] ? 0 : 1;
  const BinaryMask grown = dilate(inverse, radius);
  BinaryMask out(mask.width(), mask.height());
  for (int y = radius; y < mask.height() - radius; ++y) {
    for (int x = radius; x < mask.width() - radius; ++x) {
      out(x, y) = grown(x, y) ? 0 : 1;
    }
  }
  return out;
}

BinaryMask mask_of(const Region& region, int width, int height) {
  BinaryMask out(width, height);
  for (const auto& p : region.pixels) {
    if (!out.contains(p)) throw std::invalid_argument("region pixel outside frame");
    out[p] = 1;
  }
  return out;
}

}  // namespace ivos
