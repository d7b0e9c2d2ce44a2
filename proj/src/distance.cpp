#include <algorithm>
#include <cmath>
#include <limits>

#include "ivos/mask.hpp"

namespace ivos {
namespace {

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher) over one line of
// squared distances. Inputs are finite integers stored in doubles, so the
// returned minima are exact.
void squared_distance_1d(std::span<const double> f, std::span<double> out,
                         std::vector<int>& vertices, std::vector<double>& bounds) {
  const int n = static_cast<int>(f.size());
  vertices.assign(static_cast<std::size_t>(n), 0);
  bounds.assign(static_cast<std::size_t>(n) + 1, 0.0);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  int k = 0;
  vertices[0] = 0;
  bounds[0] = -kInf;
  bounds[1] = kInf;
  auto intersect = [&](int q, int v) {
    return ((f[q] + static_cast<double>(q) * q) - (f[v] + static_cast<double>(v) * v)) /
           (2.0 * (q - v));
  };
  for (int q = 1; q < n; ++q) {
    double s = intersect(q, vertices[k]);
    while (s <= bounds[k]) {  // bounds[0] is -inf, so this stops at k == 0
      --k;
      s = intersect(q, vertices[k]);
    }
    ++k;
    vertices[k] = q;
    bounds[k] = s;
    bounds[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (bounds[k + 1] < q) ++k;
    const int v = vertices[k];
    out[q] = static_cast<double>(q - v) * (q - v) + f[v];
  }
}

}  // namespace

DistanceMap distance_transform(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  // Pad by one false cell on every side so off-frame cells act as false.
  const int pw = w + 2;
  const int ph = h + 2;
  auto inside = [&](int px, int py) {
    return px >= 1 && py >= 1 && px <= w && py <= h && mask(px - 1, py - 1);
  };

  // Column pass: exact 1D distance to the nearest false cell, squared.
  std::vector<double> sq(static_cast<std::size_t>(pw) * ph);
  std::vector<int> column(static_cast<std::size_t>(ph));
  for (int px = 0; px < pw; ++px) {
    int last = -1;
    for (int py = 0; py < ph; ++py) {
      if (!inside(px, py)) last = py;
      column[py] = py - last;  // row 0 is padding, so last >= 0 here
    }
    last = ph;
    for (int py = ph - 1; py >= 0; --py) {
      if (!inside(px, py)) last = py;
      column[py] = std::min(column[py], last - py);
      sq[static_cast<std::size_t>(py) * pw + px] = static_cast<double>(column[py]) * column[py];
    }
  }

  // Row pass: parabola envelope along x.
  DistanceMap out(w, h, 0.0);
  std::vector<double> line(static_cast<std::size_t>(pw));
  std::vector<double> result(static_cast<std::size_t>(pw));
  std::vector<int> vertices;
  std::vector<double> bounds;
  for (int py = 1; py <= h; ++py) {
    std::copy_n(sq.begin() + static_cast<std::ptrdiff_t>(py) * pw, pw, line.begin());
    squared_distance_1d(line, result, vertices, bounds);
    for (int x = 0; x < w; ++x) {
      if (mask(x, py - 1)) out(x, py - 1) = std::sqrt(result[x + 1]);
    }
  }
  return out;
}

PixelCoord interior_center(const Region& region, const BinaryMask& within) {
  if (region.pixels.empty()) throw std::invalid_argument("interior_center of empty region");
  for (const auto& p : region.pixels) {
    if (!within.contains(p) || !within[p]) {
      throw std::invalid_argument("region is not contained in the reference mask");
    }
  }
  // Work on the bounding box plus a one-cell false margin; the margin ring is
  // always at least as close as anything beyond it.
  BoundingBox bb{region.pixels.front().x, region.pixels.front().y, region.pixels.front().x,
                 region.pixels.front().y};
  for (const auto& p : region.pixels) {
    bb.x_min = std::min(bb.x_min, p.x);
    bb.x_max = std::max(bb.x_max, p.x);
    bb.y_min = std::min(bb.y_min, p.y);
    bb.y_max = std::max(bb.y_max, p.y);
  }
  const int cw = bb.x_max - bb.x_min + 3;
  const int ch = bb.y_max - bb.y_min + 3;
  BinaryMask crop(cw, ch);
  for (const auto& p : region.pixels) crop(p.x - bb.x_min + 1, p.y - bb.y_min + 1) = 1;
  const DistanceMap dist = distance_transform(crop);

  PixelCoord best = region.pixels.front();
  double best_value = -1.0;
  for (const auto& p : region.pixels) {
    const double d = dist(p.x - bb.x_min + 1, p.y - bb.y_min + 1);
    if (d > best_value || (d == best_value && p < best)) {
      best_value = d;
      best = p;
    }
  }
  return best;
}

}  // namespace ivos
