#pragma once

// Pixel-level mask primitives shared by every other part of the harness.
//
// Conventions used throughout:
//   * grids are row-major, indexed (x, y) with x the column;
//   * anything outside the frame counts as background/false;
//   * ties are broken by (y, x) lexicographic order.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ivos {

struct PixelCoord {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(PixelCoord, PixelCoord) = default;
  // Raster order: row first, then column.
  friend constexpr std::strong_ordering operator<=>(PixelCoord a, PixelCoord b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

template <typename T, typename Tag>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw std::invalid_argument("grid dimensions must be positive, got " +
                                  std::to_string(width) + "x" + std::to_string(height));
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool contains(PixelCoord p) const { return contains(p.x, p.y); }
  bool same_shape(const auto& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](PixelCoord p) { return data_[index(p.x, p.y)]; }
  const T& operator[](PixelCoord p) const { return data_[index(p.x, p.y)]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::span<T> row(int y) { return values().subspan(index(0, y), width_); }
  std::span<const T> row(int y) const { return values().subspan(index(0, y), width_); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

struct LabelTag;
struct BinaryTag;
struct DistanceTag;

// Object-id map; 0 is background. Ids are limited to 1..255 (the DAVIS
// indexed-palette range).
using LabelMask = Grid<std::uint8_t, LabelTag>;
// Each cell holds 0 or 1.
using BinaryMask = Grid<std::uint8_t, BinaryTag>;
using DistanceMap = Grid<double, DistanceTag>;

inline constexpr int kMaxObjectId = 255;

struct BoundingBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// A connected set of pixels. `pixels` is kept in raster order.
struct Region {
  std::vector<PixelCoord> pixels;
  BoundingBox bounding_box;

  std::size_t area() const { return pixels.size(); }

  friend bool operator==(const Region&, const Region&) = default;
};

enum class Connectivity { four = 4, eight = 8 };

BinaryMask binary_of(const LabelMask& mask, int object_id);

std::size_t count(const BinaryMask& mask);

// Maximal connected sets of true pixels, largest first; equal areas are
// ordered by (y_min, x_min) of the bounding box, then by first pixel.
std::vector<Region> connected_components(const BinaryMask& mask,
                                         Connectivity connectivity = Connectivity::eight);

// True pixels with at least one 4-neighbour that is false or off-frame.
BinaryMask boundary(const BinaryMask& mask);

// Exact Euclidean distance from every true pixel to the nearest false pixel
// centre (off-frame cells are false). False pixels map to 0.
DistanceMap distance_transform(const BinaryMask& mask);

// Region pixel with the largest distance to the region's complement.
PixelCoord interior_center(const Region& region, const BinaryMask& within);

// Chebyshev (square structuring element) dilation.
BinaryMask dilate(const BinaryMask& mask, int radius);

// Chebyshev erosion; off-frame cells count as false, so objects touching the
// border shrink there as well.
BinaryMask erode(const BinaryMask& mask, int radius);

// Zhang-Suen thinning of the region, returned as a walk that starts at the
// endpoint with the smallest (y, x). Never empty for a nonempty region.
std::vector<PixelCoord> skeletonize(const Region& region, const BinaryMask& within);

BinaryMask mask_of(const Region& region, int width, int height);

}  // namespace ivos
