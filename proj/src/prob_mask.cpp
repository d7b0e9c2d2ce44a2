#include "ivos/prob_mask.hpp"

#include <stdexcept>
#include <string>

namespace ivos {

ProbMask::ProbMask(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw std::invalid_argument("ProbMask: dimensions must be positive");
}

ProbGrid& ProbMask::channel(int object_id) {
  if (object_id < 1 || object_id > kMaxObjectId) {
    throw std::invalid_argument("ProbMask: object id out of range: " + std::to_string(object_id));
  }
  auto it = channels_.find(object_id);
  if (it == channels_.end()) it = channels_.emplace(object_id, ProbGrid(width_, height_)).first;
  return it->second;
}

const ProbGrid* ProbMask::find(int object_id) const {
  const auto it = channels_.find(object_id);
  return it == channels_.end() ? nullptr : &it->second;
}

float ProbMask::at(int object_id, int x, int y) const {
  const ProbGrid* g = find(object_id);
  return g ? (*g)(x, y) : 0.0f;
}

void ProbMask::validate() const {
  for (const auto& [id, grid] : channels_) {
    if (grid.width() != width_ || grid.height() != height_) {
      throw std::invalid_argument("ProbMask: channel " + std::to_string(id) + " has wrong shape");
    }
    for (float v : grid.values()) {
      if (!(v >= 0.0f && v <= 1.0f)) {
        throw std::invalid_argument("ProbMask: probability outside [0, 1] in channel " +
                                    std::to_string(id));
      }
    }
  }
}

ProbMask ProbMask::one_hot(const LabelMask& labels, std::span<const int> objects) {
  ProbMask out(labels.width(), labels.height());
  for (int id : objects) {
    auto& grid = out.channel(id);
    const auto src = labels.values();
    auto dst = grid.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] == id ? 1.0f : 0.0f;
  }
  return out;
}

int aggregate_at(const ProbMask& probs, PixelCoord p) {
  double background = 1.0;
  for (const auto& [id, grid] : probs.channels()) background *= 1.0 - static_cast<double>(grid[p]);
  double best = background;
  int best_id = 0;
  for (const auto& [id, grid] : probs.channels()) {  // ascending id
    const double v = grid[p];
    if (v > best) {
      best = v;
      best_id = id;
    }
  }
  return best_id;
}

LabelMask aggregate_objects(const ProbMask& probs) {
  probs.validate();
  LabelMask out(probs.width(), probs.height());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) out(x, y) = static_cast<std::uint8_t>(aggregate_at(probs, {x, y}));
  }
  return out;
}

}  // namespace ivos
