#include "ivos/backends.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "ivos/kernels.hpp"

namespace ivos {
namespace {

// Pixels reachable from seed through cells where inside(x, y) holds.
template <typename Inside>
std::vector<PixelCoord> flood(int width, int height, PixelCoord seed, Connectivity conn,
                              Inside inside) {
  std::vector<PixelCoord> out;
  if (!inside(seed.x, seed.y)) return out;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(width) * height, 0);
  std::vector<PixelCoord> stack{seed};
  seen[static_cast<std::size_t>(seed.y) * width + seed.x] = 1;
  while (!stack.empty()) {
    const PixelCoord p = stack.back();
    stack.pop_back();
    out.push_back(p);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        if (conn == Connectivity::four && dx != 0 && dy != 0) continue;
        const int x = p.x + dx;
        const int y = p.y + dy;
        if (x < 0 || y < 0 || x >= width || y >= height) continue;
        const std::size_t i = static_cast<std::size_t>(y) * width + x;
        if (seen[i] || !inside(x, y)) continue;
        seen[i] = 1;
        stack.push_back({x, y});
      }
    }
  }
  return out;
}

void require_in_bounds(const Click& c, int width, int height, const char* who) {
  if (c.position.x < 0 || c.position.y < 0 || c.position.x >= width || c.position.y >= height) {
    throw std::invalid_argument(std::string(who) + ": click outside the frame");
  }
}

// Sets object_id to 1 on the pixels and every other channel to 0.
void claim(ProbMask& probs, int object_id, std::span<const PixelCoord> pixels) {
  std::vector<int> others;
  for (const auto& [id, grid] : probs.channels()) {
    if (id != object_id) others.push_back(id);
  }
  for (int id : others) {
    ProbGrid& grid = probs.channel(id);
    for (const auto& p : pixels) grid[p] = 0.0f;
  }
  ProbGrid& target = probs.channel(object_id);
  for (const auto& p : pixels) target[p] = 1.0f;
}

void release(ProbMask& probs, int object_id, std::span<const PixelCoord> pixels) {
  ProbGrid& target = probs.channel(object_id);
  for (const auto& p : pixels) target[p] = 0.0f;
}

void relabel(LabelMask& labels, const ProbMask& probs, std::span<const PixelCoord> pixels) {
  for (const auto& p : pixels) labels[p] = static_cast<std::uint8_t>(aggregate_at(probs, p));
}

std::size_t closest_entry(int target_index, std::span<const MemoryEntry> memory) {
  if (memory.empty()) throw std::invalid_argument("propagation: empty memory");
  for (const auto& m : memory) {
    if (!m.mask) throw std::invalid_argument("propagation: memory entry without a mask");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < memory.size(); ++i) {
    const int d = std::abs(memory[i].frame_index - target_index);
    const int bd = std::abs(memory[best].frame_index - target_index);
    if (d < bd || (d == bd && memory[i].frame_index < memory[best].frame_index)) best = i;
  }
  return best;
}

}  // namespace

ProbMask oracle_interaction(const LabelMask& gt, const ProbMask& previous,
                            std::span<const Click> clicks) {
  if (previous.width() != gt.width() || previous.height() != gt.height()) {
    throw std::invalid_argument("oracle_interaction: mask dimensions differ");
  }
  ProbMask out = previous;
  LabelMask labels = aggregate_objects(out);
  for (const auto& c : clicks) {
    require_in_bounds(c, gt.width(), gt.height(), "oracle_interaction");
    const int o = c.object_id;
    std::vector<PixelCoord> component;
    if (c.polarity == Polarity::positive) {
      component = flood(gt.width(), gt.height(), c.position, Connectivity::eight,
                        [&](int x, int y) { return gt(x, y) == o && labels(x, y) != o; });
      if (!component.empty()) claim(out, o, component);
    } else {
      component = flood(gt.width(), gt.height(), c.position, Connectivity::eight,
                        [&](int x, int y) { return labels(x, y) == o && gt(x, y) != o; });
      if (!component.empty()) release(out, o, component);
    }
    if (component.empty()) {
      spdlog::debug("oracle_interaction: click ({}, {}) for object {} is not on an error region",
                    c.position.x, c.position.y, o);
      continue;
    }
    relabel(labels, out, component);
  }
  return out;
}

ProbMask region_grow_interaction(const Image& frame, const ProbMask& previous,
                                 std::span<const Click> clicks, int color_tolerance) {
  if (previous.width() != frame.width || previous.height() != frame.height) {
    throw std::invalid_argument("region_grow_interaction: frame and mask dimensions differ");
  }
  if (color_tolerance < 0) throw std::invalid_argument("region_grow_interaction: negative tolerance");
  ProbMask out = previous;
  LabelMask labels = aggregate_objects(out);
  for (const auto& c : clicks) {
    require_in_bounds(c, frame.width, frame.height, "region_grow_interaction");
    std::vector<PixelCoord> component;
    if (c.polarity == Polarity::positive) {
      const std::uint8_t* seed = frame.pixel(c.position.x, c.position.y);
      component = flood(frame.width, frame.height, c.position, Connectivity::four, [&](int x, int y) {
        const std::uint8_t* px = frame.pixel(x, y);
        for (int k = 0; k < 3; ++k) {
          if (std::abs(int{px[k]} - int{seed[k]}) > color_tolerance) return false;
        }
        return true;
      });
      claim(out, c.object_id, component);
    } else {
      component = flood(frame.width, frame.height, c.position, Connectivity::eight,
                        [&](int x, int y) { return labels(x, y) == c.object_id; });
      if (component.empty()) continue;
      release(out, c.object_id, component);
    }
    relabel(labels, out, component);
  }
  return out;
}

ProbMask copy_nearest_propagator(int target_index, std::span<const MemoryEntry> memory) {
  return *memory[closest_entry(target_index, memory)].mask;
}

ProbMask decay_oracle_propagator(int target_index, std::span<const MemoryEntry> memory,
                                 const LabelMask& gt, std::span<const int> objects, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("decay_oracle_propagator: lambda must be >= 0");
  const int distance = std::abs(memory[closest_entry(target_index, memory)].frame_index - target_index);
  const int k = static_cast<int>(std::floor(lambda * distance));
  ProbMask out(gt.width(), gt.height());
  for (int id : objects) {
    const BinaryMask kept = erode(binary_of(gt, id), k);
    auto dst = out.channel(id).values();
    const auto src = kept.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 1.0f : 0.0f;
  }
  return out;
}

ProbMask distance_weighted_fusion(const ProbMask& fresh, const ProbMask& previous, int d_near,
                                  int d_far) {
  if (fresh.width() != previous.width() || fresh.height() != previous.height()) {
    throw std::invalid_argument("distance_weighted_fusion: mask dimensions differ");
  }
  if (d_near < 0 || d_far < 0 || d_near + d_far == 0) {
    throw std::invalid_argument("distance_weighted_fusion: need d_near, d_far >= 0 with a positive sum");
  }
  const float w = static_cast<float>(d_far) / static_cast<float>(d_near + d_far);
  const ProbGrid zeros(fresh.width(), fresh.height());
  ProbMask out(fresh.width(), fresh.height());
  std::vector<int> ids;
  for (const auto& [id, grid] : fresh.channels()) ids.push_back(id);
  for (const auto& [id, grid] : previous.channels()) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (int id : ids) {
    const ProbGrid* a = fresh.find(id);
    const ProbGrid* b = previous.find(id);
    const auto av = (a ? *a : zeros).values();
    const auto bv = (b ? *b : zeros).values();
    auto dst = out.channel(id).values();
    kernels::blend(av, bv, w, dst);
    // Rounding can step one ulp outside the inputs; keep the blend convex.
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = std::clamp(dst[i], std::min(av[i], bv[i]), std::max(av[i], bv[i]));
    }
  }
  return out;
}

namespace {

class OracleInteraction final : public InteractionBackend {
 public:
  explicit OracleInteraction(const OracleContext& ctx) : ctx_(ctx) {}
  ProbMask interact(int frame_index, const Image*, const ProbMask& previous,
                    std::span<const Click> clicks, const InteractionMaps&) override {
    return oracle_interaction(ctx_.frames[frame_index], previous, clicks);
  }

 private:
  const OracleContext& ctx_;
};

class RegionGrowInteraction final : public InteractionBackend {
 public:
  explicit RegionGrowInteraction(int tolerance) : tolerance_(tolerance) {}
  ProbMask interact(int, const Image* pixels, const ProbMask& previous,
                    std::span<const Click> clicks, const InteractionMaps&) override {
    if (!pixels) throw std::runtime_error("region-grow interaction needs frame pixels");
    return region_grow_interaction(*pixels, previous, clicks, tolerance_);
  }

 private:
  int tolerance_;
};

class CopyPropagation final : public PropagationBackend {
 public:
  ProbMask propagate(int target_index, const Image*, std::span<const MemoryEntry> memory) override {
    return copy_nearest_propagator(target_index, memory);
  }
};

class DecayPropagation final : public PropagationBackend {
 public:
  DecayPropagation(const OracleContext& ctx, double lambda) : ctx_(ctx), lambda_(lambda) {}
  ProbMask propagate(int target_index, const Image*, std::span<const MemoryEntry> memory) override {
    return decay_oracle_propagator(target_index, memory, ctx_.frames[target_index], ctx_.objects,
                                   lambda_);
  }

 private:
  const OracleContext& ctx_;
  double lambda_;
};

class DistanceWeightedFusion final : public FusionBackend {
 public:
  ProbMask fuse(const ProbMask& fresh, const ProbMask& previous, int d_near, int d_far) override {
    return distance_weighted_fusion(fresh, previous, d_near, d_far);
  }
};

}  // namespace

void validate_backend_names(const BackendOptions& options) {
  if (options.interaction != "oracle" && options.interaction != "region-grow") {
    throw std::invalid_argument("unknown interaction backend '" + options.interaction + "'");
  }
  if (options.propagator != "copy" && options.propagator != "decay-oracle") {
    throw std::invalid_argument("unknown propagator '" + options.propagator + "'");
  }
  if (options.fusion != "distance-weighted" && options.fusion != "none") {
    throw std::invalid_argument("unknown fusion backend '" + options.fusion + "'");
  }
}

Backends make_backends(const BackendOptions& options, const OracleContext& context) {
  validate_backend_names(options);
  Backends b;
  if (options.interaction == "oracle") {
    b.interaction = std::make_unique<OracleInteraction>(context);
  } else {
    b.interaction = std::make_unique<RegionGrowInteraction>(options.color_tolerance);
  }
  if (options.propagator == "copy") {
    b.propagation = std::make_unique<CopyPropagation>();
  } else {
    b.propagation = std::make_unique<DecayPropagation>(context, options.decay_lambda);
  }
  if (options.fusion == "distance-weighted") b.fusion = std::make_unique<DistanceWeightedFusion>();
  return b;
}

}  // namespace ivos
