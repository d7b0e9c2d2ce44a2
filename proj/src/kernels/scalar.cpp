#include "ivos/kernels.hpp"

namespace ivos::kernels {
namespace {

OverlapCounts overlap_scalar(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  OverlapCounts c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    c.intersection += a[i] & b[i];
    c.union_count += a[i] | b[i];
  }
  return c;
}

std::size_t count_nonzero_scalar(std::span<const std::uint8_t> a) {
  std::size_t n = 0;
  for (auto v : a) n += v != 0;
  return n;
}

void equal_to_scalar(std::span<const std::uint8_t> labels, std::uint8_t value,
                     std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] == value ? 1 : 0;
}

void or_into_scalar(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] |= src[i];
}

void blend_scalar(std::span<const float> a, std::span<const float> b, float w,
                  std::span<float> out) {
  const float rest = 1.0f - w;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const float x = w * a[i];
    const float y = rest * b[i];
    out[i] = x + y;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar,       overlap_scalar, count_nonzero_scalar,
                                 equal_to_scalar,   or_into_scalar, blend_scalar};
  return table;
}

}  // namespace ivos::kernels
