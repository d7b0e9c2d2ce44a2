#include <arm_neon.h>

#include "ivos/kernels.hpp"

namespace ivos::kernels {
namespace {

OverlapCounts overlap_neon(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  const std::size_t n = a.size();
  OverlapCounts c;
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const uint8x16_t va = vld1q_u8(a.data() + i);
    const uint8x16_t vb = vld1q_u8(b.data() + i);
    c.intersection += vaddvq_u8(vandq_u8(va, vb));
    c.union_count += vaddvq_u8(vorrq_u8(va, vb));
  }
  for (; i < n; ++i) {
    c.intersection += a[i] & b[i];
    c.union_count += a[i] | b[i];
  }
  return c;
}

std::size_t count_nonzero_neon(std::span<const std::uint8_t> a) {
  const std::size_t n = a.size();
  const uint8x16_t one = vdupq_n_u8(1);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const uint8x16_t nz = vandq_u8(vtstq_u8(vld1q_u8(a.data() + i), vld1q_u8(a.data() + i)), one);
    count += vaddvq_u8(nz);
  }
  for (; i < n; ++i) count += a[i] != 0;
  return count;
}

void equal_to_neon(std::span<const std::uint8_t> labels, std::uint8_t value,
                   std::span<std::uint8_t> out) {
  const std::size_t n = labels.size();
  const uint8x16_t target = vdupq_n_u8(value);
  const uint8x16_t one = vdupq_n_u8(1);
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    vst1q_u8(out.data() + i, vandq_u8(vceqq_u8(vld1q_u8(labels.data() + i), target), one));
  }
  for (; i < n; ++i) out[i] = labels[i] == value ? 1 : 0;
}

void or_into_neon(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src) {
  const std::size_t n = dst.size();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    vst1q_u8(dst.data() + i, vorrq_u8(vld1q_u8(dst.data() + i), vld1q_u8(src.data() + i)));
  }
  for (; i < n; ++i) dst[i] |= src[i];
}

void blend_neon(std::span<const float> a, std::span<const float> b, float w,
                std::span<float> out) {
  const std::size_t n = a.size();
  const float rest = 1.0f - w;
  const float32x4_t vw = vdupq_n_f32(w);
  const float32x4_t vr = vdupq_n_f32(rest);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // separate multiply and add; vmlaq may fuse
    const float32x4_t x = vmulq_f32(vw, vld1q_f32(a.data() + i));
    const float32x4_t y = vmulq_f32(vr, vld1q_f32(b.data() + i));
    vst1q_f32(out.data() + i, vaddq_f32(x, y));
  }
  for (; i < n; ++i) {
    const float x = w * a[i];
    const float y = rest * b[i];
    out[i] = x + y;
  }
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable table{Isa::neon,     overlap_neon, count_nonzero_neon,
                                 equal_to_neon, or_into_neon, blend_neon};
  return table;
}

}  // namespace ivos::kernels
