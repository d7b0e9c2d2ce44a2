#pragma once

// Data-parallel inner loops over mask and probability buffers.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The active variant
// is chosen once at runtime from the CPU's capabilities and can be pinned with
// set_isa() (tests use this to check each variant against the scalar one).
// All variants produce bit-identical results: mask buffers hold 0/1 bytes and
// the float blend avoids fused multiply-add.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ivos::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

struct OverlapCounts {
  std::size_t intersection = 0;
  std::size_t union_count = 0;

  friend bool operator==(const OverlapCounts&, const OverlapCounts&) = default;
};

// Table of kernel entry points for one instruction set.
struct KernelTable {
  Isa isa;
  // a and b hold 0/1 bytes.
  OverlapCounts (*overlap)(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
  std::size_t (*count_nonzero)(std::span<const std::uint8_t> a);
  // out[i] = labels[i] == value ? 1 : 0
  void (*equal_to)(std::span<const std::uint8_t> labels, std::uint8_t value,
                   std::span<std::uint8_t> out);
  // dst[i] |= src[i]
  void (*or_into)(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src);
  // out[i] = w * a[i] + (1 - w) * b[i]
  void (*blend)(std::span<const float> a, std::span<const float> b, float w,
                std::span<float> out);
};

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
const KernelTable& avx2_table();
#endif
#if defined(__aarch64__)
const KernelTable& neon_table();
#endif

// Instruction sets this binary was built with and the CPU can execute,
// scalar first.
std::vector<Isa> available_isas();

const KernelTable& table_for(Isa isa);

// Currently selected table (best available unless pinned by set_isa).
const KernelTable& active();
Isa active_isa();
void set_isa(Isa isa);

inline OverlapCounts overlap(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  return active().overlap(a, b);
}
inline std::size_t count_nonzero(std::span<const std::uint8_t> a) {
  return active().count_nonzero(a);
}
inline void equal_to(std::span<const std::uint8_t> labels, std::uint8_t value,
                     std::span<std::uint8_t> out) {
  active().equal_to(labels, value, out);
}
inline void or_into(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src) {
  active().or_into(dst, src);
}
inline void blend(std::span<const float> a, std::span<const float> b, float w,
                  std::span<float> out) {
  active().blend(a, b, w, out);
}

}  // namespace ivos::kernels
