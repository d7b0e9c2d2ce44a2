// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include <bit>

#include "ivos/kernels.hpp"

namespace ivos::kernels {
namespace {

std::uint64_t horizontal_sum(__m256i v) {
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

OverlapCounts overlap_avx2(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  const std::size_t n = a.size();
  const __m256i zero = _mm256_setzero_si256();
  __m256i inter = zero;
  __m256i uni = zero;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.data() + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b.data() + i));
    // sad against zero sums the 0/1 bytes into four 64-bit lanes
    inter = _mm256_add_epi64(inter, _mm256_sad_epu8(_mm256_and_si256(va, vb), zero));
    uni = _mm256_add_epi64(uni, _mm256_sad_epu8(_mm256_or_si256(va, vb), zero));
  }
  OverlapCounts c{horizontal_sum(inter), horizontal_sum(uni)};
  for (; i < n; ++i) {
    c.intersection += a[i] & b[i];
    c.union_count += a[i] | b[i];
  }
  return c;
}

std::size_t count_nonzero_avx2(std::span<const std::uint8_t> a) {
  const std::size_t n = a.size();
  const __m256i zero = _mm256_setzero_si256();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a.data() + i));
    const auto zeros = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, zero)));
    count += static_cast<std::size_t>(std::popcount(~zeros));
  }
  for (; i < n; ++i) count += a[i] != 0;
  return count;
}

void equal_to_avx2(std::span<const std::uint8_t> labels, std::uint8_t value,
                   std::span<std::uint8_t> out) {
  const std::size_t n = labels.size();
  const __m256i target = _mm256_set1_epi8(static_cast<char>(value));
  const __m256i one = _mm256_set1_epi8(1);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(labels.data() + i));
    const __m256i eq = _mm256_and_si256(_mm256_cmpeq_epi8(v, target), one);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out.data() + i), eq);
  }
  for (; i < n; ++i) out[i] = labels[i] == value ? 1 : 0;
}

void or_into_avx2(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src) {
  const std::size_t n = dst.size();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    auto* d = reinterpret_cast<__m256i*>(dst.data() + i);
    const __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src.data() + i));
    _mm256_storeu_si256(d, _mm256_or_si256(_mm256_loadu_si256(d), s));
  }
  for (; i < n; ++i) dst[i] |= src[i];
}

void blend_avx2(std::span<const float> a, std::span<const float> b, float w,
                std::span<float> out) {
  const std::size_t n = a.size();
  const float rest = 1.0f - w;
  const __m256 vw = _mm256_set1_ps(w);
  const __m256 vr = _mm256_set1_ps(rest);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 x = _mm256_mul_ps(vw, _mm256_loadu_ps(a.data() + i));
    const __m256 y = _mm256_mul_ps(vr, _mm256_loadu_ps(b.data() + i));
    _mm256_storeu_ps(out.data() + i, _mm256_add_ps(x, y));
  }
  for (; i < n; ++i) {
    const float x = w * a[i];
    const float y = rest * b[i];
    out[i] = x + y;
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::avx2,     overlap_avx2, count_nonzero_avx2,
                                 equal_to_avx2, or_into_avx2, blend_avx2};
  return table;
}

}  // namespace ivos::kernels
