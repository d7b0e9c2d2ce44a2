#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "ivos/kernels.hpp"

namespace ivos::kernels {
namespace {

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

// IVOS_ISA=scalar|avx2|neon pins the variant when the CPU supports it.
Isa best_isa() {
  const auto isas = available_isas();
  if (const char* forced = std::getenv("IVOS_ISA")) {
    for (Isa isa : isas) {
      if (to_string(isa) == forced) return isa;
    }
  }
  return isas.back();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{&table_for(best_isa())};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::scalar};
#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
  if (cpu_supports(Isa::avx2)) out.push_back(Isa::avx2);
#endif
#if defined(__aarch64__)
  out.push_back(Isa::neon);
#endif
  return out;
}

const KernelTable& table_for(Isa isa) {
  if (!cpu_supports(isa)) {
    throw std::invalid_argument("instruction set not available: " + std::string(to_string(isa)));
  }
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
    case Isa::avx2:
      return avx2_table();
#endif
#if defined(__aarch64__)
    case Isa::neon:
      return neon_table();
#endif
    default:
      return scalar_table();
  }
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

Isa active_isa() { return active().isa; }

void set_isa(Isa isa) { current().store(&table_for(isa), std::memory_order_relaxed); }

}  // namespace ivos::kernels
