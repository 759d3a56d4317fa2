#include <atomic>
#include <cstdlib>
#include <string_view>

#include "rwave/kernels.hpp"

namespace rwave::simd {

std::string_view to_string(Backend b) noexcept {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

const KernelTable* avx2_kernels() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? detail::avx2_table_if_compiled() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("RWAVE_SIMD"); env != nullptr) {
    if (std::string_view(env) == "scalar") return &scalar_kernels();
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& kernels() noexcept { return *active().load(std::memory_order_relaxed); }

bool set_backend(Backend b) noexcept {
  const KernelTable* t = b == Backend::Scalar ? &scalar_kernels() : avx2_kernels();
  if (t == nullptr) return false;
  active().store(t, std::memory_order_relaxed);
  return true;
}

Backend active_backend() noexcept { return kernels().backend; }

}  // namespace rwave::simd
