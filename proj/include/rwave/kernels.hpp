#pragma once

// Data-parallel scans over a node's entries. Each kernel has a scalar
// reference and (on x86-64) an AVX2 variant selected at runtime. Both
// variants perform the same floating-point operations in the same order, so
// results are bitwise identical and tree shapes never depend on the CPU.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "rwave/geometry.hpp"
#include "rwave/node.hpp"

namespace rwave::simd {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend b) noexcept;

struct KernelTable {
  Backend backend;

  // enlargement[i] = area(unite(e[i].rect, r)) - area(e[i].rect); area[i] = area(e[i].rect).
  void (*enlargements)(const Entry* e, std::size_t n, const Rect& r, double* enlargement,
                       double* area);

  // Sum of intersection_area(e[i].rect, q). Summation order contract: terms
  // of full 4-blocks accumulate into lane (i mod 4); lanes combine as
  // (l0 + l2) + (l1 + l3); the remaining tail terms are then added in order.
  double (*overlap_sum)(const Entry* e, std::size_t n, const Rect& q);

  // Writes the indices of entries whose rect intersects q (closed bounds) in
  // increasing order; returns how many were written.
  std::size_t (*select_intersecting)(const Entry* e, std::size_t n, const Rect& q,
                                     std::uint32_t* out);

  // out[i] = min_dist2(e[i].rect, p).
  void (*min_dist2)(const Entry* e, std::size_t n, Point p, double* out);
};

const KernelTable& scalar_kernels() noexcept;

// nullptr when the build lacks AVX2 support or the CPU does not report it.
const KernelTable* avx2_kernels() noexcept;

// Currently selected table. Defaults to the best available backend unless
// the RWAVE_SIMD environment variable is set to "scalar".
const KernelTable& kernels() noexcept;

// Returns false (and leaves the selection unchanged) if `b` is unavailable.
bool set_backend(Backend b) noexcept;

Backend active_backend() noexcept;

inline void enlargements(std::span<const Entry> e, const Rect& r, double* enlargement,
                         double* area) {
  kernels().enlargements(e.data(), e.size(), r, enlargement, area);
}

inline double overlap_sum(std::span<const Entry> e, const Rect& q) {
  return kernels().overlap_sum(e.data(), e.size(), q);
}

inline std::size_t select_intersecting(std::span<const Entry> e, const Rect& q,
                                       std::uint32_t* out) {
  return kernels().select_intersecting(e.data(), e.size(), q, out);
}

inline void min_dist2(std::span<const Entry> e, Point p, double* out) {
  kernels().min_dist2(e.data(), e.size(), p, out);
}

namespace detail {
const KernelTable* avx2_table_if_compiled() noexcept;
}  // namespace detail

}  // namespace rwave::simd
