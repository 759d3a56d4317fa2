// Compiled with -mavx2 on x86-64 only. std::min(a, b) is mirrored as
// _mm256_min_pd(b, a) (and likewise for max) so signed-zero selection
// matches the scalar reference bit for bit.

#include "rwave/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)
#include <immintrin.h>

namespace rwave::simd {
namespace {

struct Soa {
  __m256d min_x, min_y, max_x, max_y;
};

inline Soa load4(const Entry* e) {
  const __m256d r0 = _mm256_loadu_pd(&e[0].rect.min_x);
  const __m256d r1 = _mm256_loadu_pd(&e[1].rect.min_x);
  const __m256d r2 = _mm256_loadu_pd(&e[2].rect.min_x);
  const __m256d r3 = _mm256_loadu_pd(&e[3].rect.min_x);
  const __m256d t0 = _mm256_unpacklo_pd(r0, r1);  // x0 x1 X0 X1
  const __m256d t1 = _mm256_unpackhi_pd(r0, r1);  // y0 y1 Y0 Y1
  const __m256d t2 = _mm256_unpacklo_pd(r2, r3);
  const __m256d t3 = _mm256_unpackhi_pd(r2, r3);
  return {_mm256_permute2f128_pd(t0, t2, 0x20), _mm256_permute2f128_pd(t1, t3, 0x20),
          _mm256_permute2f128_pd(t0, t2, 0x31), _mm256_permute2f128_pd(t1, t3, 0x31)};
}

// std::min(a, b) / std::max(a, b)
inline __m256d vmin(__m256d a, __m256d b) { return _mm256_min_pd(b, a); }
inline __m256d vmax(__m256d a, __m256d b) { return _mm256_max_pd(b, a); }

void enlargements_avx2(const Entry* e, std::size_t n, const Rect& r, double* enlargement,
                       double* area_out) {
  const __m256d qx0 = _mm256_set1_pd(r.min_x);
  const __m256d qy0 = _mm256_set1_pd(r.min_y);
  const __m256d qx1 = _mm256_set1_pd(r.max_x);
  const __m256d qy1 = _mm256_set1_pd(r.max_y);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const Soa a = load4(e + i);
    const __m256d own = _mm256_mul_pd(_mm256_sub_pd(a.max_x, a.min_x),
                                      _mm256_sub_pd(a.max_y, a.min_y));
    const __m256d ux0 = vmin(a.min_x, qx0);
    const __m256d uy0 = vmin(a.min_y, qy0);
    const __m256d ux1 = vmax(a.max_x, qx1);
    const __m256d uy1 = vmax(a.max_y, qy1);
    const __m256d grown = _mm256_mul_pd(_mm256_sub_pd(ux1, ux0), _mm256_sub_pd(uy1, uy0));
    _mm256_storeu_pd(enlargement + i, _mm256_sub_pd(grown, own));
    _mm256_storeu_pd(area_out + i, own);
  }
  if (i < n) scalar_kernels().enlargements(e + i, n - i, r, enlargement + i, area_out + i);
}

inline __m256d overlap4(const Soa& a, __m256d qx0, __m256d qy0, __m256d qx1, __m256d qy1) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d w = vmax(_mm256_sub_pd(vmin(a.max_x, qx1), vmax(a.min_x, qx0)), zero);
  const __m256d h = vmax(_mm256_sub_pd(vmin(a.max_y, qy1), vmax(a.min_y, qy0)), zero);
  return _mm256_mul_pd(w, h);
}

double overlap_sum_avx2(const Entry* e, std::size_t n, const Rect& q) {
  const __m256d qx0 = _mm256_set1_pd(q.min_x);
  const __m256d qy0 = _mm256_set1_pd(q.min_y);
  const __m256d qx1 = _mm256_set1_pd(q.max_x);
  const __m256d qy1 = _mm256_set1_pd(q.max_y);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, overlap4(load4(e + i), qx0, qy0, qx1, qy1));
  }
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d s = _mm_add_pd(lo, hi);  // (l0 + l2), (l1 + l3)
  double total = _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
  if (i < n) {
    // Tail terms are added one at a time, as in the reference.
    for (; i < n; ++i) total += scalar_kernels().overlap_sum(e + i, 1, q);
  }
  return total;
}

std::size_t select_intersecting_avx2(const Entry* e, std::size_t n, const Rect& q,
                                     std::uint32_t* out) {
  const __m256d qx0 = _mm256_set1_pd(q.min_x);
  const __m256d qy0 = _mm256_set1_pd(q.min_y);
  const __m256d qx1 = _mm256_set1_pd(q.max_x);
  const __m256d qy1 = _mm256_set1_pd(q.max_y);
  std::size_t k = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const Soa a = load4(e + i);
    const __m256d m = _mm256_and_pd(
        _mm256_and_pd(_mm256_cmp_pd(a.min_x, qx1, _CMP_LE_OQ),
                      _mm256_cmp_pd(a.max_x, qx0, _CMP_GE_OQ)),
        _mm256_and_pd(_mm256_cmp_pd(a.min_y, qy1, _CMP_LE_OQ),
                      _mm256_cmp_pd(a.max_y, qy0, _CMP_GE_OQ)));
    int bits = _mm256_movemask_pd(m);
    while (bits != 0) {
      const int lane = __builtin_ctz(static_cast<unsigned>(bits));
      out[k++] = static_cast<std::uint32_t>(i + static_cast<std::size_t>(lane));
      bits &= bits - 1;
    }
  }
  for (; i < n; ++i) {
    if (q.intersects(e[i].rect)) out[k++] = static_cast<std::uint32_t>(i);
  }
  return k;
}

void min_dist2_avx2(const Entry* e, std::size_t n, Point p, double* out) {
  const __m256d px = _mm256_set1_pd(p.x);
  const __m256d py = _mm256_set1_pd(p.y);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const Soa a = load4(e + i);
    const __m256d dx =
        vmax(vmax(_mm256_sub_pd(a.min_x, px), _mm256_sub_pd(px, a.max_x)), zero);
    const __m256d dy =
        vmax(vmax(_mm256_sub_pd(a.min_y, py), _mm256_sub_pd(py, a.max_y)), zero);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
  }
  if (i < n) scalar_kernels().min_dist2(e + i, n - i, p, out + i);
}

constexpr KernelTable kAvx2{Backend::Avx2, enlargements_avx2, overlap_sum_avx2,
                            select_intersecting_avx2, min_dist2_avx2};

}  // namespace

namespace detail {
const KernelTable* avx2_table_if_compiled() noexcept { return &kAvx2; }
}  // namespace detail

}  // namespace rwave::simd

#else

namespace rwave::simd::detail {
const KernelTable* avx2_table_if_compiled() noexcept { return nullptr; }
}  // namespace rwave::simd::detail

#endif
