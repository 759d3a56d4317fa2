#include <algorithm>

#include "rwave/kernels.hpp"

namespace rwave::simd {
namespace {

void enlargements_scalar(const Entry* e, std::size_t n, const Rect& r, double* enlargement,
                         double* area_out) {
  for (std::size_t i = 0; i < n; ++i) {
    const Rect& a = e[i].rect;
    const double ux0 = std::min(a.min_x, r.min_x);
    const double uy0 = std::min(a.min_y, r.min_y);
    const double ux1 = std::max(a.max_x, r.max_x);
    const double uy1 = std::max(a.max_y, r.max_y);
    const double own = (a.max_x - a.min_x) * (a.max_y - a.min_y);
    const double grown = (ux1 - ux0) * (uy1 - uy0);
    enlargement[i] = grown - own;
    area_out[i] = own;
  }
}

inline double overlap_term(const Rect& a, const Rect& q) {
  const double w = std::max(std::min(a.max_x, q.max_x) - std::max(a.min_x, q.min_x), 0.0);
  const double h = std::max(std::min(a.max_y, q.max_y) - std::max(a.min_y, q.min_y), 0.0);
  return w * h;
}

double overlap_sum_scalar(const Entry* e, std::size_t n, const Rect& q) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) lane[l] += overlap_term(e[i + l].rect, q);
  }
  double total = (lane[0] + lane[2]) + (lane[1] + lane[3]);
  for (; i < n; ++i) total += overlap_term(e[i].rect, q);
  return total;
}

std::size_t select_intersecting_scalar(const Entry* e, std::size_t n, const Rect& q,
                                       std::uint32_t* out) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (q.intersects(e[i].rect)) out[k++] = static_cast<std::uint32_t>(i);
  }
  return k;
}

void min_dist2_scalar(const Entry* e, std::size_t n, Point p, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const Rect& a = e[i].rect;
    const double dx = std::max(std::max(a.min_x - p.x, p.x - a.max_x), 0.0);
    const double dy = std::max(std::max(a.min_y - p.y, p.y - a.max_y), 0.0);
    out[i] = dx * dx + dy * dy;
  }
}

constexpr KernelTable kScalar{Backend::Scalar, enlargements_scalar, overlap_sum_scalar,
                              select_intersecting_scalar, min_dist2_scalar};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace rwave::simd
