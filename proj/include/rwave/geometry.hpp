#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace rwave {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned rectangle. Degenerate (zero-width or zero-height) rectangles
/// are valid; a point is stored as the rectangle [x,x]x[y,y].
struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  static constexpr Rect of(Point p) noexcept { return {p.x, p.y, p.x, p.y}; }
  static constexpr Rect unit() noexcept { return {0.0, 0.0, 1.0, 1.0}; }

  constexpr bool valid() const noexcept {
    return min_x <= max_x && min_y <= max_y;
  }
  constexpr Point center() const noexcept {
    return {(min_x + max_x) * 0.5, (min_y + max_y) * 0.5};
  }
  constexpr bool contains(Point p) const noexcept {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  constexpr bool contains(const Rect& r) const noexcept {
    return r.min_x >= min_x && r.max_x <= max_x && r.min_y >= min_y &&
           r.max_y <= max_y;
  }
  // Closed boundaries: touching rectangles intersect.
  constexpr bool intersects(const Rect& r) const noexcept {
    return r.min_x <= max_x && r.max_x >= min_x && r.min_y <= max_y &&
           r.max_y >= min_y;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

constexpr double area(const Rect& r) noexcept {
  return (r.max_x - r.min_x) * (r.max_y - r.min_y);
}

constexpr double margin(const Rect& r) noexcept {
  return 2.0 * ((r.max_x - r.min_x) + (r.max_y - r.min_y));
}

constexpr Rect unite(const Rect& a, const Rect& b) noexcept {
  return {std::min(a.min_x, b.min_x), std::min(a.min_y, b.min_y),
          std::max(a.max_x, b.max_x), std::max(a.max_y, b.max_y)};
}

constexpr double intersection_area(const Rect& a, const Rect& b) noexcept {
  const double w = std::max(0.0, std::min(a.max_x, b.max_x) - std::max(a.min_x, b.min_x));
  const double h = std::max(0.0, std::min(a.max_y, b.max_y) - std::max(a.min_y, b.min_y));
  return w * h;
}

/// Squared Euclidean distance from p to the nearest point of r (0 inside).
constexpr double min_dist2(const Rect& r, Point p) noexcept {
  const double dx = std::max(std::max(r.min_x - p.x, p.x - r.max_x), 0.0);
  const double dy = std::max(std::max(r.min_y - p.y, p.y - r.max_y), 0.0);
  return dx * dx + dy * dy;
}

constexpr double dist2(Point a, Point b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline bool in_unit_square(Point p) noexcept {
  return std::isfinite(p.x) && std::isfinite(p.y) && p.x >= 0.0 && p.x <= 1.0 &&
         p.y >= 0.0 && p.y <= 1.0;
}

/// Grid resolution of the Hilbert curve: 2^order cells per axis.
class HilbertOrder {
 public:
  static constexpr int kDefault = 16;

  // Throws DomainError unless 1 <= order <= 31.
  explicit HilbertOrder(int order = kDefault);

  int value() const noexcept { return order_; }
  std::uint32_t cells_per_axis() const noexcept { return std::uint32_t{1} << order_; }

 private:
  int order_;
};

/// Distance of grid cell (cx, cy) along the Hilbert curve of the given order.
/// Index 0 is the lower-left cell; the order-1 curve visits (0,0), (0,1),
/// (1,1), (1,0).
std::uint64_t hilbert_index(std::uint32_t cx, std::uint32_t cy, HilbertOrder order) noexcept;

/// Quantizes p (in the unit square) to the grid by flooring, clamping 1.0
/// into the last cell, then returns the cell's Hilbert index.
std::uint64_t hilbert_index(Point p, HilbertOrder order) noexcept;

}  // namespace rwave
