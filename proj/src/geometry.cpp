#include "rwave/geometry.hpp"

#include <string>

#include "rwave/error.hpp"

namespace rwave {

HilbertOrder::HilbertOrder(int order) : order_(order) {
  if (order < 1 || order > 31) {
    throw DomainError("hilbert order must be in [1, 31], got " + std::to_string(order));
  }
}

namespace {

// Curve state: whether the remaining bits are swapped and/or complemented
// relative to the canonical orientation. Four levels are consumed per
// table lookup.
struct Step {
  std::uint8_t digits;
  std::uint8_t state;
};

struct HilbertTable {
  Step step[4][16][16];

  HilbertTable() {
    for (unsigned st = 0; st < 4; ++st) {
      for (unsigned xn = 0; xn < 16; ++xn) {
        for (unsigned yn = 0; yn < 16; ++yn) {
          unsigned s = st;
          unsigned d = 0;
          for (int b = 3; b >= 0; --b) {
            const unsigned step_state = s;
            s = advance(step_state, (xn >> b) & 1u, (yn >> b) & 1u, d);
          }
          step[st][xn][yn] = {static_cast<std::uint8_t>(d), static_cast<std::uint8_t>(s)};
        }
      }
    }
  }

  // One level: appends a base-4 digit to d and returns the next state.
  static unsigned advance(unsigned s, unsigned bx, unsigned by, unsigned& d) {
    const bool swap = s & 1u;
    const bool comp = s & 2u;
    unsigned rx = swap ? by : bx;
    unsigned ry = swap ? bx : by;
    if (comp) {
      rx ^= 1u;
      ry ^= 1u;
    }
    d = (d << 2) | ((3u * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) s ^= 2u;
      s ^= 1u;
    }
    return s;
  }
};

const HilbertTable kTable;

}  // namespace

std::uint64_t hilbert_index(std::uint32_t cx, std::uint32_t cy, HilbertOrder order) noexcept {
  int level = order.value();
  unsigned s = 0;
  std::uint64_t d = 0;
  while (level % 4 != 0) {
    --level;
    unsigned digit = 0;
    s = HilbertTable::advance(s, (cx >> level) & 1u, (cy >> level) & 1u, digit);
    d = (d << 2) | digit;
  }
  while (level > 0) {
    level -= 4;
    const Step& st = kTable.step[s][(cx >> level) & 15u][(cy >> level) & 15u];
    d = (d << 8) | st.digits;
    s = st.state;
  }
  return d;
}

namespace {

std::uint32_t quantize(double v, std::uint32_t cells) noexcept {
  const double scaled = std::floor(v * static_cast<double>(cells));
  if (scaled <= 0.0) return 0;
  if (scaled >= static_cast<double>(cells - 1)) return cells - 1;
  return static_cast<std::uint32_t>(scaled);
}

}  // namespace

std::uint64_t hilbert_index(Point p, HilbertOrder order) noexcept {
  const std::uint32_t cells = order.cells_per_axis();
  return hilbert_index(quantize(p.x, cells), quantize(p.y, cells), order);
}

}  // namespace rwave
