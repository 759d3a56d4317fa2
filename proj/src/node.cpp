#include "rwave/node.hpp"

#include <algorithm>
#include <string>

#include "rwave/error.hpp"

namespace rwave {

std::string_view to_string(Lineage l) noexcept {
  switch (l) {
    case Lineage::BulkLoaded: return "bulk";
    case Lineage::LargeChild: return "large";
    case Lineage::SmallChild: return "small";
  }
  return "?";
}

Rect mbr_of(std::span<const Entry> entries) noexcept {
  if (entries.empty()) return {};
  Rect r = entries.front().rect;
  for (const Entry& e : entries.subspan(1)) r = unite(r, e.rect);
  return r;
}

Rect Node::mbr() const noexcept {
  if (entries.empty()) return mbr_of(overflow);
  Rect r = mbr_of(entries);
  if (!overflow.empty()) r = unite(r, mbr_of(overflow));
  return r;
}

std::uint64_t Node::max_hilbert() const noexcept {
  std::uint64_t h = 0;
  for (const Entry& e : entries) h = std::max(h, e.hilbert);
  for (const Entry& e : overflow) h = std::max(h, e.hilbert);
  return h;
}

Capacity Capacity::from_page_size(std::size_t page_size_bytes, std::size_t min_fill) {
  Capacity c;
  c.page_size_bytes = page_size_bytes;
  c.max_entries = entries_for_page(page_size_bytes);
  c.min_fill = min_fill;
  if (c.max_entries < 4) {
    throw ConfigError("page_size", "page of " + std::to_string(page_size_bytes) +
                                       " bytes holds fewer than 4 entries");
  }
  if (min_fill < 1 || min_fill > c.max_entries / 2) {
    throw ConfigError("min_fill", "must be in [1, B/2], got " + std::to_string(min_fill));
  }
  return c;
}

}  // namespace rwave
