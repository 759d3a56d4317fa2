#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "rwave/geometry.hpp"

namespace rwave {

using PageId = std::uint64_t;
inline constexpr PageId kNoPage = std::numeric_limits<PageId>::max();

/// Provenance of a node, used to attribute splits.
enum class Lineage : std::uint8_t { BulkLoaded = 0, LargeChild = 1, SmallChild = 2 };

std::string_view to_string(Lineage l) noexcept;

/// One slot of a node. In a leaf `id` is the data point id and `rect` is the
/// degenerate point rectangle; in an index node `id` is the child page id.
/// `hilbert` caches the point's Hilbert value (leaf) or the child's largest
/// Hilbert value (Hilbert-variant index entries).
struct Entry {
  Rect rect;
  std::uint64_t id = 0;
  std::uint64_t hilbert = 0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

static_assert(sizeof(Entry) == 48);

struct Node {
  PageId page_id = kNoPage;
  int level = 0;  // 0 = leaf
  std::vector<Entry> entries;
  std::uint32_t creation_seq = 0;
  Lineage lineage = Lineage::BulkLoaded;
  std::uint64_t lhv = 0;
  // Overflow page (Regular Elective Split only). Kept with the leaf in
  // memory and written to its own page in the store.
  PageId overflow_page = kNoPage;
  std::vector<Entry> overflow;

  bool is_leaf() const noexcept { return level == 0; }
  bool has_overflow() const noexcept { return overflow_page != kNoPage; }
  std::size_t live_count() const noexcept { return entries.size() + overflow.size(); }

  // MBR over entries and overflow entries. Empty node -> all-zero rect.
  Rect mbr() const noexcept;
  // Largest cached Hilbert value over entries and overflow entries.
  std::uint64_t max_hilbert() const noexcept;
};

Rect mbr_of(std::span<const Entry> entries) noexcept;

/// Entries per page and the minimum occupancy enforced by the base splits.
struct Capacity {
  static constexpr std::size_t kHeaderBytes = 24;
  static constexpr std::size_t kEntryBytes = 40;

  std::size_t page_size_bytes = 0;
  std::size_t max_entries = 0;  // B
  std::size_t min_fill = 0;

  // B = (page_size - 24) / 40; throws ConfigError if B < 4 or min_fill is
  // outside [1, B/2].
  static Capacity from_page_size(std::size_t page_size_bytes, std::size_t min_fill);
  static std::size_t entries_for_page(std::size_t page_size_bytes) noexcept {
    return page_size_bytes < kHeaderBytes ? 0 : (page_size_bytes - kHeaderBytes) / kEntryBytes;
  }
};

/// One node split as seen by the diagnostics: the two resulting nodes ordered
/// by MBR area.
struct SplitEvent {
  std::uint64_t batch_id = 0;
  int level = 0;
  PageId parent_page = kNoPage;
  Rect small_child_rect;
  Rect large_child_rect;
  std::size_t small_count = 0;
  std::size_t large_count = 0;
  Lineage victim_lineage = Lineage::BulkLoaded;
  bool elective = false;
};

}  // namespace rwave
