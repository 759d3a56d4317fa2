#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rwave/node.hpp"

namespace rwave {

enum class Variant { Linear, Quadratic, RStar, Hilbert };

std::string_view to_string(Variant v) noexcept;
std::optional<Variant> parse_variant(std::string_view name) noexcept;

/// Minimum sizes of the two output groups. The maximum of each group is
/// implied: n minus the other group's minimum.
struct GroupBounds {
  std::size_t min_first = 1;
  std::size_t min_second = 1;

  // Both groups at least `min_fill`.
  static GroupBounds balanced(std::size_t min_fill) noexcept { return {min_fill, min_fill}; }
  // First group exactly ceil(f * n) entries (clamped to [1, n-1]).
  static GroupBounds fraction(std::size_t n, double f) noexcept;
};

/// Result of splitting an overflowing entry list into two groups. `first`
/// stays in the split page; `second` moves to the new page.
struct SplitOutcome {
  std::vector<Entry> first;
  std::vector<Entry> second;

  // True if `first` is the small group: smaller MBR area, ties by fewer entries.
  bool first_is_small() const noexcept;
};

/// Guttman's linear split: seeds by greatest normalized separation, then the
/// remaining entries in input order go to the group needing the least area
/// enlargement (ties: smaller area, then fewer entries). When a group needs
/// every remaining entry to reach its minimum it receives them all.
SplitOutcome linear_split(std::span<const Entry> entries, GroupBounds bounds);

/// Guttman's quadratic split: seeds maximize dead space; PickNext takes the
/// entry with the largest enlargement difference between the groups.
SplitOutcome quadratic_split(std::span<const Entry> entries, GroupBounds bounds);

/// R*-tree split: the axis minimizing the summed margins over all candidate
/// distributions, then the distribution with minimum overlap (ties: minimum
/// total area).
SplitOutcome rstar_split(std::span<const Entry> entries, GroupBounds bounds);

/// Prefix split of entries already in Hilbert order: the first
/// ceil(f * n) entries form the first group. Throws DomainError unless 0 < f < 1.
SplitOutcome hilbert_split(std::span<const Entry> entries, double f);

/// R* forced reinsertion. Removes the max(1, floor(p * n)) entries whose
/// centers lie farthest from the MBR center of `entries` (ties by id) and
/// returns them nearest-first. The remaining entries keep their order.
std::vector<Entry> rstar_reinsert_set(std::vector<Entry>& entries, double p);

/// Splits with the variant's algorithm. Without a fraction the groups are
/// balanced (each at least `min_fill`, Hilbert halves); with a fraction f the
/// first group receives exactly ceil(f * n) entries.
SplitOutcome split_entries(Variant variant, std::span<const Entry> entries, std::size_t min_fill,
                           std::optional<double> fraction = std::nullopt);

}  // namespace rwave
