#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>

#include "rwave/split.hpp"

namespace rwave {

// Insertion-phase wave mitigation:
//   UnequalFixed (UFS)     every leaf split puts a fixed fraction f in the first group
//   UnequalRandom (URS)    f ~ Uniform[lo, hi], drawn independently per leaf split
//   RegularElective (RES)  one overflow page per leaf plus an elective split of
//                          the next leaf (creation order) every m inserts
enum class RemedyKind { None, UnequalFixed, UnequalRandom, RegularElective };

std::string_view to_string(RemedyKind k) noexcept;
std::optional<RemedyKind> parse_remedy(std::string_view name) noexcept;

struct RemedyConfig {
  RemedyKind kind = RemedyKind::None;
  double fraction = 0.5;   // UFS
  double lo = 0.3;         // URS
  double hi = 0.7;         // URS
  std::size_t period = 600;  // RES m
  std::uint64_t rng_seed = 1;

  // Throws ConfigError on out-of-range fields for the selected kind.
  void validate() const;
};

/// Draws the first-group fraction for one URS split.
double urs_fraction(const RemedyConfig& cfg, std::mt19937_64& rng);

/// Deterministic fraction-f split with the variant's algorithm (first group
/// of ceil(f * n) entries).
SplitOutcome ufs_split(Variant variant, std::span<const Entry> entries, double f);

/// RES bookkeeping owned by the tree.
struct ResState {
  std::uint64_t insert_counter = 0;
  std::size_t cursor = 0;  // next index into the leaves-by-creation list
  std::uint64_t elective_splits = 0;
};

}  // namespace rwave
