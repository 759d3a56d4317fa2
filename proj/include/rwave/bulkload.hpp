#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace rwave {

enum class FillKind { Fixed, Sound, LinearPractical, RandomPractical };
enum class BulkOrder { HilbertSort, Str };

std::string_view to_string(FillKind k) noexcept;
std::string_view to_string(BulkOrder o) noexcept;
std::optional<FillKind> parse_fill(std::string_view name) noexcept;
std::optional<BulkOrder> parse_bulk_order(std::string_view name) noexcept;

/// Leaf fill-factor policy for bulk loading. `utilization` is the fixed
/// fill u or the practical-remedy target t; `range` is the practical-remedy
/// width w. Fractions, not percentages.
struct FillPolicy {
  FillKind kind = FillKind::Fixed;
  double utilization = 0.9;
  double range = 0.0;
  std::uint64_t rng_seed = 1;

  // 0.5 <= u, t <= 1 and 0 <= w <= 2 * min(1 - t, t - 0.5).
  void validate() const;
};

/// Fraction of a node converted to an entry count: nearest integer, clamped to [1, B].
std::size_t fill_count(double fraction, std::size_t max_entries) noexcept;

// ---- Sound remedy ---------------------------------------------------------

/// Smallest fill count in the steady-state support: ceil((B + 1) / 2).
std::size_t sr_support_min(std::size_t max_entries) noexcept;

/// Steady-state fill probabilities P_j for j = sr_support_min(B) .. B,
/// proportional to B / (j (j + 1)) and renormalized to sum to 1.
std::vector<double> sr_probabilities(std::size_t max_entries);

/// Samples a leaf fill count from the steady-state distribution. B >= 3.
std::size_t sr_sample_fill(std::size_t max_entries, std::mt19937_64& rng);

/// Leaf sizes for packing n points: sampled counts until fewer than
/// (3B + 1) / 2 points remain, then one final leaf (at most B left) or two
/// leaves of ceil(rem / 2) and floor(rem / 2).
std::vector<std::size_t> sr_pack(std::size_t n, std::size_t max_entries, std::mt19937_64& rng);

// ---- Practical remedies ---------------------------------------------------

/// Deterministic alternating fill sequence: t + w/2, t - w/2, t + w/2 - 1%,
/// t - w/2 + 1%, ... walking inward in one-percentage-point steps and
/// restarting from the extremes when the walk meets the middle. w = 0 yields
/// the constant t.
class LinearFillSequence {
 public:
  LinearFillSequence(double target, double range, std::size_t max_entries);

  double next_fraction();
  std::size_t next() { return fill_count(next_fraction(), max_entries_); }
  // Number of values before the sequence repeats.
  std::size_t period() const noexcept { return pairs_ == 0 ? 1 : 2 * pairs_; }

 private:
  double hi_;
  double lo_;
  double target_;
  std::size_t max_entries_;
  std::size_t pairs_;
  std::size_t step_ = 0;
};

std::vector<std::size_t> lpr_fill_sequence(double target, double range, std::size_t max_entries,
                                           std::size_t count);

/// Uniform fill fraction in [t - w/2, t + w/2] converted to a count.
std::size_t rpr_sample_fill(double target, double range, std::size_t max_entries,
                            std::mt19937_64& rng);

/// Stream of leaf sizes under a policy, seeded from `policy.rng_seed`.
/// Successive plans continue the same random stream or LPR walk, so STR
/// slices packed one after another see one sequence.
class FillStream {
 public:
  FillStream(const FillPolicy& policy, std::size_t max_entries, std::size_t min_fill);

  // Leaf sizes for the next n points. A trailing leaf below min_fill is
  // merged into its predecessor, or the two are split evenly if the merge
  // would overflow. Sound-remedy plans follow sr_pack exactly.
  std::vector<std::size_t> plan(std::size_t n);

 private:
  std::size_t next_count();

  FillPolicy policy_;
  std::size_t max_entries_;
  std::size_t min_fill_;
  std::mt19937_64 rng_;
  LinearFillSequence linear_;
  std::vector<double> cdf_;
};

std::vector<std::size_t> plan_leaf_sizes(std::size_t n, std::size_t max_entries,
                                         std::size_t min_fill, const FillPolicy& policy);

/// Mean fill fraction a policy aims for (Sound: the steady-state mean).
double target_fill(const FillPolicy& policy, std::size_t max_entries);

}  // namespace rwave
