#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rwave/node.hpp"

namespace rwave {

/// Statistics for one insertion batch and the queries issued after it.
struct BatchRecord {
  std::uint64_t batch_id = 0;
  std::uint64_t leaf_splits = 0;
  std::uint64_t nonleaf_splits = 0;
  std::uint64_t elective_splits = 0;
  double avg_leaf_utilization = 0.0;
  std::size_t leaf_count = 0;
  int height = 0;
  std::uint64_t evictions_delta = 0;
  std::uint64_t fetches_delta = 0;
  double buffer_utilization = 0.0;
  std::vector<std::size_t> pages_touched;  // per query
  std::vector<std::size_t> query_fetches;  // per query: pages read from the store
  std::uint64_t reinsert_count = 0;
  std::uint64_t sibling_scan_count = 0;
};

/// RFC 4180 field quoting: quotes fields containing a comma, quote or line break.
std::string csv_field(const std::string& s);

void write_batch_header(std::ostream& out);
/// One CSV line including the trailing newline. Per-query lists are
/// semicolon-separated inside one field.
std::string format_batch_row(const BatchRecord& r);

/// Appends batch rows to a CSV file, writing and flushing each row whole.
class BatchCsvWriter {
 public:
  explicit BatchCsvWriter(const std::filesystem::path& path);
  void write(const BatchRecord& r);

 private:
  std::ofstream out_;
};

// ---- Split diagnostics ------------------------------------------------------

/// Overlap of the two children over the small child's area. A zero-area
/// small child scores 1 when it lies inside the large child, else 0.
double split_overlap_ratio(const SplitEvent& ev) noexcept;

/// Small-child area over large-child area; 1 when both are zero.
double split_ratio(const SplitEvent& ev) noexcept;

struct LineageShares {
  double bulk = 0.0;
  double large = 0.0;
  double small = 0.0;
};

/// Fraction of split victims per lineage tag. Empty input gives all zeros.
LineageShares lineage_shares(std::span<const SplitEvent> events) noexcept;

/// Accumulates leaf-split diagnostics over a run.
class SplitDiagnostics {
 public:
  void add(const SplitEvent& ev);

  std::size_t count() const noexcept { return n_; }
  double mean_overlap_ratio() const noexcept;
  double mean_split_ratio() const noexcept;
  double split_ratio_std() const noexcept;
  // Sum of area(large) - area(small) over recorded events.
  double area_difference() const noexcept { return area_diff_; }
  std::size_t degenerate_events() const noexcept { return degenerate_; }
  LineageShares lineage() const noexcept;

 private:
  std::size_t n_ = 0;
  std::size_t degenerate_ = 0;
  double overlap_sum_ = 0.0;
  double ratio_sum_ = 0.0;
  double ratio_sq_sum_ = 0.0;
  double area_diff_ = 0.0;
  std::size_t bulk_ = 0;
  std::size_t large_ = 0;
  std::size_t small_ = 0;
};

// ---- Series -------------------------------------------------------------------

/// Moving average over full windows only: out[i] = mean(s[i .. i+window-1]),
/// so the output has s.size() - window + 1 values (empty if shorter). Value
/// i belongs to batch i + (window - 1) / 2.
std::vector<double> runmean(std::span<const double> series, std::size_t window);

/// Nearest-rank percentile: the ceil(q * n)-th smallest value (at least the
/// first). Throws DomainError on empty input or q outside [0, 1].
double percentile(std::vector<double> values, double q);

double median(std::vector<double> values);

/// Wave severity of a split series after `warmup` batches. An ad hoc score
/// for wave trains, defined here:
///   peak_to_median  max / max(1, median)
///   cv              population standard deviation / mean (0 for a zero mean)
///   wave_count      runs of batches above 3 x max(1, median); runs closer
///                   than window / 2 batches merge into one wave
struct WaveSeverity {
  double peak_to_median = 0.0;
  double cv = 0.0;
  std::size_t wave_count = 0;
  double median = 0.0;  // floored at 1
  std::vector<std::size_t> peak_batches;  // index into the full series
  std::vector<double> peak_values;
};

WaveSeverity wave_severity(std::span<const double> series, std::size_t warmup, std::size_t window);

}  // namespace rwave
