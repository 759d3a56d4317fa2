#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rwave/bulkload.hpp"
#include "rwave/metrics.hpp"
#include "rwave/rtree.hpp"
#include "rwave/workload.hpp"

namespace rwave {

/// Full parameterization of one batch-insertion run. Defaults are the
/// full-scale base setting (preset "full"): 10M initial points, 7000
/// batches of 10k, 16KB pages, 1000 buffered pages, 90% fill, Hilbert sort.
struct ExperimentConfig {
  TreeConfig tree;
  BulkOrder bulk_order = BulkOrder::HilbertSort;
  FillPolicy fill;
  std::size_t initial_n = 10'000'000;
  DataSpec bulk_data;
  DataSpec batch_data;
  std::size_t batches = 7000;
  std::size_t batch_size = 10'000;
  std::vector<QuerySpec> queries{QuerySpec{}};
  std::uint64_t seed = 1;
  std::size_t severity_warmup = 1;
  std::size_t severity_window = 100;
  std::size_t audit_every = 0;  // 0: audit once, after the last batch
  std::string preset = "full";
  std::filesystem::path out;    // empty: no files written

  // Seeds of the data, query, remedy and fill streams, derived from `seed`.
  void derive_seeds();
  void validate() const;
};

/// Sets one `key = value` field. Throws ConfigError naming the key.
void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value);

/// Desk preset: 200k initial points, 300 batches of 2000, 16KB pages, 500 buffered pages.
void apply_desk_preset(ExperimentConfig& c);

/// Divides initial_n and batch_size by `factor`.
void apply_scale(ExperimentConfig& c, double factor);

/// Reads a flat `key = value` file (`#` comments). A `preset` key is applied
/// before the other keys regardless of its position.
ExperimentConfig load_config(const std::filesystem::path& path);
void apply_settings(ExperimentConfig& c, const std::vector<std::pair<std::string, std::string>>& kv);
std::vector<std::pair<std::string, std::string>> read_settings(const std::filesystem::path& path);

/// Every key with its current value, in a fixed order.
std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& c);

/// Named remedy applied to a base configuration, as used in the comparison
/// tables: "de" (deferred split for Hilbert, reinsertion for R*), "sr",
/// "lpr", "rpr" (bulk-load fill) and "ufs", "urs", "res" (insertion phase).
void apply_remedy_label(ExperimentConfig& c, std::string_view label);

struct ExperimentResult {
  std::vector<BatchRecord> batches;
  std::vector<SplitEvent> leaf_events;
  SplitDiagnostics diagnostics;
  TreeStats initial;
  TreeStats final_stats;
  AuditReport audit;
  WaveSeverity severity;
  // Queries per family per batch; families are issued back to back.
  std::vector<std::size_t> family_sizes;
  double seconds = 0.0;

  std::vector<double> leaf_split_series() const;
  // Mean per-query value within one query family, per batch.
  std::vector<double> query_series(std::size_t family, bool fetches) const;
};

struct RunHooks {
  // Called after each batch with the tree in its post-query state.
  std::function<void(const RTree&, const BatchRecord&)> after_batch;
};

/// Bulk loads, runs every batch with its queries, audits, and (if `out` is
/// set) writes batches.csv, summary.csv and meta.json into `out`.
ExperimentResult run_experiment(const ExperimentConfig& c, const RunHooks& hooks = {});

/// Per query family: fraction of batches in which the remedy's mean per-query
/// value is strictly below the baseline's. Throws DomainError on mismatched
/// runs.
std::vector<double> win_rates(const ExperimentResult& baseline, const ExperimentResult& remedy,
                              std::size_t families, bool fetches);

}  // namespace rwave
