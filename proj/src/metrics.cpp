#include "rwave/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rwave/error.hpp"

namespace rwave {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_batch_header(std::ostream& out) {
  out << "batch_id,leaf_splits,nonleaf_splits,elective_splits,avg_leaf_utilization,leaf_count,"
         "height,evictions_delta,fetches_delta,buffer_utilization,pages_touched,query_fetches,"
         "reinsert_count,sibling_scan_count\n";
}

namespace {

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ';';
    s += std::to_string(v[i]);
  }
  return s;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string format_batch_row(const BatchRecord& r) {
  std::string s;
  s += std::to_string(r.batch_id) + ',';
  s += std::to_string(r.leaf_splits) + ',';
  s += std::to_string(r.nonleaf_splits) + ',';
  s += std::to_string(r.elective_splits) + ',';
  s += fixed(r.avg_leaf_utilization) + ',';
  s += std::to_string(r.leaf_count) + ',';
  s += std::to_string(r.height) + ',';
  s += std::to_string(r.evictions_delta) + ',';
  s += std::to_string(r.fetches_delta) + ',';
  s += fixed(r.buffer_utilization) + ',';
  s += csv_field(join(r.pages_touched)) + ',';
  s += csv_field(join(r.query_fetches)) + ',';
  s += std::to_string(r.reinsert_count) + ',';
  s += std::to_string(r.sibling_scan_count) + '\n';
  return s;
}

BatchCsvWriter::BatchCsvWriter(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
  if (!out_) throw ConfigError("out", "cannot write " + path.string());
  write_batch_header(out_);
  out_.flush();
}

void BatchCsvWriter::write(const BatchRecord& r) {
  const std::string row = format_batch_row(r);
  out_.write(row.data(), static_cast<std::streamsize>(row.size()));
  out_.flush();
}

double split_overlap_ratio(const SplitEvent& ev) noexcept {
  const double a = area(ev.small_child_rect);
  if (a <= 0.0) return ev.large_child_rect.contains(ev.small_child_rect) ? 1.0 : 0.0;
  return std::min(1.0, intersection_area(ev.small_child_rect, ev.large_child_rect) / a);
}

double split_ratio(const SplitEvent& ev) noexcept {
  const double l = area(ev.large_child_rect);
  if (l <= 0.0) return 1.0;
  return std::min(1.0, area(ev.small_child_rect) / l);
}

LineageShares lineage_shares(std::span<const SplitEvent> events) noexcept {
  LineageShares s;
  if (events.empty()) return s;
  for (const SplitEvent& e : events) {
    switch (e.victim_lineage) {
      case Lineage::BulkLoaded: s.bulk += 1.0; break;
      case Lineage::LargeChild: s.large += 1.0; break;
      case Lineage::SmallChild: s.small += 1.0; break;
    }
  }
  const auto n = static_cast<double>(events.size());
  s.bulk /= n;
  s.large /= n;
  s.small /= n;
  return s;
}

void SplitDiagnostics::add(const SplitEvent& ev) {
  ++n_;
  if (area(ev.small_child_rect) <= 0.0) ++degenerate_;
  overlap_sum_ += split_overlap_ratio(ev);
  const double r = split_ratio(ev);
  ratio_sum_ += r;
  ratio_sq_sum_ += r * r;
  area_diff_ += std::max(0.0, area(ev.large_child_rect) - area(ev.small_child_rect));
  switch (ev.victim_lineage) {
    case Lineage::BulkLoaded: ++bulk_; break;
    case Lineage::LargeChild: ++large_; break;
    case Lineage::SmallChild: ++small_; break;
  }
}

double SplitDiagnostics::mean_overlap_ratio() const noexcept {
  return n_ == 0 ? 0.0 : overlap_sum_ / static_cast<double>(n_);
}

double SplitDiagnostics::mean_split_ratio() const noexcept {
  return n_ == 0 ? 0.0 : ratio_sum_ / static_cast<double>(n_);
}

double SplitDiagnostics::split_ratio_std() const noexcept {
  if (n_ == 0) return 0.0;
  const double m = mean_split_ratio();
  return std::sqrt(std::max(0.0, ratio_sq_sum_ / static_cast<double>(n_) - m * m));
}

LineageShares SplitDiagnostics::lineage() const noexcept {
  if (n_ == 0) return {};
  const auto n = static_cast<double>(n_);
  return {static_cast<double>(bulk_) / n, static_cast<double>(large_) / n,
          static_cast<double>(small_) / n};
}

std::vector<double> runmean(std::span<const double> series, std::size_t window) {
  if (window == 0) throw DomainError("runmean window must be at least 1");
  std::vector<double> out;
  if (series.size() < window) return out;
  out.reserve(series.size() - window + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < window; ++i) sum += series[i];
  out.push_back(sum / static_cast<double>(window));
  for (std::size_t i = window; i < series.size(); ++i) {
    sum += series[i] - series[i - window];
    out.push_back(sum / static_cast<double>(window));
  }
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("percentile q must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

WaveSeverity wave_severity(std::span<const double> series, std::size_t warmup, std::size_t window) {
  if (series.size() <= warmup) throw DomainError("wave_severity: series shorter than warmup");
  const std::span<const double> s = series.subspan(warmup);
  WaveSeverity w;
  w.median = std::max(1.0, median(std::vector<double>(s.begin(), s.end())));
  const double peak = *std::max_element(s.begin(), s.end());
  w.peak_to_median = peak / w.median;
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  double var = 0.0;
  for (double v : s) var += (v - mean) * (v - mean);
  var /= static_cast<double>(s.size());
  w.cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;

  const double threshold = 3.0 * w.median;
  const std::size_t gap = std::max<std::size_t>(1, window / 2);
  std::size_t last_above = 0;
  bool in_wave = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] <= threshold) continue;
    if (!in_wave || i - last_above >= gap) {
      ++w.wave_count;
      w.peak_batches.push_back(i + warmup);
      w.peak_values.push_back(s[i]);
      in_wave = true;
    } else if (s[i] > w.peak_values.back()) {
      w.peak_batches.back() = i + warmup;
      w.peak_values.back() = s[i];
    }
    last_above = i;
  }
  return w;
}

}  // namespace rwave
