#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rwave/error.hpp"
#include "rwave/metrics.hpp"

using namespace rwave;

namespace {

SplitEvent event(Rect small, Rect large, Lineage l) {
  SplitEvent e;
  e.small_child_rect = small;
  e.large_child_rect = large;
  e.victim_lineage = l;
  return e;
}

}  // namespace

TEST(Csv, FieldQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("1;2;3"), "1;2;3");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
}

TEST(Csv, BatchRows) {
  std::ostringstream h;
  write_batch_header(h);
  EXPECT_EQ(h.str().rfind("batch_id,leaf_splits,", 0), 0u);
  BatchRecord r;
  r.batch_id = 3;
  r.leaf_splits = 7;
  r.avg_leaf_utilization = 0.5;
  r.pages_touched = {4, 5};
  r.query_fetches = {0};
  const std::string row = format_batch_row(r);
  EXPECT_EQ(row, "3,7,0,0,0.500000,0,0,0,0,0.000000,4;5,0,0,0\n");
  // Columns line up with the header.
  const auto commas = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  EXPECT_EQ(commas(row), commas(h.str()));

  const auto path = std::filesystem::temp_directory_path() / ("rwave_batches_" + std::to_string(::getpid()));
  {
    BatchCsvWriter w(path);
    w.write(r);
    // Flushed per row: readable before the writer closes.
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    EXPECT_EQ(line + "\n", row);
  }
  std::filesystem::remove(path);
  EXPECT_THROW(BatchCsvWriter("/nonexistent-dir/x.csv"), ConfigError);
}

TEST(SplitMeasures, OverlapAndRatio) {
  const Rect big{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(split_overlap_ratio(event({0.5, 0.5, 1.5, 1.0}, big, Lineage::BulkLoaded)), 0.5);
  EXPECT_DOUBLE_EQ(split_overlap_ratio(event({2, 2, 3, 3}, big, Lineage::BulkLoaded)), 0.0);
  // Degenerate small child: inside scores 1, outside 0.
  EXPECT_DOUBLE_EQ(split_overlap_ratio(event({0.5, 0.5, 0.5, 0.5}, big, Lineage::BulkLoaded)), 1.0);
  EXPECT_DOUBLE_EQ(split_overlap_ratio(event({0.5, 2, 0.7, 2}, big, Lineage::BulkLoaded)), 0.0);
  EXPECT_DOUBLE_EQ(split_ratio(event({0, 0, 0.5, 0.5}, big, Lineage::BulkLoaded)), 0.25);
  EXPECT_DOUBLE_EQ(split_ratio(event({0, 0, 0, 0}, {1, 1, 1, 1}, Lineage::BulkLoaded)), 1.0);
}

TEST(SplitMeasures, DiagnosticsAccumulate) {
  SplitDiagnostics d;
  EXPECT_EQ(d.mean_split_ratio(), 0.0);
  EXPECT_EQ(d.lineage().bulk, 0.0);
  const Rect big{0, 0, 1, 1};
  d.add(event({0, 0, 0.5, 0.5}, big, Lineage::BulkLoaded));   // ratio .25, overlap 1
  d.add(event({0, 0, 1, 0.75}, big, Lineage::LargeChild));    // ratio .75, overlap 1
  d.add(event({0, 0, 0, 0}, {2, 2, 3, 3}, Lineage::SmallChild));  // ratio 0, overlap 0
  d.add(event({1, 1, 2, 2}, big, Lineage::LargeChild));       // ratio 1, overlap 0
  EXPECT_EQ(d.count(), 4u);
  EXPECT_EQ(d.degenerate_events(), 1u);
  EXPECT_DOUBLE_EQ(d.mean_split_ratio(), 0.5);
  EXPECT_DOUBLE_EQ(d.mean_overlap_ratio(), 0.5);
  EXPECT_NEAR(d.split_ratio_std(), std::sqrt((0.0625 + 0.5625 + 0.0 + 1.0) / 4 - 0.25), 1e-12);
  EXPECT_DOUBLE_EQ(d.area_difference(), 0.75 + 0.25 + 1.0 + 0.0);
  const LineageShares l = d.lineage();
  EXPECT_DOUBLE_EQ(l.bulk, 0.25);
  EXPECT_DOUBLE_EQ(l.large, 0.5);
  EXPECT_DOUBLE_EQ(l.small, 0.25);
  std::vector<SplitEvent> v{event(big, big, Lineage::SmallChild)};
  EXPECT_DOUBLE_EQ(lineage_shares(v).small, 1.0);
  EXPECT_DOUBLE_EQ(lineage_shares({}).bulk, 0.0);
}

TEST(Series, RunmeanFullWindows) {
  const std::vector<double> s{1, 2, 3, 4, 5, 6};
  EXPECT_EQ(runmean(s, 1), s);
  EXPECT_EQ(runmean(s, 3), (std::vector<double>{2, 3, 4, 5}));
  EXPECT_EQ(runmean(s, 6), (std::vector<double>{3.5}));
  EXPECT_TRUE(runmean(s, 7).empty());
  EXPECT_THROW(runmean(s, 0), DomainError);
  // Long running sums stay close to a direct mean.
  std::vector<double> noisy(10000);
  for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] = std::sin(0.1 * static_cast<double>(i)) * 1e3;
  const std::vector<double> r = runmean(noisy, 100);
  double direct = 0.0;
  for (std::size_t i = 9900; i < 10000; ++i) direct += noisy[i];
  EXPECT_NEAR(r.back(), direct / 100.0, 1e-9);
}

TEST(Series, PercentileNearestRank) {
  const std::vector<double> v{15, 20, 35, 40, 50};
  EXPECT_EQ(percentile(v, 0.05), 15);
  EXPECT_EQ(percentile(v, 0.30), 20);
  EXPECT_EQ(percentile(v, 0.40), 20);
  EXPECT_EQ(percentile(v, 0.50), 35);
  EXPECT_EQ(percentile(v, 1.00), 50);
  EXPECT_EQ(percentile(v, 0.0), 15);
  EXPECT_THROW(percentile({}, 0.5), DomainError);
  EXPECT_THROW(percentile(v, 1.5), DomainError);
  EXPECT_EQ(median({3, 1, 2}), 2);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_THROW(median({}), DomainError);
}

TEST(Series, WaveSeverity) {
  std::vector<double> s(100, 2.0);
  s[0] = 500;  // warmup, ignored
  for (int i = 20; i < 25; ++i) s[i] = 30;
  s[22] = 40;
  s[27] = 20;  // within window/2 of the first wave: merges
  for (int i = 70; i < 73; ++i) s[i] = 10;
  const WaveSeverity w = wave_severity(s, 1, 20);
  EXPECT_DOUBLE_EQ(w.median, 2.0);
  EXPECT_DOUBLE_EQ(w.peak_to_median, 20.0);
  EXPECT_EQ(w.wave_count, 2u);
  EXPECT_EQ(w.peak_batches, (std::vector<std::size_t>{22, 70}));
  EXPECT_EQ(w.peak_values, (std::vector<double>{40, 10}));
  EXPECT_GT(w.cv, 0.0);

  // Median floored at one; flat series has no waves.
  const WaveSeverity z = wave_severity(std::vector<double>(50, 0.0), 0, 10);
  EXPECT_DOUBLE_EQ(z.median, 1.0);
  EXPECT_EQ(z.wave_count, 0u);
  EXPECT_EQ(z.cv, 0.0);
  EXPECT_THROW(wave_severity(std::vector<double>(3, 1.0), 3, 10), DomainError);

  // Population CV of {1, 3}: sd 1, mean 2.
  EXPECT_DOUBLE_EQ(wave_severity(std::vector<double>{1, 3}, 0, 2).cv, 0.5);
}
