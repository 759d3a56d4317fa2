#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "rwave/error.hpp"
#include "rwave/rtree.hpp"
#include "rwave/workload.hpp"

using namespace rwave;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("rwave_wl_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_text(const std::filesystem::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST(PointGenerator, SeededAndInSquare) {
  for (DataKind k : {DataKind::Uniform, DataKind::Normal, DataKind::Bit}) {
    DataSpec s;
    s.kind = k;
    s.seed = 9;
    PointGenerator a(s), b(s);
    const std::vector<Point> pa = a.take(5000), pb = b.take(5000);
    EXPECT_EQ(pa, pb);
    for (const Point& p : pa) ASSERT_TRUE(in_unit_square(p)) << to_string(k);
    s.seed = 10;
    EXPECT_NE(PointGenerator(s).take(10), std::vector<Point>(pa.begin(), pa.begin() + 10));
    EXPECT_FALSE(a.remaining().has_value());
  }
}

TEST(PointGenerator, NormalMoments) {
  DataSpec s;
  s.kind = DataKind::Normal;
  s.sd = 0.1;  // truncation at [0, 1] is negligible at 5 sd
  PointGenerator g(s);
  double sum = 0, sq = 0;
  const int n = 50000;
  for (const Point& p : g.take(n)) {
    sum += p.x;
    sq += p.x * p.x;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.5, 0.003);
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 0.1, 0.003);
}

TEST(PointGenerator, BitCoordinatesAreDyadic) {
  DataSpec s;
  s.kind = DataKind::Bit;
  s.bits = 6;
  s.bit_p = 0.3;
  PointGenerator g(s);
  double sum = 0;
  const int n = 40000;
  for (const Point& p : g.take(n)) {
    ASSERT_EQ(p.x * 64.0, std::floor(p.x * 64.0));
    ASSERT_LT(p.x, 1.0);
    sum += p.x;
  }
  // E[x] = p * (1 - 2^-bits)
  EXPECT_NEAR(sum / n, 0.3 * (1.0 - 1.0 / 64.0), 0.004);
  s.bits = 0;
  EXPECT_THROW(PointGenerator{s}, ConfigError);
  s.bits = 6;
  s.bit_p = 1.5;
  EXPECT_THROW(PointGenerator{s}, ConfigError);
}

TEST(Csv, RoundTripAndShuffle) {
  const auto path = scratch("pts.csv");
  std::vector<Point> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({i / 100.0, 0.1 + 1e-17 * i});
  write_csv_points(path, pts);
  EXPECT_EQ(read_csv_points(path), pts);  // shortest round-trip formatting

  DataSpec s;
  s.kind = DataKind::Csv;
  s.csv = path;
  PointGenerator g(s);
  EXPECT_EQ(g.remaining(), 100u);
  std::vector<Point> got = g.take(100);
  EXPECT_NE(got, pts);
  auto less = [](Point a, Point b) { return a.x < b.x; };
  std::sort(got.begin(), got.end(), less);
  EXPECT_EQ(got, pts);
  EXPECT_EQ(g.remaining(), 0u);
  EXPECT_THROW(g.next(), DomainError);
}

TEST(Csv, MalformedRowsNameTheLine) {
  const auto path = scratch("bad.csv");
  write_text(path, "lon,lat\n0.1,0.2\n0.3;0.4\n");
  try {
    read_csv_points(path);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
  }
  write_text(path, "0.1,0.2\n\n0.3, 0.4\r\n");
  EXPECT_EQ(read_csv_points(path), (std::vector<Point>{{0.1, 0.2}, {0.3, 0.4}}));
  write_text(path, "0.1,0.2\n1.5,0.2\n");
  DataSpec s;
  s.kind = DataKind::Csv;
  s.csv = path;
  EXPECT_THROW(PointGenerator{s}, DomainError);
  EXPECT_THROW(read_csv_points(scratch("missing.csv")), DomainError);
}

TEST(Csv, Normalization) {
  const auto raw = scratch("raw.csv"), out = scratch("norm.csv");
  write_text(raw, "x,y\n-10,5\n30,5\n10,5\n");
  const Bounds b = normalize_csv(raw, out);
  EXPECT_EQ(b.min_x, -10.0);
  EXPECT_EQ(b.max_x, 30.0);
  EXPECT_EQ(read_csv_points(out), (std::vector<Point>{{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.0}}));
  EXPECT_TRUE(std::filesystem::exists(out.string() + ".bounds"));
}

TEST(Queries, SquareClipping) {
  const Rect r = square_query({0.5, 0.5}, 0.04);
  EXPECT_NEAR(r.min_x, 0.4, 1e-15);
  EXPECT_NEAR(r.max_y, 0.6, 1e-15);
  EXPECT_EQ(square_query({0.0, 1.0}, 0.04), (Rect{0.0, 0.9, 0.1, 1.0}));
  std::mt19937_64 rng(1);
  EXPECT_THROW(uniform_query(0.0, rng), DomainError);
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(Rect::unit().contains(uniform_query(0.01, rng)));
}

TEST(Queries, FocalSigmaAndRejection) {
  EXPECT_NEAR(FocalQueries::sigma({0.3, 0.6}), 0.1, 1e-15);
  FocalQueries f(std::vector<Point>{{0.3, 0.6}});
  std::mt19937_64 rng(2);
  double sx = 0, sxx = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const Point c = f.center(rng);
    ASSERT_TRUE(in_unit_square(c));
    sx += c.x;
    sxx += c.x * c.x;
  }
  EXPECT_NEAR(sx / n, 0.3, 0.002);
  EXPECT_NEAR(std::sqrt(sxx / n - (sx / n) * (sx / n)), 0.1, 0.002);
  // Three sigma to the nearest edge: about 0.27% of raw draws land outside on one axis.
  const double out = static_cast<double>(f.raw_outside()) / static_cast<double>(f.raw_draws());
  EXPECT_GT(out, 0.0005);
  EXPECT_LT(out, 0.006);

  std::mt19937_64 r2(3);
  FocalQueries g(5, r2);
  EXPECT_EQ(g.focals().size(), 5u);
  EXPECT_THROW(FocalQueries(0, r2), ConfigError);
}

TEST(Queries, FixedSelectivity) {
  TreeConfig c;
  c.variant = Variant::RStar;
  c.page_size_bytes = 1024;
  c.buffer_pages = 16;
  RTree t(c);
  DataSpec d;
  t.bulk_load(PointGenerator(d).take(20000), BulkOrder::Str, FillPolicy{});
  std::mt19937_64 rng(4);
  t.pool().reset_counters();
  for (int i = 0; i < 50; ++i) {
    const Rect q = fixed_selectivity_query(t, 0.001, rng);
    const std::size_t hits = t.range_count(q);
    EXPECT_GE(hits, 20u);
    EXPECT_LE(hits, 40u);
  }
  EXPECT_EQ(t.pool().fetch_count(), 0u);  // generator access is uncounted
  EXPECT_THROW(fixed_selectivity_query(t, 0.0, rng), DomainError);
  RTree empty(c);
  EXPECT_THROW(fixed_selectivity_query(empty, 0.1, rng), DomainError);
}

TEST(Queries, GeneratorKinds) {
  EXPECT_EQ(parse_query_kind("selectivity"), QueryKind::FixedSelectivity);
  EXPECT_EQ(to_string(QueryKind::Focal), "focal");
  QuerySpec s;
  s.size = 2.0;
  EXPECT_THROW(QueryGenerator{s}, ConfigError);
  s.size = 0.001;
  s.kind = QueryKind::Focal;
  QueryGenerator a(s), b(s);
  TreeConfig c;
  RTree t(c);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(a.next(t), b.next(t));
}
