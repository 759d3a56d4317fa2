#include "rwave/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "rwave/error.hpp"
#include "rwave/rtree.hpp"

namespace rwave {

std::string_view to_string(DataKind k) noexcept {
  switch (k) {
    case DataKind::Uniform: return "uniform";
    case DataKind::Normal: return "normal";
    case DataKind::Bit: return "bit";
    case DataKind::Csv: return "csv";
  }
  return "?";
}

std::optional<DataKind> parse_data_kind(std::string_view name) noexcept {
  if (name == "uniform") return DataKind::Uniform;
  if (name == "normal") return DataKind::Normal;
  if (name == "bit") return DataKind::Bit;
  if (name == "csv") return DataKind::Csv;
  return std::nullopt;
}

PointGenerator::PointGenerator(const DataSpec& spec)
    : spec_(spec), rng_(spec.seed), normal_(spec.mean, spec.sd), bit_(spec.bit_p) {
  if (spec_.kind == DataKind::Normal && !(spec_.sd > 0.0)) {
    throw ConfigError("data_sd", "must be positive");
  }
  if (spec_.kind == DataKind::Bit && (spec_.bits < 1 || spec_.bits > 52)) {
    throw ConfigError("data_bits", "must be in [1, 52]");
  }
  if (spec_.kind == DataKind::Bit && !(spec_.bit_p >= 0.0 && spec_.bit_p <= 1.0)) {
    throw ConfigError("data_bit_p", "must be in [0, 1]");
  }
  if (spec_.kind == DataKind::Csv) {
    csv_points_ = read_csv_points(spec_.csv);
    for (std::size_t i = 0; i < csv_points_.size(); ++i) {
      if (!in_unit_square(csv_points_[i])) {
        throw DomainError(spec_.csv.string() + ": point " + std::to_string(i + 1) +
                          " outside the unit square; run the normalization pass first");
      }
    }
    std::shuffle(csv_points_.begin(), csv_points_.end(), rng_);
  }
}

double PointGenerator::normal_coord() {
  while (true) {
    const double v = normal_(rng_);
    if (v >= 0.0 && v <= 1.0) return v;
  }
}

double PointGenerator::bit_coord() {
  double v = 0.0;
  double w = 0.5;
  for (int k = 0; k < spec_.bits; ++k, w *= 0.5) {
    if (bit_(rng_)) v += w;
  }
  return v;
}

Point PointGenerator::next() {
  switch (spec_.kind) {
    case DataKind::Uniform: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double x = u(rng_);
      return {x, u(rng_)};
    }
    case DataKind::Normal: {
      const double x = normal_coord();
      return {x, normal_coord()};
    }
    case DataKind::Bit: {
      const double x = bit_coord();
      return {x, bit_coord()};
    }
    case DataKind::Csv:
      if (csv_pos_ >= csv_points_.size()) {
        throw DomainError(spec_.csv.string() + ": ran out of points after " +
                          std::to_string(csv_points_.size()));
      }
      return csv_points_[csv_pos_++];
  }
  return {};
}

std::vector<Point> PointGenerator::take(std::size_t n) {
  std::vector<Point> out(n);
  for (auto& p : out) p = next();
  return out;
}

std::optional<std::size_t> PointGenerator::remaining() const noexcept {
  if (spec_.kind != DataKind::Csv) return std::nullopt;
  return csv_points_.size() - csv_pos_;
}

namespace {

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

std::vector<Point> read_csv_points(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  std::vector<Point> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    double x = 0.0, y = 0.0;
    const bool ok = comma != std::string::npos &&
                    parse_double(std::string_view(line).substr(0, comma), x) &&
                    parse_double(std::string_view(line).substr(comma + 1), y);
    if (!ok) {
      if (lineno == 1) continue;  // header
      throw DomainError(path.string() + ":" + std::to_string(lineno) + ": expected `x,y`, got `" +
                        line + "`");
    }
    pts.push_back({x, y});
  }
  return pts;
}

void write_csv_points(const std::filesystem::path& path, const std::vector<Point>& points) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  out << "x,y\n";
  char buf[64];
  for (const Point& p : points) {
    const auto a = std::to_chars(buf, buf + sizeof buf, p.x);
    *a.ptr = ',';
    const auto b = std::to_chars(a.ptr + 1, buf + sizeof buf, p.y);
    out.write(buf, b.ptr - buf);
    out.put('\n');
  }
}

Bounds normalize_points(std::vector<Point>& points) {
  Bounds b;
  if (points.empty()) return b;
  b = {points[0].x, points[0].y, points[0].x, points[0].y};
  for (const Point& p : points) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  const double wx = b.max_x - b.min_x;
  const double wy = b.max_y - b.min_y;
  for (Point& p : points) {
    p.x = wx > 0.0 ? std::clamp((p.x - b.min_x) / wx, 0.0, 1.0) : 0.0;
    p.y = wy > 0.0 ? std::clamp((p.y - b.min_y) / wy, 0.0, 1.0) : 0.0;
  }
  return b;
}

Bounds normalize_csv(const std::filesystem::path& in, const std::filesystem::path& out) {
  std::vector<Point> pts = read_csv_points(in);
  const Bounds b = normalize_points(pts);
  write_csv_points(out, pts);
  std::ofstream side(out.string() + ".bounds");
  side.precision(17);
  side << "min_x,min_y,max_x,max_y\n" << b.min_x << ',' << b.min_y << ',' << b.max_x << ',' << b.max_y << '\n';
  return b;
}

Rect square_query(Point c, double a) noexcept {
  const double h = std::sqrt(a) / 2.0;
  return {std::max(0.0, c.x - h), std::max(0.0, c.y - h), std::min(1.0, c.x + h),
          std::min(1.0, c.y + h)};
}

Rect uniform_query(double a, std::mt19937_64& rng) {
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("query area must be in (0, 1]");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng);
  return square_query({x, u(rng)}, a);
}

FocalQueries::FocalQueries(std::size_t count, std::mt19937_64& rng) {
  if (count == 0) throw ConfigError("query_focals", "need at least one focal point");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (focals_.size() < count) {
    const double x = u(rng);
    const Point f{x, u(rng)};
    // A focal on the boundary would have sigma 0.
    if (sigma(f) > 0.0) focals_.push_back(f);
  }
}

double FocalQueries::sigma(Point f) noexcept {
  return std::min({f.x, 1.0 - f.x, f.y, 1.0 - f.y}) / 3.0;
}

Point FocalQueries::center(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, focals_.size() - 1);
  const Point f = focals_[pick(rng)];
  std::normal_distribution<double> nx(f.x, sigma(f));
  std::normal_distribution<double> ny(f.y, sigma(f));
  while (true) {
    const double x = nx(rng);
    const Point c{x, ny(rng)};
    ++raw_draws_;
    if (in_unit_square(c)) return c;
    ++raw_outside_;
  }
}

Rect fixed_selectivity_query(RTree& tree, double s, std::mt19937_64& rng, int attempts) {
  if (tree.size() == 0) throw DomainError("fixed-selectivity query on an empty tree");
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("selectivity must be in (0, 1]");
  const auto k = static_cast<std::size_t>(
      std::max(1.0, std::ceil(s * static_cast<double>(tree.size()) - 1e-9)));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < attempts; ++i) {
    const double x = u(rng);
    const Point p{x, u(rng)};
    Rect mbr = Rect::of(p);
    bool first = true;
    for (const Neighbor& n : tree.nearest(p, k, Access::Uncounted)) {
      mbr = first ? Rect::of(n.point) : unite(mbr, Rect::of(n.point));
      first = false;
    }
    if (tree.range_count(mbr) <= 2 * k) return mbr;
  }
  throw DomainError("fixed-selectivity query: " + std::to_string(attempts) +
                    " draws all exceeded twice the selectivity");
}

std::string_view to_string(QueryKind k) noexcept {
  switch (k) {
    case QueryKind::UniformArea: return "uniform";
    case QueryKind::Focal: return "focal";
    case QueryKind::FixedSelectivity: return "selectivity";
  }
  return "?";
}

std::optional<QueryKind> parse_query_kind(std::string_view name) noexcept {
  if (name == "uniform") return QueryKind::UniformArea;
  if (name == "focal") return QueryKind::Focal;
  if (name == "selectivity") return QueryKind::FixedSelectivity;
  return std::nullopt;
}

QueryGenerator::QueryGenerator(const QuerySpec& spec) : spec_(spec), rng_(spec.seed) {
  if (!(spec_.size > 0.0 && spec_.size <= 1.0)) throw ConfigError("query_size", "must be in (0, 1]");
  if (spec_.kind == QueryKind::Focal) focal_.emplace(spec_.focals, rng_);
}

Rect QueryGenerator::next(RTree& tree) {
  switch (spec_.kind) {
    case QueryKind::UniformArea: return uniform_query(spec_.size, rng_);
    case QueryKind::Focal: return focal_->next(spec_.size, rng_);
    case QueryKind::FixedSelectivity: return fixed_selectivity_query(tree, spec_.size, rng_);
  }
  return Rect::unit();
}

}  // namespace rwave
