#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "rwave/geometry.hpp"

namespace rwave {

class RTree;

enum class DataKind { Uniform, Normal, Bit, Csv };

std::string_view to_string(DataKind k) noexcept;
std::optional<DataKind> parse_data_kind(std::string_view name) noexcept;

struct DataSpec {
  DataKind kind = DataKind::Uniform;
  double mean = 0.5;         // Normal
  double sd = 1.0 / 6.0;     // Normal
  double bit_p = 0.3;        // Bit: probability that a mantissa bit is set
  int bits = 23;             // Bit
  std::filesystem::path csv; // Csv: points already in the unit square
  std::uint64_t seed = 1;
};

/// Seeded point stream. Normal coordinates outside [0, 1] are redrawn; Bit
/// coordinates are sums of 2^-(k+1) over set bits k < bits. Csv points are
/// read once, shuffled with the seed and handed out in that order.
class PointGenerator {
 public:
  explicit PointGenerator(const DataSpec& spec);

  Point next();
  std::vector<Point> take(std::size_t n);
  // Csv: points not yet handed out. Synthetic streams are unbounded.
  std::optional<std::size_t> remaining() const noexcept;

 private:
  double normal_coord();
  double bit_coord();

  DataSpec spec_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  std::bernoulli_distribution bit_;
  std::vector<Point> csv_points_;
  std::size_t csv_pos_ = 0;
};

/// Reads `x,y` rows; a non-numeric first line is taken as a header. Throws
/// DomainError naming the file and line on malformed rows.
std::vector<Point> read_csv_points(const std::filesystem::path& path);
void write_csv_points(const std::filesystem::path& path, const std::vector<Point>& points);

struct Bounds {
  double min_x = 0.0, min_y = 0.0, max_x = 1.0, max_y = 1.0;
};

/// Affine map of raw coordinates into the unit square (each axis
/// independently; a constant axis maps to 0).
Bounds normalize_points(std::vector<Point>& points);

/// Normalization pass for real data: reads raw `x,y` rows from `in`, writes
/// the unit-square CSV to `out` and the bounds used to `out` + ".bounds".
Bounds normalize_csv(const std::filesystem::path& in, const std::filesystem::path& out);

// ---- Queries ----------------------------------------------------------------

/// Square of side sqrt(a) centered at c, clipped to the unit square.
Rect square_query(Point c, double a) noexcept;

/// Square query with a uniform center. Requires 0 < a <= 1.
Rect uniform_query(double a, std::mt19937_64& rng);

/// Query centers drawn around fixed focal points: pick a focal uniformly,
/// draw the center from Normal(focal, sigma) with sigma a third of the
/// focal's distance to the nearest edge of the unit square, redraw centers
/// that fall outside.
class FocalQueries {
 public:
  FocalQueries(std::size_t count, std::mt19937_64& rng);
  explicit FocalQueries(std::vector<Point> focals) : focals_(std::move(focals)) {}

  static double sigma(Point focal) noexcept;

  Point center(std::mt19937_64& rng);
  Rect next(double a, std::mt19937_64& rng) { return square_query(center(rng), a); }

  const std::vector<Point>& focals() const noexcept { return focals_; }
  std::uint64_t raw_draws() const noexcept { return raw_draws_; }
  std::uint64_t raw_outside() const noexcept { return raw_outside_; }

 private:
  std::vector<Point> focals_;
  std::uint64_t raw_draws_ = 0;
  std::uint64_t raw_outside_ = 0;
};

/// MBR of the k = ceil(s * size) nearest neighbours of a uniform point,
/// redrawn while it contains more than 2k points. Tree access is uncounted.
/// Throws DomainError once `attempts` draws have all been discarded.
Rect fixed_selectivity_query(RTree& tree, double s, std::mt19937_64& rng, int attempts = 100);

enum class QueryKind { UniformArea, Focal, FixedSelectivity };

std::string_view to_string(QueryKind k) noexcept;
std::optional<QueryKind> parse_query_kind(std::string_view name) noexcept;

struct QuerySpec {
  QueryKind kind = QueryKind::UniformArea;
  double size = 1e-4;  // area fraction a, or selectivity s
  std::size_t per_batch = 100;
  std::size_t focals = 5;
  std::uint64_t seed = 1;
};

class QueryGenerator {
 public:
  explicit QueryGenerator(const QuerySpec& spec);

  const QuerySpec& spec() const noexcept { return spec_; }
  Rect next(RTree& tree);

 private:
  QuerySpec spec_;
  std::mt19937_64 rng_;
  std::optional<FocalQueries> focal_;
};

}  // namespace rwave
