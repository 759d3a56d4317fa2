#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>

#include "rwave/error.hpp"
#include "rwave/rtree.hpp"

namespace rwave {

namespace {

using Planner = std::function<std::vector<std::size_t>(std::size_t)>;

void chunk(std::span<const Entry> in, const std::vector<std::size_t>& sizes,
           std::vector<std::vector<Entry>>& out) {
  std::size_t at = 0;
  for (std::size_t s : sizes) {
    out.emplace_back(in.begin() + static_cast<std::ptrdiff_t>(at),
                     in.begin() + static_cast<std::ptrdiff_t>(at + s));
    at += s;
  }
  if (at != in.size()) throw CorruptionError("bulk load plan does not cover its input");
}

// Sort-Tile-Recursive: x-sorted vertical slices of whole runs, y-sorted within.
std::vector<std::vector<Entry>> str_tile(std::vector<Entry> es, std::size_t per_node,
                                         const Planner& plan) {
  const std::size_t n = es.size();
  const std::size_t nodes = (n + per_node - 1) / per_node;
  const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(nodes))));
  const std::size_t slice_size = (nodes + slices - 1) / slices * per_node;
  auto by_x = [](const Entry& a, const Entry& b) {
    const Point ca = a.rect.center(), cb = b.rect.center();
    return std::tie(ca.x, ca.y, a.id) < std::tie(cb.x, cb.y, b.id);
  };
  auto by_y = [](const Entry& a, const Entry& b) {
    const Point ca = a.rect.center(), cb = b.rect.center();
    return std::tie(ca.y, ca.x, a.id) < std::tie(cb.y, cb.x, b.id);
  };
  std::sort(es.begin(), es.end(), by_x);
  std::vector<std::vector<Entry>> groups;
  for (std::size_t at = 0; at < n; at += slice_size) {
    const std::size_t end = std::min(n, at + slice_size);
    std::sort(es.begin() + static_cast<std::ptrdiff_t>(at), es.begin() + static_cast<std::ptrdiff_t>(end),
              by_y);
    chunk(std::span<const Entry>(es).subspan(at, end - at), plan(end - at), groups);
  }
  return groups;
}

}  // namespace

void RTree::bulk_load(std::span<const Point> points, BulkOrder order, const FillPolicy& fill) {
  if (root_ != kNoPage || size_ != 0) throw ConfigError("bulk_load", "tree is not empty");
  if (order == BulkOrder::Str && config_.variant == Variant::Hilbert) {
    throw ConfigError("bulk_order", "STR packing does not keep Hilbert order; use hilbert");
  }
  fill.validate();
  const std::size_t n = points.size();
  if (n == 0) return;
  const std::size_t B = cap_.max_entries;

  std::vector<Entry> es(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_unit_square(points[i])) {
      throw DomainError("bulk load point " + std::to_string(i) + " outside the unit square");
    }
    es[i] = Entry{Rect::of(points[i]), i, hilbert_index(points[i], order_)};
  }

  FillStream leaf_stream(fill, B, cap_.min_fill);
  std::vector<std::vector<Entry>> groups;
  if (order == BulkOrder::HilbertSort) {
    std::sort(es.begin(), es.end(), [](const Entry& a, const Entry& b) {
      return std::tie(a.hilbert, a.id) < std::tie(b.hilbert, b.id);
    });
    chunk(es, leaf_stream.plan(n), groups);
  } else {
    const std::size_t per_leaf = fill_count(target_fill(fill, B), B);
    groups = str_tile(std::move(es), per_leaf, [&](std::size_t m) { return leaf_stream.plan(m); });
  }

  std::vector<Entry> level_entries;
  level_entries.reserve(groups.size());
  for (auto& g : groups) level_entries.push_back(create_node(0, std::move(g), Lineage::BulkLoaded));

  const FillPolicy full{FillKind::Fixed, 1.0, 0.0, fill.rng_seed};
  int level = 0;
  while (level_entries.size() > 1) {
    ++level;
    FillStream stream(full, B, cap_.min_fill);
    groups.clear();
    if (order == BulkOrder::HilbertSort) {
      chunk(level_entries, stream.plan(level_entries.size()), groups);
    } else {
      groups = str_tile(std::move(level_entries), B, [&](std::size_t m) { return stream.plan(m); });
    }
    level_entries.clear();
    for (auto& g : groups) level_entries.push_back(create_node(level, std::move(g), Lineage::BulkLoaded));
  }
  root_ = level_entries.front().id;
  height_ = level + 1;
  size_ = n;
  next_id_ = n;
}

}  // namespace rwave
