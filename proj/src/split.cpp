#include "rwave/split.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rwave/error.hpp"

namespace rwave {

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::Linear: return "linear";
    case Variant::Quadratic: return "quadratic";
    case Variant::RStar: return "rstar";
    case Variant::Hilbert: return "hilbert";
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view name) noexcept {
  if (name == "linear") return Variant::Linear;
  if (name == "quadratic") return Variant::Quadratic;
  if (name == "rstar") return Variant::RStar;
  if (name == "hilbert") return Variant::Hilbert;
  return std::nullopt;
}

GroupBounds GroupBounds::fraction(std::size_t n, double f) noexcept {
  const double raw = std::ceil(f * static_cast<double>(n) - 1e-9);
  std::size_t k = raw < 1.0 ? 1 : static_cast<std::size_t>(raw);
  if (n >= 2) k = std::min(k, n - 1);
  return {k, n - k};
}

bool SplitOutcome::first_is_small() const noexcept {
  const double a1 = area(mbr_of(first));
  const double a2 = area(mbr_of(second));
  if (a1 != a2) return a1 < a2;
  return first.size() <= second.size();
}

namespace {

void check_bounds(std::size_t n, GroupBounds b, const char* who) {
  if (n < 2) throw DomainError(std::string(who) + ": need at least 2 entries");
  if (b.min_first < 1 || b.min_second < 1 || b.min_first + b.min_second > n) {
    throw DomainError(std::string(who) + ": group minimums " + std::to_string(b.min_first) + "+" +
                      std::to_string(b.min_second) + " exceed " + std::to_string(n) + " entries");
  }
}

// Incrementally built group for the Guttman splits.
struct Group {
  std::vector<Entry> entries;
  Rect box;

  void add(const Entry& e) {
    box = entries.empty() ? e.rect : unite(box, e.rect);
    entries.push_back(e);
  }
  double enlargement(const Rect& r) const { return area(unite(box, r)) - area(box); }
};

// true -> first group. Ties: smaller area, then fewer entries, then first.
bool prefer_first(const Group& g1, const Group& g2, const Rect& r) {
  const double e1 = g1.enlargement(r);
  const double e2 = g2.enlargement(r);
  if (e1 != e2) return e1 < e2;
  const double a1 = area(g1.box);
  const double a2 = area(g2.box);
  if (a1 != a2) return a1 < a2;
  return g1.entries.size() <= g2.entries.size();
}

// If one group needs every remaining entry to reach its minimum, hand them
// over and return true.
template <typename Pending>
bool force_remaining(Group& g1, Group& g2, GroupBounds b, std::span<const Entry> all,
                     Pending& pending) {
  const std::size_t rem = pending.size();
  Group* target = nullptr;
  if (g1.entries.size() + rem <= b.min_first) {
    target = &g1;
  } else if (g2.entries.size() + rem <= b.min_second) {
    target = &g2;
  }
  if (target == nullptr) return false;
  for (std::size_t i : pending) target->add(all[i]);
  pending.clear();
  return true;
}

std::pair<std::size_t, std::size_t> linear_pick_seeds(std::span<const Entry> entries) {
  const std::size_t n = entries.size();
  double best_norm = -1.0;
  std::pair<std::size_t, std::size_t> seeds{0, 1};
  for (int dim = 0; dim < 2; ++dim) {
    auto lo = [dim](const Entry& e) { return dim == 0 ? e.rect.min_x : e.rect.min_y; };
    auto hi = [dim](const Entry& e) { return dim == 0 ? e.rect.max_x : e.rect.max_y; };
    std::size_t highest_low = 0;
    std::size_t lowest_high = 0;
    double min_lo = lo(entries[0]);
    double max_hi = hi(entries[0]);
    for (std::size_t i = 1; i < n; ++i) {
      if (lo(entries[i]) > lo(entries[highest_low])) highest_low = i;
      if (hi(entries[i]) < hi(entries[lowest_high])) lowest_high = i;
      min_lo = std::min(min_lo, lo(entries[i]));
      max_hi = std::max(max_hi, hi(entries[i]));
    }
    if (highest_low == lowest_high) {
      // Same entry on both sides: take the next-lowest high among the others.
      std::size_t alt = lowest_high == 0 ? 1 : 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i != highest_low && hi(entries[i]) < hi(entries[alt])) alt = i;
      }
      lowest_high = alt;
    }
    const double width = max_hi - min_lo;
    const double sep = lo(entries[highest_low]) - hi(entries[lowest_high]);
    const double norm = width > 0.0 ? sep / width : 0.0;
    if (norm > best_norm) {
      best_norm = norm;
      seeds = {lowest_high, highest_low};
    }
  }
  return seeds;
}

}  // namespace

SplitOutcome linear_split(std::span<const Entry> entries, GroupBounds bounds) {
  check_bounds(entries.size(), bounds, "linear_split");
  const auto [s1, s2] = linear_pick_seeds(entries);
  Group g1;
  Group g2;
  g1.add(entries[s1]);
  g2.add(entries[s2]);
  std::vector<std::size_t> pending;
  pending.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i != s1 && i != s2) pending.push_back(i);
  }
  // Input order.
  for (std::size_t cursor = 0; cursor < pending.size();) {
    const std::size_t rem = pending.size() - cursor;
    Group* forced = nullptr;
    if (g1.entries.size() + rem <= bounds.min_first) {
      forced = &g1;
    } else if (g2.entries.size() + rem <= bounds.min_second) {
      forced = &g2;
    }
    if (forced != nullptr) {
      for (; cursor < pending.size(); ++cursor) forced->add(entries[pending[cursor]]);
      break;
    }
    const Entry& e = entries[pending[cursor++]];
    if (prefer_first(g1, g2, e.rect)) {
      g1.add(e);
    } else {
      g2.add(e);
    }
  }
  return {std::move(g1.entries), std::move(g2.entries)};
}

SplitOutcome quadratic_split(std::span<const Entry> entries, GroupBounds bounds) {
  check_bounds(entries.size(), bounds, "quadratic_split");
  const std::size_t n = entries.size();
  std::size_t s1 = 0;
  std::size_t s2 = 1;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = area(unite(entries[i].rect, entries[j].rect)) - area(entries[i].rect) -
                       area(entries[j].rect);
      if (d > worst) {
        worst = d;
        s1 = i;
        s2 = j;
      }
    }
  }
  Group g1;
  Group g2;
  g1.add(entries[s1]);
  g2.add(entries[s2]);
  std::vector<std::size_t> pending;
  pending.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i != s1 && i != s2) pending.push_back(i);
  }
  while (!pending.empty()) {
    if (force_remaining(g1, g2, bounds, entries, pending)) break;
    std::size_t pick = 0;
    double best_diff = -1.0;
    for (std::size_t k = 0; k < pending.size(); ++k) {
      const Rect& r = entries[pending[k]].rect;
      const double diff = std::abs(g1.enlargement(r) - g2.enlargement(r));
      if (diff > best_diff) {
        best_diff = diff;
        pick = k;
      }
    }
    const Entry& e = entries[pending[pick]];
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
    if (prefer_first(g1, g2, e.rect)) {
      g1.add(e);
    } else {
      g2.add(e);
    }
  }
  return {std::move(g1.entries), std::move(g2.entries)};
}

namespace {

struct Distribution {
  std::vector<std::size_t> order;
  std::vector<Rect> prefix;  // prefix[k] = MBR of order[0..k]
  std::vector<Rect> suffix;  // suffix[k] = MBR of order[k..n-1]
};

Distribution sorted_distribution(std::span<const Entry> entries, int axis, bool by_upper) {
  const std::size_t n = entries.size();
  Distribution d;
  d.order.resize(n);
  std::iota(d.order.begin(), d.order.end(), std::size_t{0});
  auto key = [&](std::size_t i) {
    const Rect& r = entries[i].rect;
    if (axis == 0) return by_upper ? r.max_x : r.min_x;
    return by_upper ? r.max_y : r.min_y;
  };
  std::stable_sort(d.order.begin(), d.order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  d.prefix.resize(n);
  d.suffix.resize(n);
  d.prefix[0] = entries[d.order[0]].rect;
  for (std::size_t k = 1; k < n; ++k) d.prefix[k] = unite(d.prefix[k - 1], entries[d.order[k]].rect);
  d.suffix[n - 1] = entries[d.order[n - 1]].rect;
  for (std::size_t k = n - 1; k-- > 0;) d.suffix[k] = unite(d.suffix[k + 1], entries[d.order[k]].rect);
  return d;
}

}  // namespace

SplitOutcome rstar_split(std::span<const Entry> entries, GroupBounds bounds) {
  check_bounds(entries.size(), bounds, "rstar_split");
  const std::size_t n = entries.size();
  const std::size_t k_lo = bounds.min_first;
  const std::size_t k_hi = n - bounds.min_second;

  Distribution dists[2][2];
  double margin_sum[2] = {0.0, 0.0};
  for (int axis = 0; axis < 2; ++axis) {
    for (int upper = 0; upper < 2; ++upper) {
      Distribution& d = dists[axis][upper];
      d = sorted_distribution(entries, axis, upper == 1);
      for (std::size_t k = k_lo; k <= k_hi; ++k) {
        margin_sum[axis] += margin(d.prefix[k - 1]) + margin(d.suffix[k]);
      }
    }
  }
  const int axis = margin_sum[1] < margin_sum[0] ? 1 : 0;

  const Distribution* best = nullptr;
  std::size_t best_k = 0;
  double best_overlap = 0.0;
  double best_area = 0.0;
  for (int upper = 0; upper < 2; ++upper) {
    const Distribution& d = dists[axis][upper];
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
      const double ov = intersection_area(d.prefix[k - 1], d.suffix[k]);
      const double ar = area(d.prefix[k - 1]) + area(d.suffix[k]);
      if (best == nullptr || ov < best_overlap || (ov == best_overlap && ar < best_area)) {
        best = &d;
        best_k = k;
        best_overlap = ov;
        best_area = ar;
      }
    }
  }
  SplitOutcome out;
  out.first.reserve(best_k);
  out.second.reserve(n - best_k);
  for (std::size_t i = 0; i < n; ++i) {
    (i < best_k ? out.first : out.second).push_back(entries[best->order[i]]);
  }
  return out;
}

SplitOutcome hilbert_split(std::span<const Entry> entries, double f) {
  if (!(f > 0.0 && f < 1.0)) {
    throw DomainError("hilbert_split: fraction must be in (0, 1), got " + std::to_string(f));
  }
  if (entries.size() < 2) throw DomainError("hilbert_split: need at least 2 entries");
  const std::size_t k = GroupBounds::fraction(entries.size(), f).min_first;
  return {std::vector<Entry>(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(k)),
          std::vector<Entry>(entries.begin() + static_cast<std::ptrdiff_t>(k), entries.end())};
}

std::vector<Entry> rstar_reinsert_set(std::vector<Entry>& entries, double p) {
  const std::size_t n = entries.size();
  if (n == 0) return {};
  const double raw = std::floor(p * static_cast<double>(n) + 1e-9);
  const std::size_t count =
      std::min(n, std::max<std::size_t>(1, raw < 0.0 ? 0 : static_cast<std::size_t>(raw)));
  const Point c = mbr_of(entries).center();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = dist2(entries[i].rect.center(), c);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (d[a] != d[b]) return d[a] > d[b];
    return entries[a].id < entries[b].id;
  });
  std::vector<bool> removed(n, false);
  for (std::size_t i = 0; i < count; ++i) removed[idx[i]] = true;

  std::vector<Entry> out;
  out.reserve(count);
  // Nearest-first: walk the farthest-first selection backwards.
  for (std::size_t i = count; i-- > 0;) out.push_back(entries[idx[i]]);
  std::vector<Entry> kept;
  kept.reserve(n - count);
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) kept.push_back(entries[i]);
  }
  entries = std::move(kept);
  return out;
}

SplitOutcome split_entries(Variant variant, std::span<const Entry> entries, std::size_t min_fill,
                           std::optional<double> fraction) {
  if (variant == Variant::Hilbert) return hilbert_split(entries, fraction.value_or(0.5));
  const GroupBounds bounds = fraction ? GroupBounds::fraction(entries.size(), *fraction)
                                      : GroupBounds::balanced(min_fill);
  switch (variant) {
    case Variant::Linear: return linear_split(entries, bounds);
    case Variant::Quadratic: return quadratic_split(entries, bounds);
    case Variant::RStar: return rstar_split(entries, bounds);
    case Variant::Hilbert: break;
  }
  throw DomainError("unknown variant");
}

}  // namespace rwave
