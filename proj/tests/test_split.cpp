#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "rwave/error.hpp"
#include "rwave/split.hpp"

using namespace rwave;

namespace {

Entry box(double x0, double y0, double x1, double y1, std::uint64_t id) {
  return Entry{Rect{x0, y0, x1, y1}, id, 0};
}

std::vector<Entry> random_entries(std::size_t n, std::mt19937_64& rng, bool points) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> side(0.0, 0.1);
  std::vector<Entry> e(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u(rng), y = u(rng);
    e[i] = points ? box(x, y, x, y, i) : box(x, y, x + side(rng), y + side(rng), i);
  }
  return e;
}

std::vector<std::uint64_t> ids(const SplitOutcome& s) {
  std::vector<std::uint64_t> v;
  for (const Entry& e : s.first) v.push_back(e.id);
  for (const Entry& e : s.second) v.push_back(e.id);
  std::sort(v.begin(), v.end());
  return v;
}

Rect mbr(const std::vector<Entry>& v) {
  Rect r = v.front().rect;
  for (const Entry& e : v) r = unite(r, e.rect);
  return r;
}

}  // namespace

TEST(GroupBounds, Fraction) {
  EXPECT_EQ(GroupBounds::fraction(10, 0.3).min_first, 3u);
  EXPECT_EQ(GroupBounds::fraction(10, 0.3).min_second, 7u);
  EXPECT_EQ(GroupBounds::fraction(51, 0.5).min_first, 26u);
  EXPECT_EQ(GroupBounds::fraction(10, 0.01).min_first, 1u);
  EXPECT_EQ(GroupBounds::fraction(10, 0.99).min_first, 9u);
}

TEST(LinearSplit, TwoClusters) {
  // Far-apart clusters along x; seeds are the extreme boxes.
  const std::vector<Entry> e{box(0.0, 0.0, 0.1, 0.1, 0), box(0.9, 0.0, 1.0, 0.1, 1),
                             box(0.05, 0.05, 0.15, 0.15, 2), box(0.85, 0.05, 0.95, 0.1, 3),
                             box(0.1, 0.0, 0.12, 0.02, 4), box(0.8, 0.0, 0.9, 0.05, 5)};
  const SplitOutcome s = linear_split(e, GroupBounds::balanced(2));
  std::vector<std::uint64_t> a, b;
  for (const Entry& x : s.first) a.push_back(x.id);
  for (const Entry& x : s.second) b.push_back(x.id);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, (std::vector<std::uint64_t>{0, 2, 4}));
  EXPECT_EQ(b, (std::vector<std::uint64_t>{1, 3, 5}));
}

TEST(LinearSplit, ForcedFillWhenMinimumNeedsRemainder) {
  // Everything sits next to the left seed; the right group must still get three.
  std::vector<Entry> e{box(0.0, 0.0, 0.0, 0.0, 0), box(1.0, 1.0, 1.0, 1.0, 1)};
  for (std::uint64_t i = 2; i < 8; ++i) {
    const double v = 0.01 * static_cast<double>(i);
    e.push_back(box(v, v, v, v, i));
  }
  const SplitOutcome s = linear_split(e, GroupBounds::balanced(3));
  EXPECT_GE(s.first.size(), 3u);
  EXPECT_GE(s.second.size(), 3u);
  // Input order: the last two entries are the ones forced across.
  const auto& far = s.first.front().id == 1 ? s.first : s.second;
  EXPECT_EQ(far.size(), 3u);
  EXPECT_EQ(far[1].id, 6u);
  EXPECT_EQ(far[2].id, 7u);
}

TEST(QuadraticSplit, SeedsMaximizeDeadSpace) {
  std::mt19937_64 rng(4);
  for (int round = 0; round < 200; ++round) {
    const std::vector<Entry> e = random_entries(5 + round % 20, rng, round % 2 == 0);
    const SplitOutcome s = quadratic_split(e, GroupBounds::balanced(2));
    double best = -1e300;
    for (std::size_t i = 0; i < e.size(); ++i)
      for (std::size_t j = i + 1; j < e.size(); ++j)
        best = std::max(best, area(unite(e[i].rect, e[j].rect)) - area(e[i].rect) - area(e[j].rect));
    const Rect& a = s.first.front().rect;
    const Rect& b = s.second.front().rect;
    EXPECT_DOUBLE_EQ(area(unite(a, b)) - area(a) - area(b), best);
  }
}

TEST(QuadraticSplit, HandExample) {
  const std::vector<Entry> e{box(0.0, 0.0, 0.2, 0.2, 0), box(0.8, 0.8, 1.0, 1.0, 1),
                             box(0.1, 0.1, 0.3, 0.3, 2), box(0.7, 0.7, 0.9, 0.9, 3)};
  const SplitOutcome s = quadratic_split(e, GroupBounds::balanced(1));
  ASSERT_EQ(s.first.size(), 2u);
  EXPECT_EQ(s.first[0].id, 0u);
  EXPECT_EQ(s.first[1].id, 2u);
  EXPECT_EQ(s.second[1].id, 3u);
}

// Independent R* oracle: every sorted distribution along both axes, MBRs
// recomputed from scratch for each candidate.
TEST(RStarSplit, MatchesExhaustiveDistributions) {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 300; ++round) {
    const std::size_t n = 4 + round % 30;
    const std::size_t m = 1 + round % (n / 2);
    const std::vector<Entry> e = random_entries(n, rng, round % 3 == 0);
    const SplitOutcome s = rstar_split(e, GroupBounds::balanced(m));

    double margins[2] = {0, 0};
    struct Cand {
      double overlap, area;
    };
    std::vector<Cand> cands[2];
    for (int axis = 0; axis < 2; ++axis) {
      for (int upper = 0; upper < 2; ++upper) {
        std::vector<Entry> sorted = e;
        std::stable_sort(sorted.begin(), sorted.end(), [&](const Entry& a, const Entry& b) {
          const double ka = axis == 0 ? (upper ? a.rect.max_x : a.rect.min_x) : (upper ? a.rect.max_y : a.rect.min_y);
          const double kb = axis == 0 ? (upper ? b.rect.max_x : b.rect.min_x) : (upper ? b.rect.max_y : b.rect.min_y);
          return ka < kb;
        });
        for (std::size_t k = m; k <= n - m; ++k) {
          const std::vector<Entry> g1(sorted.begin(), sorted.begin() + static_cast<long>(k));
          const std::vector<Entry> g2(sorted.begin() + static_cast<long>(k), sorted.end());
          margins[axis] += margin(mbr(g1)) + margin(mbr(g2));
          cands[axis].push_back({intersection_area(mbr(g1), mbr(g2)), area(mbr(g1)) + area(mbr(g2))});
        }
      }
    }
    const int axis = margins[1] < margins[0] ? 1 : 0;
    Cand best = cands[axis].front();
    for (const Cand& c : cands[axis])
      if (c.overlap < best.overlap || (c.overlap == best.overlap && c.area < best.area)) best = c;

    EXPECT_EQ(intersection_area(mbr(s.first), mbr(s.second)), best.overlap);
    EXPECT_EQ(area(mbr(s.first)) + area(mbr(s.second)), best.area);
    EXPECT_GE(s.first.size(), m);
    EXPECT_GE(s.second.size(), m);
  }
}

TEST(HilbertSplit, PrefixAndFraction) {
  std::mt19937_64 rng(1);
  const std::vector<Entry> e = random_entries(11, rng, true);
  const SplitOutcome s = hilbert_split(e, 0.5);
  ASSERT_EQ(s.first.size(), 6u);
  EXPECT_EQ(s.first[5].id, 5u);
  EXPECT_EQ(s.second[0].id, 6u);
  EXPECT_EQ(hilbert_split(e, 0.3).first.size(), 4u);
  EXPECT_THROW(hilbert_split(e, 1.0), DomainError);
  EXPECT_THROW(hilbert_split(e, 0.0), DomainError);
}

TEST(SplitEntries, RejectsImpossibleBounds) {
  std::mt19937_64 rng(1);
  const std::vector<Entry> e = random_entries(5, rng, false);
  EXPECT_THROW(linear_split(e, GroupBounds::balanced(3)), DomainError);
  EXPECT_THROW(quadratic_split(std::span<const Entry>(e.data(), 1), GroupBounds::balanced(1)), DomainError);
  EXPECT_THROW(rstar_split(e, GroupBounds{0, 2}), DomainError);
}

TEST(SplitEntries, PropertiesAcrossVariants) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> dup(0, 4);
  for (Variant v : {Variant::Linear, Variant::Quadratic, Variant::RStar, Variant::Hilbert}) {
    for (int round = 0; round < 400; ++round) {
      const std::size_t n = 3 + round % 60;
      std::vector<Entry> e = random_entries(n, rng, round % 2 == 0);
      // Duplicated rectangles stress the tie-breaking paths.
      if (dup(rng) == 0)
        for (std::size_t i = 1; i < n; i += 2) e[i].rect = e[i - 1].rect;
      const std::size_t min_fill = std::max<std::size_t>(1, (n - 1) / 2 - round % 3);
      const SplitOutcome s = split_entries(v, e, std::min(min_fill, n / 2));
      std::vector<std::uint64_t> want(n);
      for (std::size_t i = 0; i < n; ++i) want[i] = i;
      ASSERT_EQ(ids(s), want) << to_string(v);
      if (v != Variant::Hilbert) {
        ASSERT_GE(s.first.size(), std::min(min_fill, n / 2));
        ASSERT_GE(s.second.size(), std::min(min_fill, n / 2));
      }
      const double f = 0.1 + 0.8 * static_cast<double>(round % 9) / 8.0;
      const SplitOutcome u = split_entries(v, e, 1, f);
      ASSERT_EQ(u.first.size(), GroupBounds::fraction(n, f).min_first) << to_string(v) << ' ' << f;
      ASSERT_EQ(ids(u), want);
    }
  }
}

TEST(SplitOutcome, SmallGroup) {
  SplitOutcome s{{box(0, 0, 1, 1, 0)}, {box(0, 0, 0.5, 0.5, 1), box(0, 0, 0.1, 0.1, 2)}};
  EXPECT_FALSE(s.first_is_small());
  SplitOutcome t{{box(0, 0, 0, 0, 0)}, {box(1, 1, 1, 1, 1), box(1, 1, 1, 1, 2)}};
  EXPECT_TRUE(t.first_is_small());  // equal areas, fewer entries
}

TEST(Reinsert, FarthestFromCenterNearestFirst) {
  std::mt19937_64 rng(2);
  for (int round = 0; round < 100; ++round) {
    std::vector<Entry> e = random_entries(20 + round % 30, rng, true);
    const std::vector<Entry> orig = e;
    const std::vector<Entry> out = rstar_reinsert_set(e, 0.3);
    const std::size_t want = std::max<std::size_t>(1, orig.size() * 3 / 10);
    ASSERT_EQ(out.size(), want);
    ASSERT_EQ(e.size() + out.size(), orig.size());
    const Point c = mbr(orig).center();
    double min_removed = 1e300;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double d = dist2(out[i].rect.center(), c);
      if (i > 0) EXPECT_GE(d, dist2(out[i - 1].rect.center(), c));
      min_removed = std::min(min_removed, d);
    }
    for (const Entry& k : e) EXPECT_LE(dist2(k.rect.center(), c), min_removed);
    // Kept entries preserve their relative order.
    EXPECT_TRUE(std::is_sorted(e.begin(), e.end(), [](const Entry& a, const Entry& b) { return a.id < b.id; }));
  }
}
