#include "rwave/rtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <tuple>

#include "rwave/error.hpp"
#include "rwave/kernels.hpp"

namespace rwave {

void TreeConfig::validate() const {
  if (Capacity::entries_for_page(page_size_bytes) < 4) {
    throw ConfigError("page_size", "page of " + std::to_string(page_size_bytes) +
                                       " bytes holds fewer than 4 entries");
  }
  if (buffer_pages < 4) throw ConfigError("buffer_pages", "need at least 4 leaf frames");
  if (hilbert_order < 1 || hilbert_order > 31) {
    throw ConfigError("hilbert_order", "must be in [1, 31]");
  }
  if (!(reinsert_fraction > 0.0 && reinsert_fraction < 1.0)) {
    throw ConfigError("reinsert_fraction", "must be in (0, 1)");
  }
  if (reinsertion && variant != Variant::RStar) {
    throw ConfigError("reinsertion", "only the rstar variant reinserts");
  }
  if (deferred && variant != Variant::Hilbert) {
    throw ConfigError("deferred", "only the hilbert variant defers splits");
  }
  remedy.validate();
}

std::size_t default_min_fill(Variant variant, std::size_t max_entries) noexcept {
  if (variant == Variant::RStar) return (4 * max_entries + 9) / 10;
  return std::max<std::size_t>(1, (max_entries + 1) / 2 - 1);
}

std::size_t choose_subtree(Variant variant, const Node& node, const Entry& e) {
  if (node.is_leaf() || node.entries.empty()) {
    throw CorruptionError("choose_subtree on empty or leaf page " + std::to_string(node.page_id));
  }
  const auto& ch = node.entries;
  const std::size_t n = ch.size();
  if (variant == Variant::Hilbert) {
    for (std::size_t i = 0; i < n; ++i) {
      if (ch[i].hilbert >= e.hilbert) return i;
    }
    return n - 1;
  }

  thread_local std::vector<double> enl;
  thread_local std::vector<double> ar;
  enl.resize(n);
  ar.resize(n);
  simd::enlargements(ch, e.rect, enl.data(), ar.data());

  auto guttman_better = [&](std::size_t a, std::size_t b) {
    return std::tie(enl[a], ar[a], ch[a].id) < std::tie(enl[b], ar[b], ch[b].id);
  };

  if (variant == Variant::RStar && node.level == 1) {
    // A child that needs no enlargement adds no overlap, which is the minimum.
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < n; ++i) {
      if (enl[i] == 0.0 && (!best || std::tie(ar[i], ch[i].id) < std::tie(ar[*best], ch[*best].id))) {
        best = i;
      }
    }
    if (best) return *best;
    std::size_t b = 0;
    double b_ov = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const Rect grown = unite(ch[i].rect, e.rect);
      const double ov = simd::overlap_sum(ch, grown) - simd::overlap_sum(ch, ch[i].rect);
      if (ov < b_ov || (ov == b_ov && guttman_better(i, b))) {
        b = i;
        b_ov = ov;
      }
    }
    return b;
  }

  std::size_t b = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (guttman_better(i, b)) b = i;
  }
  return b;
}

namespace {

std::unique_ptr<PageStore> make_store(const TreeConfig& c) {
  if (c.page_file.empty()) return std::make_unique<MemoryPageStore>(c.page_size_bytes);
  return std::make_unique<FilePageStore>(c.page_file, c.page_size_bytes);
}

const TreeConfig& checked(const TreeConfig& c) {
  c.validate();
  return c;
}

bool by_hilbert(const Entry& a, const Entry& b) noexcept { return a.hilbert < b.hilbert; }

}  // namespace

RTree::RTree(TreeConfig config)
    : config_(checked(config)),
      cap_(Capacity::from_page_size(
          config_.page_size_bytes,
          default_min_fill(config_.variant, Capacity::entries_for_page(config_.page_size_bytes)))),
      order_(config_.hilbert_order),
      pool_(PoolConfig{config_.buffer_pages, config_.page_size_bytes}, make_store(config_),
            NodeCodec(config_.page_size_bytes, order_)),
      rng_(config_.remedy.rng_seed) {}

Entry RTree::summarize(Node& n) noexcept {
  n.lhv = n.max_hilbert();
  return Entry{n.mbr(), n.page_id, n.lhv};
}

void RTree::place(Node& node, const Entry& e, bool overflow_page) const {
  std::vector<Entry>& v = overflow_page ? node.overflow : node.entries;
  if (config_.variant == Variant::Hilbert) {
    v.insert(std::upper_bound(v.begin(), v.end(), e, by_hilbert), e);
  } else {
    v.push_back(e);
  }
}

std::vector<Entry> RTree::merged_live(const Node& leaf) const {
  std::vector<Entry> all;
  all.reserve(leaf.live_count() + 1);
  if (config_.variant == Variant::Hilbert) {
    std::merge(leaf.entries.begin(), leaf.entries.end(), leaf.overflow.begin(), leaf.overflow.end(),
               std::back_inserter(all), by_hilbert);
  } else {
    all = leaf.entries;
    all.insert(all.end(), leaf.overflow.begin(), leaf.overflow.end());
  }
  return all;
}

std::vector<PageId> RTree::descend(const Entry& e, int level) const {
  std::vector<PageId> path{root_};
  for (int lvl = height_ - 1; lvl > level; --lvl) {
    const Node& n = pool_.index_node(path.back());
    path.push_back(n.entries[choose_subtree(config_.variant, n, e)].id);
  }
  return path;
}

std::vector<PageId> RTree::path_to(PageId id) const {
  std::vector<PageId> path;
  for (PageId p = id; p != kNoPage; p = parent_[p]) path.push_back(p);
  std::reverse(path.begin(), path.end());
  if (path.front() != root_) throw CorruptionError("page " + std::to_string(id) + " is detached");
  return path;
}

void RTree::set_parent(PageId child, PageId parent) {
  if (child >= parent_.size()) parent_.resize(child + 1, kNoPage);
  parent_[child] = parent;
}

void RTree::note_leaf(const Node& leaf) {
  const PageId id = leaf.page_id;
  if (id >= leaf_live_.size()) {
    leaf_live_.resize(id + 1, 0);
    leaf_primary_.resize(id + 1, 0);
  }
  leaf_live_[id] = static_cast<std::uint32_t>(leaf.live_count());
  leaf_primary_[id] = static_cast<std::uint32_t>(leaf.entries.size());
}

Entry RTree::create_node(int level, std::vector<Entry> entries, Lineage lineage) {
  Node n;
  n.page_id = pool_.allocate_page_id();
  n.level = level;
  n.entries = std::move(entries);
  n.creation_seq = next_seq_++;
  n.lineage = lineage;
  const Entry s = summarize(n);
  set_parent(n.page_id, kNoPage);
  ++counters_.nodes_created;
  if (level > 0) {
    for (const Entry& c : n.entries) set_parent(c.id, n.page_id);
    pool_.install(std::move(n), true);
  } else {
    note_leaf(n);
    leaves_by_creation_.push_back(n.page_id);
    pool_.install(std::move(n), false);
  }
  return s;
}

bool RTree::record_split(const Group& a, const Group& b, int level, Lineage victim, PageId parent,
                         bool elective) {
  const double aa = area(a.rect);
  const double ab = area(b.rect);
  const bool a_small = std::tie(aa, a.count, a.id) < std::tie(ab, b.count, b.id);
  const Group& s = a_small ? a : b;
  const Group& l = a_small ? b : a;
  if (events_ != nullptr) {
    events_->push_back(SplitEvent{batch_, level, parent, s.rect, l.rect, s.count, l.count, victim,
                                  elective});
  }
  return a_small;
}

std::vector<SplitEvent> RTree::insert(Point p) {
  if (!in_unit_square(p)) {
    throw DomainError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                      ") outside the unit square");
  }
  std::vector<SplitEvent> events;
  struct Reset {
    std::vector<SplitEvent>*& slot;
    ~Reset() { slot = nullptr; }
  } reset{events_};
  events_ = &events;

  if (root_ == kNoPage) {
    root_ = create_node(0, {}, Lineage::BulkLoaded).id;
    height_ = 1;
  }
  const Entry e{Rect::of(p), next_id_, hilbert_index(p, order_)};
  reinserted_levels_ = 0;
  pending_.clear();
  pending_.push_back({e, 0});
  drain_pending();
  ++next_id_;
  ++size_;

  if (config_.remedy.kind == RemedyKind::RegularElective) {
    ++res_.insert_counter;
    if (res_.insert_counter % config_.remedy.period == 0) res_tick();
  }
  return events;
}

void RTree::drain_pending() {
  while (!pending_.empty()) {
    const Pending item = pending_.front();
    pending_.pop_front();
    insert_at(item);
  }
}

void RTree::insert_at(const Pending& item) {
  const std::vector<PageId> path = descend(item.entry, item.level);
  const std::size_t i = path.size() - 1;
  const PageId id = path.back();
  const PageId parent = i == 0 ? kNoPage : path[i - 1];
  const std::size_t B = cap_.max_entries;

  if (item.level == 0) {
    Node& leaf = pool_.fetch_mut(id);
    PinGuard guard(pool_, id);
    Change ch;
    if (config_.remedy.kind == RemedyKind::RegularElective) {
      ch = res_place(leaf, item.entry, parent);
    } else {
      place(leaf, item.entry);
      ch = leaf.entries.size() > B ? treat_overflow(leaf, path, i) : refresh({summarize(leaf)});
    }
    note_leaf(leaf);
    apply_upward(path, i, std::move(ch));
    return;
  }
  Node& node = pool_.index_node(id);
  place(node, item.entry);
  set_parent(item.entry.id, id);
  Change ch = node.entries.size() > B ? treat_overflow(node, path, i) : refresh({summarize(node)});
  apply_upward(path, i, std::move(ch));
}

RTree::Change RTree::res_place(Node& leaf, const Entry& e, PageId parent) {
  const std::size_t B = cap_.max_entries;
  if (leaf.entries.size() < B) {
    place(leaf, e);
  } else if (!leaf.has_overflow()) {
    pool_.attach_overflow(leaf.page_id);
    place(leaf, e, true);
  } else if (leaf.overflow.size() < B) {
    place(leaf, e, true);
  } else {
    std::vector<Entry> all = merged_live(leaf);
    if (config_.variant == Variant::Hilbert) {
      all.insert(std::upper_bound(all.begin(), all.end(), e, by_hilbert), e);
    } else {
      all.push_back(e);
    }
    pool_.detach_overflow(leaf.page_id);
    return multi_split(leaf, std::move(all), parent, false);
  }
  return refresh({summarize(leaf)});
}

RTree::Change RTree::treat_overflow(Node& node, const std::vector<PageId>& path, std::size_t i) {
  const bool is_root = i == 0;
  const std::uint64_t bit = std::uint64_t{1} << node.level;
  if (config_.reinsertion && !is_root && (reinserted_levels_ & bit) == 0) {
    reinserted_levels_ |= bit;
    std::vector<Entry> out = rstar_reinsert_set(node.entries, config_.reinsert_fraction);
    counters_.reinserted_entries += out.size();
    for (const Entry& e : out) pending_.push_back({e, node.level});
    if (node.is_leaf()) note_leaf(node);
    return refresh({summarize(node)});
  }
  if (config_.deferred && !is_root) {
    Node& parent = pool_.index_node(path[i - 1]);
    if (parent.entries.size() >= 2) return deferred_split(node, parent);
  }
  return split_node(node, is_root ? kNoPage : path[i - 1]);
}

RTree::Change RTree::split_node(Node& node, PageId parent) {
  std::optional<double> fraction;
  if (node.is_leaf()) {
    if (config_.remedy.kind == RemedyKind::UnequalFixed) fraction = config_.remedy.fraction;
    if (config_.remedy.kind == RemedyKind::UnequalRandom) fraction = urs_fraction(config_.remedy, rng_);
  }
  SplitOutcome o = split_entries(config_.variant, node.entries, cap_.min_fill, fraction);
  const PageId new_id = pool_.next_page_id();
  const bool first_small =
      record_split({mbr_of(o.first), o.first.size(), node.page_id},
                   {mbr_of(o.second), o.second.size(), new_id}, node.level, node.lineage, parent,
                   false);
  node.entries = std::move(o.first);
  node.lineage = first_small ? Lineage::SmallChild : Lineage::LargeChild;
  const Entry added = create_node(node.level, std::move(o.second),
                                  first_small ? Lineage::LargeChild : Lineage::SmallChild);
  if (node.is_leaf()) note_leaf(node);
  return Change{{summarize(node)}, node.page_id, {added}};
}

RTree::Change RTree::deferred_split(Node& node, Node& parent) {
  const std::size_t B = cap_.max_entries;
  auto& pe = parent.entries;
  std::size_t pos = 0;
  while (pos < pe.size() && pe[pos].id != node.page_id) ++pos;
  if (pos == pe.size()) throw CorruptionError("page " + std::to_string(node.page_id) + " missing from parent");
  const std::size_t sib_pos = pos + 1 < pe.size() ? pos + 1 : pos - 1;
  const PageId sib_id = pe[sib_pos].id;
  ++counters_.sibling_scans;

  Node* sib = nullptr;
  std::optional<PinGuard> guard;
  if (node.is_leaf()) {
    sib = &pool_.fetch_mut(sib_id);
    guard.emplace(pool_, sib_id);
  } else {
    sib = &pool_.index_node(sib_id);
  }
  Node& left = sib_pos > pos ? node : *sib;
  Node& right = sib_pos > pos ? *sib : node;

  std::vector<Entry> all = left.entries;
  all.insert(all.end(), right.entries.begin(), right.entries.end());
  const std::size_t n = all.size();
  auto take = [&](std::size_t from, std::size_t to) {
    return std::vector<Entry>(all.begin() + static_cast<std::ptrdiff_t>(from),
                              all.begin() + static_cast<std::ptrdiff_t>(to));
  };
  auto reparent = [&](Node& x) {
    if (!x.is_leaf()) {
      for (const Entry& c : x.entries) set_parent(c.id, x.page_id);
    } else {
      note_leaf(x);
    }
  };

  if (sib->entries.size() < B) {
    const std::size_t k = (n + 1) / 2;
    left.entries = take(0, k);
    right.entries = take(k, n);
    reparent(left);
    reparent(right);
    ++counters_.redistributions;
    return refresh({summarize(left), summarize(right)});
  }

  const std::size_t a = (n + 2) / 3;
  const std::size_t b = (n - a + 1) / 2;
  std::vector<Entry> third = take(a + b, n);
  left.entries = take(0, a);
  right.entries = take(a, a + b);
  const PageId new_id = pool_.next_page_id();
  const bool right_small =
      record_split({mbr_of(right.entries), right.entries.size(), right.page_id},
                   {mbr_of(third), third.size(), new_id}, node.level, node.lineage,
                   parent.page_id, false);
  right.lineage = right_small ? Lineage::SmallChild : Lineage::LargeChild;
  reparent(left);
  reparent(right);
  const Entry added = create_node(node.level, std::move(third),
                                  right_small ? Lineage::LargeChild : Lineage::SmallChild);
  return Change{{summarize(left), summarize(right)}, right.page_id, {added}};
}

RTree::Change RTree::multi_split(Node& leaf, std::vector<Entry> all, PageId parent, bool elective) {
  const std::size_t B = cap_.max_entries;
  std::vector<std::vector<Entry>> groups;
  std::vector<Lineage> lineage;
  groups.push_back(std::move(all));
  lineage.push_back(leaf.lineage);
  bool first = true;
  for (std::size_t k = 0; k < groups.size();) {
    if (groups[k].size() <= B && !(elective && first)) {
      ++k;
      continue;
    }
    const std::size_t mf = std::min(cap_.min_fill, groups[k].size() / 2);
    SplitOutcome o = split_entries(config_.variant, groups[k], mf);
    const bool first_small =
        record_split({mbr_of(o.first), o.first.size(), k}, {mbr_of(o.second), o.second.size(), k + 1},
                     0, lineage[k], parent, elective && first);
    first = false;
    groups[k] = std::move(o.first);
    groups.insert(groups.begin() + static_cast<std::ptrdiff_t>(k) + 1, std::move(o.second));
    lineage[k] = first_small ? Lineage::SmallChild : Lineage::LargeChild;
    lineage.insert(lineage.begin() + static_cast<std::ptrdiff_t>(k) + 1,
                   first_small ? Lineage::LargeChild : Lineage::SmallChild);
  }
  leaf.entries = std::move(groups[0]);
  leaf.lineage = lineage[0];
  note_leaf(leaf);
  Change ch{{summarize(leaf)}, leaf.page_id, {}};
  for (std::size_t g = 1; g < groups.size(); ++g) {
    ch.added.push_back(create_node(0, std::move(groups[g]), lineage[g]));
  }
  return ch;
}

void RTree::apply_upward(const std::vector<PageId>& path, std::size_t i, Change ch) {
  const std::size_t B = cap_.max_entries;
  while (true) {
    if (i == 0) {
      if (!ch.added.empty()) grow_root(std::move(ch), height_);
      return;
    }
    Node& parent = pool_.index_node(path[i - 1]);
    const Rect before = parent.mbr();
    const std::uint64_t lhv_before = parent.lhv;
    auto& pe = parent.entries;
    for (const Entry& u : ch.updated) {
      auto it = std::find_if(pe.begin(), pe.end(), [&](const Entry& x) { return x.id == u.id; });
      if (it == pe.end()) {
        throw CorruptionError("page " + std::to_string(u.id) + " missing from parent " +
                              std::to_string(parent.page_id));
      }
      it->rect = u.rect;
      it->hilbert = u.hilbert;
    }
    if (!ch.added.empty()) {
      auto it = std::find_if(pe.begin(), pe.end(),
                             [&](const Entry& x) { return x.id == ch.insert_after; });
      if (it == pe.end()) throw CorruptionError("split sibling missing from parent");
      pe.insert(it + 1, ch.added.begin(), ch.added.end());
      for (const Entry& a : ch.added) set_parent(a.id, parent.page_id);
    }
    if (pe.size() > B) {
      ch = treat_overflow(parent, path, i - 1);
    } else {
      const bool grew = !ch.added.empty();
      Entry s = summarize(parent);
      if (!grew && s.rect == before && s.hilbert == lhv_before) return;
      ch = refresh({s});
    }
    --i;
  }
}

void RTree::grow_root(Change ch, int level) {
  std::vector<Entry> entries = std::move(ch.updated);
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const Entry& x) { return x.id == ch.insert_after; });
  entries.insert(it == entries.end() ? entries.end() : it + 1, ch.added.begin(), ch.added.end());
  const Entry root = create_node(level, std::move(entries), Lineage::BulkLoaded);
  if (events_ != nullptr) {
    for (SplitEvent& ev : *events_) {
      if (ev.parent_page == kNoPage && ev.level == level - 1) ev.parent_page = root.id;
    }
  }
  root_ = root.id;
  height_ = level + 1;
}

void RTree::res_tick() {
  const std::size_t n = leaves_by_creation_.size();
  const std::size_t threshold = 2 * cap_.min_fill;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t idx = (res_.cursor + t) % n;
    const PageId id = leaves_by_creation_[idx];
    if (leaf_live_[id] >= threshold) {
      res_.cursor = idx + 1;
      elective_split(id);
      return;
    }
  }
}

void RTree::elective_split(PageId id) {
  const std::vector<PageId> path = path_to(id);
  Node& leaf = pool_.fetch_mut(id);
  PinGuard guard(pool_, id);
  std::vector<Entry> all = merged_live(leaf);
  pool_.detach_overflow(id);
  Change ch = multi_split(leaf, std::move(all), path.size() > 1 ? path[path.size() - 2] : kNoPage,
                          true);
  ++counters_.elective_splits;
  ++res_.elective_splits;
  reinserted_levels_ = 0;
  apply_upward(path, path.size() - 1, std::move(ch));
  drain_pending();
}

const Node& RTree::leaf_view(PageId id, Access access, Node& scratch) {
  if (access == Access::Counted) return pool_.fetch(id);
  scratch = pool_.read_uncounted(id);
  return scratch;
}

QueryResult RTree::range_query(const Rect& q, Access access) {
  QueryResult r;
  if (root_ == kNoPage) return r;
  const std::uint64_t fetches_before = pool_.fetch_count();
  std::vector<std::pair<PageId, int>> stack{{root_, height_ - 1}};
  std::vector<std::uint32_t> hits;
  Node scratch;
  while (!stack.empty()) {
    const auto [id, level] = stack.back();
    stack.pop_back();
    ++r.pages_touched;
    const Node& n = level > 0 ? pool_.index_node(id) : leaf_view(id, access, scratch);
    hits.resize(std::max(n.entries.size(), n.overflow.size()));
    std::size_t k = simd::select_intersecting(n.entries, q, hits.data());
    if (level > 0) {
      for (std::size_t j = k; j-- > 0;) stack.emplace_back(n.entries[hits[j]].id, level - 1);
      continue;
    }
    for (std::size_t j = 0; j < k; ++j) r.ids.push_back(n.entries[hits[j]].id);
    k = simd::select_intersecting(n.overflow, q, hits.data());
    for (std::size_t j = 0; j < k; ++j) r.ids.push_back(n.overflow[hits[j]].id);
  }
  r.fetches = static_cast<std::size_t>(pool_.fetch_count() - fetches_before);
  return r;
}

std::vector<Neighbor> RTree::nearest(Point p, std::size_t k, Access access) {
  if (k > size_) {
    throw DomainError("knn: k = " + std::to_string(k) + " exceeds tree size " + std::to_string(size_));
  }
  std::vector<Neighbor> out;
  if (k == 0) return out;
  struct Item {
    double d;
    int kind;  // 0 node, 1 point
    std::uint64_t id;
    int level;
    Point pt;
  };
  auto later = [](const Item& a, const Item& b) {
    return std::tie(a.d, a.kind, a.id) > std::tie(b.d, b.kind, b.id);
  };
  std::priority_queue<Item, std::vector<Item>, decltype(later)> pq(later);
  pq.push({0.0, 0, root_, height_ - 1, {}});
  std::vector<double> d;
  Node scratch;
  while (!pq.empty() && out.size() < k) {
    const Item it = pq.top();
    pq.pop();
    if (it.kind == 1) {
      out.push_back({it.id, it.pt, it.d});
      continue;
    }
    if (it.level > 0) {
      const Node& n = pool_.index_node(it.id);
      d.resize(n.entries.size());
      simd::min_dist2(n.entries, p, d.data());
      for (std::size_t j = 0; j < n.entries.size(); ++j) {
        pq.push({d[j], 0, n.entries[j].id, it.level - 1, {}});
      }
      continue;
    }
    const Node& leaf = leaf_view(it.id, access, scratch);
    for (const auto* v : {&leaf.entries, &leaf.overflow}) {
      for (const Entry& e : *v) {
        const Point q{e.rect.min_x, e.rect.min_y};
        pq.push({dist2(q, p), 1, e.id, 0, q});
      }
    }
  }
  return out;
}

std::vector<std::uint64_t> RTree::knn_query(Point p, std::size_t k, Access access) {
  std::vector<std::uint64_t> ids;
  for (const Neighbor& n : nearest(p, k, access)) ids.push_back(n.id);
  return ids;
}

TreeStats RTree::stats() const {
  TreeStats s;
  s.leaf_count = leaves_by_creation_.size();
  s.height = height_;
  s.points = size_;
  if (s.leaf_count == 0) return s;
  double sum = 0.0;
  for (PageId id : leaves_by_creation_) sum += static_cast<double>(leaf_primary_[id]);
  s.avg_leaf_utilization =
      sum / (static_cast<double>(s.leaf_count) * static_cast<double>(cap_.max_entries));
  return s;
}

std::vector<PageId> RTree::leaves_in_order() const {
  std::vector<PageId> out;
  if (root_ == kNoPage) return out;
  std::vector<std::pair<PageId, int>> stack{{root_, height_ - 1}};
  while (!stack.empty()) {
    const auto [id, level] = stack.back();
    stack.pop_back();
    if (level == 0) {
      out.push_back(id);
      continue;
    }
    const Node& n = pool_.index_node(id);
    for (auto it = n.entries.rbegin(); it != n.entries.rend(); ++it) stack.emplace_back(it->id, level - 1);
  }
  return out;
}

Node RTree::read_node(PageId id) const {
  if (pool_.is_fixed(id)) return pool_.index_node(id);
  return pool_.read_uncounted(id);
}

AuditReport RTree::audit() const {
  AuditReport rep;
  auto fail = [&](const std::string& msg) {
    if (rep.failures.size() < 64) rep.failures.push_back(msg);
  };
  if (root_ == kNoPage) {
    if (size_ != 0) fail("completeness: empty tree reports " + std::to_string(size_) + " points");
    return rep;
  }
  const std::size_t B = cap_.max_entries;
  const bool hilbert = config_.variant == Variant::Hilbert;
  const bool res = config_.remedy.kind == RemedyKind::RegularElective;
  const bool unequal_leaves = config_.remedy.kind == RemedyKind::UnequalFixed ||
                              config_.remedy.kind == RemedyKind::UnequalRandom;
  std::vector<std::uint64_t> ids;
  ids.reserve(size_);
  std::size_t leaves = 0;
  std::uint64_t last_h = 0;

  struct Item {
    PageId id;
    int level;
    PageId parent;
    Entry parent_entry;
  };
  std::vector<Item> stack{{root_, height_ - 1, kNoPage, {}}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const std::string pg = "page " + std::to_string(it.id);
    Node n;
    try {
      if (it.level > 0 && !pool_.is_fixed(it.id)) fail("buffer: index " + pg + " is not fixed");
      n = read_node(it.id);
    } catch (const std::exception& ex) {
      fail("store: " + pg + " unreadable: " + ex.what());
      continue;
    }
    if (n.level != it.level) {
      fail("balance: " + pg + " at level " + std::to_string(n.level) + ", expected " +
           std::to_string(it.level));
      continue;
    }
    const PageId recorded = it.id < parent_.size() ? parent_[it.id] : kNoPage;
    if (recorded != it.parent) fail("parent: " + pg + " has stale parent link");
    if (n.entries.size() > B) fail("occupancy: " + pg + " holds " + std::to_string(n.entries.size()));
    if (!n.overflow.empty() && !res) fail("occupancy: " + pg + " has an overflow page");
    if (n.overflow.size() > B) fail("occupancy: overflow of " + pg + " exceeds B");
    const bool min_applies = it.parent != kNoPage && !(n.is_leaf() && unequal_leaves);
    if (min_applies && n.live_count() < cap_.min_fill) {
      fail("occupancy: " + pg + " holds " + std::to_string(n.live_count()) + " < min_fill");
    }
    if (it.parent != kNoPage) {
      const Rect& pr = it.parent_entry.rect;
      for (const auto* v : {&n.entries, &n.overflow}) {
        for (const Entry& e : *v) {
          if (!pr.contains(e.rect)) {
            fail("containment: entry " + std::to_string(e.id) + " of " + pg +
                 " lies outside its parent rect");
            break;
          }
        }
      }
      if (!(n.mbr() == pr)) fail("containment: parent rect of " + pg + " is not its MBR");
      if (hilbert && it.parent_entry.hilbert != n.max_hilbert()) {
        fail("hilbert: parent lhv of " + pg + " is stale");
      }
    }
    if (hilbert) {
      for (const auto* v : {&n.entries, &n.overflow}) {
        if (!std::is_sorted(v->begin(), v->end(), by_hilbert)) fail("hilbert: " + pg + " out of order");
      }
    }
    if (n.is_leaf()) {
      ++leaves;
      if (it.id >= leaf_live_.size() || leaf_live_[it.id] != n.live_count() ||
          leaf_primary_[it.id] != n.entries.size()) {
        fail("bookkeeping: leaf counts of " + pg + " are stale");
      }
      const std::vector<Entry> live = merged_live(n);
      for (const Entry& e : live) {
        if (e.rect.min_x != e.rect.max_x || e.rect.min_y != e.rect.max_y) {
          fail("leaf: entry " + std::to_string(e.id) + " of " + pg + " is not a point");
        }
        if (hilbert) {
          if (e.hilbert < last_h) fail("hilbert: leaf order decreases at " + pg);
          last_h = e.hilbert;
        }
        ids.push_back(e.id);
      }
      continue;
    }
    for (auto e = n.entries.rbegin(); e != n.entries.rend(); ++e) {
      stack.push_back({e->id, it.level - 1, it.id, *e});
    }
  }

  if (leaves != leaves_by_creation_.size()) {
    fail("bookkeeping: " + std::to_string(leaves) + " leaves reachable, " +
         std::to_string(leaves_by_creation_.size()) + " recorded");
  }
  std::sort(ids.begin(), ids.end());
  bool complete = ids.size() == size_;
  for (std::size_t i = 0; complete && i < ids.size(); ++i) complete = ids[i] == i;
  if (!complete) {
    fail("completeness: " + std::to_string(ids.size()) + " reachable points, expected ids 0.." +
         std::to_string(size_) + " exactly once");
  }
  if (pool_.used_frames() > pool_.config().capacity_pages) fail("buffer: frames over capacity");
  return rep;
}

}  // namespace rwave
