#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rwave/buffer_pool.hpp"
#include "rwave/bulkload.hpp"
#include "rwave/geometry.hpp"
#include "rwave/node.hpp"
#include "rwave/remedies.hpp"
#include "rwave/split.hpp"

namespace rwave {

struct TreeConfig {
  Variant variant = Variant::Hilbert;
  bool reinsertion = false;  // R* forced reinsertion
  bool deferred = false;     // Hilbert 2-to-3 split
  double reinsert_fraction = 0.3;
  std::size_t page_size_bytes = 16384;
  std::size_t buffer_pages = 1000;
  int hilbert_order = HilbertOrder::kDefault;
  RemedyConfig remedy;
  std::filesystem::path page_file;  // empty: in-memory page store

  void validate() const;
};

/// ceil(0.4 B) for R*, ceil(B / 2) - 1 otherwise.
std::size_t default_min_fill(Variant variant, std::size_t max_entries) noexcept;

/// Index of the child of `node` that receives `e`.
///   Linear, Quadratic: least area enlargement, then least area, then lowest page id.
///   R*: above leaves as Guttman; at level 1, least overlap enlargement first.
///   Hilbert: first child whose lhv >= e.hilbert, else the last child.
/// Throws CorruptionError on an empty or leaf node.
std::size_t choose_subtree(Variant variant, const Node& node, const Entry& e);

enum class Access { Counted, Uncounted };

struct QueryResult {
  std::vector<std::uint64_t> ids;
  std::size_t pages_touched = 0;  // nodes visited, index and leaf
  std::size_t fetches = 0;        // pages read from the store by this query
};

struct Neighbor {
  std::uint64_t id = 0;
  Point point;
  double dist2 = 0.0;
};

struct TreeStats {
  std::size_t leaf_count = 0;
  int height = 0;
  double avg_leaf_utilization = 0.0;  // overflow pages excluded
  std::uint64_t points = 0;
};

struct TreeCounters {
  std::uint64_t reinserted_entries = 0;
  std::uint64_t sibling_scans = 0;
  std::uint64_t redistributions = 0;
  std::uint64_t elective_splits = 0;
  std::uint64_t nodes_created = 0;
};

struct AuditReport {
  std::vector<std::string> failures;

  bool ok() const noexcept { return failures.empty(); }
};

class RTree {
 public:
  explicit RTree(TreeConfig config);

  const TreeConfig& config() const noexcept { return config_; }
  const Capacity& capacity() const noexcept { return cap_; }
  HilbertOrder hilbert_order() const noexcept { return order_; }

  /// Packs points into an empty tree. Point ids are assigned 0..n-1 in input
  /// order. STR is not available for the Hilbert variant.
  void bulk_load(std::span<const Point> points, BulkOrder order, const FillPolicy& fill);

  /// Inserts one point (id = size() before the call) and returns the splits
  /// it caused, including elective splits made by the remedy afterwards.
  /// Throws DomainError outside the unit square.
  std::vector<SplitEvent> insert(Point p);

  QueryResult range_query(const Rect& q, Access access = Access::Counted);
  std::size_t range_count(const Rect& q) { return range_query(q, Access::Uncounted).ids.size(); }

  /// The k nearest points, ties by id. Throws DomainError if k > size().
  std::vector<Neighbor> nearest(Point p, std::size_t k, Access access = Access::Counted);
  std::vector<std::uint64_t> knn_query(Point p, std::size_t k, Access access = Access::Counted);

  TreeStats stats() const;
  AuditReport audit() const;

  std::uint64_t size() const noexcept { return size_; }
  int height() const noexcept { return height_; }
  PageId root() const noexcept { return root_; }
  std::size_t leaf_count() const noexcept { return leaves_by_creation_.size(); }
  const std::vector<PageId>& leaves_by_creation() const noexcept { return leaves_by_creation_; }
  const TreeCounters& counters() const noexcept { return counters_; }
  const ResState& res_state() const noexcept { return res_; }

  // Batch id stamped on subsequent split events.
  void set_batch(std::uint64_t batch) noexcept { batch_ = batch; }

  BufferPool& pool() noexcept { return pool_; }
  const BufferPool& pool() const noexcept { return pool_; }

  // Leaves in tree order (left to right), without touching the counters.
  std::vector<PageId> leaves_in_order() const;
  Node read_node(PageId id) const;

 private:
  struct Change {
    std::vector<Entry> updated;  // fresh summaries of existing children
    PageId insert_after = kNoPage;
    std::vector<Entry> added;    // new children, placed after insert_after
  };
  static Change refresh(std::vector<Entry> updated) {
    Change c;
    c.updated = std::move(updated);
    return c;
  }
  struct Pending {
    Entry entry;
    int level;
  };

  // Parent-entry view of a node; also refreshes n.lhv.
  static Entry summarize(Node& n) noexcept;
  void place(Node& node, const Entry& e, bool overflow_page = false) const;
  std::vector<Entry> merged_live(const Node& leaf) const;
  std::vector<PageId> descend(const Entry& e, int level) const;
  std::vector<PageId> path_to(PageId id) const;
  Entry create_node(int level, std::vector<Entry> entries, Lineage lineage);
  void note_leaf(const Node& leaf);
  void set_parent(PageId child, PageId parent);

  void insert_at(const Pending& item);
  Change treat_overflow(Node& node, const std::vector<PageId>& path, std::size_t i);
  Change split_node(Node& node, PageId parent);
  Change deferred_split(Node& node, Node& parent);
  Change multi_split(Node& leaf, std::vector<Entry> all, PageId parent, bool elective);
  Change res_place(Node& leaf, const Entry& e, PageId parent);
  void elective_split(PageId leaf);
  void apply_upward(const std::vector<PageId>& path, std::size_t i, Change ch);
  void grow_root(Change ch, int level);
  void res_tick();
  struct Group {
    Rect rect;
    std::size_t count;
    PageId id;
  };
  // Records a split into groups a and b; returns true if a is the small child.
  bool record_split(const Group& a, const Group& b, int level, Lineage victim, PageId parent,
                    bool elective);
  void drain_pending();
  const Node& leaf_view(PageId id, Access access, Node& scratch);

  TreeConfig config_;
  Capacity cap_;
  HilbertOrder order_;
  BufferPool pool_;
  PageId root_ = kNoPage;
  int height_ = 0;
  std::uint64_t size_ = 0;
  std::uint64_t next_id_ = 0;
  std::uint32_t next_seq_ = 0;
  std::uint64_t batch_ = 0;

  std::vector<PageId> parent_;              // by page id
  std::vector<std::uint32_t> leaf_live_;    // by page id: entries + overflow
  std::vector<std::uint32_t> leaf_primary_; // by page id: entries only
  std::vector<PageId> leaves_by_creation_;

  TreeCounters counters_;
  ResState res_;
  std::mt19937_64 rng_;

  // Per top-level insert.
  std::deque<Pending> pending_;
  std::uint64_t reinserted_levels_ = 0;
  std::vector<SplitEvent>* events_ = nullptr;
};

}  // namespace rwave
