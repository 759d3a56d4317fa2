#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "rwave/node.hpp"
#include "rwave/page_store.hpp"

namespace rwave {

struct PoolConfig {
  std::size_t capacity_pages = 1000;
  std::size_t page_size_bytes = 16384;
};

struct PoolStats {
  std::uint64_t evictions = 0;
  std::uint64_t fetches = 0;  // misses: pages read from the store
  std::uint64_t hits = 0;
  std::uint64_t writes = 0;   // dirty pages written back
  double utilization = 0.0;   // used page bytes / (capacity * page size)
};

/// Page cache over a PageStore.
///
/// Index pages are installed "fixed": permanently resident, never evicted and
/// not counted against `capacity_pages`. Leaf pages (and their overflow
/// pages) share the `capacity_pages` frames under LRU replacement; a leaf
/// with an overflow page occupies two frames. `pin`/`unpin` temporarily
/// exempt a resident leaf from eviction.
class BufferPool {
 public:
  BufferPool(PoolConfig config, std::unique_ptr<PageStore> store, NodeCodec codec);

  const PoolConfig& config() const noexcept { return config_; }
  const NodeCodec& codec() const noexcept { return codec_; }

  PageId allocate_page_id() noexcept { return next_page_id_++; }
  PageId next_page_id() const noexcept { return next_page_id_; }

  // Counted access to an unfixed page; loads it on a miss, evicting the
  // least-recently-used unpinned page if the pool is full.
  const Node& fetch(PageId id);
  // As fetch, and marks the page dirty.
  Node& fetch_mut(PageId id);

  // Access to a fixed (index) page. Not counted. Throws CorruptionError if
  // the page is not fixed.
  Node& index_node(PageId id);
  const Node& index_node(PageId id) const;

  // Makes a new page resident and dirty; fixed pages are index pages.
  Node& install(Node node, bool fixed);

  void pin(PageId id);
  void unpin(PageId id);

  // Gives a resident leaf an overflow page (one more frame) / releases it.
  void attach_overflow(PageId leaf);
  void detach_overflow(PageId leaf);

  // Copy of a page's current content without touching counters or LRU
  // order. Used by audits and query generators.
  Node read_uncounted(PageId id) const;

  bool is_resident(PageId id) const noexcept;
  bool is_fixed(PageId id) const noexcept;
  bool is_pinned(PageId id) const noexcept;
  std::uint64_t last_access(PageId id) const noexcept;

  std::size_t used_frames() const noexcept { return used_frames_; }
  std::size_t fixed_pages() const noexcept { return fixed_count_; }

  PoolStats stats() const;
  std::uint64_t fetch_count() const noexcept { return stats_.fetches; }
  void reset_counters() noexcept;

  // Writes every dirty resident page back to the store.
  void flush_all();

 private:
  struct Frame {
    std::unique_ptr<Node> node;
    bool fixed = false;
    bool dirty = false;
    std::uint32_t pins = 0;
    std::uint64_t last_access = 0;
    PageId prev = kNoPage;  // towards most recent
    PageId next = kNoPage;  // towards least recent
  };

  Frame& frame(PageId id);
  const Frame* find(PageId id) const noexcept;
  std::size_t weight(const Frame& f) const noexcept;
  void lru_push_front(PageId id);
  void lru_unlink(PageId id);
  void make_room(std::size_t frames_needed);
  void evict(PageId id);
  void write_back(const Node& node);
  Node load(PageId id, std::uint64_t* pages_read) const;

  PoolConfig config_;
  std::unique_ptr<PageStore> store_;
  NodeCodec codec_;
  std::vector<Frame> frames_;
  PageId lru_head_ = kNoPage;
  PageId lru_tail_ = kNoPage;
  std::size_t used_frames_ = 0;
  std::size_t fixed_count_ = 0;
  std::uint64_t clock_ = 0;
  PageId next_page_id_ = 0;
  PoolStats stats_;
  mutable std::vector<std::byte> scratch_;
};

/// Pins a resident page for the guard's lifetime.
class PinGuard {
 public:
  PinGuard(BufferPool& pool, PageId id) : pool_(&pool), id_(id) { pool_->pin(id_); }
  ~PinGuard() {
    if (pool_ != nullptr) pool_->unpin(id_);
  }
  PinGuard(const PinGuard&) = delete;
  PinGuard& operator=(const PinGuard&) = delete;
  PinGuard(PinGuard&& o) noexcept : pool_(o.pool_), id_(o.id_) { o.pool_ = nullptr; }

 private:
  BufferPool* pool_;
  PageId id_;
};

}  // namespace rwave
