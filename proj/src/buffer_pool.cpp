#include "rwave/buffer_pool.hpp"

#include <string>

#include "rwave/error.hpp"

namespace rwave {

BufferPool::BufferPool(PoolConfig config, std::unique_ptr<PageStore> store, NodeCodec codec)
    : config_(config), store_(std::move(store)), codec_(codec), scratch_(config.page_size_bytes) {
  if (config_.capacity_pages < 2) {
    throw ConfigError("buffer_pages", "buffer pool needs at least 2 frames");
  }
  if (store_ == nullptr || store_->page_size() != config_.page_size_bytes ||
      codec_.page_size() != config_.page_size_bytes) {
    throw ConfigError("page_size", "store, codec and pool page sizes differ");
  }
}

BufferPool::Frame& BufferPool::frame(PageId id) {
  if (id >= frames_.size()) frames_.resize(id + 1);
  return frames_[id];
}

const BufferPool::Frame* BufferPool::find(PageId id) const noexcept {
  if (id >= frames_.size() || !frames_[id].node) return nullptr;
  return &frames_[id];
}

std::size_t BufferPool::weight(const Frame& f) const noexcept {
  return f.node->has_overflow() ? 2 : 1;
}

void BufferPool::lru_push_front(PageId id) {
  Frame& f = frames_[id];
  f.prev = kNoPage;
  f.next = lru_head_;
  if (lru_head_ != kNoPage) frames_[lru_head_].prev = id;
  lru_head_ = id;
  if (lru_tail_ == kNoPage) lru_tail_ = id;
}

void BufferPool::lru_unlink(PageId id) {
  Frame& f = frames_[id];
  if (f.prev != kNoPage) {
    frames_[f.prev].next = f.next;
  } else {
    lru_head_ = f.next;
  }
  if (f.next != kNoPage) {
    frames_[f.next].prev = f.prev;
  } else {
    lru_tail_ = f.prev;
  }
  f.prev = f.next = kNoPage;
}

void BufferPool::write_back(const Node& node) {
  codec_.encode(node, scratch_);
  store_->write(node.page_id, scratch_);
  ++stats_.writes;
  if (node.has_overflow()) {
    codec_.encode_overflow(node, scratch_);
    store_->write(node.overflow_page, scratch_);
    ++stats_.writes;
  }
}

void BufferPool::evict(PageId id) {
  Frame& f = frames_[id];
  if (f.dirty) write_back(*f.node);
  used_frames_ -= weight(f);
  lru_unlink(id);
  f.node.reset();
  f.dirty = false;
  ++stats_.evictions;
}

void BufferPool::make_room(std::size_t frames_needed) {
  while (used_frames_ + frames_needed > config_.capacity_pages) {
    PageId victim = lru_tail_;
    while (victim != kNoPage && frames_[victim].pins > 0) victim = frames_[victim].prev;
    if (victim == kNoPage) {
      throw CapacityError("buffer pool of " + std::to_string(config_.capacity_pages) +
                          " frames has no unpinned page to evict");
    }
    evict(victim);
  }
}

Node BufferPool::load(PageId id, std::uint64_t* pages_read) const {
  if (!store_->contains(id)) throw StoreError("unknown page " + std::to_string(id));
  store_->read(id, scratch_);
  Node node = codec_.decode(id, scratch_);
  *pages_read = 1;
  if (node.has_overflow()) {
    store_->read(node.overflow_page, scratch_);
    node.overflow = codec_.decode_entries(scratch_, 0);
    *pages_read = 2;
  }
  return node;
}

const Node& BufferPool::fetch(PageId id) {
  if (id < frames_.size() && frames_[id].node) {
    Frame& f = frames_[id];
    if (f.fixed) throw CorruptionError("fetch of fixed page " + std::to_string(id));
    ++stats_.hits;
    f.last_access = ++clock_;
    lru_unlink(id);
    lru_push_front(id);
    return *f.node;
  }
  std::uint64_t pages_read = 0;
  Node node = load(id, &pages_read);
  const std::size_t w = node.has_overflow() ? 2 : 1;
  make_room(w);
  Frame& f = frame(id);
  f.node = std::make_unique<Node>(std::move(node));
  f.fixed = false;
  f.dirty = false;
  f.pins = 0;
  f.last_access = ++clock_;
  used_frames_ += w;
  lru_push_front(id);
  stats_.fetches += pages_read;
  return *f.node;
}

Node& BufferPool::fetch_mut(PageId id) {
  fetch(id);
  Frame& f = frames_[id];
  f.dirty = true;
  return *f.node;
}

Node& BufferPool::index_node(PageId id) {
  if (id >= frames_.size() || !frames_[id].node || !frames_[id].fixed) {
    throw CorruptionError("page " + std::to_string(id) + " is not a fixed index page");
  }
  frames_[id].dirty = true;
  return *frames_[id].node;
}

const Node& BufferPool::index_node(PageId id) const {
  const Frame* f = find(id);
  if (f == nullptr || !f->fixed) {
    throw CorruptionError("page " + std::to_string(id) + " is not a fixed index page");
  }
  return *f->node;
}

Node& BufferPool::install(Node node, bool fixed) {
  const PageId id = node.page_id;
  if (id == kNoPage || id >= next_page_id_) {
    throw CorruptionError("install of unallocated page id");
  }
  if (find(id) != nullptr) throw CorruptionError("page " + std::to_string(id) + " already resident");
  if (fixed) {
    Frame& f = frame(id);
    f.node = std::make_unique<Node>(std::move(node));
    f.fixed = true;
    f.dirty = true;
    f.pins = 0;
    f.last_access = ++clock_;
    ++fixed_count_;
    return *f.node;
  }
  const std::size_t w = node.has_overflow() ? 2 : 1;
  make_room(w);
  Frame& f = frame(id);
  f.node = std::make_unique<Node>(std::move(node));
  f.fixed = false;
  f.dirty = true;
  f.pins = 0;
  f.last_access = ++clock_;
  used_frames_ += w;
  lru_push_front(id);
  return *f.node;
}

void BufferPool::pin(PageId id) {
  if (find(id) == nullptr) throw StoreError("pin of non-resident page " + std::to_string(id));
  ++frames_[id].pins;
}

void BufferPool::unpin(PageId id) {
  if (find(id) == nullptr || frames_[id].pins == 0) {
    throw StoreError("unpin of unpinned page " + std::to_string(id));
  }
  --frames_[id].pins;
}

void BufferPool::attach_overflow(PageId leaf) {
  if (find(leaf) == nullptr || frames_[leaf].fixed) {
    throw CorruptionError("overflow page for non-resident leaf " + std::to_string(leaf));
  }
  Frame& f = frames_[leaf];
  if (f.node->has_overflow()) return;
  ++f.pins;
  try {
    make_room(1);
  } catch (...) {
    --f.pins;
    throw;
  }
  --f.pins;
  f.node->overflow_page = allocate_page_id();
  f.dirty = true;
  ++used_frames_;
}

void BufferPool::detach_overflow(PageId leaf) {
  if (find(leaf) == nullptr) return;
  Frame& f = frames_[leaf];
  if (!f.node->has_overflow()) return;
  f.node->overflow_page = kNoPage;
  f.node->overflow.clear();
  f.dirty = true;
  --used_frames_;
}

Node BufferPool::read_uncounted(PageId id) const {
  if (const Frame* f = find(id)) return *f->node;
  std::uint64_t ignored = 0;
  return load(id, &ignored);
}

bool BufferPool::is_resident(PageId id) const noexcept { return find(id) != nullptr; }

bool BufferPool::is_fixed(PageId id) const noexcept {
  const Frame* f = find(id);
  return f != nullptr && f->fixed;
}

bool BufferPool::is_pinned(PageId id) const noexcept {
  const Frame* f = find(id);
  return f != nullptr && (f->fixed || f->pins > 0);
}

std::uint64_t BufferPool::last_access(PageId id) const noexcept {
  const Frame* f = find(id);
  return f == nullptr ? 0 : f->last_access;
}

PoolStats BufferPool::stats() const {
  PoolStats s = stats_;
  double used_bytes = 0.0;
  for (PageId id = lru_head_; id != kNoPage; id = frames_[id].next) {
    const Node& n = *frames_[id].node;
    used_bytes += static_cast<double>(Capacity::kHeaderBytes + Capacity::kEntryBytes * n.entries.size());
    if (n.has_overflow()) {
      used_bytes += static_cast<double>(Capacity::kHeaderBytes + Capacity::kEntryBytes * n.overflow.size());
    }
  }
  s.utilization = used_bytes / (static_cast<double>(config_.capacity_pages) *
                                static_cast<double>(config_.page_size_bytes));
  return s;
}

void BufferPool::reset_counters() noexcept {
  stats_ = PoolStats{};
}

void BufferPool::flush_all() {
  for (Frame& f : frames_) {
    if (f.node && f.dirty) {
      write_back(*f.node);
      f.dirty = false;
    }
  }
}

}  // namespace rwave
