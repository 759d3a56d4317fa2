#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "rwave/geometry.hpp"
#include "rwave/node.hpp"

namespace rwave {

/// Fixed-size page storage addressed by page id.
class PageStore {
 public:
  virtual ~PageStore() = default;

  virtual void write(PageId id, std::span<const std::byte> page) = 0;
  // Throws StoreError if the page was never written.
  virtual void read(PageId id, std::span<std::byte> page) const = 0;
  virtual bool contains(PageId id) const = 0;

  std::size_t page_size() const noexcept { return page_size_; }

 protected:
  explicit PageStore(std::size_t page_size) : page_size_(page_size) {}

 private:
  std::size_t page_size_;
};

/// In-memory store for fast runs and tests; behaves like the file store.
class MemoryPageStore final : public PageStore {
 public:
  explicit MemoryPageStore(std::size_t page_size) : PageStore(page_size) {}

  void write(PageId id, std::span<const std::byte> page) override;
  void read(PageId id, std::span<std::byte> page) const override;
  bool contains(PageId id) const override { return pages_.contains(id); }

 private:
  std::unordered_map<PageId, std::vector<std::byte>> pages_;
};

/// Single file; page i lives at byte offset i * page_size. The file is
/// created (truncated) on construction.
class FilePageStore final : public PageStore {
 public:
  FilePageStore(const std::filesystem::path& path, std::size_t page_size);
  ~FilePageStore() override;
  FilePageStore(const FilePageStore&) = delete;
  FilePageStore& operator=(const FilePageStore&) = delete;

  void write(PageId id, std::span<const std::byte> page) override;
  void read(PageId id, std::span<std::byte> page) const override;
  bool contains(PageId id) const override;

 private:
  int fd_ = -1;
  std::filesystem::path path_;
  std::vector<bool> written_;
};

/// Page layout, little-endian:
///   u8 level | u8 lineage | u16 count | u32 creation_seq | u64 lhv |
///   u64 overflow link | count x (f64 min_x, min_y, max_x, max_y | u64 id)
/// Leaf Hilbert values are recomputed from the point on decode; index-entry
/// Hilbert values are not persisted (index pages stay pinned in the pool).
class NodeCodec {
 public:
  NodeCodec(std::size_t page_size, HilbertOrder order) : page_size_(page_size), order_(order) {}

  std::size_t page_size() const noexcept { return page_size_; }
  HilbertOrder order() const noexcept { return order_; }

  // Encodes the node's primary page. Throws CorruptionError if it does not fit.
  void encode(const Node& node, std::span<std::byte> page) const;
  // Encodes the node's overflow entries as a standalone page.
  void encode_overflow(const Node& node, std::span<std::byte> page) const;

  // Decodes a primary page. Overflow entries are left empty; the caller
  // loads them from `overflow_page` with `decode_entries`.
  Node decode(PageId id, std::span<const std::byte> page) const;
  std::vector<Entry> decode_entries(std::span<const std::byte> page, int level) const;

 private:
  std::size_t page_size_;
  HilbertOrder order_;
};

}  // namespace rwave
