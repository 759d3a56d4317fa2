#include "rwave/page_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <cstring>
#include <string>

#include "rwave/error.hpp"

namespace rwave {

void MemoryPageStore::write(PageId id, std::span<const std::byte> page) {
  auto& slot = pages_[id];
  slot.assign(page.begin(), page.end());
}

void MemoryPageStore::read(PageId id, std::span<std::byte> page) const {
  auto it = pages_.find(id);
  if (it == pages_.end()) throw StoreError("unknown page " + std::to_string(id));
  std::memcpy(page.data(), it->second.data(), std::min(page.size(), it->second.size()));
}

FilePageStore::FilePageStore(const std::filesystem::path& path, std::size_t page_size)
    : PageStore(page_size), path_(path) {
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_TRUNC, 0644);
  if (fd_ < 0) {
    throw StoreError("cannot open page file " + path.string() + ": " + std::strerror(errno));
  }
}

FilePageStore::~FilePageStore() {
  if (fd_ >= 0) ::close(fd_);
}

void FilePageStore::write(PageId id, std::span<const std::byte> page) {
  const auto offset = static_cast<off_t>(id * page_size());
  std::size_t done = 0;
  while (done < page.size()) {
    const ssize_t n = ::pwrite(fd_, page.data() + done, page.size() - done,
                               offset + static_cast<off_t>(done));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StoreError("write of page " + std::to_string(id) + " failed: " + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
  if (id >= written_.size()) written_.resize(id + 1, false);
  written_[id] = true;
}

void FilePageStore::read(PageId id, std::span<std::byte> page) const {
  if (!contains(id)) throw StoreError("unknown page " + std::to_string(id));
  const auto offset = static_cast<off_t>(id * page_size());
  std::size_t done = 0;
  while (done < page.size()) {
    const ssize_t n = ::pread(fd_, page.data() + done, page.size() - done,
                              offset + static_cast<off_t>(done));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StoreError("read of page " + std::to_string(id) + " failed: " + std::strerror(errno));
    }
    if (n == 0) throw StoreError("short read of page " + std::to_string(id));
    done += static_cast<std::size_t>(n);
  }
}

bool FilePageStore::contains(PageId id) const { return id < written_.size() && written_[id]; }

namespace {

template <typename T>
void put(std::byte*& p, T v) {
  std::uint64_t bits;
  if constexpr (std::is_same_v<T, double>) {
    bits = std::bit_cast<std::uint64_t>(v);
  } else {
    bits = static_cast<std::uint64_t>(v);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    *p++ = static_cast<std::byte>((bits >> (8 * i)) & 0xff);
  }
}

template <typename T>
T get(const std::byte*& p) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bits |= static_cast<std::uint64_t>(std::to_integer<unsigned>(*p++)) << (8 * i);
  }
  if constexpr (std::is_same_v<T, double>) {
    return std::bit_cast<double>(bits);
  } else {
    return static_cast<T>(bits);
  }
}

void encode_page(std::span<std::byte> page, int level, Lineage lineage, std::uint32_t seq,
                 std::uint64_t lhv, PageId overflow, std::span<const Entry> entries) {
  const std::size_t need = Capacity::kHeaderBytes + Capacity::kEntryBytes * entries.size();
  if (need > page.size()) {
    throw CorruptionError("node with " + std::to_string(entries.size()) +
                          " entries does not fit a " + std::to_string(page.size()) +
                          "-byte page");
  }
  std::byte* p = page.data();
  put<std::uint8_t>(p, static_cast<std::uint8_t>(level));
  put<std::uint8_t>(p, static_cast<std::uint8_t>(lineage));
  put<std::uint16_t>(p, static_cast<std::uint16_t>(entries.size()));
  put<std::uint32_t>(p, seq);
  put<std::uint64_t>(p, lhv);
  put<std::uint64_t>(p, overflow);
  for (const Entry& e : entries) {
    put<double>(p, e.rect.min_x);
    put<double>(p, e.rect.min_y);
    put<double>(p, e.rect.max_x);
    put<double>(p, e.rect.max_y);
    put<std::uint64_t>(p, e.id);
  }
  std::memset(p, 0, static_cast<std::size_t>(page.data() + page.size() - p));
}

}  // namespace

void NodeCodec::encode(const Node& node, std::span<std::byte> page) const {
  encode_page(page, node.level, node.lineage, node.creation_seq, node.lhv, node.overflow_page,
              node.entries);
}

void NodeCodec::encode_overflow(const Node& node, std::span<std::byte> page) const {
  encode_page(page, node.level, node.lineage, node.creation_seq, 0, kNoPage, node.overflow);
}

std::vector<Entry> NodeCodec::decode_entries(std::span<const std::byte> page, int level) const {
  const std::byte* p = page.data() + 2;
  const auto count = get<std::uint16_t>(p);
  if (Capacity::kHeaderBytes + Capacity::kEntryBytes * count > page.size()) {
    throw CorruptionError("page entry count " + std::to_string(count) + " exceeds page size");
  }
  p = page.data() + Capacity::kHeaderBytes;
  std::vector<Entry> entries(count);
  for (Entry& e : entries) {
    e.rect.min_x = get<double>(p);
    e.rect.min_y = get<double>(p);
    e.rect.max_x = get<double>(p);
    e.rect.max_y = get<double>(p);
    e.id = get<std::uint64_t>(p);
    if (level == 0) e.hilbert = hilbert_index(e.rect.center(), order_);
  }
  return entries;
}

Node NodeCodec::decode(PageId id, std::span<const std::byte> page) const {
  const std::byte* p = page.data();
  Node n;
  n.page_id = id;
  n.level = get<std::uint8_t>(p);
  const auto lineage = get<std::uint8_t>(p);
  if (lineage > 2) throw CorruptionError("page " + std::to_string(id) + " has bad lineage tag");
  n.lineage = static_cast<Lineage>(lineage);
  get<std::uint16_t>(p);
  n.creation_seq = get<std::uint32_t>(p);
  n.lhv = get<std::uint64_t>(p);
  n.overflow_page = get<std::uint64_t>(p);
  n.entries = decode_entries(page, n.level);
  return n;
}

}  // namespace rwave
