#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "rwave/error.hpp"
#include "rwave/page_store.hpp"

using namespace rwave;

namespace {

Node sample_node(std::size_t n, int level, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Node node;
  node.page_id = 7;
  node.level = level;
  node.creation_seq = 12345;
  node.lineage = Lineage::SmallChild;
  node.lhv = 0xdeadbeefcafeULL;
  for (std::size_t i = 0; i < n; ++i) {
    Entry e;
    const double x = u(rng), y = u(rng);
    e.rect = level == 0 ? Rect::of({x, y}) : Rect{x, y, std::min(1.0, x + 0.1), std::min(1.0, y + 0.1)};
    e.id = rng();
    node.entries.push_back(e);
  }
  return node;
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / (std::string("rwave_") + name + "_" +
                                                    std::to_string(::getpid()));
}

}  // namespace

TEST(Capacity, EntriesPerPage) {
  EXPECT_EQ(Capacity::entries_for_page(2048), 50u);
  EXPECT_EQ(Capacity::entries_for_page(16384), 409u);
  EXPECT_EQ(Capacity::entries_for_page(10), 0u);
  EXPECT_THROW(Capacity::from_page_size(100, 1), ConfigError);   // B = 1
  EXPECT_THROW(Capacity::from_page_size(2048, 26), ConfigError); // above B/2
  EXPECT_THROW(Capacity::from_page_size(2048, 0), ConfigError);
  EXPECT_EQ(Capacity::from_page_size(2048, 20).max_entries, 50u);
}

TEST(NodeCodec, RoundTripLeaf) {
  std::mt19937_64 rng(1);
  const NodeCodec codec(2048, HilbertOrder(16));
  const Node n = sample_node(50, 0, rng);
  std::vector<std::byte> page(2048);
  codec.encode(n, page);
  const Node d = codec.decode(7, page);
  EXPECT_EQ(d.level, 0);
  EXPECT_EQ(d.creation_seq, n.creation_seq);
  EXPECT_EQ(d.lineage, n.lineage);
  EXPECT_EQ(d.lhv, n.lhv);
  EXPECT_EQ(d.overflow_page, kNoPage);
  ASSERT_EQ(d.entries.size(), n.entries.size());
  for (std::size_t i = 0; i < n.entries.size(); ++i) {
    EXPECT_EQ(d.entries[i].rect, n.entries[i].rect);
    EXPECT_EQ(d.entries[i].id, n.entries[i].id);
    // Recomputed on decode.
    EXPECT_EQ(d.entries[i].hilbert, hilbert_index(n.entries[i].rect.center(), HilbertOrder(16)));
  }
}

TEST(NodeCodec, RoundTripIndexAndOverflow) {
  std::mt19937_64 rng(2);
  const NodeCodec codec(1024, HilbertOrder(8));
  Node n = sample_node(10, 2, rng);
  std::vector<std::byte> page(1024);
  codec.encode(n, page);
  const Node d = codec.decode(3, page);
  EXPECT_EQ(d.page_id, 3u);
  EXPECT_EQ(d.level, 2);
  for (const Entry& e : d.entries) EXPECT_EQ(e.hilbert, 0u);

  Node leaf = sample_node(5, 0, rng);
  leaf.overflow_page = 99;
  leaf.overflow = sample_node(4, 0, rng).entries;
  codec.encode_overflow(leaf, page);
  const std::vector<Entry> o = codec.decode_entries(page, 0);
  ASSERT_EQ(o.size(), 4u);
  EXPECT_EQ(o[3].id, leaf.overflow[3].id);
}

TEST(NodeCodec, RejectsOversizeAndCorruptPages) {
  std::mt19937_64 rng(3);
  const NodeCodec codec(1024, HilbertOrder(8));
  std::vector<std::byte> page(1024);
  EXPECT_THROW(codec.encode(sample_node(26, 0, rng), page), CorruptionError);  // B = 25
  codec.encode(sample_node(25, 0, rng), page);
  page[1] = std::byte{9};  // lineage tag
  EXPECT_THROW(codec.decode(0, page), CorruptionError);
  page[1] = std::byte{0};
  page[2] = std::byte{0xff};  // count
  EXPECT_THROW(codec.decode(0, page), CorruptionError);
}

template <class Store>
void exercise_store(Store& s) {
  std::vector<std::byte> a(s.page_size(), std::byte{0x11}), b(s.page_size(), std::byte{0x22});
  std::vector<std::byte> out(s.page_size());
  EXPECT_FALSE(s.contains(5));
  EXPECT_THROW(s.read(5, out), StoreError);
  s.write(5, a);
  s.write(0, b);
  EXPECT_TRUE(s.contains(5));
  EXPECT_FALSE(s.contains(3));
  s.read(5, out);
  EXPECT_EQ(out, a);
  s.write(5, b);
  s.read(5, out);
  EXPECT_EQ(out, b);
}

TEST(PageStore, Memory) {
  MemoryPageStore s(512);
  exercise_store(s);
}

TEST(PageStore, File) {
  const auto path = temp_file("pages");
  {
    FilePageStore s(path, 512);
    exercise_store(s);
  }
  EXPECT_EQ(std::filesystem::file_size(path), 6u * 512);
  std::filesystem::remove(path);
  EXPECT_THROW(FilePageStore("/nonexistent-dir/x/pages", 512), StoreError);
}
