// Copyright 2026-present the obscurer project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "obscurer/annforest/index_io.h"

#include <zlib.h>

#include <bit>
#include <cstring>

#include "obscurer/common/error.h"
#include "obscurer/common/image_io.h"

namespace obscurer::ann {
namespace {

constexpr char kMagic[4] = {'C', 'O', 'B', 'S'};
constexpr std::uint8_t kTagLeaf = 0;
constexpr std::uint8_t kTagSplit = 1;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  void need(std::size_t n, const char* what) const {
    if (in_.size() - pos_ < n) {
      throw Error(ErrorCode::kTruncatedFile, std::string("file ends inside ") + what);
    }
  }
  std::span<const std::uint8_t> bytes(std::size_t n, const char* what) {
    need(n, what);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8(const char* what) { return bytes(1, what)[0]; }
  std::uint32_t u32(const char* what) {
    const auto b = bytes(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64(const char* what) {
    const auto b = bytes(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for large indexes.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, bytes.data() + pos, chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorCode::kCorruptIndex, why); }

}  // namespace

std::vector<std::uint8_t> serialize_index(const RPForest& forest, const std::string& manifest_ref) {
  Writer w;
  const std::size_t dim = forest.dimension();
  w.bytes(kMagic, 4);
  w.u32(kIndexFormatVersion);
  w.u32(static_cast<std::uint32_t>(dim));
  w.u64(forest.size());
  w.u32(static_cast<std::uint32_t>(forest.trees().size()));
  w.u64(forest.build_seed());
  w.u32(static_cast<std::uint32_t>(manifest_ref.size()));
  w.bytes(manifest_ref.data(), manifest_ref.size());
  for (float v : forest.vectors().data()) w.f32(v);

  for (const RPTree& tree : forest.trees()) {
    w.u32(tree.leaf_size);
    w.u64(tree.seed);
    w.u32(static_cast<std::uint32_t>(tree.nodes.size()));
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) {
        w.u8(kTagLeaf);
        w.u32(node.b);
        for (ItemId id : tree.leaf(node)) w.u32(id);
      } else {
        w.u8(kTagSplit);
        w.u32(node.a);
        w.u32(node.b);
        w.f32(node.offset);
        for (float v : tree.normal(node, dim)) w.f32(v);
      }
    }
  }
  w.u32(crc_of(w.buffer()));
  return std::move(w.buffer());
}

LoadedIndex deserialize_index(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.bytes(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) corrupt("bad magic");
  const auto version = r.u32("header");
  if (version != kIndexFormatVersion) corrupt("unsupported version " + std::to_string(version));
  const std::size_t dim = r.u32("header");
  const std::uint64_t count = r.u64("header");
  const std::uint32_t n_trees = r.u32("header");
  const std::uint64_t build_seed = r.u64("header");
  const std::uint32_t ref_len = r.u32("header");
  const auto ref_bytes = r.bytes(ref_len, "manifest reference");
  std::string manifest_ref(ref_bytes.begin(), ref_bytes.end());
  if (dim == 0 && count != 0) corrupt("zero dimension");

  if (dim != 0 && count > r.remaining() / 4 / dim) {
    throw Error(ErrorCode::kTruncatedFile, "file ends inside vector block");
  }
  std::vector<float> data(static_cast<std::size_t>(count) * dim);
  for (float& v : data) v = r.f32("vector block");

  std::vector<RPTree> trees(n_trees);
  for (auto& tree : trees) {
    tree.leaf_size = r.u32("tree header");
    tree.seed = r.u64("tree header");
    const std::uint32_t node_count = r.u32("tree header");
    if (node_count == 0) corrupt("tree without nodes");
    if (node_count > r.remaining()) throw Error(ErrorCode::kTruncatedFile, "file ends in tree");
    tree.nodes.resize(node_count);
    std::int32_t slots = 0;
    for (std::uint32_t i = 0; i < node_count; ++i) {
      auto& node = tree.nodes[i];
      const auto tag = r.u8("node");
      if (tag == kTagLeaf) {
        const std::uint32_t n = r.u32("leaf");
        r.need(static_cast<std::size_t>(n) * 4, "leaf");
        node.normal_slot = RPTree::kLeaf;
        node.a = static_cast<std::uint32_t>(tree.leaf_items.size());
        node.b = n;
        for (std::uint32_t k = 0; k < n; ++k) {
          const ItemId id = r.u32("leaf");
          if (id >= count) corrupt("leaf item out of range");
          tree.leaf_items.push_back(id);
        }
      } else if (tag == kTagSplit) {
        node.a = r.u32("split");
        node.b = r.u32("split");
        // Children always follow their parent in the layout, so this also
        // rules out cycles.
        if (node.a <= i || node.b <= i || node.a >= node_count || node.b >= node_count) {
          corrupt("split child index out of order");
        }
        node.offset = r.f32("split");
        node.normal_slot = slots++;
        r.need(dim * 4, "split normal");
        for (std::size_t d = 0; d < dim; ++d) tree.normals.push_back(r.f32("split normal"));
      } else {
        corrupt("unknown node tag " + std::to_string(tag));
      }
    }
  }

  const std::size_t body_end = r.position();
  const std::uint32_t stored_crc = r.u32("checksum");
  if (r.remaining() != 0) corrupt("trailing bytes after checksum");
  if (crc_of(bytes.first(body_end)) != stored_crc) corrupt("checksum mismatch");

  return {RPForest(VectorStore(dim, std::move(data)), std::move(trees), build_seed),
          std::move(manifest_ref)};
}

void save_index(const RPForest& forest, const std::string& manifest_ref,
                const std::filesystem::path& path) {
  write_file(path, serialize_index(forest, manifest_ref));
}

LoadedIndex load_index(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return deserialize_index(bytes);
}

}  // namespace obscurer::ann
