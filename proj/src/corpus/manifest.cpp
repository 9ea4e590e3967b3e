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

#include "obscurer/corpus/manifest.h"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "obscurer/common/error.h"

namespace obscurer::corpus {
namespace {

constexpr std::string_view kHeader = "obscurer-manifest 1";
constexpr std::string_view kTagNames[] = {"abstract", "filtered", "wikiart-like-external",
                                          "archive-like-external", "palette"};

bool needs_escape(unsigned char c) { return c <= 0x20 || c == '=' || c == '%' || c == 0x7f; }

std::string encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    if (needs_escape(c)) {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0x0f];
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& why) {
  throw Error(ErrorCode::kParseError, "manifest line " + std::to_string(line) + ": " + why);
}

std::string decode(std::string_view s, std::size_t line) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out += s[i];
      continue;
    }
    if (i + 2 >= s.size()) parse_fail(line, "truncated escape");
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(s.data() + i + 1, s.data() + i + 3, value, 16);
    if (ec != std::errc() || ptr != s.data() + i + 3) parse_fail(line, "bad escape");
    out += static_cast<char>(value);
    i += 2;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, ptr};
}

template <typename T>
T parse_number(std::string_view s, std::size_t line, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    parse_fail(line, std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

// Splits "k1=v1 k2=v2" into decoded pairs.
std::map<std::string, std::string> parse_fields(std::string_view rest, std::size_t line) {
  std::map<std::string, std::string> fields;
  std::size_t pos = 0;
  while (pos < rest.size()) {
    const auto end = std::min(rest.find(' ', pos), rest.size());
    const std::string_view tok = rest.substr(pos, end - pos);
    pos = end + 1;
    if (tok.empty()) continue;
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) parse_fail(line, "field without '='");
    fields[decode(tok.substr(0, eq), line)] = decode(tok.substr(eq + 1), line);
  }
  return fields;
}

std::string meta_int(const std::map<std::string, std::string>& meta, const std::string& key,
                     int fallback) {
  const auto it = meta.find(key);
  return it == meta.end() ? std::to_string(fallback) : it->second;
}

}  // namespace

std::string_view tag_name(DatasetTag tag) { return kTagNames[static_cast<std::size_t>(tag)]; }

std::optional<DatasetTag> parse_tag(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kTagNames); ++i) {
    if (kTagNames[i] == name) return static_cast<DatasetTag>(i);
  }
  return std::nullopt;
}

void DatasetManifest::append(const ManifestFragment& fragment) {
  for (const auto& r : fragment.records) {
    if (find(r.id) != nullptr) throw Error(ErrorCode::kDuplicateId, r.id);
    records.push_back(r);
  }
  for (const auto& [k, v] : fragment.meta) meta[k] = v;
}

const ImageRecord* DatasetManifest::find(std::string_view id) const {
  for (const auto& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::map<DatasetTag, std::size_t> DatasetManifest::counts() const {
  std::map<DatasetTag, std::size_t> out;
  for (const auto& r : records) ++out[r.tag];
  return out;
}

features::DescriptorConfig DatasetManifest::descriptor() const {
  features::DescriptorConfig cfg;
  auto get = [&](const std::string& key, int fallback) {
    return std::stoi(meta_int(meta, key, fallback));
  };
  cfg.grid = get("descriptor.grid", cfg.grid);
  cfg.color_bins = get("descriptor.color_bins", cfg.color_bins);
  cfg.gradient_bins = get("descriptor.gradient_bins", cfg.gradient_bins);
  cfg.resize_edge = get("descriptor.resize_edge", cfg.resize_edge);
  return cfg;
}

void DatasetManifest::set_descriptor(const features::DescriptorConfig& cfg) {
  meta["descriptor.grid"] = std::to_string(cfg.grid);
  meta["descriptor.color_bins"] = std::to_string(cfg.color_bins);
  meta["descriptor.gradient_bins"] = std::to_string(cfg.gradient_bins);
  meta["descriptor.resize_edge"] = std::to_string(cfg.resize_edge);
}

std::string DatasetManifest::serialize() const {
  std::map<std::string, std::string> all_meta = meta;
  for (auto it = all_meta.begin(); it != all_meta.end();) {
    it = it->first.starts_with("count.") ? all_meta.erase(it) : std::next(it);
  }
  for (const auto& [tag, n] : counts()) {
    all_meta["count." + std::string(tag_name(tag))] = std::to_string(n);
  }

  std::string out(kHeader);
  out += '\n';
  for (const auto& [k, v] : all_meta) {
    out += "meta ";
    out += encode(k);
    out += '=';
    out += encode(v);
    out += '\n';
  }
  for (const auto& r : records) {
    out += "record id=" + encode(r.id) + " tag=" + std::string(tag_name(r.tag)) +
           " path=" + encode(r.path) + " crop=" + format_double(r.crop_fraction) +
           " offset=" + std::to_string(r.embedding_offset) + '\n';
  }
  return out;
}

DatasetManifest DatasetManifest::parse(std::string_view text) {
  DatasetManifest m;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::string> declared_counts;
  std::set<std::string, std::less<>> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != kHeader) parse_fail(line_no, "missing header");
      continue;
    }
    if (line.empty()) continue;
    const auto space = line.find(' ');
    const std::string kind = line.substr(0, space);
    const std::string_view rest =
        space == std::string::npos ? std::string_view{} : std::string_view(line).substr(space + 1);
    if (kind == "meta") {
      for (auto& [k, v] : parse_fields(rest, line_no)) {
        if (k.starts_with("count.")) {
          declared_counts[k.substr(6)] = v;
        } else {
          m.meta[k] = v;
        }
      }
    } else if (kind == "record") {
      auto fields = parse_fields(rest, line_no);
      for (const char* key : {"id", "tag", "path", "crop", "offset"}) {
        if (!fields.contains(key)) parse_fail(line_no, std::string("record missing ") + key);
      }
      ImageRecord r;
      r.id = fields["id"];
      const auto tag = parse_tag(fields["tag"]);
      if (!tag) parse_fail(line_no, "unknown tag '" + fields["tag"] + "'");
      r.tag = *tag;
      r.path = fields["path"];
      r.crop_fraction = parse_number<double>(fields["crop"], line_no, "crop");
      if (!(r.crop_fraction >= 0.0 && r.crop_fraction <= 0.25)) {
        parse_fail(line_no, "crop outside [0, 0.25]");
      }
      r.embedding_offset = parse_number<std::int64_t>(fields["offset"], line_no, "offset");
      if (!ids.insert(r.id).second) throw Error(ErrorCode::kDuplicateId, r.id);
      m.records.push_back(std::move(r));
    } else {
      parse_fail(line_no, "unknown line kind '" + kind + "'");
    }
  }
  if (line_no == 0) parse_fail(1, "empty manifest");

  std::map<std::string, std::string> actual;
  for (const auto& [tag, n] : m.counts()) actual[std::string(tag_name(tag))] = std::to_string(n);
  if (actual != declared_counts) parse_fail(line_no, "declared counts do not match records");
  return m;
}

void DatasetManifest::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << serialize();
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::filesystem::path resolve_record_path(const std::filesystem::path& root,
                                          const ImageRecord& record) {
  const std::filesystem::path p(record.path);
  return p.is_absolute() ? p : root / p;
}

}  // namespace obscurer::corpus
