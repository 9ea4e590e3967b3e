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

#include "obscurer/corpus/config.h"

#include <fstream>
#include <set>

#include "obscurer/common/error.h"
#include "obscurer/common/image_io.h"
#include "obscurer/corpus/indexer.h"

namespace obscurer::corpus {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& why) {
  throw Error(ErrorCode::kInvalidArgument, "config " + where + ": " + why);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.contains(key)) bad(where, "unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(where + "." + key, e.what());
  }
}

fs::path read_path(const json& j, const char* key, const fs::path& base, const std::string& where) {
  std::string s;
  read(j, key, s, where);
  if (s.empty()) return {};
  const fs::path p(s);
  return p.is_absolute() ? p : base / p;
}

Rgb parse_rgb(const json& j, const std::string& where) {
  std::array<int, 3> c{};
  try {
    c = j.get<std::array<int, 3>>();
  } catch (const json::exception& e) {
    bad(where, e.what());
  }
  for (int v : c) {
    if (v < 0 || v > 255) bad(where, "channel outside [0, 255]");
  }
  return {static_cast<std::uint8_t>(c[0]), static_cast<std::uint8_t>(c[1]),
          static_cast<std::uint8_t>(c[2])};
}

imagegen::LineTransform parse_transform(const json& j, const std::string& where) {
  check_keys(j, where, {"kind", "weight", "bead_count", "bead_pull", "cell_size", "sector_count",
                        "oval_factor"});
  imagegen::LineTransform t;
  std::string kind = "identity";
  read(j, "kind", kind, where);
  const auto parsed = imagegen::parse_transform(kind);
  if (!parsed) bad(where, "unknown transform '" + kind + "'");
  t.kind = *parsed;
  read(j, "bead_count", t.bead_count, where);
  read(j, "bead_pull", t.bead_pull, where);
  read(j, "cell_size", t.cell_size, where);
  read(j, "sector_count", t.sector_count, where);
  read(j, "oval_factor", t.oval_factor, where);
  return t;
}

AbstractDatasetSpec parse_abstract(const json& j) {
  const std::string where = "abstract";
  check_keys(j, where, {"count", "seed", "transforms", "canvas", "grammar", "curation",
                        "border_width"});
  AbstractDatasetSpec s;
  read(j, "count", s.count, where);
  read(j, "seed", s.seed, where);
  read(j, "border_width", s.border_width, where);
  if (j.contains("transforms")) {
    const json& list = j.at("transforms");
    if (!list.is_array() || list.empty()) bad(where + ".transforms", "expected a non-empty array");
    s.transforms.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string w = where + ".transforms[" + std::to_string(i) + "]";
      WeightedTransform wt;
      wt.transform = parse_transform(list[i], w);
      read(list[i], "weight", wt.weight, w);
      s.transforms.push_back(wt);
    }
  }
  if (j.contains("canvas")) {
    const json& c = j.at("canvas");
    const std::string w = where + ".canvas";
    check_keys(c, w, {"width", "height", "particles", "timesteps", "blur", "background"});
    read(c, "width", s.canvas.width, w);
    read(c, "height", s.canvas.height, w);
    read(c, "particles", s.canvas.particle_count, w);
    read(c, "timesteps", s.canvas.timesteps, w);
    read(c, "blur", s.canvas.blur_radius, w);
    if (c.contains("background")) s.canvas.background = parse_rgb(c.at("background"), w + ".background");
  }
  if (j.contains("grammar")) {
    const json& g = j.at("grammar");
    const std::string w = where + ".grammar";
    check_keys(g, w, {"max_depth", "leaf_weight", "unary_weight", "binary_weight",
                      "constant_probability"});
    read(g, "max_depth", s.grammar.max_depth, w);
    read(g, "leaf_weight", s.grammar.leaf_weight, w);
    read(g, "unary_weight", s.grammar.unary_weight, w);
    read(g, "binary_weight", s.grammar.binary_weight, w);
    read(g, "constant_probability", s.grammar.constant_probability, w);
  }
  if (j.contains("curation")) {
    const json& c = j.at("curation");
    const std::string w = where + ".curation";
    check_keys(c, w, {"min_coverage", "max_coverage"});
    read(c, "min_coverage", s.curation.min_coverage, w);
    read(c, "max_coverage", s.curation.max_coverage, w);
  }
  return s;
}

}  // namespace

CorpusConfig parse_corpus_config(const json& j, const fs::path& base_dir) {
  check_keys(j, "root", {"abstract", "filtered", "palette", "external", "descriptor", "forest",
                         "external_embeddings"});
  CorpusConfig cfg;
  if (j.contains("abstract")) cfg.abstract = parse_abstract(j.at("abstract"));
  if (j.contains("filtered")) {
    const json& f = j.at("filtered");
    check_keys(f, "filtered", {"sources", "filter_count", "seed", "max_depth"});
    FilteredDatasetSpec s;
    s.sources = read_path(f, "sources", base_dir, "filtered");
    if (s.sources.empty()) bad("filtered", "'sources' is required");
    read(f, "filter_count", s.filter_count, "filtered");
    read(f, "seed", s.seed, "filtered");
    read(f, "max_depth", s.max_depth, "filtered");
    cfg.filtered = s;
  }
  if (j.contains("palette")) {
    const json& p = j.at("palette");
    check_keys(p, "palette", {"count", "seed", "file"});
    PaletteDatasetSpec s;
    read(p, "count", s.count, "palette");
    read(p, "seed", s.seed, "palette");
    s.file = read_path(p, "file", base_dir, "palette");
    cfg.palette = s;
  }
  if (j.contains("external")) {
    const json& list = j.at("external");
    if (!list.is_array()) bad("external", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string w = "external[" + std::to_string(i) + "]";
      check_keys(list[i], w, {"dir", "tag"});
      ExternalDatasetSpec s;
      s.dir = read_path(list[i], "dir", base_dir, w);
      if (s.dir.empty()) bad(w, "'dir' is required");
      std::string tag = "wikiart-like-external";
      read(list[i], "tag", tag, w);
      const auto parsed = parse_tag(tag);
      if (!parsed) bad(w, "unknown dataset tag '" + tag + "'");
      s.tag = *parsed;
      cfg.external.push_back(s);
    }
  }
  if (j.contains("descriptor")) {
    const json& d = j.at("descriptor");
    check_keys(d, "descriptor", {"grid", "color_bins", "gradient_bins", "resize_edge"});
    read(d, "grid", cfg.descriptor.grid, "descriptor");
    read(d, "color_bins", cfg.descriptor.color_bins, "descriptor");
    read(d, "gradient_bins", cfg.descriptor.gradient_bins, "descriptor");
    read(d, "resize_edge", cfg.descriptor.resize_edge, "descriptor");
  }
  if (j.contains("forest")) {
    const json& f = j.at("forest");
    check_keys(f, "forest", {"n_trees", "leaf_size", "seed"});
    read(f, "n_trees", cfg.forest.n_trees, "forest");
    read(f, "leaf_size", cfg.forest.leaf_size, "forest");
    read(f, "seed", cfg.forest.seed, "forest");
  }
  if (j.contains("external_embeddings")) {
    cfg.external_embeddings = read_path(j, "external_embeddings", base_dir, "root");
  }
  return cfg;
}

CorpusConfig load_corpus_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  return parse_corpus_config(j, path.parent_path());
}

CorpusBuild build_corpus(const CorpusConfig& config, const fs::path& out_dir, bool build_index) {
  fs::create_directories(out_dir);
  DatasetManifest manifest;
  std::size_t skipped = 0;
  auto add = [&](const ManifestFragment& f) {
    manifest.append(f);
    skipped += f.skipped;
  };

  if (config.abstract) add(build_abstract_dataset(*config.abstract, out_dir));
  if (config.filtered) {
    const auto& f = *config.filtered;
    const auto sources = load_source_images(f.sources);
    if (sources.empty()) {
      throw Error(ErrorCode::kEmptyInput, "no decodable source images in " + f.sources.string());
    }
    add(build_filtered_dataset(sources, f.filter_count, f.seed, out_dir, f.max_depth));
  }
  if (config.palette) {
    const auto& p = *config.palette;
    std::vector<Palette> palettes;
    if (!p.file.empty()) {
      const auto bytes = read_file(p.file);
      palettes = parse_palettes(std::string(bytes.begin(), bytes.end()));
    } else {
      palettes = random_palettes(p.seed, p.count);
      manifest.meta["palette.seed"] = std::to_string(p.seed);
    }
    add(build_palette_dataset(palettes, out_dir));
  }
  for (const auto& ext : config.external) add(import_external_dataset(ext.dir, ext.tag));

  CorpusBuild out;
  out.manifest_path = out_dir / "manifest.txt";
  out.skipped = skipped;
  if (build_index) {
    out.index_path = out_dir / "index.cobs";
    IndexOptions opts{config.descriptor, config.external_embeddings, config.forest};
    manifest = index_corpus(manifest, out_dir, opts, out.index_path).manifest;
  }
  manifest.save(out.manifest_path);
  out.manifest = std::move(manifest);
  return out;
}

}  // namespace obscurer::corpus
