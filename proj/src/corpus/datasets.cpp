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

#include "obscurer/corpus/datasets.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "obscurer/common/error.h"
#include "obscurer/common/image_io.h"
#include "obscurer/common/parallel.h"
#include "obscurer/common/rng.h"
#include "obscurer/features/descriptor.h"

namespace obscurer::corpus {
namespace {

namespace fs = std::filesystem;

// Stream ids for seeds derived from a dataset seed.
constexpr std::uint64_t kTransformStream = 0x7472616e73ULL;

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::size_t pick_weighted(Rng& rng, const std::vector<WeightedTransform>& items, double total) {
  double r = rng.uniform() * total;
  for (std::size_t i = 0; i < items.size(); ++i) {
    r -= items[i].weight;
    if (r < 0.0) return i;
  }
  return items.size() - 1;
}

void draw_frame(RasterImage& img, int width, Rgb color) {
  const int w = img.width();
  const int h = img.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x < width || y < width || x >= w - width || y >= h - width) img.set(x, y, color);
    }
  }
}

struct Attempt {
  RasterImage image;
  std::string genome_text;
  bool accepted = false;
  bool bordered = false;
};

Attempt run_attempt(const AbstractDatasetSpec& spec, std::uint64_t index, double total_weight) {
  Rng pick(derive_seed(spec.seed ^ kTransformStream, index));
  const auto& transform = spec.transforms[pick_weighted(pick, spec.transforms, total_weight)];
  const auto genome = imagegen::random_genome(derive_seed(spec.seed, index), spec.grammar);

  Attempt out;
  out.image = imagegen::render_particle_image(genome, spec.canvas, transform.transform);
  const Rgb bg = imagegen::resolve_background(spec.canvas, genome);
  out.accepted = spec.curation.accepts(imagegen::coverage_score(out.image, bg));
  if (!out.accepted) return out;
  out.genome_text = imagegen::genome_to_text(genome);
  out.genome_text += "transform " + std::string(imagegen::transform_name(transform.transform.kind)) + "\n";
  if (spec.border_width > 0 && transform.transform.kind == imagegen::TransformKind::kIdentity) {
    draw_frame(out.image, spec.border_width,
               Rgb{static_cast<std::uint8_t>(255 - bg.r), static_cast<std::uint8_t>(255 - bg.g),
                   static_cast<std::uint8_t>(255 - bg.b)});
    out.bordered = true;
  }
  return out;
}

std::vector<fs::path> sorted_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, "not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return files;
}

std::optional<RasterImage> try_load(const fs::path& path) {
  try {
    auto img = load_image(path);
    if (img.width() < features::kMinDescriptorEdge || img.height() < features::kMinDescriptorEdge) {
      return std::nullopt;
    }
    return img;
  } catch (const Error&) {
    return std::nullopt;
  }
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

Rgb parse_hex_color(std::string_view tok) {
  if (tok.size() != 7 || tok[0] != '#') {
    throw Error(ErrorCode::kParseError, "bad color '" + std::string(tok) + "'");
  }
  std::uint8_t ch[3];
  for (int i = 0; i < 3; ++i) {
    const int hi = hex_digit(tok[1 + 2 * i]);
    const int lo = hex_digit(tok[2 + 2 * i]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::kParseError, "bad color '" + std::string(tok) + "'");
    ch[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return {ch[0], ch[1], ch[2]};
}

}  // namespace

ManifestFragment build_abstract_dataset(const AbstractDatasetSpec& spec, const fs::path& root,
                                        const std::string& subdir) {
  if (spec.count < 1) throw Error(ErrorCode::kInvalidArgument, "abstract count must be >= 1");
  if (spec.transforms.empty()) throw Error(ErrorCode::kInvalidArgument, "no transforms");
  if (spec.border_width < 0) throw Error(ErrorCode::kInvalidArgument, "negative border width");
  spec.canvas.validate();
  spec.grammar.validate();
  double total_weight = 0.0;
  for (const auto& t : spec.transforms) {
    t.transform.validate();
    if (!(t.weight >= 0.0) || !std::isfinite(t.weight)) {
      throw Error(ErrorCode::kInvalidArgument, "transform weight must be finite and >= 0");
    }
    total_weight += t.weight;
  }
  if (total_weight <= 0.0) throw Error(ErrorCode::kInvalidArgument, "all transform weights are 0");

  fs::create_directories(root / subdir);
  const std::uint64_t budget = static_cast<std::uint64_t>(spec.count) * kMaxAttemptsPerImage;
  const std::size_t batch = std::max<std::size_t>(16, 4 * default_workers());

  ManifestFragment out;
  std::uint64_t next = 0;
  while (out.records.size() < static_cast<std::size_t>(spec.count) && next < budget) {
    const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(batch, budget - next));
    std::vector<Attempt> attempts(n);
    parallel_for(n, [&](std::size_t i) { attempts[i] = run_attempt(spec, next + i, total_weight); });
    // Acceptance is decided in attempt order, so the outcome does not
    // depend on the batch size or worker count.
    for (std::size_t i = 0; i < n && out.records.size() < static_cast<std::size_t>(spec.count); ++i) {
      if (!attempts[i].accepted) continue;
      const std::size_t index = out.records.size();
      ImageRecord rec;
      rec.id = "abstract_" + std::to_string(spec.seed) + "_" + std::to_string(index);
      rec.tag = DatasetTag::kAbstract;
      rec.path = (fs::path(subdir) / (rec.id + ".png")).generic_string();
      rec.crop_fraction = attempts[i].bordered ? kBorderedCropFraction : 0.0;
      save_png(attempts[i].image, root / rec.path);
      write_text(root / subdir / (rec.id + ".txt"), attempts[i].genome_text);
      out.records.push_back(std::move(rec));
    }
    next += n;
  }
  if (out.records.size() < static_cast<std::size_t>(spec.count)) {
    throw Error(ErrorCode::kBudgetExhausted,
                "only " + std::to_string(out.records.size()) + " of " + std::to_string(spec.count) +
                    " images survived curation in " + std::to_string(budget) + " attempts");
  }
  out.meta["abstract.seed"] = std::to_string(spec.seed);
  out.meta["abstract.count"] = std::to_string(spec.count);
  return out;
}

ManifestFragment build_filtered_dataset(const std::vector<SourceImage>& sources,
                                        const filtertree::FilterLibrary& library,
                                        const fs::path& root, const std::string& subdir) {
  if (sources.empty()) throw Error(ErrorCode::kEmptyInput, "filtered dataset needs a source image");
  if (library.filters.empty()) throw Error(ErrorCode::kEmptyInput, "empty filter library");

  fs::create_directories(root / subdir / "filters");
  for (std::size_t fi = 0; fi < library.filters.size(); ++fi) {
    write_text(root / subdir / "filters" / ("filter_" + std::to_string(fi) + ".txt"),
               filtertree::to_sexpr(*library.filters[fi]) + "\n");
  }

  const std::size_t nf = library.filters.size();
  ManifestFragment out;
  out.records.resize(sources.size() * nf);
  parallel_for(out.records.size(), [&](std::size_t k) {
    const std::size_t si = k / nf;
    const std::size_t fi = k % nf;
    ImageRecord& rec = out.records[k];
    rec.id = "filtered_" + std::to_string(library.seed) + "_" + std::to_string(si) + "_" +
             std::to_string(fi);
    rec.tag = DatasetTag::kFiltered;
    rec.path = (fs::path(subdir) / (rec.id + ".png")).generic_string();
    save_png(filtertree::apply_filter(*library.filters[fi], sources[si].image), root / rec.path);
  });
  out.meta["filtered.seed"] = std::to_string(library.seed);
  out.meta["filtered.filters"] = std::to_string(nf);
  std::string names;
  for (std::size_t si = 0; si < sources.size(); ++si) {
    if (si) names += ',';
    names += sources[si].name;
  }
  out.meta["filtered.sources"] = names;
  return out;
}

ManifestFragment build_filtered_dataset(const std::vector<SourceImage>& sources, int filter_count,
                                        std::uint64_t seed, const fs::path& root, int max_depth) {
  if (filter_count < 1) throw Error(ErrorCode::kInvalidArgument, "filter_count must be >= 1");
  return build_filtered_dataset(
      sources, filtertree::random_filter_library(seed, filter_count, max_depth), root);
}

RasterImage render_palette(const Palette& palette) {
  RasterImage img(kPaletteWidth, kPaletteHeight);
  const int stripe = kPaletteWidth / 5;
  for (int y = 0; y < kPaletteHeight; ++y) {
    for (int x = 0; x < kPaletteWidth; ++x) img.set(x, y, palette[x / stripe]);
  }
  return img;
}

std::vector<Palette> random_palettes(std::uint64_t seed, int count) {
  if (count < 0) throw Error(ErrorCode::kInvalidArgument, "negative palette count");
  Rng rng(seed);
  std::vector<Palette> out(static_cast<std::size_t>(count));
  for (auto& p : out) {
    for (auto& c : p) {
      c.r = static_cast<std::uint8_t>(rng.below(256));
      c.g = static_cast<std::uint8_t>(rng.below(256));
      c.b = static_cast<std::uint8_t>(rng.below(256));
    }
  }
  return out;
}

std::vector<Palette> parse_palettes(const std::string& text) {
  std::vector<Palette> out;
  std::size_t line_start = 0;
  std::size_t line_no = 0;
  while (line_start <= text.size()) {
    const std::size_t line_end = std::min(text.find('\n', line_start), text.size());
    std::string line = text.substr(line_start, line_end - line_start);
    line_start = line_end + 1;
    ++line_no;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::replace(line.begin(), line.end(), '\t', ' ');
    std::replace(line.begin(), line.end(), '\r', ' ');
    std::vector<std::string_view> tokens;
    std::string_view rest(line);
    while (!rest.empty()) {
      const auto b = rest.find_first_not_of(' ');
      if (b == std::string_view::npos) break;
      rest.remove_prefix(b);
      const auto e = std::min(rest.find(' '), rest.size());
      tokens.push_back(rest.substr(0, e));
      rest.remove_prefix(e);
    }
    if (tokens.empty()) continue;
    if (tokens.size() != 5) {
      throw Error(ErrorCode::kParseError, "palette line " + std::to_string(line_no) +
                                              " has " + std::to_string(tokens.size()) +
                                              " colors, expected 5");
    }
    Palette p;
    for (int i = 0; i < 5; ++i) p[i] = parse_hex_color(tokens[i]);
    out.push_back(p);
  }
  return out;
}

ManifestFragment build_palette_dataset(const std::vector<Palette>& palettes, const fs::path& root,
                                       const std::string& subdir) {
  fs::create_directories(root / subdir);
  ManifestFragment out;
  out.records.resize(palettes.size());
  parallel_for(palettes.size(), [&](std::size_t i) {
    ImageRecord& rec = out.records[i];
    rec.id = "palette_" + std::to_string(i);
    rec.tag = DatasetTag::kPalette;
    rec.path = (fs::path(subdir) / (rec.id + ".png")).generic_string();
    save_png(render_palette(palettes[i]), root / rec.path);
  });
  out.meta["palette.count"] = std::to_string(palettes.size());
  return out;
}

ManifestFragment import_external_dataset(const fs::path& dir, DatasetTag tag) {
  const auto files = sorted_files(dir);
  std::vector<char> ok(files.size(), 0);
  parallel_for(files.size(), [&](std::size_t i) { ok[i] = try_load(files[i]).has_value(); });

  ManifestFragment out;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!ok[i]) {
      ++out.skipped;
      continue;
    }
    ImageRecord rec;
    rec.id = std::string(tag_name(tag)) + "_" + files[i].filename().string();
    rec.tag = tag;
    rec.path = fs::absolute(files[i]).lexically_normal().generic_string();
    out.records.push_back(std::move(rec));
  }
  out.meta[std::string(tag_name(tag)) + ".skipped"] = std::to_string(out.skipped);
  return out;
}

std::vector<SourceImage> load_source_images(const fs::path& dir) {
  std::vector<SourceImage> out;
  for (const auto& file : sorted_files(dir)) {
    if (auto img = try_load(file)) out.push_back({file.filename().string(), std::move(*img)});
  }
  return out;
}

RasterImage crop_border(const RasterImage& img, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 0.25)) {
    throw Error(ErrorCode::kInvalidArgument, "crop fraction must lie in [0, 0.25]");
  }
  const int dx = static_cast<int>(std::floor(fraction * img.width()));
  const int dy = static_cast<int>(std::floor(fraction * img.height()));
  if (dx == 0 && dy == 0) return img;
  RasterImage out(img.width() - 2 * dx, img.height() - 2 * dy);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) out.set(x, y, img.at(x + dx, y + dy));
  }
  return out;
}

}  // namespace obscurer::corpus
