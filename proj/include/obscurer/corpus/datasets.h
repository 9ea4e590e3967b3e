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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "obscurer/common/raster.h"
#include "obscurer/corpus/manifest.h"
#include "obscurer/filtertree/filter.h"
#include "obscurer/imagegen/render.h"

namespace obscurer::corpus {

// Bordered abstract renders lose this fraction per side before analysis.
inline constexpr double kBorderedCropFraction = 0.08;
inline constexpr int kMaxAttemptsPerImage = 20;

struct WeightedTransform {
  imagegen::LineTransform transform;
  double weight = 1.0;
};

struct AbstractDatasetSpec {
  int count = 100;
  std::uint64_t seed = 0;
  std::vector<WeightedTransform> transforms{{}};
  imagegen::CanvasSpec canvas;
  imagegen::Grammar grammar;
  imagegen::CurationThresholds curation;
  // When positive, untransformed renders get a frame this wide and are
  // indexed with kBorderedCropFraction.
  int border_width = 0;
};

// Renders particle images, discarding those outside the coverage
// thresholds, until `count` survive. Files go to root/subdir as
// abstract_<seed>_<index>.png plus a .txt genome sidecar. Throws
// kBudgetExhausted after 20 * count attempts.
ManifestFragment build_abstract_dataset(const AbstractDatasetSpec& spec,
                                        const std::filesystem::path& root,
                                        const std::string& subdir = "abstract");

struct SourceImage {
  std::string name;
  RasterImage image;
};

// Every (source, filter) pair yields one record with id
// filtered_<seed>_<source>_<filter>. Filter sidecars go to subdir/filters.
ManifestFragment build_filtered_dataset(const std::vector<SourceImage>& sources,
                                        const filtertree::FilterLibrary& library,
                                        const std::filesystem::path& root,
                                        const std::string& subdir = "filtered");
ManifestFragment build_filtered_dataset(const std::vector<SourceImage>& sources,
                                        int filter_count, std::uint64_t seed,
                                        const std::filesystem::path& root, int max_depth = 4);

using Palette = std::array<Rgb, 5>;

inline constexpr int kPaletteWidth = 100;
inline constexpr int kPaletteHeight = 60;

// Five equal-width vertical stripes on a 100x60 thumbnail.
RasterImage render_palette(const Palette& palette);
std::vector<Palette> random_palettes(std::uint64_t seed, int count);
// One palette per line: five #rrggbb colors separated by spaces or commas.
std::vector<Palette> parse_palettes(const std::string& text);

ManifestFragment build_palette_dataset(const std::vector<Palette>& palettes,
                                       const std::filesystem::path& root,
                                       const std::string& subdir = "palette");

// One record per decodable image (PNG/JPEG) in dir, sorted by filename,
// with absolute paths. Undecodable or too-small files are counted in
// `skipped`. A missing directory is an error; an empty one is not.
ManifestFragment import_external_dataset(const std::filesystem::path& dir, DatasetTag tag);

// Sources for the filtered dataset: every decodable image in dir.
std::vector<SourceImage> load_source_images(const std::filesystem::path& dir);

// Removes floor(fraction * edge) pixels from each side. fraction in [0, 0.25].
RasterImage crop_border(const RasterImage& img, double fraction);

}  // namespace obscurer::corpus
