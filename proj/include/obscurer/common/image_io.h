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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "obscurer/common/raster.h"

namespace obscurer {

// PNG encoding is deterministic for a given raster (fixed zlib level and
// no timestamp chunks), which the corpus determinism checks depend on.
std::vector<std::uint8_t> encode_png(const RasterImage& img);

// Decodes PNG or JPEG by signature. Palette, gray and alpha inputs are
// converted to RGB (alpha dropped). Throws kUndecodableImage.
RasterImage decode_image(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

RasterImage load_image(const std::filesystem::path& path);
void save_png(const RasterImage& img, const std::filesystem::path& path);

// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

}  // namespace obscurer
