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

#include "obscurer/features/embedding.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "obscurer/common/error.h"

namespace obscurer::features {

EmbeddingVector EmbeddingVector::normalized(std::vector<double> raw) {
  double sum_sq = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "embedding entry is not finite");
    }
    sum_sq += v * v;
  }
  const double norm = std::sqrt(sum_sq);
  if (!(norm >= 1e-12)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot normalize an all-zero vector");
  }
  for (double& v : raw) v /= norm;
  return EmbeddingVector(std::move(raw));
}

std::vector<float> EmbeddingVector::to_f32() const {
  return {values_.begin(), values_.end()};
}

double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(a.dimension()) + " vs " + std::to_string(b.dimension()));
  }
  double dot = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) dot += av[i] * bv[i];
  const double d = 1.0 - dot;
  return d < 0.0 ? 0.0 : (d > 2.0 ? 2.0 : d);
}

std::map<std::string, EmbeddingVector> parse_external_embeddings(const std::string& text) {
  std::map<std::string, EmbeddingVector> out;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string id;
    if (!(fields >> id)) continue;  // blank

    std::vector<double> raw;
    std::string tok;
    while (fields >> tok) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::kMalformedRow,
                    "line " + std::to_string(line_no) + ": bad value '" + tok + "'");
      }
      raw.push_back(v);
    }
    if (raw.empty()) {
      throw Error(ErrorCode::kMalformedRow, "line " + std::to_string(line_no) + ": no values");
    }
    if (dim == 0) {
      dim = raw.size();
    } else if (raw.size() != dim) {
      throw Error(ErrorCode::kInconsistentDimension,
                  "line " + std::to_string(line_no) + ": dimension " +
                      std::to_string(raw.size()) + ", expected " + std::to_string(dim));
    }
    if (out.contains(id)) {
      throw Error(ErrorCode::kDuplicateId, "line " + std::to_string(line_no) + ": " + id);
    }
    try {
      out.emplace(id, EmbeddingVector::normalized(std::move(raw)));
    } catch (const Error&) {
      throw Error(ErrorCode::kMalformedRow,
                  "line " + std::to_string(line_no) + ": zero vector for " + id);
    }
  }
  return out;
}

std::map<std::string, EmbeddingVector> load_external_embeddings(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_external_embeddings(buf.str());
}

}  // namespace obscurer::features
