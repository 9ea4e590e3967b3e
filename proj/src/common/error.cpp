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

#include "obscurer/common/error.h"

#include <cmath>

#include "obscurer/common/raster.h"
#include "obscurer/common/rng.h"

namespace obscurer {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kUnboundInput: return "UnboundInput";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvalidSegment: return "InvalidSegment";
    case ErrorCode::kDepthExceeded: return "DepthExceeded";
    case ErrorCode::kImageTooSmall: return "ImageTooSmall";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kInconsistentDimension: return "InconsistentDimension";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kCorruptIndex: return "CorruptIndex";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kBudgetExhausted: return "BudgetExhausted";
    case ErrorCode::kMissingEmbedding: return "MissingEmbedding";
    case ErrorCode::kUndecodableImage: return "UndecodableImage";
    case ErrorCode::kIndexUnavailable: return "IndexUnavailable";
    case ErrorCode::kUnknownImage: return "UnknownImage";
    case ErrorCode::kUnknownBoard: return "UnknownBoard";
    case ErrorCode::kHistoryEmpty: return "HistoryEmpty";
    case ErrorCode::kDatasetTooSmall: return "DatasetTooSmall";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kConstantSeries: return "ConstantSeries";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyResponses: return "EmptyResponses";
    case ErrorCode::kNoRetrievals: return "NoRetrievals";
  }
  return "Unknown";
}

double Rng::normal() {
  double u1 = uniform();
  const double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

RasterImage::RasterImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative raster dimensions");
  }
  pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

}  // namespace obscurer
