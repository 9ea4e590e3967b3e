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
#include <span>

namespace obscurer::evalkit {

// One-sided upper tail P[X >= successes] for X ~ Binomial(n, p0), summed
// in log space. Throws kInvalidParams.
double binomial_test(std::int64_t successes, std::int64_t n, double p0);

// Sample Pearson correlation. Throws kLengthMismatch, kConstantSeries,
// and kInvalidParams for fewer than two points.
double pearson(std::span<const double> xs, std::span<const double> ys);

}  // namespace obscurer::evalkit
