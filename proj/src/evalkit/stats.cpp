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

#include "obscurer/evalkit/stats.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "obscurer/common/error.h"

namespace obscurer::evalkit {

double binomial_test(std::int64_t successes, std::int64_t n, double p0) {
  if (n < 0 || successes < 0 || successes > n) {
    throw Error(ErrorCode::kInvalidParams, "need 0 <= successes <= n");
  }
  if (!(p0 > 0.0 && p0 < 1.0)) throw Error(ErrorCode::kInvalidParams, "p0 must lie in (0, 1)");
  if (successes == 0) return 1.0;

  const double lp = std::log(p0);
  const double lq = std::log1p(-p0);
  const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
  auto log_term = [&](std::int64_t k) {
    return lgn - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0) + static_cast<double>(k) * lp +
           static_cast<double>(n - k) * lq;
  };
  double peak = -INFINITY;
  for (std::int64_t k = successes; k <= n; ++k) peak = std::max(peak, log_term(k));
  double sum = 0.0;
  for (std::int64_t k = successes; k <= n; ++k) sum += std::exp(log_term(k) - peak);
  return std::min(1.0, std::exp(peak + std::log(sum)));
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(xs.size()) + " vs " + std::to_string(ys.size()) + " values");
  }
  if (xs.size() < 2) throw Error(ErrorCode::kInvalidParams, "pearson needs at least 2 points");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
  };
  if (constant(xs) || constant(ys)) throw Error(ErrorCode::kConstantSeries, "series is constant");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace obscurer::evalkit
