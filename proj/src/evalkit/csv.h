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

#include <string>
#include <string_view>
#include <vector>

namespace obscurer::evalkit::detail {

// Minimal CSV: fields are quoted only when they contain a comma, quote or
// newline. Records never span lines here.
std::string csv_field(std::string_view s);
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no);
// Lines with any trailing '\r' removed; empty lines are kept.
std::vector<std::string> csv_lines(const std::string& text);

int parse_int(std::string_view s, std::size_t line_no, const char* what);
double parse_double(std::string_view s, std::size_t line_no, const char* what);
std::string format_double(double v);
// Fixed-point text with ties rounded away from zero, as printed tables do.
std::string format_fixed(double v, int decimals);

}  // namespace obscurer::evalkit::detail
