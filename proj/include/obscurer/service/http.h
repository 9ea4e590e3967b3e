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

#include <filesystem>
#include <optional>
#include <string>

#include "obscurer/common/error.h"
#include "obscurer/service/service.h"

namespace httplib {
class Server;
}

namespace obscurer::service {

// JSON shapes shared by the HTTP layer and the CLI.
std::string to_json(const RetrievalSet& set);

// Installs the /api routes, and a static file mount at / when
// static_dir is set. The service must outlive the server.
void install_routes(httplib::Server& server, RetrievalService& service,
                    const std::optional<std::filesystem::path>& static_dir = std::nullopt);

// Maps an error code to the HTTP status the API reports it with.
int http_status(ErrorCode code);

}  // namespace obscurer::service
