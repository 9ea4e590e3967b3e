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

#include "obscurer/service/http.h"

#include <httplib.h>

#include "json.hpp"
#include "obscurer/common/image_io.h"

namespace obscurer::service {
namespace {

using nlohmann::json;

constexpr std::size_t kMaxPayload = 32u << 20;

json set_json(const RetrievalSet& set) {
  json results = json::array();
  for (const auto& r : set.results) {
    results.push_back({{"id", r.id},
                       {"dataset", std::string(corpus::tag_name(r.tag))},
                       {"distance", r.distance},
                       {"url", r.url}});
  }
  return {{"seed",
           {{"kind", set.seed.kind == SeedRef::Kind::kUpload ? "upload" : "image"},
            {"ref", set.seed.ref}}},
          {"results", std::move(results)},
          {"underfilled", set.underfilled},
          {"timestamp", set.timestamp_ms}};
}

json board_json(const std::string& name, const std::vector<Pin>& pins) {
  json list = json::array();
  for (const auto& p : pins) {
    list.push_back({{"ref", p.ref}, {"timestamp", p.timestamp_ms}, {"session", p.session}});
  }
  return {{"board", name}, {"pins", std::move(list)}};
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view code, const std::string& msg) {
  reply(res, status, {{"error", code}, {"message", msg}});
}

// Runs a handler, turning library errors into JSON error responses.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      reply_error(res, http_status(e.code()), error_code_name(e.code()), e.what());
    } catch (const json::exception& e) {
      reply_error(res, 400, "BadRequest", e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, "Internal", e.what());
    }
  };
}

std::string session_of(const httplib::Request& req, const json* body) {
  if (body != nullptr && body->contains("session")) return body->at("session").get<std::string>();
  if (req.has_file("session")) return req.get_file_value("session").content;
  if (req.has_param("session")) return req.get_param_value("session");
  return "default";
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body);
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "body must be a JSON object");
  return j;
}

std::string sniff_content_type(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kPng[] = {0x89, 'P', 'N', 'G'};
  if (bytes.size() >= 4 && std::equal(kPng, kPng + 4, bytes.begin())) return "image/png";
  if (bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff) {
    return "image/jpeg";
  }
  return "application/octet-stream";
}

std::span<const std::uint8_t> as_bytes(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace

std::string to_json(const RetrievalSet& set) { return set_json(set).dump(); }

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownImage:
    case ErrorCode::kUnknownBoard:
      return 404;
    case ErrorCode::kHistoryEmpty:
      return 409;
    case ErrorCode::kUndecodableImage:
      return 415;
    case ErrorCode::kIndexUnavailable:
      return 503;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParseError:
    case ErrorCode::kImageTooSmall:
    case ErrorCode::kDimensionMismatch:
      return 400;
    default:
      return 500;
  }
}

void install_routes(httplib::Server& server, RetrievalService& service,
                    const std::optional<std::filesystem::path>& static_dir) {
  server.set_payload_max_length(kMaxPayload);

  server.Post("/api/search", guarded([&](const httplib::Request& req, httplib::Response& res) {
    if (req.is_multipart_form_data()) {
      if (!req.has_file("image")) {
        throw Error(ErrorCode::kInvalidArgument, "multipart search needs an 'image' part");
      }
      const auto part = req.get_file_value("image");
      reply(res, 200, set_json(service.search_by_upload(session_of(req, nullptr),
                                                        as_bytes(part.content))));
      return;
    }
    const auto type = req.get_header_value("Content-Type");
    if (type.starts_with("image/")) {
      reply(res, 200,
            set_json(service.search_by_upload(session_of(req, nullptr), as_bytes(req.body))));
      return;
    }
    const json body = parse_body(req);
    if (!body.contains("image_id")) {
      throw Error(ErrorCode::kInvalidArgument, "expected an image upload or {\"image_id\": ...}");
    }
    reply(res, 200,
          set_json(service.search_by_image_id(session_of(req, &body),
                                              body.at("image_id").get<std::string>())));
  }));

  server.Get(R"(/api/image/(.+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
    const std::string ref = req.matches[1];
    const auto path = service.image_file(ref);
    if (!path) throw Error(ErrorCode::kUnknownImage, ref);
    const auto bytes = read_file(*path);
    res.status = 200;
    res.set_header("Cache-Control", "public, max-age=86400");
    res.set_content(std::string(bytes.begin(), bytes.end()), sniff_content_type(bytes));
  }));

  server.Post(R"(/api/boards/([^/]+)/pins)",
              guarded([&](const httplib::Request& req, httplib::Response& res) {
                const std::string board = req.matches[1];
                const json body = parse_body(req);
                if (!body.contains("ref")) throw Error(ErrorCode::kInvalidArgument, "missing 'ref'");
                const auto pins = service.pin(session_of(req, &body), board,
                                              body.at("ref").get<std::string>());
                reply(res, 200, board_json(board, pins));
              }));

  server.Put(R"(/api/boards/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
    const std::string board = req.matches[1];
    service.create_board(board);
    reply(res, 200, board_json(board, service.board(board)));
  }));

  server.Get(R"(/api/boards/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
    const std::string board = req.matches[1];
    reply(res, 200, board_json(board, service.board(board)));
  }));

  server.Get("/api/boards", guarded([&](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, {{"boards", service.boards()}});
  }));

  server.Post(R"(/api/session/([^/]+)/undo)",
              guarded([&](const httplib::Request& req, httplib::Response& res) {
                reply(res, 200, set_json(service.undo(req.matches[1])));
              }));

  server.Get("/api/datasets", guarded([&](const httplib::Request&, httplib::Response& res) {
    json list = json::array();
    for (const auto& d : service.datasets()) {
      list.push_back({{"tag", std::string(corpus::tag_name(d.tag))}, {"count", d.count}});
    }
    reply(res, 200, {{"datasets", std::move(list)}});
  }));

  if (static_dir) {
    if (!server.set_mount_point("/", static_dir->string())) {
      throw Error(ErrorCode::kIoError, "static dir not found: " + static_dir->string());
    }
  }
}

}  // namespace obscurer::service
