// Copyright 2026 The LAQG Bench Authors. All Rights Reserved.
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
#include <memory>
#include <optional>
#include <string>

#include "laqg/anneval/study.hpp"

namespace httplib {
class Server;
}

namespace laqg::anneval {

/// Parses the body of POST /studies:
///   {"id", "n_items", "seed", "min_annotators", "scale": [lo, hi],
///    "sentence_cap", "runs": [{"model", "questions": {example id: text}}],
///    "examples": [{"id", "answer", "sentences"}]}
struct StudyRequest {
  std::string id;
  StudyConfig config;
  std::vector<GenerationRun> runs;
  std::vector<Candidate> candidates;
};
StudyRequest study_request_from_json(const nlohmann::json& j);

/// Registers the JSON API on `server`:
///   POST /studies                         create a study (201)
///   GET  /studies                         list study ids
///   POST /studies/{id}/annotators         register {"annotator"}
///   GET  /studies/{id}/next?annotator=    next blind item or {"done": true}
///   POST /studies/{id}/ratings            {"item_id", "annotator", "fluency", "correctness"}
///   GET  /studies/{id}/ratings            all stored ratings
///   GET  /studies/{id}/agreement          alpha per metric (409 if under-covered)
///   GET  /studies/{id}/summary            ratings grouped by answer length
/// Errors carry {"error": message} with 400 (malformed), 404 (unknown),
/// 409 (conflict or unmet precondition) or 422 (invalid values).
void install_routes(httplib::Server& server, StudyStore& store);

/// Blocking service: routes plus optional static hosting of the annotation
/// UI bundle at "/".
class AnnevalServer {
 public:
  AnnevalServer(std::filesystem::path data_dir, std::optional<std::filesystem::path> ui_dir = std::nullopt);
  ~AnnevalServer();

  StudyStore& store() { return store_; }
  /// Binds to `port` (0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  StudyStore store_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace laqg::anneval
