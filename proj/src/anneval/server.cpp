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

#include "laqg/anneval/server.hpp"

#include "httplib.h"

namespace laqg::anneval {

using nlohmann::json;

StudyRequest study_request_from_json(const json& j) {
  StudyRequest req;
  try {
    req.id = j.at("id").get<std::string>();
    req.config = config_from_json(j);
    for (const auto& r : j.at("runs")) {
      GenerationRun run;
      run.model = r.at("model").get<std::string>();
      run.questions = r.at("questions").get<std::map<std::string, std::string>>();
      req.runs.push_back(std::move(run));
    }
    for (const auto& e : j.at("examples")) {
      req.candidates.push_back(
          {e.at("id").get<std::string>(), e.at("answer").get<std::string>(), e.at("sentences").get<std::size_t>()});
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed study request: ") + e.what());
  }
  return req;
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

/// Runs `fn`, translating toolkit errors into HTTP statuses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const json::exception& e) {
    reply(res, 400, {{"error", std::string("malformed JSON: ") + e.what()}});
  } catch (const NotFoundError& e) {
    reply(res, 404, {{"error", e.what()}});
  } catch (const ConflictError& e) {
    reply(res, 409, {{"error", e.what()}});
  } catch (const ContractError& e) {
    reply(res, 409, {{"error", e.what()}});
  } catch (const DataError& e) {
    reply(res, 422, {{"error", e.what()}});
  } catch (const ConfigError& e) {
    reply(res, 422, {{"error", e.what()}});
  } catch (const std::exception& e) {
    reply(res, 500, {{"error", e.what()}});
  }
}

}  // namespace

void install_routes(httplib::Server& server, StudyStore& store) {
  server.Post("/studies", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      StudyRequest r = study_request_from_json(json::parse(req.body));
      Study& s = store.create(r.id, r.config, r.runs, r.candidates);
      reply(res, 201, {{"id", s.id()}, {"items", s.items().size()}, {"models", s.models()}});
    });
  });
  server.Get("/studies", [&store](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, {{"studies", store.ids()}}); });
  });
  server.Post(R"(/studies/([\w-]+)/annotators)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      Study& s = store.get(req.matches[1]);
      const std::string who = json::parse(req.body).at("annotator").get<std::string>();
      const bool created = s.register_annotator(who);
      reply(res, created ? 201 : 200, {{"annotator", who}, {"registered", created}});
    });
  });
  server.Get(R"(/studies/([\w-]+)/next)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      Study& s = store.get(req.matches[1]);
      if (!req.has_param("annotator")) throw DataError("missing ?annotator=");
      const std::string who = req.get_param_value("annotator");
      auto item = s.next_item(who);
      const Progress p = s.progress(who);
      json body = {{"done", !item.has_value()}, {"progress", {{"rated", p.rated}, {"total", p.total}}}};
      if (item) body["item"] = public_json(*item);
      reply(res, 200, body);
    });
  });
  server.Post(R"(/studies/([\w-]+)/ratings)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      Study& s = store.get(req.matches[1]);
      RatingRecord stored = s.record_rating(rating_from_json(json::parse(req.body)));
      reply(res, 201, to_json(stored));
    });
  });
  server.Get(R"(/studies/([\w-]+)/ratings)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      json out = json::array();
      for (const auto& r : store.get(req.matches[1]).ratings()) out.push_back(to_json(r));
      reply(res, 200, {{"ratings", out}});
    });
  });
  server.Get(R"(/studies/([\w-]+)/agreement)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, to_json(store.get(req.matches[1]).agreement())); });
  });
  server.Get(R"(/studies/([\w-]+)/summary)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const LengthSummary s = store.get(req.matches[1]).summarize_by_length();
      json body = to_json(s);
      body["table"] = render_table(s);
      reply(res, 200, body);
    });
  });
}

AnnevalServer::AnnevalServer(std::filesystem::path data_dir, std::optional<std::filesystem::path> ui_dir)
    : store_(std::move(data_dir)), server_(std::make_unique<httplib::Server>()) {
  install_routes(*server_, store_);
  if (ui_dir && !server_->set_mount_point("/", ui_dir->string())) {
    throw IoError("annotation UI directory not found: " + ui_dir->string());
  }
}

AnnevalServer::~AnnevalServer() = default;

int AnnevalServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void AnnevalServer::listen() { server_->listen_after_bind(); }

void AnnevalServer::stop() { server_->stop(); }

}  // namespace laqg::anneval
