// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "http_service.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "sacti/sacti.h"

namespace sacti::server {

using nlohmann::json;

namespace {

// Owns a string returned by the C API.
struct CString {
  char* p = nullptr;
  ~CString() { sacti_free_string(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

int http_status(sacti_status s) {
  switch (s) {
    case SACTI_OK:
      return 200;
    case SACTI_ERR_NOT_FOUND:
      return 404;
    case SACTI_ERR_UNAVAILABLE:
      return 503;
    case SACTI_ERR_INVALID_ARGUMENT:
    case SACTI_ERR_DIMENSION:
    case SACTI_ERR_INDEX:
    case SACTI_ERR_CONTRACT:
    case SACTI_ERR_SCHEMA:
    case SACTI_ERR_LABEL_SPACE:
      return 400;
    default:
      return 500;
  }
}

void send_json(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& message,
                const std::string& field = {}) {
  send_json(res, status, json{{"error", message}, {"status", kind}, {"field", field}}.dump());
}

// Sends the C API failure for `s`; returns true when `s` was an error.
bool failed(httplib::Response& res, sacti_status s) {
  if (s == SACTI_OK) return false;
  send_error(res, http_status(s), sacti_status_name(s), sacti_last_error(), sacti_last_error_field());
  return true;
}

bool require_store(httplib::Response& res, sacti_annotations* store) {
  if (store != nullptr) return true;
  send_error(res, 503, "unavailable", "annotation store is not configured");
  return false;
}

}  // namespace

std::pair<std::string, int> bind_address_from_env() {
  std::string host = "127.0.0.1";
  int port = 8080;
  if (const char* env = std::getenv("SACTI_BIND"); env != nullptr && *env != '\0') {
    const std::string v = env;
    const auto colon = v.rfind(':');
    if (colon == std::string::npos) {
      host = v;
    } else {
      if (colon > 0) host = v.substr(0, colon);
      try {
        port = std::stoi(v.substr(colon + 1));
      } catch (const std::exception&) {
        throw ServiceError("SACTI_BIND port is not a number: " + v, "invalid_argument", "SACTI_BIND");
      }
    }
  }
  return {host, port};
}

HttpService::HttpService(const ServiceOptions& options) : server_(std::make_unique<httplib::Server>()) {
  auto check = [](sacti_status s) {
    if (s != SACTI_OK) throw ServiceError(sacti_last_error(), sacti_status_name(s), sacti_last_error_field());
  };
  if (!options.checkpoint.empty()) check(sacti_model_load(options.checkpoint.c_str(), &model_));
  if (!options.instances.empty()) {
    json o{{"instances", options.instances},
           {"journal", options.journal.empty() ? options.instances + ".journal.jsonl" : options.journal},
           {"annotators_per_instance", options.annotators_per_instance}};
    std::vector<std::string> labels = options.labels;
    if (labels.empty() && model_ != nullptr) {
      CString info;
      check(sacti_model_info(model_, &info.p));
      labels = json::parse(info.str()).at("labels").get<std::vector<std::string>>();
    }
    if (!labels.empty()) o["labels"] = labels;
    const sacti_status s = sacti_annotations_open(o.dump().c_str(), &store_);
    if (s != SACTI_OK) {
      sacti_model_free(model_);
      check(s);
    }
  }
  routes();
}

HttpService::~HttpService() {
  stop();
  sacti_annotations_free(store_);
  sacti_model_free(model_);
}

void HttpService::routes() {
  httplib::Server& svr = *server_;
  sacti_model* model = model_;
  sacti_annotations* store = store_;

  svr.Get("/health", [model, store](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200,
              json{{"status", "ok"}, {"model_loaded", model != nullptr}, {"annotation", store != nullptr}}.dump());
  });

  svr.Post("/predict", [model](const httplib::Request& req, httplib::Response& res) {
    if (model == nullptr) return send_error(res, 503, "unavailable", "no checkpoint loaded", "checkpoint");
    CString out;
    if (failed(res, sacti_predict(model, req.body.c_str(), &out.p))) return;
    send_json(res, 200, out.str());
  });

  svr.Get("/annotation/next", [store](const httplib::Request& req, httplib::Response& res) {
    if (!require_store(res, store)) return;
    const std::string annotator = req.get_param_value("annotator");
    if (annotator.empty()) return send_error(res, 400, "invalid_argument", "annotator query parameter required", "annotator");
    CString out;
    if (failed(res, sacti_annotations_next(store, annotator.c_str(), &out.p))) return;
    send_json(res, 200, out.str());
  });

  svr.Get("/annotation/export", [store](const httplib::Request&, httplib::Response& res) {
    if (!require_store(res, store)) return;
    CString records, summary;
    if (failed(res, sacti_annotations_export(store, &records.p, &summary.p))) return;
    json list = json::array();
    const std::string text = records.str();
    std::size_t start = 0;
    while (start < text.size()) {
      const std::size_t end = text.find('\n', start);
      list.push_back(json::parse(text.substr(start, end - start)));
      if (end == std::string::npos) break;
      start = end + 1;
    }
    send_json(res, 200, json{{"records", list}, {"jsonl", text}, {"summary", json::parse(summary.str())}}.dump());
  });

  svr.Post("/annotation/import", [store](const httplib::Request& req, httplib::Response& res) {
    if (!require_store(res, store)) return;
    std::string jsonl = req.body;
    json body = json::parse(req.body, nullptr, false);
    if (!body.is_discarded() && body.is_object()) {
      if (!body.contains("jsonl") || !body.at("jsonl").is_string()) {
        return send_error(res, 400, "schema", "expected {\"jsonl\": string} or a JSONL body", "jsonl");
      }
      jsonl = body.at("jsonl").get<std::string>();
    }
    std::size_t added = 0;
    if (failed(res, sacti_annotations_import(store, jsonl.c_str(), &added))) return;
    send_json(res, 200, json{{"added", added}}.dump());
  });

  svr.Post(R"(/annotation/([^/]+))", [store](const httplib::Request& req, httplib::Response& res) {
    if (!require_store(res, store)) return;
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) return send_error(res, 400, "schema", "body must be a JSON object", "body");
    body["instance_id"] = req.matches[1].str();
    if (!body.contains("annotator_id") && req.has_param("annotator")) body["annotator_id"] = req.get_param_value("annotator");
    if (!body.contains("idempotency_key") && req.has_header("Idempotency-Key")) {
      body["idempotency_key"] = req.get_header_value("Idempotency-Key");
    }
    CString out;
    if (failed(res, sacti_annotations_submit(store, body.dump().c_str(), &out.p))) return;
    send_json(res, 200, out.str());
  });

  svr.Get("/admin/labels", [store](const httplib::Request&, httplib::Response& res) {
    if (!require_store(res, store)) return;
    CString out;
    if (failed(res, sacti_annotations_labels(store, &out.p))) return;
    send_json(res, 200, json{{"labels", json::parse(out.str())}}.dump());
  });

  svr.Post("/admin/labels", [store](const httplib::Request& req, httplib::Response& res) {
    if (!require_store(res, store)) return;
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("labels")) {
      return send_error(res, 400, "schema", "expected {\"labels\": [...]}", "labels");
    }
    if (failed(res, sacti_annotations_set_labels(store, body.at("labels").dump().c_str()))) return;
    CString out;
    if (failed(res, sacti_annotations_labels(store, &out.p))) return;
    send_json(res, 200, json{{"labels", json::parse(out.str())}}.dump());
  });

  svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      send_json(res, res.status, json{{"error", "no such route"}, {"status", "not_found"}, {"field", ""}}.dump());
    }
  });
  svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string msg = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      msg = e.what();
    } catch (...) {
    }
    send_error(res, 500, "internal", msg);
  });
}

bool HttpService::listen(const std::string& host, int port) { return server_->listen(host, port); }
int HttpService::bind_any(const std::string& host) { return server_->bind_to_any_port(host); }
bool HttpService::listen_after_bind() { return server_->listen_after_bind(); }
void HttpService::wait_until_ready() const { server_->wait_until_ready(); }
void HttpService::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

}  // namespace sacti::server
