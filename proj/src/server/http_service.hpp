// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace httplib {
class Server;
}

struct sacti_model;
struct sacti_annotations;

namespace sacti::server {

struct ServiceOptions {
  std::string checkpoint;  // empty: /predict answers 503
  std::string instances;   // empty: annotation routes answer 503
  std::string journal;
  std::vector<std::string> labels;  // empty: the model's labels, else the instances' labels
  std::size_t annotators_per_instance = 3;
};

// Startup failure reported by the C API.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(const std::string& message, std::string status, std::string field)
      : std::runtime_error(message), status_(std::move(status)), field_(std::move(field)) {}
  const std::string& status() const { return status_; }
  const std::string& field() const { return field_; }

 private:
  std::string status_;
  std::string field_;
};

// "host:port" from SACTI_BIND, defaulting to 127.0.0.1:8080.
std::pair<std::string, int> bind_address_from_env();

// JSON over HTTP on top of the C API. Handlers run concurrently; the model is
// read-only and the annotation store serializes its own writes.
class HttpService {
 public:
  explicit HttpService(const ServiceOptions& options);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Blocks until stop().
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it; serve with listen_after_bind().
  int bind_any(const std::string& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

 private:
  void routes();

  std::unique_ptr<httplib::Server> server_;
  sacti_model* model_ = nullptr;
  sacti_annotations* store_ = nullptr;
};

}  // namespace sacti::server
