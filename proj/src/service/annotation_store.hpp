// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "text/annotation.hpp"
#include "text/instance.hpp"

namespace sacti::service {

struct AnnotationStoreOptions {
  std::filesystem::path instances;  // JSONL of instances to annotate
  std::filesystem::path journal;    // append-only JSONL; created when missing
  std::vector<std::string> labels;  // initial choices; the journal may override
  std::size_t annotators_per_instance = 3;
};

struct SubmitRequest {
  std::string instance_id;
  std::string annotator_id;
  std::string choice;
  std::string comment;
  std::string idempotency_key;  // repeated keys return the first record
};

// Instance queue plus append-only record journal. All methods are safe to
// call from several threads; writes are serialized.
class AnnotationStore {
 public:
  explicit AnnotationStore(const AnnotationStoreOptions& options);

  // Least-annotated instance this annotator has not labeled yet and that still
  // needs annotators; ties go to queue order.
  std::optional<text::ContextInstance> next(const std::string& annotator_id) const;
  // Fails with kNotFound for unknown instances and kInvalidArgument (field
  // "choice") for choices outside labels and NOT_SURE.
  text::AnnotationRecord submit(const SubmitRequest& request);

  std::vector<text::AnnotationRecord> records() const;
  std::vector<std::string> labels() const;
  void set_labels(const std::vector<std::string>& labels);
  std::size_t progress(const std::string& annotator_id) const;
  std::size_t instance_count() const { return instances_.size(); }

  // Records as JSONL.
  std::string export_jsonl() const;
  // {"labels": {...}, "dropped": [...], "kappa": [{first, second, items, kappa}], "records": N}
  nlohmann::json export_summary() const;
  // Appends records not already present (same instance, annotator, choice,
  // comment and timestamp). Returns how many were added.
  std::size_t import_jsonl(const std::string& text);

 private:
  void replay();
  void append_line(const nlohmann::json& line);
  void add_record(text::AnnotationRecord record);
  static std::string now_iso8601();

  AnnotationStoreOptions options_;
  text::Dataset instances_;
  std::map<std::string, std::size_t> index_;
  mutable std::mutex mu_;
  std::vector<std::string> labels_;
  std::vector<text::AnnotationRecord> records_;
  std::map<std::string, std::set<std::string>> annotators_;  // instance -> annotators
  std::map<std::string, std::uint64_t> idempotency_;         // key -> record id
  std::uint64_t next_id_ = 1;
};

}  // namespace sacti::service
