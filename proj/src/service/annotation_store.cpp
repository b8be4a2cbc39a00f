// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "service/annotation_store.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "common/error.hpp"

namespace sacti::service {

using nlohmann::json;

AnnotationStore::AnnotationStore(const AnnotationStoreOptions& options) : options_(options) {
  if (options_.annotators_per_instance == 0) {
    fail(ErrorKind::kInvalidArgument, "annotators_per_instance must be positive", "annotators_per_instance");
  }
  instances_ = text::load_jsonl_dataset(options_.instances);
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    if (!index_.emplace(instances_[i].id, i).second) {
      fail(ErrorKind::kSchema, "duplicate instance id '" + instances_[i].id + "'", "id");
    }
  }
  labels_ = options_.labels;
  if (labels_.empty()) {
    std::set<std::string> seen;
    for (const auto& inst : instances_) {
      if (!inst.label.empty()) seen.insert(inst.label);
    }
    labels_.assign(seen.begin(), seen.end());
  }
  replay();
}

void AnnotationStore::replay() {
  if (options_.journal.empty() || !std::filesystem::exists(options_.journal)) return;
  std::ifstream in(options_.journal);
  if (!in) fail(ErrorKind::kIo, "cannot read journal " + options_.journal.string(), "journal");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("type")) {
      fail(ErrorKind::kSchema, "journal line " + std::to_string(line_no) + " is malformed", "journal");
    }
    const std::string type = j.value("type", "");
    if (type == "labels") {
      labels_ = j.at("labels").get<std::vector<std::string>>();
    } else if (type == "record") {
      text::AnnotationRecord r = text::record_from_json(j.at("record"));
      const std::string key = j.value("idempotency_key", "");
      if (!key.empty()) idempotency_[key] = r.record_id;
      add_record(std::move(r));
    } else {
      fail(ErrorKind::kSchema, "journal line " + std::to_string(line_no) + " has unknown type '" + type + "'", "journal");
    }
  }
}

void AnnotationStore::append_line(const json& line) {
  if (options_.journal.empty()) return;
  std::ofstream out(options_.journal, std::ios::app | std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot append to journal " + options_.journal.string(), "journal");
  out << line.dump() << '\n';
  out.flush();
  if (!out) fail(ErrorKind::kIo, "write to journal " + options_.journal.string() + " failed", "journal");
}

void AnnotationStore::add_record(text::AnnotationRecord record) {
  next_id_ = std::max(next_id_, record.record_id + 1);
  annotators_[record.instance_id].insert(record.annotator_id);
  records_.push_back(std::move(record));
}

std::string AnnotationStore::now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

std::optional<text::ContextInstance> AnnotationStore::next(const std::string& annotator_id) const {
  if (annotator_id.empty()) fail(ErrorKind::kInvalidArgument, "annotator id is required", "annotator");
  std::lock_guard<std::mutex> lock(mu_);
  const text::ContextInstance* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& inst : instances_) {
    auto it = annotators_.find(inst.id);
    const std::size_t count = it == annotators_.end() ? 0 : it->second.size();
    if (count >= options_.annotators_per_instance) continue;
    if (it != annotators_.end() && it->second.contains(annotator_id)) continue;
    if (best == nullptr || count < best_count) {
      best = &inst;
      best_count = count;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

text::AnnotationRecord AnnotationStore::submit(const SubmitRequest& req) {
  if (req.annotator_id.empty()) fail(ErrorKind::kInvalidArgument, "annotator id is required", "annotator");
  std::lock_guard<std::mutex> lock(mu_);
  if (!req.idempotency_key.empty()) {
    auto it = idempotency_.find(req.idempotency_key);
    if (it != idempotency_.end()) {
      for (const auto& r : records_) {
        if (r.record_id == it->second) return r;
      }
    }
  }
  if (!index_.contains(req.instance_id)) {
    fail(ErrorKind::kNotFound, "unknown instance '" + req.instance_id + "'", "instance_id");
  }
  if (req.choice != text::kNotSure && std::find(labels_.begin(), labels_.end(), req.choice) == labels_.end()) {
    fail(ErrorKind::kInvalidArgument, "choice '" + req.choice + "' is not a configured label or NOT_SURE", "choice");
  }
  text::AnnotationRecord r;
  r.record_id = next_id_;
  r.instance_id = req.instance_id;
  r.annotator_id = req.annotator_id;
  r.choice = req.choice;
  r.comment = req.comment;
  r.timestamp = now_iso8601();
  json line{{"type", "record"}, {"record", text::to_json(r)}};
  if (!req.idempotency_key.empty()) line["idempotency_key"] = req.idempotency_key;
  append_line(line);
  if (!req.idempotency_key.empty()) idempotency_[req.idempotency_key] = r.record_id;
  add_record(r);
  return r;
}

std::vector<text::AnnotationRecord> AnnotationStore::records() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_;
}

std::vector<std::string> AnnotationStore::labels() const {
  std::lock_guard<std::mutex> lock(mu_);
  return labels_;
}

void AnnotationStore::set_labels(const std::vector<std::string>& labels) {
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty() || l == text::kNotSure) fail(ErrorKind::kInvalidArgument, "invalid label name '" + l + "'", "labels");
    if (!seen.insert(l).second) fail(ErrorKind::kInvalidArgument, "duplicate label '" + l + "'", "labels");
  }
  if (labels.empty()) fail(ErrorKind::kInvalidArgument, "label list must not be empty", "labels");
  std::lock_guard<std::mutex> lock(mu_);
  append_line(json{{"type", "labels"}, {"labels", labels}});
  labels_ = labels;
}

std::size_t AnnotationStore::progress(const std::string& annotator_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::size_t done = 0;
  for (const auto& [_, who] : annotators_) done += who.contains(annotator_id) ? 1 : 0;
  return done;
}

std::string AnnotationStore::export_jsonl() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::string out;
  for (const auto& r : records_) out += text::to_json(r).dump() + "\n";
  return out;
}

json AnnotationStore::export_summary() const {
  const std::vector<text::AnnotationRecord> recs = records();
  const text::AggregationResult agg = text::aggregate_annotations(recs);
  json kappa = json::array();
  for (const auto& k : text::pairwise_kappa(recs)) {
    kappa.push_back(json{{"first", k.first}, {"second", k.second}, {"items", k.items}, {"kappa", k.kappa}});
  }
  return json{{"labels", agg.labels}, {"dropped", agg.dropped}, {"kappa", kappa}, {"records", recs.size()}};
}

std::size_t AnnotationStore::import_jsonl(const std::string& text) {
  std::vector<text::AnnotationRecord> incoming;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::kSchema, "line " + std::to_string(line_no) + ": invalid JSON", "records");
    text::AnnotationRecord r;
    try {
      r = text::record_from_json(j);
    } catch (const Error& e) {
      fail(ErrorKind::kSchema, "line " + std::to_string(line_no) + ": " + e.what(), e.field());
    }
    if (!index_.contains(r.instance_id)) {
      fail(ErrorKind::kNotFound, "line " + std::to_string(line_no) + ": unknown instance '" + r.instance_id + "'",
           "instance_id");
    }
    incoming.push_back(std::move(r));
  }
  std::lock_guard<std::mutex> lock(mu_);
  auto same = [](const text::AnnotationRecord& a, const text::AnnotationRecord& b) {
    return a.instance_id == b.instance_id && a.annotator_id == b.annotator_id && a.choice == b.choice &&
           a.comment == b.comment && a.timestamp == b.timestamp;
  };
  std::size_t added = 0;
  for (auto& r : incoming) {
    bool dup = false;
    for (const auto& existing : records_) {
      if (same(existing, r)) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    r.record_id = next_id_;
    append_line(json{{"type", "record"}, {"record", text::to_json(r)}});
    add_record(std::move(r));
    ++added;
  }
  return added;
}

}  // namespace sacti::service
