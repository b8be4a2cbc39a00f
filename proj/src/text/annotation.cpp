// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "text/annotation.hpp"

#include <algorithm>
#include <set>

#include "common/error.hpp"

namespace sacti::text {

nlohmann::json to_json(const AnnotationRecord& r) {
  return {{"record_id", r.record_id}, {"instance_id", r.instance_id}, {"annotator_id", r.annotator_id},
          {"choice", r.choice},       {"comment", r.comment},         {"timestamp", r.timestamp}};
}

AnnotationRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::kSchema, "annotation record must be a JSON object");
  auto str = [&](const char* key, bool required) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
      if (required) fail(ErrorKind::kSchema, std::string("annotation record missing '") + key + "'", key);
      return {};
    }
    if (!it->is_string()) fail(ErrorKind::kSchema, std::string("'") + key + "' must be a string", key);
    return it->get<std::string>();
  };
  AnnotationRecord r;
  if (auto it = j.find("record_id"); it != j.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) fail(ErrorKind::kSchema, "'record_id' must be a non-negative integer", "record_id");
    r.record_id = it->get<std::uint64_t>();
  }
  r.instance_id = str("instance_id", true);
  r.annotator_id = str("annotator_id", true);
  r.choice = str("choice", true);
  r.comment = str("comment", false);
  r.timestamp = str("timestamp", false);
  return r;
}

namespace {

// instance id -> annotator -> latest choice
std::map<std::string, std::map<std::string, std::string>> latest_choices(const std::vector<AnnotationRecord>& records) {
  std::map<std::string, std::map<std::string, std::string>> out;
  for (const auto& r : records) out[r.instance_id][r.annotator_id] = r.choice;
  return out;
}

}  // namespace

AggregationResult aggregate_annotations(const std::vector<AnnotationRecord>& records, std::size_t min_agree) {
  AggregationResult result;
  for (const auto& [instance, by_annotator] : latest_choices(records)) {
    std::map<std::string, std::size_t> counts;
    for (const auto& [_, choice] : by_annotator) {
      if (choice != kNotSure) ++counts[choice];
    }
    std::size_t top = 0, holders = 0;
    std::string winner;
    for (const auto& [label, c] : counts) {
      if (c > top) {
        top = c;
        holders = 1;
        winner = label;
      } else if (c == top) {
        ++holders;
      }
    }
    if (top == 0 || top < min_agree || holders > 1) {
      result.dropped.push_back(instance);
    } else {
      result.labels.emplace(instance, winner);
    }
  }
  return result;
}

Dataset apply_labels(const Dataset& data, const AggregationResult& result) {
  Dataset out;
  for (const auto& inst : data) {
    auto it = result.labels.find(inst.id);
    if (it == result.labels.end()) continue;
    ContextInstance labeled = inst;
    labeled.label = it->second;
    out.push_back(std::move(labeled));
  }
  return out;
}

double cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) fail(ErrorKind::kInvalidArgument, "cohen_kappa needs non-empty label sequences");
  if (a.size() != b.size()) {
    fail(ErrorKind::kDimension, "cohen_kappa: sequences of length " + std::to_string(a.size()) + " and " +
                                    std::to_string(b.size()));
  }
  const double n = static_cast<double>(a.size());
  std::map<std::string, std::pair<double, double>> marginals;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) agree += 1.0;
    marginals[a[i]].first += 1.0;
    marginals[b[i]].second += 1.0;
  }
  const double p_o = agree / n;
  double p_e = 0.0;
  for (const auto& [_, m] : marginals) p_e += (m.first / n) * (m.second / n);
  if (p_e >= 1.0) return p_o >= 1.0 ? 1.0 : 0.0;
  return (p_o - p_e) / (1.0 - p_e);
}

std::vector<PairwiseKappa> pairwise_kappa(const std::vector<AnnotationRecord>& records) {
  const auto choices = latest_choices(records);
  std::set<std::string> annotators;
  for (const auto& r : records) annotators.insert(r.annotator_id);
  std::vector<PairwiseKappa> out;
  for (auto i = annotators.begin(); i != annotators.end(); ++i) {
    for (auto j = std::next(i); j != annotators.end(); ++j) {
      std::vector<std::string> a, b;
      for (const auto& [_, by_annotator] : choices) {
        auto ca = by_annotator.find(*i);
        auto cb = by_annotator.find(*j);
        if (ca == by_annotator.end() || cb == by_annotator.end()) continue;
        a.push_back(ca->second);
        b.push_back(cb->second);
      }
      if (a.empty()) continue;
      out.push_back({*i, *j, a.size(), cohen_kappa(a, b)});
    }
  }
  return out;
}

}  // namespace sacti::text
