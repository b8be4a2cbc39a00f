// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "text/instance.hpp"

namespace sacti::text {

inline constexpr const char* kNotSure = "NOT_SURE";

struct AnnotationRecord {
  std::uint64_t record_id = 0;
  std::string instance_id;
  std::string annotator_id;
  std::string choice;  // a label name or kNotSure
  std::string comment;
  std::string timestamp;  // ISO-8601 UTC

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

nlohmann::json to_json(const AnnotationRecord& r);
AnnotationRecord record_from_json(const nlohmann::json& j);

struct AggregationResult {
  std::map<std::string, std::string> labels;  // instance id -> plurality label
  std::vector<std::string> dropped;           // sorted instance ids

  friend bool operator==(const AggregationResult&, const AggregationResult&) = default;
};

// Plurality vote per instance, ignoring NOT_SURE. An instance is dropped when
// its top count is below `min_agree` or when two labels tie for the top.
// If an annotator labels an instance more than once, the latest record counts.
AggregationResult aggregate_annotations(const std::vector<AnnotationRecord>& records, std::size_t min_agree = 2);

// Labels `data` from an aggregation; dropped or unannotated instances are removed.
Dataset apply_labels(const Dataset& data, const AggregationResult& result);

// Chance-corrected agreement (p_o - p_e) / (1 - p_e). Returns 1 when both
// raters use one identical label throughout.
double cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct PairwiseKappa {
  std::string first;
  std::string second;
  std::size_t items = 0;
  double kappa = 0.0;
};

// Kappa for every annotator pair over the instances both annotated, with
// NOT_SURE treated as an ordinary category. Pairs sharing no instance are
// omitted. Sorted by (first, second).
std::vector<PairwiseKappa> pairwise_kappa(const std::vector<AnnotationRecord>& records);

}  // namespace sacti::text
