// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "text/stats.hpp"

#include <set>

namespace sacti::text {

DatasetStats dataset_stats(const std::vector<NamedSplit>& splits) {
  DatasetStats stats;
  std::set<std::string> compounds, labels;
  for (const auto& split : splits) {
    SplitStats s;
    s.name = split.name;
    s.instances = split.data->size();
    for (const auto& inst : *split.data) {
      compounds.insert(inst.compound());
      if (!inst.label.empty()) {
        ++s.per_label[inst.label];
        labels.insert(inst.label);
      }
    }
    stats.splits.push_back(std::move(s));
  }
  stats.unique_compounds = compounds.size();
  stats.types = labels.size();
  return stats;
}

nlohmann::json to_json(const DatasetStats& stats) {
  nlohmann::json splits = nlohmann::json::array();
  for (const auto& s : stats.splits) {
    splits.push_back({{"name", s.name}, {"instances", s.instances}, {"per_label", s.per_label}});
  }
  return {{"splits", splits}, {"unique_compounds", stats.unique_compounds}, {"types", stats.types}};
}

}  // namespace sacti::text
