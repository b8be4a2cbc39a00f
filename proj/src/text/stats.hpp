// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "text/instance.hpp"

namespace sacti::text {

struct SplitStats {
  std::string name;
  std::size_t instances = 0;
  std::map<std::string, std::size_t> per_label;
};

struct DatasetStats {
  std::vector<SplitStats> splits;
  std::size_t unique_compounds = 0;  // distinct compound strings over all splits
  std::size_t types = 0;             // distinct labels over all splits
};

struct NamedSplit {
  std::string name;
  const Dataset* data;
};

DatasetStats dataset_stats(const std::vector<NamedSplit>& splits);
nlohmann::json to_json(const DatasetStats& stats);

}  // namespace sacti::text
