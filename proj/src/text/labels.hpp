// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sacti::text {

// Ordered, bijective name <-> id map for one classification task.
class LabelVocab {
 public:
  LabelVocab() = default;
  // Names must be unique; order defines ids.
  explicit LabelVocab(std::vector<std::string> names);
  // Sorted unique names.
  static LabelVocab from_values(const std::vector<std::string>& values);

  int id(std::string_view name) const;  // throws kLabelSpace when unknown
  std::optional<int> find(std::string_view name) const;
  const std::string& name(int id) const;
  int intern(const std::string& name);

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  const std::vector<std::string>& names() const { return names_; }

  nlohmann::json to_json() const { return names_; }
  static LabelVocab from_json(const nlohmann::json& j) { return LabelVocab(j.get<std::vector<std::string>>()); }

  friend bool operator==(const LabelVocab& a, const LabelVocab& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int, std::less<>> ids_;
};

}  // namespace sacti::text
