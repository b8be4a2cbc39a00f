// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "text/labels.hpp"

#include <set>

#include "common/error.hpp"

namespace sacti::text {

LabelVocab::LabelVocab(std::vector<std::string> names) {
  for (auto& n : names) {
    if (ids_.contains(n)) fail(ErrorKind::kInvalidArgument, "duplicate label '" + n + "'", "labels");
    intern(n);
  }
}

LabelVocab LabelVocab::from_values(const std::vector<std::string>& values) {
  std::set<std::string> unique(values.begin(), values.end());
  return LabelVocab(std::vector<std::string>(unique.begin(), unique.end()));
}

int LabelVocab::id(std::string_view name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) fail(ErrorKind::kLabelSpace, "label '" + std::string(name) + "' is not in the label set", "label");
  return it->second;
}

std::optional<int> LabelVocab::find(std::string_view name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& LabelVocab::name(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= names_.size()) {
    fail(ErrorKind::kIndex, "label id " + std::to_string(id) + " outside [0," + std::to_string(names_.size()) + ")");
  }
  return names_[static_cast<std::size_t>(id)];
}

int LabelVocab::intern(const std::string& name) {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  const int id = static_cast<int>(names_.size());
  names_.push_back(name);
  ids_.emplace(name, id);
  return id;
}

}  // namespace sacti::text
