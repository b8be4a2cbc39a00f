// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace sacti::text {

// Byte-pair-merge subword vocabulary over UTF-8 code points.
//
// Ids 0..2 are reserved (<pad>, <unk>, <sep>); the character inventory
// follows in code-point order, then one piece per learned merge. Training is
// fully deterministic: the most frequent adjacent pair wins and frequency
// ties go to the lexicographically smallest (left, right) pair.
class SubwordVocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBoundary = 2;
  static constexpr std::size_t kSpecialCount = 3;

  SubwordVocab();

  // `vocab_size` counts non-special pieces (characters plus merges).
  static SubwordVocab train(std::span<const std::string> corpus, std::size_t vocab_size);

  std::vector<int> encode(std::string_view token) const;
  std::string decode(std::span<const int> ids) const;

  std::size_t size() const { return pieces_.size(); }
  std::size_t character_count() const { return character_count_; }
  const std::string& piece(int id) const;
  std::optional<int> find(std::string_view piece) const;
  const std::vector<std::pair<std::string, std::string>>& merges() const { return merges_; }

  nlohmann::json to_json() const;
  static SubwordVocab from_json(const nlohmann::json& j);

  friend bool operator==(const SubwordVocab& a, const SubwordVocab& b) {
    return a.pieces_ == b.pieces_ && a.merges_ == b.merges_;
  }

 private:
  void add_piece(const std::string& piece);
  void index_merges();

  std::vector<std::string> pieces_;
  std::map<std::string, int, std::less<>> ids_;
  std::size_t character_count_ = 0;
  std::vector<std::pair<std::string, std::string>> merges_;
  std::map<std::pair<std::string, std::string>, std::size_t> merge_rank_;
};

}  // namespace sacti::text
