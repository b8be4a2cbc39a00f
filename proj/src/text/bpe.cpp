// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "text/bpe.hpp"

#include <limits>
#include <set>

#include "common/error.hpp"
#include "text/utf8.hpp"

namespace sacti::text {

namespace {
const char* const kSpecials[] = {"<pad>", "<unk>", "<sep>"};
}

SubwordVocab::SubwordVocab() {
  for (const char* s : kSpecials) add_piece(s);
}

void SubwordVocab::add_piece(const std::string& piece) {
  if (ids_.contains(piece)) return;
  ids_.emplace(piece, static_cast<int>(pieces_.size()));
  pieces_.push_back(piece);
}

void SubwordVocab::index_merges() {
  merge_rank_.clear();
  for (std::size_t i = 0; i < merges_.size(); ++i) merge_rank_.emplace(merges_[i], i);
}

SubwordVocab SubwordVocab::train(std::span<const std::string> corpus, std::size_t vocab_size) {
  if (corpus.empty()) fail(ErrorKind::kInvalidArgument, "cannot train a subword vocabulary on an empty corpus", "corpus");

  std::map<std::string, std::size_t> counts;
  for (const auto& token : corpus) {
    if (!token.empty()) ++counts[token];
  }
  if (counts.empty()) fail(ErrorKind::kInvalidArgument, "corpus contains only empty tokens", "corpus");

  std::vector<std::pair<std::vector<std::string>, std::size_t>> words;
  std::set<std::string> chars;
  for (const auto& [token, count] : counts) {
    auto symbols = split_code_points(token);
    chars.insert(symbols.begin(), symbols.end());
    words.emplace_back(std::move(symbols), count);
  }
  if (vocab_size < chars.size()) {
    fail(ErrorKind::kInvalidArgument,
         "vocab_size " + std::to_string(vocab_size) + " is below the character inventory of " +
             std::to_string(chars.size()),
         "vocab_size");
  }

  SubwordVocab vocab;
  for (const auto& c : chars) vocab.add_piece(c);
  vocab.character_count_ = chars.size();

  while (vocab.size() - kSpecialCount < vocab_size) {
    std::map<std::pair<std::string, std::string>, std::size_t> pair_counts;
    for (const auto& [symbols, count] : words) {
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i) pair_counts[{symbols[i], symbols[i + 1]}] += count;
    }
    if (pair_counts.empty()) break;
    // std::map iterates in lexicographic order, so the first maximum wins ties.
    auto best = pair_counts.begin();
    for (auto it = pair_counts.begin(); it != pair_counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    const auto [left, right] = best->first;
    const std::string merged = left + right;
    for (auto& [symbols, _] : words) {
      std::vector<std::string> next;
      next.reserve(symbols.size());
      for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
          next.push_back(merged);
          ++i;
        } else {
          next.push_back(symbols[i]);
        }
      }
      symbols = std::move(next);
    }
    vocab.merges_.emplace_back(left, right);
    vocab.add_piece(merged);
  }
  vocab.index_merges();
  return vocab;
}

std::vector<int> SubwordVocab::encode(std::string_view token) const {
  if (token.empty()) return {kUnk};
  // Unknown characters are tagged with an empty string so they never merge.
  std::vector<std::string> symbols;
  for (auto& c : split_code_points(token)) symbols.push_back(ids_.contains(c) ? std::move(c) : std::string());
  while (symbols.size() > 1) {
    std::size_t best_rank = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      if (symbols[i].empty() || symbols[i + 1].empty()) continue;
      auto it = merge_rank_.find({symbols[i], symbols[i + 1]});
      if (it != merge_rank_.end() && it->second < best_rank) best_rank = it->second;
    }
    if (best_rank == std::numeric_limits<std::size_t>::max()) break;
    const auto& [left, right] = merges_[best_rank];
    std::vector<std::string> next;
    next.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
        next.push_back(left + right);
        ++i;
      } else {
        next.push_back(symbols[i]);
      }
    }
    symbols = std::move(next);
  }
  std::vector<int> ids;
  ids.reserve(symbols.size());
  for (const auto& s : symbols) {
    if (s.empty()) {
      ids.push_back(kUnk);
    } else {
      ids.push_back(ids_.find(s)->second);
    }
  }
  return ids;
}

std::string SubwordVocab::decode(std::span<const int> ids) const {
  std::string out;
  for (int id : ids) {
    if (id == kPad || id == kBoundary) continue;
    out += piece(id);
  }
  return out;
}

const std::string& SubwordVocab::piece(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= pieces_.size()) {
    fail(ErrorKind::kIndex, "piece id " + std::to_string(id) + " outside vocabulary of " + std::to_string(pieces_.size()));
  }
  return pieces_[static_cast<std::size_t>(id)];
}

std::optional<int> SubwordVocab::find(std::string_view piece) const {
  auto it = ids_.find(piece);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

nlohmann::json SubwordVocab::to_json() const {
  nlohmann::json merges = nlohmann::json::array();
  for (const auto& [l, r] : merges_) merges.push_back({l, r});
  std::vector<std::string> chars(pieces_.begin() + kSpecialCount,
                                 pieces_.begin() + static_cast<std::ptrdiff_t>(kSpecialCount + character_count_));
  return {{"characters", chars}, {"merges", merges}};
}

SubwordVocab SubwordVocab::from_json(const nlohmann::json& j) {
  SubwordVocab vocab;
  const auto chars = j.at("characters").get<std::vector<std::string>>();
  for (const auto& c : chars) vocab.add_piece(c);
  vocab.character_count_ = chars.size();
  for (const auto& m : j.at("merges")) {
    auto left = m.at(0).get<std::string>();
    auto right = m.at(1).get<std::string>();
    vocab.add_piece(left + right);
    vocab.merges_.emplace_back(std::move(left), std::move(right));
  }
  vocab.index_merges();
  return vocab;
}

}  // namespace sacti::text
