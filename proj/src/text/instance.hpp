// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "autodiff/tensor.hpp"
#include "text/bpe.hpp"

namespace sacti::text {

// One labeled example: a context sentence, the position of the (binary)
// compound inside it, its semantic type and optional pseudo-labels.
// All indices are 0-based; dep_heads use 0 for the root and j for token j-1.
struct ContextInstance {
  std::string id;
  std::vector<std::string> tokens;
  std::size_t compound_index = 0;
  std::string label;  // empty when unlabeled
  std::optional<std::vector<std::string>> morph_tags;
  std::optional<std::vector<int>> dep_heads;
  std::optional<std::vector<std::string>> dep_rels;
  std::optional<std::vector<std::string>> case_tags;
  std::optional<std::vector<std::string>> lemmas;
  std::string language;

  const std::string& compound() const { return tokens.at(compound_index); }

  friend bool operator==(const ContextInstance&, const ContextInstance&) = default;
};

using Dataset = std::vector<ContextInstance>;

// Throws kSchema with the offending field name.
void validate(const ContextInstance& inst);
bool is_binary_compound(const std::string& token);

nlohmann::json to_json(const ContextInstance& inst);
// Parses and validates one object.
ContextInstance instance_from_json(const nlohmann::json& j);

// One JSON object per line; blank lines are skipped. Errors carry the 1-based
// line number.
Dataset load_jsonl_dataset(const std::filesystem::path& path);
Dataset parse_jsonl_dataset(const std::string& text);
void write_jsonl_dataset(const std::filesystem::path& path, const Dataset& data);
std::string format_jsonl_dataset(const Dataset& data);

// The compound copied to the end of the context, split into wordpieces.
struct PieceEncoding {
  std::vector<int> ids;
  std::vector<ad::PieceSpan> spans;  // n + 1 spans covering `ids` in order
};

PieceEncoding encode_instance(const ContextInstance& inst, const SubwordVocab& vocab);

// Replaces the context by the compound alone (the "without context" setting).
ContextInstance compound_only(const ContextInstance& inst);

}  // namespace sacti::text
