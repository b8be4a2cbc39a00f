// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "model/encoder.hpp"
#include "model/heads.hpp"
#include "text/bpe.hpp"
#include "text/instance.hpp"
#include "text/labels.hpp"

namespace sacti::model {

enum class ContextMode { kWith, kWithout };

std::string to_string(ContextMode mode);
ContextMode parse_context_mode(const std::string& name);

// Which output heads take part in training. The SaCTI head is always on.
struct HeadSet {
  bool morph = true;
  bool dep = true;
  bool case_tags = false;
  bool lemma = false;
  bool relation = false;

  friend bool operator==(const HeadSet&, const HeadSet&) = default;
};

// Comma list over {sacti, morph, dep, case, lemma, relation}; "sacti" may be
// omitted but any other name is an error.
HeadSet parse_heads(const std::string& list);
std::string to_string(const HeadSet& heads);

struct ModelConfig {
  EncoderConfig encoder;
  HeadDims head_dims;
  double dropout = 0.3;  // on pooled token states and head MLPs
  bool biaffine = true;  // false: single-representation compound classifier
  AttachmentNorm attachment = AttachmentNorm::kBinaryNull;
  HeadSet heads;
  ContextMode context_mode = ContextMode::kWith;
  // Encoder layer/head whose attention is reported as a heatmap.
  std::size_t attention_layer = 0;
  std::size_t attention_head = 0;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

void validate(const ModelConfig& cfg);
nlohmann::json to_json(const ModelConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
ModelConfig model_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EncoderConfig& cfg);
EncoderConfig encoder_config_from_json(const nlohmann::json& j);

struct Vocabularies {
  text::SubwordVocab pieces;
  text::LabelVocab semantic;
  text::LabelVocab morph;
  text::LabelVocab relation;
  text::LabelVocab case_tags;
  text::LabelVocab lemma;

  friend bool operator==(const Vocabularies&, const Vocabularies&) = default;
};

nlohmann::json to_json(const Vocabularies& v);
Vocabularies vocabularies_from_json(const nlohmann::json& j);

// Builds every vocabulary from training data. Semantic labels come from
// `labels` when non-empty, else from the sorted labels of `data`.
Vocabularies build_vocabularies(const text::Dataset& data, std::size_t subword_vocab_size,
                                const std::vector<std::string>& labels);

}  // namespace sacti::model
