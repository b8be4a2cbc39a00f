// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "autodiff/graph.hpp"
#include "model/config.hpp"
#include "model/encoder.hpp"
#include "model/heads.hpp"
#include "text/instance.hpp"

namespace sacti::model {

// An instance mapped onto vocabulary ids. Per-token targets hold one entry
// per context token, -1 where a label is missing or unknown.
struct Example {
  std::vector<int> pieces;
  std::vector<ad::PieceSpan> spans;  // n + 1
  std::size_t tokens = 0;            // n
  int label = -1;
  std::vector<int> morph;
  std::vector<int> case_tags;
  std::vector<int> lemma;
  std::vector<int> dep_heads;  // empty when the instance has no parse
  std::vector<int> dep_rels;
};

struct ForwardResult {
  EncoderOutput encoder;
  ad::Var states;  // [(n+1) x D] pooled token states after dropout
  ad::Var attach;  // [n x 1] (binary) or [n x (n+1)] (full row); invalid without the biaffine head
  ad::Var labels;  // [n x K], or [1 x K] compound logits without the biaffine head
  std::optional<ad::Var> morph;
  std::optional<ad::Var> case_tags;
  std::optional<ad::Var> lemma;
  std::optional<ad::Var> relation;
  std::optional<DepScores> dep;
};

// Per-head loss terms. Heads that are disabled or whose labels are all masked
// carry a constant 0.
template <typename T>
struct HeadTerms {
  T sacti{};
  T morph{};
  T dep{};
  T case_tags{};
  T lemma{};
  T relation{};
};
using HeadLosses = HeadTerms<ad::Var>;
using HeadLossValues = HeadTerms<double>;

struct LossWeights {
  double morph = 1.0;
  double dep = 0.01;
  double aux = 1.0;  // case, lemma and relation
};

// L = sacti + w_morph * morph + w_dep * dep + w_aux * (case + lemma + relation)
ad::Var total_loss(const HeadLosses& losses, const LossWeights& w);
double total_loss(const HeadLossValues& losses, const LossWeights& w);
HeadLossValues loss_values(const HeadLosses& losses);

class SactiModel {
 public:
  SactiModel() = default;
  // Fresh parameters drawn from `seed`.
  static SactiModel create(const ModelConfig& cfg, Vocabularies vocab, std::uint64_t seed);
  // Rebuilds the architecture from the checkpoint metadata and checks that
  // every parameter is present with the expected shape.
  static SactiModel load(const std::filesystem::path& path);
  static SactiModel from_checkpoint(const nlohmann::json& meta, ad::ParameterStore store);

  // `extra` is merged into the checkpoint metadata next to "model" and "vocab".
  void save(const std::filesystem::path& path, const nlohmann::json& extra = nlohmann::json::object()) const;
  nlohmann::json checkpoint_meta(const nlohmann::json& extra = nlohmann::json::object()) const;

  const ModelConfig& config() const { return cfg_; }
  const Vocabularies& vocab() const { return vocab_; }
  ad::ParameterStore& store() { return store_; }
  const ad::ParameterStore& store() const { return store_; }

  // The instance as the model consumes it (compound only under
  // ContextMode::kWithout).
  text::ContextInstance model_input(const text::ContextInstance& inst) const;
  // Encodes model_input(inst). An unknown semantic label fails with
  // kLabelSpace; unknown auxiliary tags are masked.
  Example make_example(const text::ContextInstance& inst) const;

  ForwardResult forward(ad::Graph& g, const Example& ex) const;
  HeadLosses losses(const ForwardResult& out, const Example& ex) const;

  // Label id and per-label confidence in eval mode.
  struct Decision {
    int label = 0;
    std::vector<double> confidence;
    std::vector<int> votes;  // biaffine head only
  };
  Decision decide(const Example& ex) const;
  Decision decide(const ForwardResult& out) const;

  // Extended pair-score matrix [(n+1) x (n+1)]; biaffine head only.
  ad::Var pair_matrix(ad::Graph& g, const ForwardResult& out) const;

  bool has_morph() const { return has_morph_; }
  bool has_dep() const { return has_dep_; }

 private:
  void build();

  ModelConfig cfg_;
  Vocabularies vocab_;
  ad::ParameterStore store_;
  Encoder encoder_;
  PairScorer pair_;
  LabelScorer label_;
  CompoundClassifier compound_;
  TaggingHead morph_, case_, lemma_, relation_;
  DependencyHead dep_;
  bool has_morph_ = false, has_case_ = false, has_lemma_ = false, has_relation_ = false, has_dep_ = false;
};

}  // namespace sacti::model
