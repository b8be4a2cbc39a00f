// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autodiff/graph.hpp"
#include "model/layers.hpp"

namespace sacti::model {

// Desk-scale transformer; not a pretrained multilingual encoder.
struct EncoderConfig {
  std::size_t layers = 2;
  std::size_t model_dim = 64;
  std::size_t heads = 4;
  std::size_t ff_dim = 128;
  std::size_t max_pieces = 128;
  double dropout = 0.1;
  // Layer whose output feeds the heads; -1 is the last layer.
  int feed_layer = -1;

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

void validate(const EncoderConfig& cfg);

struct EncoderOutput {
  ad::Var piece_states;  // [pieces x dim]
  ad::Var token_states;  // [(n+1) x dim], span means of piece_states
  std::vector<std::vector<ad::Tensor>> attention;  // [layer][head] -> [pieces x pieces]
};

class Encoder {
 public:
  Encoder() = default;
  Encoder(const EncoderConfig& cfg, std::size_t vocab_size);

  void init(ad::ParameterStore& store, ad::Rng& rng) const;

  // Fails with kContract when the input exceeds max_pieces.
  EncoderOutput encode(ad::Graph& g, std::span<const int> pieces, std::span<const ad::PieceSpan> spans) const;
  // Same, starting from externally computed piece embeddings [pieces x dim]
  // instead of the token embedding table.
  EncoderOutput encode_embeddings(ad::Graph& g, ad::Var piece_embeddings, std::span<const ad::PieceSpan> spans) const;

  const EncoderConfig& config() const { return cfg_; }
  std::size_t vocab_size() const { return vocab_size_; }

 private:
  struct Block {
    std::string ln1_gamma, ln1_beta, ln2_gamma, ln2_beta;
    Linear wq, wk, wv, wo, ff1, ff2;
  };

  EncoderOutput run(ad::Graph& g, ad::Var embedded, std::span<const ad::PieceSpan> spans) const;

  EncoderConfig cfg_;
  std::size_t vocab_size_ = 0;
  std::string token_embedding_, position_embedding_, final_gamma_, final_beta_;
  std::vector<Block> blocks_;
};

// Token-level view of one attention map: rows average over the query span,
// columns sum over the key span, so rows still sum to one.
ad::Tensor aggregate_attention(const ad::Tensor& piece_attention, std::span<const ad::PieceSpan> spans);
ad::Tensor attention_heatmap(const EncoderOutput& out, std::size_t layer, std::size_t head,
                             std::span<const ad::PieceSpan> spans);

}  // namespace sacti::model
