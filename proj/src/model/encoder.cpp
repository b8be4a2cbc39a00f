// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "model/encoder.hpp"

#include <cmath>

#include "common/error.hpp"

namespace sacti::model {

void validate(const EncoderConfig& cfg) {
  if (cfg.layers == 0 || cfg.model_dim == 0 || cfg.heads == 0 || cfg.ff_dim == 0 || cfg.max_pieces == 0) {
    fail(ErrorKind::kInvalidArgument, "encoder sizes must be positive", "encoder");
  }
  if (cfg.model_dim % cfg.heads != 0) {
    fail(ErrorKind::kInvalidArgument,
         "model_dim " + std::to_string(cfg.model_dim) + " is not divisible by heads " + std::to_string(cfg.heads),
         "encoder.heads");
  }
  if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "encoder dropout must lie in [0,1)", "encoder.dropout");
  }
  if (cfg.feed_layer < -1 || cfg.feed_layer >= static_cast<int>(cfg.layers)) {
    fail(ErrorKind::kInvalidArgument, "feed_layer must be -1 or in [0, layers)", "encoder.feed_layer");
  }
}

Encoder::Encoder(const EncoderConfig& cfg, std::size_t vocab_size) : cfg_(cfg), vocab_size_(vocab_size) {
  validate(cfg_);
  token_embedding_ = "encoder.token_embedding";
  position_embedding_ = "encoder.position_embedding";
  final_gamma_ = "encoder.final_ln.gamma";
  final_beta_ = "encoder.final_ln.beta";
  const std::size_t d = cfg_.model_dim;
  for (std::size_t l = 0; l < cfg_.layers; ++l) {
    const std::string p = "encoder.layer" + std::to_string(l);
    blocks_.push_back(Block{p + ".ln1.gamma", p + ".ln1.beta", p + ".ln2.gamma", p + ".ln2.beta",
                            Linear(p + ".attn.wq", d, d), Linear(p + ".attn.wk", d, d), Linear(p + ".attn.wv", d, d),
                            Linear(p + ".attn.wo", d, d), Linear(p + ".ffn.w1", d, cfg_.ff_dim),
                            Linear(p + ".ffn.w2", cfg_.ff_dim, d)});
  }
}

void Encoder::init(ad::ParameterStore& store, ad::Rng& rng) const {
  const std::size_t d = cfg_.model_dim;
  store.create(token_embedding_, {vocab_size_, d}, ad::Init::kEmbedding, rng);
  store.create(position_embedding_, {cfg_.max_pieces, d}, ad::Init::kEmbedding, rng);
  for (const auto& b : blocks_) {
    store.create(b.ln1_gamma, {d}, ad::Init::kOnes, rng);
    store.create(b.ln1_beta, {d}, ad::Init::kZeros, rng);
    for (const Linear* l : {&b.wq, &b.wk, &b.wv, &b.wo}) l->init(store, rng);
    store.create(b.ln2_gamma, {d}, ad::Init::kOnes, rng);
    store.create(b.ln2_beta, {d}, ad::Init::kZeros, rng);
    b.ff1.init(store, rng);
    b.ff2.init(store, rng);
  }
  store.create(final_gamma_, {d}, ad::Init::kOnes, rng);
  store.create(final_beta_, {d}, ad::Init::kZeros, rng);
}

namespace {

void check_spans(std::span<const ad::PieceSpan> spans, std::size_t pieces) {
  std::size_t expected = 0;
  for (const auto& s : spans) {
    if (s.begin != expected || s.length == 0) fail(ErrorKind::kContract, "token spans must partition the piece sequence");
    expected += s.length;
  }
  if (expected != pieces) fail(ErrorKind::kContract, "token spans must partition the piece sequence");
}

}  // namespace

EncoderOutput Encoder::encode(ad::Graph& g, std::span<const int> pieces, std::span<const ad::PieceSpan> spans) const {
  if (pieces.size() > cfg_.max_pieces) {
    fail(ErrorKind::kContract,
         "input has " + std::to_string(pieces.size()) + " wordpieces but max_pieces is " +
             std::to_string(cfg_.max_pieces) + "; shorten the context",
         "tokens");
  }
  return run(g, ad::embedding(g.param(token_embedding_), pieces), spans);
}

EncoderOutput Encoder::encode_embeddings(ad::Graph& g, ad::Var piece_embeddings,
                                         std::span<const ad::PieceSpan> spans) const {
  if (piece_embeddings.value().rank() != 2 || piece_embeddings.shape()[1] != cfg_.model_dim) {
    fail(ErrorKind::kDimension, "piece embeddings must be [pieces x " + std::to_string(cfg_.model_dim) + "], got " +
                                    ad::shape_str(piece_embeddings.shape()));
  }
  if (piece_embeddings.shape()[0] > cfg_.max_pieces) {
    fail(ErrorKind::kContract, "input has " + std::to_string(piece_embeddings.shape()[0]) +
                                   " wordpieces but max_pieces is " + std::to_string(cfg_.max_pieces),
         "tokens");
  }
  return run(g, piece_embeddings, spans);
}

EncoderOutput Encoder::run(ad::Graph& g, ad::Var embedded, std::span<const ad::PieceSpan> spans) const {
  const std::size_t P = embedded.shape()[0];
  check_spans(spans, P);
  const std::size_t d = cfg_.model_dim;
  const std::size_t dh = d / cfg_.heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));

  EncoderOutput out;
  ad::Var x = ad::add(embedded, ad::slice_rows(g.param(position_embedding_), 0, P));
  x = ad::dropout(x, cfg_.dropout);
  const std::size_t last = cfg_.feed_layer < 0 ? blocks_.size() - 1 : static_cast<std::size_t>(cfg_.feed_layer);
  for (std::size_t l = 0; l <= last; ++l) {
    const Block& b = blocks_[l];
    ad::Var a = ad::layer_norm(x, g.param(b.ln1_gamma), g.param(b.ln1_beta));
    ad::Var q = b.wq(g, a), k = b.wk(g, a), v = b.wv(g, a);
    std::vector<ad::Var> head_outputs;
    std::vector<ad::Tensor> maps;
    for (std::size_t h = 0; h < cfg_.heads; ++h) {
      ad::Var qh = ad::slice_cols(q, h * dh, dh);
      ad::Var kh = ad::slice_cols(k, h * dh, dh);
      ad::Var vh = ad::slice_cols(v, h * dh, dh);
      ad::Var weights = ad::softmax(ad::scale(ad::matmul(qh, ad::transpose(kh)), inv_sqrt), 1);
      maps.push_back(weights.value());
      head_outputs.push_back(ad::matmul(weights, vh));
    }
    out.attention.push_back(std::move(maps));
    x = ad::add(x, ad::dropout(b.wo(g, ad::concat_cols(head_outputs)), cfg_.dropout));
    ad::Var f = ad::layer_norm(x, g.param(b.ln2_gamma), g.param(b.ln2_beta));
    x = ad::add(x, ad::dropout(b.ff2(g, ad::relu(b.ff1(g, f))), cfg_.dropout));
  }
  out.piece_states = ad::layer_norm(x, g.param(final_gamma_), g.param(final_beta_));
  out.token_states = ad::span_mean(out.piece_states, spans);
  return out;
}

ad::Tensor aggregate_attention(const ad::Tensor& piece_attention, std::span<const ad::PieceSpan> spans) {
  const std::size_t T = spans.size();
  const std::size_t P = piece_attention.dim(0);
  ad::Tensor out({T, T}, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t q = spans[t].begin; q < spans[t].begin + spans[t].length; ++q) {
      for (std::size_t u = 0; u < T; ++u) {
        double acc = 0.0;
        for (std::size_t k = spans[u].begin; k < spans[u].begin + spans[u].length; ++k) acc += piece_attention[q * P + k];
        out[t * T + u] += acc;
      }
    }
    for (std::size_t u = 0; u < T; ++u) out[t * T + u] /= static_cast<double>(spans[t].length);
  }
  return out;
}

ad::Tensor attention_heatmap(const EncoderOutput& out, std::size_t layer, std::size_t head,
                             std::span<const ad::PieceSpan> spans) {
  if (layer >= out.attention.size()) {
    fail(ErrorKind::kIndex, "attention layer " + std::to_string(layer) + " outside [0," +
                                std::to_string(out.attention.size()) + ")", "layer");
  }
  if (head >= out.attention[layer].size()) {
    fail(ErrorKind::kIndex, "attention head " + std::to_string(head) + " outside [0," +
                                std::to_string(out.attention[layer].size()) + ")", "head");
  }
  return aggregate_attention(out.attention[layer][head], spans);
}

}  // namespace sacti::model
