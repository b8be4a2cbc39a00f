// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "model/report.hpp"

#include <cmath>

#include "common/error.hpp"

namespace sacti::model {

using nlohmann::json;

namespace {

std::vector<double> row_softmax(const ad::Tensor& m, std::size_t row) {
  const std::size_t cols = m.dim(1);
  std::vector<double> out(cols);
  double mx = -INFINITY;
  for (std::size_t j = 0; j < cols; ++j) mx = std::max(mx, m.at(row, j));
  double total = 0.0;
  for (std::size_t j = 0; j < cols; ++j) total += out[j] = std::exp(m.at(row, j) - mx);
  for (auto& v : out) v /= total;
  return out;
}

int argmax_row(const ad::Tensor& m, std::size_t row) {
  int best = 0;
  for (std::size_t j = 1; j < m.dim(1); ++j) {
    if (m.at(row, j) > m.at(row, static_cast<std::size_t>(best))) best = static_cast<int>(j);
  }
  return best;
}

}  // namespace

PredictionReport predict(const SactiModel& model, const text::ContextInstance& raw, int layer, int head) {
  text::ContextInstance unlabeled = raw;
  unlabeled.label.clear();
  const Example ex = model.make_example(unlabeled);
  const text::ContextInstance inst = model.model_input(unlabeled);
  const ModelConfig& cfg = model.config();
  const Vocabularies& vocab = model.vocab();

  ad::Graph g(model.store());
  const ForwardResult out = model.forward(g, ex);
  const SactiModel::Decision decision = model.decide(out);
  const std::size_t n = ex.tokens;

  PredictionReport rep;
  rep.tokens = inst.tokens;
  rep.compound_index = inst.compound_index;
  rep.labels = vocab.semantic.names();
  rep.label = vocab.semantic.name(decision.label);
  rep.confidence = decision.confidence;
  rep.heatmap_tokens = inst.tokens;
  rep.heatmap_tokens.push_back(inst.compound());

  if (cfg.biaffine) {
    const ad::Tensor& r = out.labels.value();
    const ad::Tensor& s = out.attach.value();
    for (std::size_t i = 0; i < n; ++i) {
      PairReport p;
      p.token = inst.tokens[i];
      p.distribution = row_softmax(r, i);
      p.vote = vocab.semantic.name(decision.votes[i]);
      if (cfg.attachment == AttachmentNorm::kBinaryNull) {
        p.score = s.at(i, 0);
        p.attachment = 1.0 / (1.0 + std::exp(-p.score));
      } else {
        p.score = s.at(i, n);
        ad::Tensor masked = s;
        masked.at(i, i) = -INFINITY;
        p.attachment = row_softmax(masked, i)[n];
      }
      rep.pairs.push_back(std::move(p));
    }
    rep.sacti_heatmap = sacti_pair_heatmap(model.pair_matrix(g, out).value());
  }
  if (out.morph) {
    for (std::size_t i = 0; i < n; ++i) rep.morph_tags.push_back(vocab.morph.name(argmax_row(out.morph->value(), i)));
  }
  if (out.dep) {
    const DepParse parse = greedy_dep_decode(out.dep->arc.value(), out.dep->rel.value());
    rep.dep_heads = parse.heads;
    for (int rel : parse.relations) rep.dep_rels.push_back(vocab.relation.empty() ? "_" : vocab.relation.name(rel));
    rep.dependency_heatmap = dependency_heatmap(out.dep->arc.value());
  }
  rep.attention_layer = layer >= 0 ? static_cast<std::size_t>(layer) : cfg.attention_layer;
  rep.attention_head = head >= 0 ? static_cast<std::size_t>(head) : cfg.attention_head;
  rep.attention_heatmap = attention_heatmap(out.encoder, rep.attention_layer, rep.attention_head, ex.spans);
  return rep;
}

json matrix_json(const ad::Tensor& m) {
  if (m.empty()) return json::array();
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(0); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.dim(1); ++j) row.push_back(m.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const PredictionReport& rep) {
  json confidence = json::object();
  for (std::size_t k = 0; k < rep.labels.size(); ++k) confidence[rep.labels[k]] = rep.confidence[k];
  json pairs = json::array();
  for (const auto& p : rep.pairs) {
    pairs.push_back(json{{"token", p.token},
                         {"distribution", p.distribution},
                         {"vote", p.vote},
                         {"score", p.score},
                         {"attachment", p.attachment}});
  }
  json heatmaps = json{{"tokens", rep.heatmap_tokens},
                       {"sacti", matrix_json(rep.sacti_heatmap)},
                       {"attention", {{"layer", rep.attention_layer},
                                      {"head", rep.attention_head},
                                      {"matrix", matrix_json(rep.attention_heatmap)}}}};
  json dep = json::object();
  if (!rep.dep_heads.empty()) {
    std::vector<std::string> dep_tokens{"ROOT"};
    dep_tokens.insert(dep_tokens.end(), rep.tokens.begin(), rep.tokens.end());
    heatmaps["dependency"] = json{{"tokens", dep_tokens}, {"matrix", matrix_json(rep.dependency_heatmap)}};
    dep = json{{"heads", rep.dep_heads}, {"relations", rep.dep_rels}};
  } else {
    heatmaps["dependency"] = nullptr;
  }
  return json{{"tokens", rep.tokens},
              {"compound_index", rep.compound_index},
              {"label", rep.label},
              {"labels", rep.labels},
              {"confidence", confidence},
              {"pairs", pairs},
              {"morph_tags", rep.morph_tags},
              {"dependency", dep},
              {"heatmaps", heatmaps}};
}

}  // namespace sacti::model
