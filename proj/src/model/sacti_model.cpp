// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "model/sacti_model.hpp"

#include <cmath>

#include "autodiff/checkpoint.hpp"
#include "common/error.hpp"

namespace sacti::model {

using nlohmann::json;

ad::Var total_loss(const HeadLosses& l, const LossWeights& w) {
  ad::Var aux = ad::add(ad::add(l.case_tags, l.lemma), l.relation);
  ad::Var out = ad::add(l.sacti, ad::scale(l.morph, w.morph));
  out = ad::add(out, ad::scale(l.dep, w.dep));
  return ad::add(out, ad::scale(aux, w.aux));
}

double total_loss(const HeadLossValues& l, const LossWeights& w) {
  return l.sacti + w.morph * l.morph + w.dep * l.dep + w.aux * (l.case_tags + l.lemma + l.relation);
}

HeadLossValues loss_values(const HeadLosses& l) {
  return HeadLossValues{l.sacti.value().item(), l.morph.value().item(),     l.dep.value().item(),
                        l.case_tags.value().item(), l.lemma.value().item(), l.relation.value().item()};
}

void SactiModel::build() {
  validate(cfg_);
  const std::size_t D = cfg_.encoder.model_dim;
  const std::size_t K = vocab_.semantic.size();
  if (K == 0) fail(ErrorKind::kLabelSpace, "semantic label vocabulary is empty", "labels");
  encoder_ = Encoder(cfg_.encoder, vocab_.pieces.size());
  if (cfg_.biaffine) {
    pair_ = PairScorer(D, cfg_.head_dims.pair, cfg_.dropout);
    label_ = LabelScorer(D, cfg_.head_dims.label, K, cfg_.dropout);
  } else {
    compound_ = CompoundClassifier(D, cfg_.head_dims.label, K, cfg_.dropout);
  }
  has_morph_ = cfg_.heads.morph && !vocab_.morph.empty();
  has_case_ = cfg_.heads.case_tags && !vocab_.case_tags.empty();
  has_lemma_ = cfg_.heads.lemma && !vocab_.lemma.empty();
  has_relation_ = cfg_.heads.relation && !vocab_.relation.empty();
  has_dep_ = cfg_.heads.dep;
  if (has_morph_) morph_ = TaggingHead("morph", D, vocab_.morph.size());
  if (has_case_) case_ = TaggingHead("case", D, vocab_.case_tags.size());
  if (has_lemma_) lemma_ = TaggingHead("lemma", D, vocab_.lemma.size());
  if (has_relation_) relation_ = TaggingHead("relation", D, vocab_.relation.size());
  if (has_dep_) {
    dep_ = DependencyHead(D, cfg_.head_dims.arc, cfg_.head_dims.rel, std::max<std::size_t>(1, vocab_.relation.size()),
                          cfg_.dropout);
  }
}

SactiModel SactiModel::create(const ModelConfig& cfg, Vocabularies vocab, std::uint64_t seed) {
  SactiModel m;
  m.cfg_ = cfg;
  m.vocab_ = std::move(vocab);
  m.build();
  m.store_ = ad::ParameterStore(seed);
  ad::Rng rng(seed);
  m.encoder_.init(m.store_, rng);
  if (m.cfg_.biaffine) {
    m.pair_.init(m.store_, rng);
    m.label_.init(m.store_, rng);
  } else {
    m.compound_.init(m.store_, rng);
  }
  if (m.has_morph_) m.morph_.init(m.store_, rng);
  if (m.has_case_) m.case_.init(m.store_, rng);
  if (m.has_lemma_) m.lemma_.init(m.store_, rng);
  if (m.has_relation_) m.relation_.init(m.store_, rng);
  if (m.has_dep_) m.dep_.init(m.store_, rng);
  return m;
}

json SactiModel::checkpoint_meta(const json& extra) const {
  json meta = extra.is_object() ? extra : json::object();
  meta["model"] = to_json(cfg_);
  meta["vocab"] = to_json(vocab_);
  return meta;
}

void SactiModel::save(const std::filesystem::path& path, const json& extra) const {
  ad::write_checkpoint(path, checkpoint_meta(extra), store_);
}

SactiModel SactiModel::from_checkpoint(const json& meta, ad::ParameterStore store) {
  if (!meta.contains("model") || !meta.contains("vocab")) {
    fail(ErrorKind::kSchema, "checkpoint metadata lacks model/vocab sections", "meta");
  }
  SactiModel reference = create(model_config_from_json(meta.at("model")), vocabularies_from_json(meta.at("vocab")), 0);
  for (const auto& [name, p] : reference.store_) {
    const ad::Parameter* got = store.find(name);
    if (got == nullptr) fail(ErrorKind::kSchema, "checkpoint is missing parameter " + name, name);
    if (got->value.shape() != p.value.shape()) {
      fail(ErrorKind::kSchema,
           "parameter " + name + " has shape " + ad::shape_str(got->value.shape()) + ", expected " +
               ad::shape_str(p.value.shape()),
           name);
    }
  }
  if (store.size() != reference.store_.size()) {
    fail(ErrorKind::kSchema, "checkpoint holds parameters the configured model does not use", "tensors");
  }
  reference.store_ = std::move(store);
  return reference;
}

SactiModel SactiModel::load(const std::filesystem::path& path) {
  ad::Checkpoint ck = ad::read_checkpoint(path);
  return from_checkpoint(ck.meta, std::move(ck.store));
}

text::ContextInstance SactiModel::model_input(const text::ContextInstance& inst) const {
  return cfg_.context_mode == ContextMode::kWithout ? text::compound_only(inst) : inst;
}

namespace {

std::vector<int> map_tags(const std::optional<std::vector<std::string>>& tags, const text::LabelVocab& vocab,
                          std::size_t n) {
  std::vector<int> out(n, -1);
  if (!tags) return out;
  for (std::size_t i = 0; i < n; ++i) {
    if (auto id = vocab.find((*tags)[i])) out[i] = *id;
  }
  return out;
}

}  // namespace

Example SactiModel::make_example(const text::ContextInstance& raw) const {
  text::validate(raw);
  const text::ContextInstance inst = model_input(raw);
  text::PieceEncoding enc = text::encode_instance(inst, vocab_.pieces);
  Example ex;
  ex.pieces = std::move(enc.ids);
  ex.spans = std::move(enc.spans);
  ex.tokens = inst.tokens.size();
  if (!inst.label.empty()) ex.label = vocab_.semantic.id(inst.label);
  const std::size_t n = ex.tokens;
  ex.morph = map_tags(inst.morph_tags, vocab_.morph, n);
  ex.case_tags = map_tags(inst.case_tags, vocab_.case_tags, n);
  ex.lemma = map_tags(inst.lemmas, vocab_.lemma, n);
  ex.dep_rels = map_tags(inst.dep_rels, vocab_.relation, n);
  if (inst.dep_heads) ex.dep_heads = *inst.dep_heads;
  return ex;
}

ForwardResult SactiModel::forward(ad::Graph& g, const Example& ex) const {
  ForwardResult out;
  out.encoder = encoder_.encode(g, ex.pieces, ex.spans);
  out.states = ad::dropout(out.encoder.token_states, cfg_.dropout);
  const std::size_t n = ex.tokens;
  if (cfg_.biaffine) {
    out.attach = pair_.attachment(g, pair_.project(g, out.states), cfg_.attachment);
    out.labels = label_.scores(g, out.states);
  } else {
    out.labels = compound_.logits(g, out.states);
  }
  ad::Var context = ad::slice_rows(out.states, 0, n);
  if (has_morph_) out.morph = morph_.logits(g, context);
  if (has_case_) out.case_tags = case_.logits(g, context);
  if (has_lemma_) out.lemma = lemma_.logits(g, context);
  if (has_relation_) out.relation = relation_.logits(g, context);
  if (has_dep_) out.dep = dep_.scores(g, context);
  return out;
}

HeadLosses SactiModel::losses(const ForwardResult& out, const Example& ex) const {
  ad::Graph& g = out.states.graph();
  if (ex.label < 0) fail(ErrorKind::kContract, "cannot compute a loss for an unlabeled instance", "label");
  auto zero = [&] { return g.constant(ad::Tensor::scalar(0.0)); };
  HeadLosses l;
  if (cfg_.biaffine) {
    l.sacti = sacti_loss(out.attach, out.labels, ex.label, cfg_.attachment);
  } else {
    const int gold[] = {ex.label};
    l.sacti = ad::cross_entropy(out.labels, gold);
  }
  l.morph = out.morph ? token_classification_loss(*out.morph, ex.morph) : zero();
  l.case_tags = out.case_tags ? token_classification_loss(*out.case_tags, ex.case_tags) : zero();
  l.lemma = out.lemma ? token_classification_loss(*out.lemma, ex.lemma) : zero();
  l.relation = out.relation ? token_classification_loss(*out.relation, ex.dep_rels) : zero();
  l.dep = out.dep ? dep_loss(*out.dep, ex.dep_heads, ex.dep_rels) : zero();
  return l;
}

SactiModel::Decision SactiModel::decide(const ForwardResult& out) const {
  Decision d;
  if (cfg_.biaffine) {
    VoteResult v = vote_decode(out.labels.value());
    d.label = v.label;
    d.confidence = std::move(v.confidence);
    d.votes = std::move(v.votes);
    return d;
  }
  const ad::Tensor& logits = out.labels.value();
  const std::size_t K = logits.dim(1);
  double mx = logits[0];
  for (std::size_t k = 1; k < K; ++k) mx = std::max(mx, logits[k]);
  double total = 0.0;
  d.confidence.resize(K);
  for (std::size_t k = 0; k < K; ++k) total += d.confidence[k] = std::exp(logits[k] - mx);
  for (auto& c : d.confidence) c /= total;
  for (std::size_t k = 1; k < K; ++k) {
    if (logits[k] > logits[static_cast<std::size_t>(d.label)]) d.label = static_cast<int>(k);
  }
  return d;
}

ad::Var SactiModel::pair_matrix(ad::Graph& g, const ForwardResult& out) const {
  if (!cfg_.biaffine) fail(ErrorKind::kContract, "pair scores exist only with the biaffine head");
  return pair_.matrix(g, pair_.project(g, out.states));
}

SactiModel::Decision SactiModel::decide(const Example& ex) const {
  ad::Graph g(static_cast<const ad::ParameterStore&>(store_));
  return decide(forward(g, ex));
}

}  // namespace sacti::model
