// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "model/config.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "common/error.hpp"
#include "text/utf8.hpp"

namespace sacti::model {

using nlohmann::json;

std::string to_string(ContextMode mode) { return mode == ContextMode::kWith ? "with" : "without"; }

ContextMode parse_context_mode(const std::string& name) {
  if (name == "with") return ContextMode::kWith;
  if (name == "without") return ContextMode::kWithout;
  fail(ErrorKind::kInvalidArgument, "context mode must be 'with' or 'without', got '" + name + "'", "context_mode");
}

HeadSet parse_heads(const std::string& list) {
  HeadSet h;
  h.morph = h.dep = false;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty() || item == "sacti") continue;
    if (item == "morph") {
      h.morph = true;
    } else if (item == "dep") {
      h.dep = true;
    } else if (item == "case") {
      h.case_tags = true;
    } else if (item == "lemma") {
      h.lemma = true;
    } else if (item == "relation") {
      h.relation = true;
    } else {
      fail(ErrorKind::kInvalidArgument,
           "unknown head '" + item + "' (expected sacti, morph, dep, case, lemma, relation)", "heads");
    }
  }
  return h;
}

std::string to_string(const HeadSet& heads) {
  std::string out = "sacti";
  if (heads.morph) out += ",morph";
  if (heads.dep) out += ",dep";
  if (heads.case_tags) out += ",case";
  if (heads.lemma) out += ",lemma";
  if (heads.relation) out += ",relation";
  return out;
}

void validate(const ModelConfig& cfg) {
  validate(cfg.encoder);
  if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0)) fail(ErrorKind::kInvalidArgument, "dropout must lie in [0,1)", "dropout");
  const HeadDims& d = cfg.head_dims;
  if (d.pair == 0 || d.label == 0 || d.arc == 0 || d.rel == 0) {
    fail(ErrorKind::kInvalidArgument, "head dimensions must be positive", "head_dims");
  }
  if (cfg.attention_layer >= cfg.encoder.layers) {
    fail(ErrorKind::kInvalidArgument, "attention_layer outside [0, layers)", "attention_layer");
  }
  if (cfg.attention_head >= cfg.encoder.heads) {
    fail(ErrorKind::kInvalidArgument, "attention_head outside [0, heads)", "attention_head");
  }
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) fail(ErrorKind::kSchema, where + " must be a JSON object", where);
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) == keys.end()) {
      fail(ErrorKind::kSchema, "unknown key '" + key + "' in " + where, key);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, std::string("invalid value for '") + key + "': " + e.what(), key);
  }
}

}  // namespace

json to_json(const EncoderConfig& cfg) {
  return json{{"layers", cfg.layers},   {"model_dim", cfg.model_dim},   {"heads", cfg.heads},
              {"ff_dim", cfg.ff_dim},   {"max_pieces", cfg.max_pieces}, {"dropout", cfg.dropout},
              {"feed_layer", cfg.feed_layer}};
}

EncoderConfig encoder_config_from_json(const json& j) {
  reject_unknown(j, {"layers", "model_dim", "heads", "ff_dim", "max_pieces", "dropout", "feed_layer"}, "encoder");
  EncoderConfig cfg;
  read(j, "layers", cfg.layers);
  read(j, "model_dim", cfg.model_dim);
  read(j, "heads", cfg.heads);
  read(j, "ff_dim", cfg.ff_dim);
  read(j, "max_pieces", cfg.max_pieces);
  read(j, "dropout", cfg.dropout);
  read(j, "feed_layer", cfg.feed_layer);
  validate(cfg);
  return cfg;
}

json to_json(const ModelConfig& cfg) {
  return json{{"encoder", to_json(cfg.encoder)},
              {"head_dims",
               {{"pair", cfg.head_dims.pair},
                {"label", cfg.head_dims.label},
                {"arc", cfg.head_dims.arc},
                {"rel", cfg.head_dims.rel}}},
              {"dropout", cfg.dropout},
              {"biaffine", cfg.biaffine},
              {"attachment", to_string(cfg.attachment)},
              {"heads", to_string(cfg.heads)},
              {"context_mode", to_string(cfg.context_mode)},
              {"attention_layer", cfg.attention_layer},
              {"attention_head", cfg.attention_head}};
}

ModelConfig model_config_from_json(const json& j) {
  reject_unknown(j,
                 {"encoder", "head_dims", "dropout", "biaffine", "attachment", "heads", "context_mode",
                  "attention_layer", "attention_head"},
                 "model");
  ModelConfig cfg;
  if (j.contains("encoder")) cfg.encoder = encoder_config_from_json(j.at("encoder"));
  if (j.contains("head_dims")) {
    const json& d = j.at("head_dims");
    reject_unknown(d, {"pair", "label", "arc", "rel"}, "head_dims");
    read(d, "pair", cfg.head_dims.pair);
    read(d, "label", cfg.head_dims.label);
    read(d, "arc", cfg.head_dims.arc);
    read(d, "rel", cfg.head_dims.rel);
  }
  read(j, "dropout", cfg.dropout);
  read(j, "biaffine", cfg.biaffine);
  std::string s;
  if (j.contains("attachment")) {
    read(j, "attachment", s);
    cfg.attachment = parse_attachment_norm(s);
  }
  if (j.contains("heads")) {
    read(j, "heads", s);
    cfg.heads = parse_heads(s);
  }
  if (j.contains("context_mode")) {
    read(j, "context_mode", s);
    cfg.context_mode = parse_context_mode(s);
  }
  read(j, "attention_layer", cfg.attention_layer);
  read(j, "attention_head", cfg.attention_head);
  validate(cfg);
  return cfg;
}

json to_json(const Vocabularies& v) {
  return json{{"pieces", v.pieces.to_json()},     {"semantic", v.semantic.to_json()},
              {"morph", v.morph.to_json()},       {"relation", v.relation.to_json()},
              {"case", v.case_tags.to_json()},    {"lemma", v.lemma.to_json()}};
}

Vocabularies vocabularies_from_json(const json& j) {
  try {
    Vocabularies v;
    v.pieces = text::SubwordVocab::from_json(j.at("pieces"));
    v.semantic = text::LabelVocab::from_json(j.at("semantic"));
    v.morph = text::LabelVocab::from_json(j.at("morph"));
    v.relation = text::LabelVocab::from_json(j.at("relation"));
    v.case_tags = text::LabelVocab::from_json(j.at("case"));
    v.lemma = text::LabelVocab::from_json(j.at("lemma"));
    return v;
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, std::string("malformed vocabulary section: ") + e.what(), "vocab");
  }
}

Vocabularies build_vocabularies(const text::Dataset& data, std::size_t subword_vocab_size,
                                const std::vector<std::string>& labels) {
  if (data.empty()) fail(ErrorKind::kInvalidArgument, "training set is empty", "data");
  std::vector<std::string> corpus;
  std::set<std::string> chars;
  std::vector<std::string> semantic, morph, relation, case_tags, lemma;
  auto append = [](std::vector<std::string>& dst, const auto& src) {
    if (src) dst.insert(dst.end(), src->begin(), src->end());
  };
  for (const auto& inst : data) {
    for (const auto& tok : inst.tokens) {
      corpus.push_back(tok);
      for (auto& c : text::split_code_points(tok)) chars.insert(std::move(c));
    }
    if (!inst.label.empty()) semantic.push_back(inst.label);
    append(morph, inst.morph_tags);
    append(relation, inst.dep_rels);
    append(case_tags, inst.case_tags);
    append(lemma, inst.lemmas);
  }
  Vocabularies v;
  v.pieces = text::SubwordVocab::train(corpus, std::max(subword_vocab_size, chars.size()));
  v.semantic = labels.empty() ? text::LabelVocab::from_values(semantic) : text::LabelVocab(labels);
  if (v.semantic.empty()) fail(ErrorKind::kLabelSpace, "no semantic labels in the training data", "label");
  v.morph = text::LabelVocab::from_values(morph);
  v.relation = text::LabelVocab::from_values(relation);
  v.case_tags = text::LabelVocab::from_values(case_tags);
  v.lemma = text::LabelVocab::from_values(lemma);
  return v;
}

}  // namespace sacti::model
