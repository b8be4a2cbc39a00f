// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "autodiff/tensor.hpp"
#include "model/sacti_model.hpp"
#include "text/instance.hpp"

namespace sacti::model {

struct PairReport {
  std::string token;
  std::vector<double> distribution;  // softmax of r_i over the labels
  std::string vote;
  double score = 0.0;        // s_i against the compound
  double attachment = 0.0;   // p(compound | c_i)
};

struct PredictionReport {
  std::vector<std::string> tokens;  // model input, compound copy excluded
  std::size_t compound_index = 0;
  std::vector<std::string> labels;  // label vocabulary order
  std::string label;
  std::vector<double> confidence;  // per label, sums to 1
  std::vector<PairReport> pairs;   // empty without the biaffine head
  std::vector<std::string> morph_tags;
  std::vector<int> dep_heads;
  std::vector<std::string> dep_rels;
  std::vector<std::string> heatmap_tokens;  // c_1..c_n, compound copy
  ad::Tensor sacti_heatmap;                 // [(n+1) x (n+1)], biaffine head only
  ad::Tensor dependency_heatmap;            // [(n+1) x (n+1)] over ROOT, c_1..c_n
  ad::Tensor attention_heatmap;             // [(n+1) x (n+1)]
  std::size_t attention_layer = 0;
  std::size_t attention_head = 0;
};

// Eval-mode prediction; pure for a fixed model. `layer`/`head` override the
// configured attention map when >= 0.
PredictionReport predict(const SactiModel& model, const text::ContextInstance& inst, int layer = -1, int head = -1);

nlohmann::json to_json(const PredictionReport& report);
nlohmann::json matrix_json(const ad::Tensor& m);

}  // namespace sacti::model
