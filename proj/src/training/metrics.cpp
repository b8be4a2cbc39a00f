// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "training/metrics.hpp"

#include "common/error.hpp"

namespace sacti::training {

using nlohmann::json;

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Evaluation score_predictions(std::span<const int> gold, std::span<const int> predicted,
                             const std::vector<std::string>& labels) {
  if (gold.empty()) fail(ErrorKind::kInvalidArgument, "cannot evaluate an empty set", "data");
  if (gold.size() != predicted.size()) {
    fail(ErrorKind::kDimension, std::to_string(gold.size()) + " gold labels but " + std::to_string(predicted.size()) +
                                    " predictions");
  }
  const std::size_t K = labels.size();
  Evaluation ev;
  ev.gold.assign(gold.begin(), gold.end());
  ev.predicted.assign(predicted.begin(), predicted.end());
  ev.confusion.labels = labels;
  ev.confusion.counts.assign(K, std::vector<std::size_t>(K, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] < 0 || static_cast<std::size_t>(gold[i]) >= K || predicted[i] < 0 ||
        static_cast<std::size_t>(predicted[i]) >= K) {
      fail(ErrorKind::kLabelSpace, "label id outside [0," + std::to_string(K) + ") at position " + std::to_string(i));
    }
    ++ev.confusion.counts[static_cast<std::size_t>(gold[i])][static_cast<std::size_t>(predicted[i])];
    if (gold[i] == predicted[i]) ++correct;
  }
  MetricsReport& m = ev.metrics;
  m.instances = gold.size();
  m.accuracy = ratio(correct, gold.size());
  for (std::size_t k = 0; k < K; ++k) {
    std::size_t tp = ev.confusion.counts[k][k], gold_k = 0, pred_k = 0;
    for (std::size_t j = 0; j < K; ++j) {
      gold_k += ev.confusion.counts[k][j];
      pred_k += ev.confusion.counts[j][k];
    }
    ClassMetrics c;
    c.label = labels[k];
    c.support = gold_k;
    c.precision = ratio(tp, pred_k);
    c.recall = ratio(tp, gold_k);
    c.f1 = c.precision + c.recall == 0.0 ? 0.0 : 2.0 * c.precision * c.recall / (c.precision + c.recall);
    m.macro_precision += c.precision;
    m.macro_recall += c.recall;
    m.macro_f1 += c.f1;
    m.per_class.push_back(std::move(c));
  }
  if (K > 0) {
    m.macro_precision /= static_cast<double>(K);
    m.macro_recall /= static_cast<double>(K);
    m.macro_f1 /= static_cast<double>(K);
  }
  return ev;
}

Evaluation evaluate(const model::SactiModel& model, const text::Dataset& data) {
  if (data.empty()) fail(ErrorKind::kInvalidArgument, "cannot evaluate an empty set", "data");
  std::vector<int> gold, predicted;
  for (const auto& inst : data) {
    if (inst.label.empty()) fail(ErrorKind::kSchema, "instance " + inst.id + " has no label", "label");
    const model::Example ex = model.make_example(inst);
    gold.push_back(ex.label);
    predicted.push_back(model.decide(ex).label);
  }
  return score_predictions(gold, predicted, model.vocab().semantic.names());
}

json to_json(const MetricsReport& m) {
  json per_class = json::array();
  for (const auto& c : m.per_class) {
    per_class.push_back(
        json{{"label", c.label}, {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}});
  }
  return json{{"instances", m.instances},
              {"accuracy", m.accuracy},
              {"macro_precision", m.macro_precision},
              {"macro_recall", m.macro_recall},
              {"macro_f1", m.macro_f1},
              {"per_class", per_class}};
}

json to_json(const ConfusionMatrix& c) { return json{{"labels", c.labels}, {"counts", c.counts}}; }

}  // namespace sacti::training
