// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "model/sacti_model.hpp"
#include "text/instance.hpp"

namespace sacti::training {

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count
};

// Macro values average over every label of the vocabulary, including labels
// absent from the evaluated set. P, R or F1 with a zero denominator is 0.
struct MetricsReport {
  std::size_t instances = 0;
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassMetrics> per_class;
};

// counts[gold][predicted]
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> counts;
};

struct Evaluation {
  MetricsReport metrics;
  ConfusionMatrix confusion;
  std::vector<int> gold;
  std::vector<int> predicted;
};

Evaluation score_predictions(std::span<const int> gold, std::span<const int> predicted,
                             const std::vector<std::string>& labels);

// Runs the eval-mode decoder over `data`. Fails on an empty set, unlabeled
// instances, or gold labels outside the model's label space.
Evaluation evaluate(const model::SactiModel& model, const text::Dataset& data);

nlohmann::json to_json(const MetricsReport& m);
nlohmann::json to_json(const ConfusionMatrix& c);

}  // namespace sacti::training
