// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "autodiff/optimizer.hpp"
#include "model/config.hpp"
#include "model/sacti_model.hpp"
#include "text/instance.hpp"
#include "training/metrics.hpp"

namespace sacti::training {

struct TrainConfig {
  std::size_t epochs = 70;
  std::size_t batch_size = 50;
  double lr = 1e-3;
  model::LossWeights weights;
  std::uint64_t seed = 0;
  std::size_t eval_every = 1;  // epochs between dev evaluations
  std::size_t subword_vocab_size = 800;
  std::vector<std::string> labels;  // semantic inventory; empty = from data
  ad::OptimizerConfig optimizer;
  model::ModelConfig model;
};

void validate(const TrainConfig& cfg);
nlohmann::json to_json(const TrainConfig& cfg);
// Flat keys (epochs, batch_size, dropout, lr, dep_loss_weight, ...) plus the
// nested "encoder", "head_dims" and "optimizer" objects. Unknown keys fail.
TrainConfig train_config_from_json(const nlohmann::json& j);
TrainConfig load_train_config(const std::filesystem::path& path);

struct BatchView {
  std::size_t epoch = 0;
  std::uint64_t step = 0;
  std::span<const text::ContextInstance> inputs;  // what the model consumed
};

struct TrainHooks {
  std::function<void(const BatchView&)> on_batch;
  std::function<void(const nlohmann::json&)> on_epoch;
};

struct TrainResult {
  model::SactiModel model;  // best by dev macro-F1, else the last epoch
  std::vector<nlohmann::json> log;
  std::size_t best_epoch = 0;  // 0 = initialization
  std::optional<MetricsReport> best_dev;
};

// Sorted union of the labels found in the given sets.
std::vector<std::string> label_union(std::initializer_list<const text::Dataset*> sets);

TrainResult train(const text::Dataset& train_data, const text::Dataset& dev_data, const TrainConfig& cfg,
                  const TrainHooks& hooks = {});

// Continues from an existing model (its vocabularies fixed).
TrainResult train_model(model::SactiModel model, const text::Dataset& train_data, const text::Dataset& dev_data,
                        const TrainConfig& cfg, const TrainHooks& hooks = {});

std::string format_log(const std::vector<nlohmann::json>& log);

}  // namespace sacti::training
