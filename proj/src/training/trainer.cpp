// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "training/trainer.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "common/error.hpp"

namespace sacti::training {

using nlohmann::json;

void validate(const TrainConfig& cfg) {
  if (cfg.batch_size == 0) fail(ErrorKind::kInvalidArgument, "batch_size must be positive", "batch_size");
  if (!(cfg.lr > 0.0) || !std::isfinite(cfg.lr)) fail(ErrorKind::kInvalidArgument, "lr must be positive", "lr");
  if (cfg.eval_every == 0) fail(ErrorKind::kInvalidArgument, "eval_every must be positive", "eval_every");
  if (!(cfg.weights.morph >= 0.0)) fail(ErrorKind::kInvalidArgument, "loss weights must be >= 0", "morph_loss_weight");
  if (!(cfg.weights.dep >= 0.0)) fail(ErrorKind::kInvalidArgument, "loss weights must be >= 0", "dep_loss_weight");
  if (!(cfg.weights.aux >= 0.0)) fail(ErrorKind::kInvalidArgument, "loss weights must be >= 0", "aux_loss_weight");
  model::validate(cfg.model);
}

json to_json(const TrainConfig& cfg) {
  json m = model::to_json(cfg.model);
  const ad::OptimizerConfig& o = cfg.optimizer;
  json j{{"epochs", cfg.epochs},
         {"batch_size", cfg.batch_size},
         {"lr", cfg.lr},
         {"morph_loss_weight", cfg.weights.morph},
         {"dep_loss_weight", cfg.weights.dep},
         {"aux_loss_weight", cfg.weights.aux},
         {"seed", cfg.seed},
         {"eval_every", cfg.eval_every},
         {"subword_vocab_size", cfg.subword_vocab_size},
         {"labels", cfg.labels},
         {"optimizer",
          {{"kind", ad::to_string(o.kind)},
           {"beta1", o.beta1},
           {"beta2", o.beta2},
           {"eps", o.eps},
           {"clip_norm", o.clip_norm},
           {"schedule", ad::to_string(o.schedule)},
           {"warmup_steps", o.warmup_steps}}}};
  for (const auto& [key, value] : m.items()) j[key] = value;
  return j;
}

namespace {

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

TrainConfig train_config_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::kSchema, "training config must be a JSON object", "config");
  static const std::set<std::string> kTrainKeys{"epochs",  "batch_size",         "lr",     "morph_loss_weight",
                                                "dep_loss_weight", "aux_loss_weight", "seed", "eval_every",
                                                "subword_vocab_size", "labels", "optimizer"};
  TrainConfig cfg;
  json model_part = json::object();
  for (const auto& [key, value] : j.items()) {
    if (!kTrainKeys.contains(key)) model_part[key] = value;
  }
  cfg.model = model::model_config_from_json(model_part);
  read(j, "epochs", cfg.epochs);
  read(j, "batch_size", cfg.batch_size);
  read(j, "lr", cfg.lr);
  read(j, "morph_loss_weight", cfg.weights.morph);
  read(j, "dep_loss_weight", cfg.weights.dep);
  read(j, "aux_loss_weight", cfg.weights.aux);
  read(j, "seed", cfg.seed);
  read(j, "eval_every", cfg.eval_every);
  read(j, "subword_vocab_size", cfg.subword_vocab_size);
  read(j, "labels", cfg.labels);
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    if (!o.is_object()) fail(ErrorKind::kSchema, "optimizer must be a JSON object", "optimizer");
    static const std::set<std::string> kOptKeys{"kind", "beta1", "beta2", "eps", "clip_norm", "schedule", "warmup_steps"};
    for (const auto& [key, _] : o.items()) {
      if (!kOptKeys.contains(key)) fail(ErrorKind::kSchema, "unknown key '" + key + "' in optimizer", key);
    }
    std::string s;
    if (o.contains("kind")) {
      read(o, "kind", s);
      cfg.optimizer.kind = ad::parse_optimizer_kind(s);
    }
    if (o.contains("schedule")) {
      read(o, "schedule", s);
      cfg.optimizer.schedule = ad::parse_lr_schedule(s);
    }
    read(o, "beta1", cfg.optimizer.beta1);
    read(o, "beta2", cfg.optimizer.beta2);
    read(o, "eps", cfg.optimizer.eps);
    read(o, "clip_norm", cfg.optimizer.clip_norm);
    read(o, "warmup_steps", cfg.optimizer.warmup_steps);
  }
  validate(cfg);
  return cfg;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open config " + path.string(), "config");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::kSchema, "config " + path.string() + " is not valid JSON", "config");
  return train_config_from_json(j);
}

std::vector<std::string> label_union(std::initializer_list<const text::Dataset*> sets) {
  std::set<std::string> labels;
  for (const text::Dataset* d : sets) {
    for (const auto& inst : *d) {
      if (!inst.label.empty()) labels.insert(inst.label);
    }
  }
  return {labels.begin(), labels.end()};
}

TrainResult train(const text::Dataset& train_data, const text::Dataset& dev_data, const TrainConfig& cfg,
                  const TrainHooks& hooks) {
  validate(cfg);
  if (train_data.empty()) fail(ErrorKind::kInvalidArgument, "training set is empty", "data");
  const std::vector<std::string> labels = cfg.labels.empty() ? label_union({&train_data, &dev_data}) : cfg.labels;
  model::Vocabularies vocab = model::build_vocabularies(train_data, cfg.subword_vocab_size, labels);
  return train_model(model::SactiModel::create(cfg.model, std::move(vocab), cfg.seed), train_data, dev_data, cfg, hooks);
}

TrainResult train_model(model::SactiModel model, const text::Dataset& train_data, const text::Dataset& dev_data,
                        const TrainConfig& cfg, const TrainHooks& hooks) {
  validate(cfg);
  if (train_data.empty()) fail(ErrorKind::kInvalidArgument, "training set is empty", "data");

  std::vector<model::Example> examples;
  std::vector<text::ContextInstance> inputs;
  for (const auto& inst : train_data) {
    if (inst.label.empty()) fail(ErrorKind::kSchema, "training instance " + inst.id + " has no label", "label");
    examples.push_back(model.make_example(inst));
    inputs.push_back(model.model_input(inst));
  }

  TrainResult result;
  const std::size_t N = examples.size();
  const std::size_t batches_per_epoch = (N + cfg.batch_size - 1) / cfg.batch_size;
  const std::uint64_t total_steps = static_cast<std::uint64_t>(batches_per_epoch * cfg.epochs);
  ad::Rng order_rng(ad::mix_seed(cfg.seed, 0x5eed));
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::optional<ad::ParameterStore> best_store;
  double best_f1 = -1.0;
  const std::uint64_t first_step = model.store().step();

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    order_rng.shuffle(order);
    model::HeadLossValues sums;
    double total_sum = 0.0;
    for (std::size_t b = 0; b < batches_per_epoch; ++b) {
      const std::size_t begin = b * cfg.batch_size;
      const std::size_t end = std::min(N, begin + cfg.batch_size);
      const std::uint64_t step = model.store().step();
      std::vector<text::ContextInstance> batch_inputs;
      if (hooks.on_batch) {
        for (std::size_t i = begin; i < end; ++i) batch_inputs.push_back(inputs[order[i]]);
        hooks.on_batch(BatchView{epoch, step, batch_inputs});
      }
      ad::Graph g(model.store(), true, ad::mix_seed(cfg.seed, step + 1));
      ad::Var batch_loss;
      for (std::size_t i = begin; i < end; ++i) {
        const model::Example& ex = examples[order[i]];
        const model::ForwardResult out = model.forward(g, ex);
        const model::HeadLosses l = model.losses(out, ex);
        const model::HeadLossValues v = model::loss_values(l);
        sums.sacti += v.sacti;
        sums.morph += v.morph;
        sums.dep += v.dep;
        sums.case_tags += v.case_tags;
        sums.lemma += v.lemma;
        sums.relation += v.relation;
        ad::Var t = model::total_loss(l, cfg.weights);
        batch_loss = batch_loss.valid() ? ad::add(batch_loss, t) : t;
      }
      batch_loss = ad::scale(batch_loss, 1.0 / static_cast<double>(end - begin));
      const double value = batch_loss.value().item();
      if (!std::isfinite(value)) {
        fail(ErrorKind::kNumeric,
             "non-finite loss at epoch " + std::to_string(epoch) + ", step " + std::to_string(step), "loss");
      }
      total_sum += value * static_cast<double>(end - begin);
      g.backward(batch_loss);
      const double lr = ad::scheduled_lr(cfg.optimizer, cfg.lr, step - first_step, total_steps);
      try {
        ad::optimizer_step(model.store(), cfg.optimizer, lr);
      } catch (const Error& e) {
        fail(e.kind(), std::string(e.what()) + " (epoch " + std::to_string(epoch) + ", step " + std::to_string(step) + ")",
             e.field());
      }
    }
    const double inv = 1.0 / static_cast<double>(N);
    json entry{{"epoch", epoch},
               {"step", model.store().step()},
               {"losses",
                {{"total", total_sum * inv},
                 {"sacti", sums.sacti * inv},
                 {"morph", sums.morph * inv},
                 {"dep", sums.dep * inv},
                 {"case", sums.case_tags * inv},
                 {"lemma", sums.lemma * inv},
                 {"relation", sums.relation * inv}}}};
    const bool evaluate_now = !dev_data.empty() && (epoch % cfg.eval_every == 0 || epoch == cfg.epochs);
    if (evaluate_now) {
      const Evaluation ev = evaluate(model, dev_data);
      entry["dev"] = json{{"accuracy", ev.metrics.accuracy},
                          {"macro_precision", ev.metrics.macro_precision},
                          {"macro_recall", ev.metrics.macro_recall},
                          {"macro_f1", ev.metrics.macro_f1}};
      const bool improved = ev.metrics.macro_f1 > best_f1;
      entry["best"] = improved;
      if (improved) {
        best_f1 = ev.metrics.macro_f1;
        best_store = model.store();
        result.best_epoch = epoch;
        result.best_dev = ev.metrics;
      }
    }
    if (hooks.on_epoch) hooks.on_epoch(entry);
    result.log.push_back(std::move(entry));
  }
  if (dev_data.empty()) result.best_epoch = cfg.epochs;
  if (best_store) model.store() = std::move(*best_store);
  result.model = std::move(model);
  return result;
}

std::string format_log(const std::vector<json>& log) {
  std::string out;
  for (const auto& entry : log) out += entry.dump() + "\n";
  return out;
}

}  // namespace sacti::training
