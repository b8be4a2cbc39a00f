// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "training/grid.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "common/error.hpp"

namespace sacti::training {

using nlohmann::json;

const std::vector<std::string>& known_variants() {
  static const std::vector<std::string> kVariants{"full",     "-context", "-BiAFF", "-morph", "-DP",
                                                  "-morph-DP", "M+C",      "M+C+L",  "M+C+R",  "M+DP"};
  return kVariants;
}

TrainConfig apply_variant(const TrainConfig& base, const std::string& variant) {
  TrainConfig cfg = base;
  model::HeadSet& h = cfg.model.heads;
  auto only = [&](bool morph, bool dep, bool case_tags, bool lemma, bool relation) {
    h = model::HeadSet{morph, dep, case_tags, lemma, relation};
  };
  if (variant == "full") {
  } else if (variant == "-context") {
    cfg.model.context_mode = model::ContextMode::kWithout;
  } else if (variant == "-BiAFF") {
    cfg.model.biaffine = false;
  } else if (variant == "-morph") {
    h.morph = false;
  } else if (variant == "-DP") {
    h.dep = false;
  } else if (variant == "-morph-DP") {
    h.morph = false;
    h.dep = false;
  } else if (variant == "M+C") {
    only(true, false, true, false, false);
  } else if (variant == "M+C+L") {
    only(true, false, true, true, false);
  } else if (variant == "M+C+R") {
    only(true, false, true, false, true);
  } else if (variant == "M+DP") {
    only(true, true, false, false, false);
  } else {
    fail(ErrorKind::kInvalidArgument, "unknown grid variant '" + variant + "'", "variants");
  }
  return cfg;
}

GridMode parse_grid_mode(const std::string& name) {
  if (name == "standard") return GridMode::kStandard;
  if (name == "zero-shot") return GridMode::kZeroShot;
  if (name == "multilingual") return GridMode::kMultilingual;
  fail(ErrorKind::kInvalidArgument, "grid mode must be standard, zero-shot or multilingual", "mode");
}

std::string to_string(GridMode mode) {
  switch (mode) {
    case GridMode::kStandard:
      return "standard";
    case GridMode::kZeroShot:
      return "zero-shot";
    case GridMode::kMultilingual:
      return "multilingual";
  }
  return "standard";
}

GridRequest grid_request_from_json(const json& j, const TrainConfig& base, const std::filesystem::path& base_dir) {
  if (!j.is_object()) fail(ErrorKind::kSchema, "grid file must be a JSON object", "grid");
  for (const auto& [key, _] : j.items()) {
    if (key != "variants" && key != "mode" && key != "datasets") {
      fail(ErrorKind::kSchema, "unknown key '" + key + "' in grid file", key);
    }
  }
  GridRequest req;
  req.base = base;
  try {
    if (j.contains("variants")) req.variants = j.at("variants").get<std::vector<std::string>>();
    if (j.contains("mode")) req.mode = parse_grid_mode(j.at("mode").get<std::string>());
    if (!j.contains("datasets") || !j.at("datasets").is_array() || j.at("datasets").empty()) {
      fail(ErrorKind::kSchema, "grid file needs a non-empty datasets array", "datasets");
    }
    for (const auto& d : j.at("datasets")) {
      GridDataset ds;
      ds.name = d.at("name").get<std::string>();
      auto load = [&](const char* key, text::Dataset& out) {
        if (!d.contains(key)) return;
        std::filesystem::path p = d.at(key).get<std::string>();
        out = text::load_jsonl_dataset(p.is_absolute() ? p : base_dir / p);
      };
      load("train", ds.train);
      load("dev", ds.dev);
      load("test", ds.test);
      req.datasets.push_back(std::move(ds));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, std::string("malformed grid file: ") + e.what(), "grid");
  }
  for (const auto& v : req.variants) apply_variant(base, v);
  return req;
}

namespace {

const text::Dataset& eval_split(const GridDataset& d) { return d.test.empty() ? d.dev : d.test; }

void check_label_space(const TrainResult& trained, const GridDataset& source, const GridDataset& target) {
  const auto& known = trained.model.vocab().semantic;
  std::set<std::string> missing;
  for (const auto& inst : eval_split(target)) {
    if (!inst.label.empty() && !known.find(inst.label)) missing.insert(inst.label);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    fail(ErrorKind::kLabelSpace,
         "label-space mismatch: " + target.name + " uses labels unknown to " + source.name + " (" + list + ")", "labels");
  }
}

}  // namespace

std::vector<GridRow> run_grid(const GridRequest& request) {
  if (request.datasets.empty()) fail(ErrorKind::kInvalidArgument, "grid needs at least one dataset", "datasets");
  if (request.variants.empty()) fail(ErrorKind::kInvalidArgument, "grid needs at least one variant", "variants");
  if (request.mode == GridMode::kZeroShot && request.datasets.size() < 2) {
    fail(ErrorKind::kInvalidArgument, "zero-shot needs at least two datasets", "datasets");
  }
  std::vector<GridRow> rows;
  for (const auto& variant : request.variants) {
    const TrainConfig cfg = apply_variant(request.base, variant);
    if (request.mode == GridMode::kMultilingual) {
      GridDataset all;
      for (const auto& d : request.datasets) {
        all.name += (all.name.empty() ? "" : "+") + d.name;
        all.train.insert(all.train.end(), d.train.begin(), d.train.end());
        all.dev.insert(all.dev.end(), d.dev.begin(), d.dev.end());
      }
      TrainConfig joint = cfg;
      if (joint.labels.empty()) {
        std::set<std::string> labels;
        for (const auto& d : request.datasets) {
          for (const auto& l : label_union({&d.train, &d.dev, &d.test})) labels.insert(l);
        }
        joint.labels.assign(labels.begin(), labels.end());
      }
      const TrainResult trained = train(all.train, all.dev, joint);
      for (const auto& d : request.datasets) {
        rows.push_back(GridRow{variant, all.name, d.name, evaluate(trained.model, eval_split(d))});
      }
      continue;
    }
    for (const auto& source : request.datasets) {
      TrainConfig local = cfg;
      if (local.labels.empty()) local.labels = label_union({&source.train, &source.dev, &source.test});
      const TrainResult trained = train(source.train, source.dev, local);
      if (request.mode == GridMode::kStandard) {
        rows.push_back(GridRow{variant, source.name, source.name, evaluate(trained.model, eval_split(source))});
        continue;
      }
      for (const auto& target : request.datasets) {
        if (&target == &source) continue;
        check_label_space(trained, source, target);
        rows.push_back(GridRow{variant, source.name, target.name, evaluate(trained.model, eval_split(target))});
      }
    }
  }
  return rows;
}

std::string grid_csv(const std::vector<GridRow>& rows) {
  std::string out = "variant,trained_on,evaluated_on,instances,accuracy,macro_precision,macro_recall,macro_f1\n";
  char buf[256];
  for (const auto& r : rows) {
    const MetricsReport& m = r.evaluation.metrics;
    std::snprintf(buf, sizeof buf, ",%zu,%.6f,%.6f,%.6f,%.6f\n", m.instances, m.accuracy, m.macro_precision,
                  m.macro_recall, m.macro_f1);
    out += r.variant + "," + r.trained_on + "," + r.evaluated_on + buf;
  }
  return out;
}

json grid_json(const std::vector<GridRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back(json{{"variant", r.variant},
                       {"trained_on", r.trained_on},
                       {"evaluated_on", r.evaluated_on},
                       {"metrics", to_json(r.evaluation.metrics)},
                       {"confusion", to_json(r.evaluation.confusion)}});
  }
  return out;
}

}  // namespace sacti::training
