// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "training/metrics.hpp"
#include "training/trainer.hpp"

namespace sacti::training {

// Named configuration edits:
//   full, -context, -BiAFF, -morph, -DP, -morph-DP   (component ablations)
//   M+C, M+C+L, M+C+R, M+DP                          (auxiliary head sets)
TrainConfig apply_variant(const TrainConfig& base, const std::string& variant);
const std::vector<std::string>& known_variants();

enum class GridMode {
  kStandard,      // each dataset on its own
  kZeroShot,      // train on one dataset, evaluate on every other one
  kMultilingual,  // train on all datasets together, evaluate on each
};

GridMode parse_grid_mode(const std::string& name);
std::string to_string(GridMode mode);

struct GridDataset {
  std::string name;
  text::Dataset train;
  text::Dataset dev;
  text::Dataset test;  // falls back to dev when empty
};

struct GridRequest {
  TrainConfig base;
  std::vector<std::string> variants{"full"};
  GridMode mode = GridMode::kStandard;
  std::vector<GridDataset> datasets;
};

struct GridRow {
  std::string variant;
  std::string trained_on;
  std::string evaluated_on;
  Evaluation evaluation;
};

// {"variants": [...], "mode": "standard|zero-shot|multilingual",
//  "datasets": [{"name", "train", "dev", "test"}]}; relative paths resolve
// against `base_dir`.
GridRequest grid_request_from_json(const nlohmann::json& j, const TrainConfig& base,
                                   const std::filesystem::path& base_dir);

// Zero-shot cells fail with kLabelSpace when the evaluation labels are not a
// subset of the training label space.
std::vector<GridRow> run_grid(const GridRequest& request);

std::string grid_csv(const std::vector<GridRow>& rows);
nlohmann::json grid_json(const std::vector<GridRow>& rows);

}  // namespace sacti::training
