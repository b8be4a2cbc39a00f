// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "autodiff/parameters.hpp"

namespace sacti::ad {

enum class OptimizerKind { kAdam, kSgd };
enum class LrSchedule { kConstant, kLinearDecay };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 0.0;  // global-norm clipping; 0 disables
  LrSchedule schedule = LrSchedule::kConstant;
  std::uint64_t warmup_steps = 0;
};

OptimizerKind parse_optimizer_kind(const std::string& name);
std::string to_string(OptimizerKind kind);
LrSchedule parse_lr_schedule(const std::string& name);
std::string to_string(LrSchedule schedule);

// Learning rate for `step` (0-based) out of `total_steps`.
double scheduled_lr(const OptimizerConfig& config, double base_lr, std::uint64_t step, std::uint64_t total_steps);

// Applies one update from the gradients held in `store`, then zeroes them and
// advances the step counter. Throws kNumeric naming the first parameter whose
// gradient is not finite; the store is left untouched in that case.
void optimizer_step(ParameterStore& store, const OptimizerConfig& config, double lr);

}  // namespace sacti::ad
