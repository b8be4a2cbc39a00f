// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "autodiff/graph.hpp"
#include "common/error.hpp"
#include "text/instance.hpp"
#include "training/trainer.hpp"

namespace sacti::testing {

// Central finite differences in f64.
inline constexpr double kFdStep = 1e-5;
inline constexpr double kFdTolerance = 1e-3;
// Relative-error denominator floor. Exact zeros (a key bias under softmax
// shift invariance, say) come back from FD as roundoff of order 1e-9 on
// losses near 30, so the floor has to sit above that.
inline constexpr double kFdFloor = 1e-5;

ad::Tensor random_tensor(const ad::Shape& shape, ad::Rng& rng, double lo = -1.0, double hi = 1.0);
double rel_error(double analytic, double numeric);

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t entries = 0;
  // Entries where a ReLU kink lies inside [x-h, x+h]: the one-sided
  // differences disagree at h, while a 100x smaller step matches the
  // analytic gradient. Excluded from max_rel_error and counted here.
  std::size_t kinks = 0;
  std::string worst;  // where max_rel_error occurred
};

// Scalar outputs are used as they are; anything else is reduced by probe().
using InputBuilder = std::function<ad::Var(ad::Graph&, const std::vector<ad::Var>&)>;
using StoreBuilder = std::function<ad::Var(ad::Graph&)>;

// Every entry of every input.
GradCheck check_input_gradients(const InputBuilder& f, const std::vector<ad::Tensor>& inputs, bool training = false,
                                std::uint64_t dropout_seed = 0);
// Up to `samples` random entries of each parameter in `store`.
GradCheck check_param_gradients(ad::ParameterStore& store, const StoreBuilder& f, std::size_t samples,
                                std::uint64_t sample_seed, bool training = false, std::uint64_t dropout_seed = 0);

// sum(out * W) with W fixed by out's size, so repeated graphs agree.
ad::Var probe(ad::Var out);

struct SuiteEntry {
  std::string name;
  std::size_t cases = 0;
  GradCheck worst;
};

// Every differentiable op and head, ten or more random shapes each.
std::vector<SuiteEntry> run_gradient_suite(std::uint64_t seed);

// 32 instances over A, B, D, T; the label follows from the compound and a
// context cue, so a small encoder can fit it.
text::Dataset separable_dataset(std::size_t count = 32);
// One compound, two contexts, two labels.
text::Dataset context_pair();
// 2 layers, dim 64, 4 heads; fast enough for unit tests.
training::TrainConfig tiny_config();

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);
std::string read_file(const std::filesystem::path& path);

// Kind of the sacti::Error thrown by f, or nullopt when it returns normally.
inline std::optional<ErrorKind> error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace sacti::testing
