// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace sacti::testing {

struct Sweep {
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  double max_abs_error = 0.0;
  std::string first_mismatch;
};

// vote_decode against plurality + tiebreak enumeration: every vote
// assignment for n <= max_n, K <= max_k, under three score families
// (saturated rows, random rows, rows with in-row ties).
Sweep vote_sweep(std::size_t max_n, std::size_t max_k, std::uint64_t seed);

// score_predictions against brute-force counting on `sets` random sets;
// a mismatch is any value off by more than `tol` or any confusion cell off.
Sweep metrics_sweep(std::size_t sets, double tol, std::uint64_t seed);

// cohen_kappa against the textbook formula on random label pairs.
Sweep kappa_sweep(std::size_t pairs, std::uint64_t seed);

// Pooled token states against re-averaging of piece states, random encoder
// inputs in eval mode. max_abs_error holds the worst deviation.
Sweep pooling_sweep(std::size_t inputs, std::uint64_t seed);

}  // namespace sacti::testing
