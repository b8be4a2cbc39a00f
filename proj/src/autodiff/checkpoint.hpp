// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "autodiff/parameters.hpp"

namespace sacti::ad {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  nlohmann::json meta;  // caller-owned section (config echo, vocabularies)
  ParameterStore store;
};

// Layout (all integers little-endian):
//   8 bytes   magic "SACTICKP"
//   u32       format version
//   u64       header length H
//   H bytes   UTF-8 JSON header: format_version, meta, store {seed, step},
//             tensors [{name, role, shape, dtype "f64le", offset, count}]
//   ...       tensor payloads; offsets are relative to the end of the header
std::vector<std::uint8_t> encode_checkpoint(const nlohmann::json& meta, const ParameterStore& store);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void write_checkpoint(const std::filesystem::path& path, const nlohmann::json& meta, const ParameterStore& store);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace sacti::ad
