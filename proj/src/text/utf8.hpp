// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sacti::text {

// Splits into UTF-8 code points. Malformed bytes come back one per element
// so that concatenating the result always restores the input.
std::vector<std::string> split_code_points(std::string_view s);

}  // namespace sacti::text
