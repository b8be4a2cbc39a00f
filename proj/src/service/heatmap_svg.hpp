// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "autodiff/tensor.hpp"

namespace sacti::service {

// Square grid with row labels on the left and column labels on top. Cell
// shade scales with the value in [0, 1]; each cell carries a <title> with the
// exact value.
std::string render_heatmap_svg(const ad::Tensor& matrix, const std::vector<std::string>& row_labels,
                               const std::vector<std::string>& col_labels, const std::string& title = {});

}  // namespace sacti::service
