// Copyright (c) 2026, The SaCTI-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "service/heatmap_svg.hpp"

#include <algorithm>
#include <cstdio>

#include "common/error.hpp"

namespace sacti::service {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_heatmap_svg(const ad::Tensor& m, const std::vector<std::string>& row_labels,
                               const std::vector<std::string>& col_labels, const std::string& title) {
  if (m.rank() != 2) fail(ErrorKind::kDimension, "heatmap needs a matrix, got " + ad::shape_str(m.shape()));
  const std::size_t rows = m.dim(0), cols = m.dim(1);
  if (row_labels.size() != rows || col_labels.size() != cols) {
    fail(ErrorKind::kDimension, "heatmap labels do not match a " + ad::shape_str(m.shape()) + " matrix", "tokens");
  }
  constexpr int kCell = 36, kLeft = 140, kTop = 140;
  const int width = kLeft + static_cast<int>(cols) * kCell + 10;
  const int height = kTop + static_cast<int>(rows) * kCell + 10;
  std::string svg;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" font-family=\"sans-serif\" "
                "font-size=\"12\">\n",
                width, height);
  svg += buf;
  if (!title.empty()) svg += "<text x=\"10\" y=\"20\" font-size=\"14\">" + escape(title) + "</text>\n";
  for (std::size_t j = 0; j < cols; ++j) {
    const int x = kLeft + static_cast<int>(j) * kCell + kCell / 2;
    std::snprintf(buf, sizeof buf, "<text transform=\"translate(%d,%d) rotate(-60)\">", x, kTop - 6);
    svg += buf + escape(col_labels[j]) + "</text>\n";
  }
  for (std::size_t i = 0; i < rows; ++i) {
    const int y = kTop + static_cast<int>(i) * kCell;
    std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"%d\" text-anchor=\"end\">", kLeft - 6, y + kCell / 2 + 4);
    svg += buf + escape(row_labels[i]) + "</text>\n";
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = m.at(i, j);
      const double t = std::clamp(v, 0.0, 1.0);
      const int shade = static_cast<int>(255.0 - 200.0 * t);
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"rgb(%d,%d,255)\" stroke=\"#fff\">"
                    "<title>%.17g</title></rect>\n",
                    kLeft + static_cast<int>(j) * kCell, y, kCell, kCell, shade, shade, v);
      svg += buf;
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace sacti::service
