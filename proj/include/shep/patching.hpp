/*
 * Copyright 2026 The shep-xai Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Patch transform: tiles a representation grid into rectangles of a fixed
// size (trailing tiles truncated at the boundary) and back again. Patches are
// ordered row-major over the tile grid.

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "shep/common.hpp"

namespace shep {

// Patch height (rows) and width (columns). 1-D representations have a single
// row, so a 1-D patch of length L is {1, L}.
struct PatchSpec {
  std::size_t height = 1;
  std::size_t width = 1;

  bool operator==(const PatchSpec&) const = default;

  // "L" or "HxW".
  std::string ToString() const {
    if (height == 1) return std::to_string(width);
    return std::to_string(height) + "x" + std::to_string(width);
  }

  static PatchSpec Parse(const std::string& text) {
    auto parse_dim = [&](const std::string& s) -> std::size_t {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != s.size() || s.empty() || v < 1) {
        throw ParameterError("invalid patch specification '" + text + "'");
      }
      return static_cast<std::size_t>(v);
    };
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) return PatchSpec{1, parse_dim(text)};
    return PatchSpec{parse_dim(text.substr(0, x)), parse_dim(text.substr(x + 1))};
  }
};

struct PatchRect {
  std::size_t row = 0, col = 0;
  std::size_t height = 0, width = 0;
  std::size_t offset = 0;  // start of this patch's values in PatchRep::values

  std::size_t size() const { return height * width; }
};

struct PatchGeometry {
  std::size_t rows = 0, cols = 0;
  PatchSpec spec;
  std::vector<PatchRect> rects;

  std::size_t count() const { return rects.size(); }
  std::size_t total() const { return rows * cols; }
  bool operator==(const PatchGeometry& o) const {
    return rows == o.rows && cols == o.cols && spec == o.spec && rects.size() == o.rects.size();
  }
};

inline std::size_t CeilDiv(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

inline std::shared_ptr<const PatchGeometry> MakeGeometry(std::size_t rows, std::size_t cols,
                                                         const PatchSpec& spec) {
  if (spec.height < 1 || spec.width < 1) throw ParameterError("patch dimensions must be >= 1");
  if (spec.height > rows || spec.width > cols) {
    throw ParameterError("patch " + spec.ToString() + " exceeds representation shape " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  auto g = std::make_shared<PatchGeometry>();
  g->rows = rows;
  g->cols = cols;
  g->spec = spec;
  std::size_t offset = 0;
  for (std::size_t r = 0; r < rows; r += spec.height) {
    for (std::size_t c = 0; c < cols; c += spec.width) {
      PatchRect rect{r, c, std::min(spec.height, rows - r), std::min(spec.width, cols - c), offset};
      offset += rect.size();
      g->rects.push_back(rect);
    }
  }
  return g;
}

// Throws InconsistencyError unless the rectangles tile rows x cols exactly
// and offsets are contiguous.
inline void ValidateTiling(const PatchGeometry& g) {
  std::vector<unsigned char> hit(g.rows * g.cols, 0);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < g.rects.size(); ++i) {
    const auto& r = g.rects[i];
    if (r.offset != offset || r.row + r.height > g.rows || r.col + r.width > g.cols) {
      throw InconsistencyError("patch " + std::to_string(i) + " lies outside the grid");
    }
    offset += r.size();
    for (std::size_t a = r.row; a < r.row + r.height; ++a) {
      for (std::size_t b = r.col; b < r.col + r.width; ++b) {
        if (hit[a * g.cols + b]++) {
          throw InconsistencyError("patch " + std::to_string(i) + " overlaps another patch");
        }
      }
    }
  }
  for (unsigned char h : hit) {
    if (!h) throw InconsistencyError("patches do not cover the whole grid");
  }
}

// Patched view of a grid. Values are stored patch-major (patch 0's
// rectangle row-major, then patch 1's, ...).
struct PatchRep {
  std::shared_ptr<const PatchGeometry> geometry;
  std::vector<double> values;

  std::size_t count() const { return geometry ? geometry->count() : 0; }
  std::span<double> patch(std::size_t i) {
    const auto& r = geometry->rects[i];
    return {values.data() + r.offset, r.size()};
  }
  std::span<const double> patch(std::size_t i) const {
    const auto& r = geometry->rects[i];
    return {values.data() + r.offset, r.size()};
  }
};

inline PatchRep Patchify(const Grid& z, std::shared_ptr<const PatchGeometry> geometry) {
  if (geometry->rows != z.rows || geometry->cols != z.cols) {
    throw InconsistencyError("patch geometry does not match the representation shape");
  }
  PatchRep p{std::move(geometry), std::vector<double>(z.size())};
  for (const auto& r : p.geometry->rects) {
    double* dst = p.values.data() + r.offset;
    for (std::size_t a = 0; a < r.height; ++a) {
      for (std::size_t b = 0; b < r.width; ++b) *dst++ = z.at(r.row + a, r.col + b);
    }
  }
  return p;
}

inline PatchRep Patchify(const Grid& z, const PatchSpec& spec) {
  return Patchify(z, MakeGeometry(z.rows, z.cols, spec));
}

// Scatters patch values into an existing buffer of rows*cols elements.
inline void UnpatchifyInto(const PatchRep& p, std::span<double> out) {
  const auto& g = *p.geometry;
  if (out.size() != g.total() || p.values.size() != g.total()) {
    throw InconsistencyError("patch values do not match the geometry size");
  }
  for (const auto& r : g.rects) {
    const double* src = p.values.data() + r.offset;
    for (std::size_t a = 0; a < r.height; ++a) {
      for (std::size_t b = 0; b < r.width; ++b) out[(r.row + a) * g.cols + r.col + b] = *src++;
    }
  }
}

inline Grid Unpatchify(const PatchRep& p) {
  if (!p.geometry) throw InconsistencyError("patch representation has no geometry");
  ValidateTiling(*p.geometry);
  Grid out(p.geometry->rows, p.geometry->cols);
  UnpatchifyInto(p, out.values);
  return out;
}

// Number of attributable dimensions: patch count plus remain arrays.
inline std::size_t DimensionReport(std::size_t rows, std::size_t cols, const PatchSpec& spec,
                                   std::size_t remain_count) {
  if (spec.height < 1 || spec.width < 1 || rows < 1 || cols < 1) {
    throw ParameterError("dimension report needs positive shapes");
  }
  return CeilDiv(rows, spec.height) * CeilDiv(cols, spec.width) + remain_count;
}

}  // namespace shep
