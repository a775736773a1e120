// Copyright 2026 The cgg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cgg/geometry/box_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cgg/core/error.hpp"

namespace cgg::geometry {

void require_valid(const BoundingBox& b) {
  if (!std::isfinite(b.x1) || !std::isfinite(b.y1) || !std::isfinite(b.x2) ||
      !std::isfinite(b.y2) || !(b.x2 > b.x1) || !(b.y2 > b.y1)) {
    std::ostringstream os;
    os << "degenerate box [" << b.x1 << ", " << b.y1 << ", " << b.x2 << ", " << b.y2 << "]";
    throw UsageError(os.str());
  }
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  require_valid(a);
  require_valid(b);
  if (a == b) return 1.0;
  const double inter = intersection_area(a, b);
  if (inter == 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

LocationFeature location_feature(const BoundingBox& box, double width, double height) {
  if (!(width > 0.0) || !(height > 0.0)) throw UsageError("image size must be positive");
  require_valid(box);
  auto check = [](const char* name, double v, double limit) {
    if (v < 0.0 || v > limit) {
      std::ostringstream os;
      os << "box coordinate " << name << "=" << v << " outside [0, " << limit << "]";
      throw UsageError(os.str());
    }
  };
  check("x1", box.x1, width);
  check("y1", box.y1, height);
  check("x2", box.x2, width);
  check("y2", box.y2, height);
  const double w = box.width() / width;
  const double h = box.height() / height;
  return {box.x1 / width, box.y1 / height, box.x2 / width, box.y2 / height, w, h, w * h};
}

}  // namespace cgg::geometry
