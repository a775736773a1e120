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

#pragma once

#include <array>

#include "cgg/core/types.hpp"

namespace cgg::geometry {

using core::BoundingBox;

/// [x1/W, y1/H, x2/W, y2/H, w/W, h/H, (w*h)/(W*H)]
using LocationFeature = std::array<double, 7>;

/// Throws UsageError unless x2 > x1, y2 > y1 and all coordinates are finite.
void require_valid(const BoundingBox& b);

double intersection_area(const BoundingBox& a, const BoundingBox& b);

/// Intersection over union in [0, 1]. Edge-touching boxes give 0.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Normalized location encoding of `box` inside a width x height image.
/// Throws UsageError naming the offending coordinate if the box leaves the image.
LocationFeature location_feature(const BoundingBox& box, double width, double height);

}  // namespace cgg::geometry
