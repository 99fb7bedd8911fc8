// Copyright 2026 The dronedet Authors.
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

#ifndef DRONEDET_BOX_HPP
#define DRONEDET_BOX_HPP

#include <algorithm>

namespace dronedet {

/// Axis-aligned box in center form. Coordinates are image fractions for
/// labels and detections; width/height may exceed 1 before clamping.
struct Box {
    float cx = 0.0f;
    float cy = 0.0f;
    float w = 0.0f;
    float h = 0.0f;

    float x1() const { return cx - w * 0.5f; }
    float y1() const { return cy - h * 0.5f; }
    float x2() const { return cx + w * 0.5f; }
    float y2() const { return cy + h * 0.5f; }
    float area() const { return w * h; }

    bool operator==(const Box&) const = default;
};

/// Intersection over union; 0 when the union has no area.
inline float iou(const Box& a, const Box& b)
{
    const float iw = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
    const float ih = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
    if (iw <= 0.0f || ih <= 0.0f) return 0.0f;
    const float inter = iw * ih;
    const float uni = a.area() + b.area() - inter;
    return uni > 0.0f ? inter / uni : 0.0f;
}

/// One annotated object: class id plus a normalized center-form box.
struct GroundTruthLabel {
    int class_id = 0;
    Box box;

    bool operator==(const GroundTruthLabel&) const = default;
};

}  // namespace dronedet

#endif  // DRONEDET_BOX_HPP
