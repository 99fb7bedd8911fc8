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

#ifndef DRONEDET_NMS_HPP
#define DRONEDET_NMS_HPP

#include <algorithm>
#include <vector>

#include "dronedet/box.hpp"
#include "dronedet/error.hpp"
#include "dronedet/yolo.hpp"

namespace dronedet {

/// Greedy per-class non-max suppression. Detections are taken in
/// descending score order (ties keep their input order); an accepted box
/// suppresses remaining same-class boxes whose IoU against it is strictly
/// greater than iou_thresh. The result is score-sorted.
inline std::vector<Detection> nms(std::vector<Detection> dets, float iou_thresh)
{
    if (iou_thresh < 0.0f || iou_thresh > 1.0f) {
        throw ConfigError("nms iou threshold must lie in [0,1]");
    }
    std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
        return a.score > b.score;
    });

    std::vector<Detection> kept;
    kept.reserve(dets.size());
    for (Detection& d : dets) {
        bool suppressed = false;
        for (const Detection& k : kept) {
            if (k.class_id == d.class_id && iou(k.box, d.box) > iou_thresh) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(std::move(d));
    }
    return kept;
}

}  // namespace dronedet

#endif  // DRONEDET_NMS_HPP
