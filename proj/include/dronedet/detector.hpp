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

#ifndef DRONEDET_DETECTOR_HPP
#define DRONEDET_DETECTOR_HPP

#include <vector>

#include "dronedet/network.hpp"
#include "dronedet/nms.hpp"
#include "dronedet/yolo.hpp"

namespace dronedet {

/// Score floor applied when collecting detections for evaluation. The
/// precision/recall curve needs candidates far below the reporting
/// confidence; this floor only culls numerically dead cells so reports
/// stay tractable.
inline constexpr float kEvalScoreFloor = 0.005f;

/// Full single-image pipeline: forward pass, per-scale decoding at
/// conf_thresh, then class-aware NMS at nms_iou. The input must already
/// match the network input layout.
inline std::vector<Detection> detect(const BuiltNetwork& net, const Tensor& input,
                                     float conf_thresh, float nms_iou)
{
    const std::vector<RawFeatureMap> maps = net.forward(input);
    std::vector<Detection> dets;
    for (const RawFeatureMap& raw : maps) {
        std::vector<Detection> scale = decode(raw.map, raw.head.anchors, raw.head.stride,
                                              net.input_width(), conf_thresh);
        dets.insert(dets.end(), std::make_move_iterator(scale.begin()),
                    std::make_move_iterator(scale.end()));
    }
    return nms(std::move(dets), nms_iou);
}

}  // namespace dronedet

#endif  // DRONEDET_DETECTOR_HPP
