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

// Detection-head geometry. A raw feature map of a scale with A anchors and
// C classes has A*(5+C) channels; anchor a owns the channel block
// [a*(5+C), (a+1)*(5+C)) laid out (t_x, t_y, t_w, t_h, t_obj, class...).
// Decoding a cell (col, row):
//
//   center_x = (sigmoid(t_x) + col) / grid
//   center_y = (sigmoid(t_y) + row) / grid
//   width    = anchor_w * exp(t_w) / input_size
//   height   = anchor_h * exp(t_h) / input_size
//   objectness and class scores pass through sigmoid
//
// so the decoded center always stays inside its cell and anchor priors set
// the size scale. Encoding assigns each ground-truth box to the anchor
// with the best co-centered IoU and to the cell holding the box midpoint
// at that anchor's scale.

#ifndef DRONEDET_YOLO_HPP
#define DRONEDET_YOLO_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dronedet/box.hpp"
#include "dronedet/config.hpp"
#include "dronedet/error.hpp"
#include "dronedet/tensor.hpp"

namespace dronedet {

inline float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

/// Inverse of sigmoid; p must lie strictly inside (0, 1).
inline float logit(float p) { return std::log(p / (1.0f - p)); }

/// One detection scale: grid resolution, downsampling stride and the
/// anchor subset active at that scale.
struct ScaleHead {
    int grid = 0;
    int stride = 0;
    std::vector<Anchor> anchors;
    int layer_index = -1;

    bool operator==(const ScaleHead&) const = default;
};

/// One decoded candidate box.
struct Detection {
    Box box;
    float objectness = 0.0f;
    std::vector<float> class_scores;
    int class_id = 0;
    float score = 0.0f;  // objectness * best class score

    bool operator==(const Detection&) const = default;
};

/// Channel index of attribute `attr` for anchor slot `a`.
inline int yolo_channel(int a, int attr, int classes) { return a * (5 + classes) + attr; }

/// Grid shape of a detection output: (grid, grid, anchors*(5+classes)).
struct OutputShape {
    int rows = 0;
    int cols = 0;
    int depth = 0;

    bool operator==(const OutputShape&) const = default;
};

inline OutputShape output_shape(int grid, int anchors, int classes)
{
    if (grid < 1 || anchors < 1 || classes < 1) {
        throw ConfigError("output_shape arguments must all be >= 1");
    }
    return {grid, grid, anchors * (5 + classes)};
}

/// Converts one raw feature map into candidate detections, keeping those
/// with objectness * best class score >= conf_thresh.
inline std::vector<Detection> decode(const Tensor& map, const std::vector<Anchor>& anchors,
                                     int stride, int input_size, float conf_thresh)
{
    if (anchors.empty()) throw ConfigError("decode needs at least one anchor");
    if (stride < 1 || input_size < stride || input_size % stride != 0) {
        throw ConfigError("input size must be a multiple of the stride");
    }
    const int grid = input_size / stride;
    if (map.height() != grid || map.width() != grid) {
        throw ConfigError("feature map is " + std::to_string(map.height()) + "x" +
                          std::to_string(map.width()) + ", expected " + std::to_string(grid) +
                          "x" + std::to_string(grid));
    }
    const int per_anchor = map.channels() / static_cast<int>(anchors.size());
    if (map.channels() % static_cast<int>(anchors.size()) != 0 || per_anchor < 6) {
        throw ConfigError("feature map depth " + std::to_string(map.channels()) +
                          " does not split into " + std::to_string(anchors.size()) +
                          " anchor blocks of 5+classes");
    }
    const int classes = per_anchor - 5;
    const float inv_grid = 1.0f / static_cast<float>(grid);
    const float inv_input = 1.0f / static_cast<float>(input_size);

    std::vector<Detection> out;
    for (int row = 0; row < grid; ++row) {
        for (int col = 0; col < grid; ++col) {
            for (std::size_t a = 0; a < anchors.size(); ++a) {
                const int base = yolo_channel(static_cast<int>(a), 0, classes);
                const float t_x = map.at(0, base + 0, row, col);
                const float t_y = map.at(0, base + 1, row, col);
                const float t_w = map.at(0, base + 2, row, col);
                const float t_h = map.at(0, base + 3, row, col);
                const float objectness = sigmoid(map.at(0, base + 4, row, col));

                Detection det;
                det.objectness = objectness;
                det.class_scores.resize(classes);
                float best = 0.0f;
                int best_id = 0;
                for (int c = 0; c < classes; ++c) {
                    const float s = sigmoid(map.at(0, base + 5 + c, row, col));
                    det.class_scores[c] = s;
                    if (s > best) {
                        best = s;
                        best_id = c;
                    }
                }
                det.class_id = best_id;
                det.score = objectness * best;
                if (det.score < conf_thresh) continue;

                det.box.cx = (sigmoid(t_x) + static_cast<float>(col)) * inv_grid;
                det.box.cy = (sigmoid(t_y) + static_cast<float>(row)) * inv_grid;
                det.box.w = anchors[a].w * std::exp(t_w) * inv_input;
                det.box.h = anchors[a].h * std::exp(t_h) * inv_input;
                out.push_back(std::move(det));
            }
        }
    }
    return out;
}

/// Raw box logits that decode back to a given box.
struct BoxLogits {
    float t_x = 0.0f;
    float t_y = 0.0f;
    float t_w = 0.0f;
    float t_h = 0.0f;
};

/// Exact inverse of the box part of decode for a known (cell, anchor) slot.
inline BoxLogits inverse_decode_box(const Box& box, const Anchor& anchor, int grid, int col,
                                    int row, int input_size)
{
    BoxLogits l;
    l.t_x = logit(box.cx * static_cast<float>(grid) - static_cast<float>(col));
    l.t_y = logit(box.cy * static_cast<float>(grid) - static_cast<float>(row));
    l.t_w = std::log(box.w * static_cast<float>(input_size) / anchor.w);
    l.t_h = std::log(box.h * static_cast<float>(input_size) / anchor.h);
    return l;
}

/// Training target for one (cell, anchor) slot. Box and class fields are
/// meaningful only when box_care is set; objectness is always a 0/1 target.
/// b_x/b_y are the midpoint's fractional position inside its cell, b_w/b_h
/// are image fractions (divide by the grid to recover cell fractions).
struct TargetCell {
    float objectness = 0.0f;
    float b_x = 0.0f;
    float b_y = 0.0f;
    float b_w = 0.0f;
    float b_h = 0.0f;
    int class_id = -1;
    bool box_care = false;

    bool operator==(const TargetCell&) const = default;
};

struct TargetTensor {
    int grid = 0;
    int anchors_per_scale = 0;
    std::vector<TargetCell> cells;  // indexed [row][col][anchor]

    TargetCell& at(int row, int col, int anchor)
    {
        return cells[(static_cast<std::size_t>(row) * grid + col) * anchors_per_scale +
                     anchor];
    }
    const TargetCell& at(int row, int col, int anchor) const
    {
        return cells[(static_cast<std::size_t>(row) * grid + col) * anchors_per_scale +
                     anchor];
    }

    bool operator==(const TargetTensor&) const = default;
};

/// Co-centered IoU of two (width, height) extents; the anchor-matching
/// overlap measure.
inline float anchor_iou(float w1, float h1, float w2, float h2)
{
    const float inter = std::min(w1, w2) * std::min(h1, h2);
    const float uni = w1 * h1 + w2 * h2 - inter;
    return uni > 0.0f ? inter / uni : 0.0f;
}

/// Picks the single (scale, anchor) slot responsible for a label: the
/// anchor with the highest co-centered IoU against the label extent.
struct AnchorAssignment {
    int head = 0;
    int anchor = 0;  // index within the head's anchor list
    float iou = 0.0f;
};

inline AnchorAssignment assign_anchor(const GroundTruthLabel& label,
                                      const std::vector<ScaleHead>& heads, int input_size)
{
    AnchorAssignment best{0, 0, -1.0f};
    const float lw = label.box.w * static_cast<float>(input_size);
    const float lh = label.box.h * static_cast<float>(input_size);
    for (std::size_t h = 0; h < heads.size(); ++h) {
        for (std::size_t a = 0; a < heads[h].anchors.size(); ++a) {
            const float v = anchor_iou(lw, lh, heads[h].anchors[a].w, heads[h].anchors[a].h);
            if (v > best.iou) {
                best = {static_cast<int>(h), static_cast<int>(a), v};
            }
        }
    }
    return best;
}

/// Builds per-scale target tensors for a label list. When two labels land
/// on the same (cell, anchor) slot the larger-area box wins.
inline std::vector<TargetTensor> encode_ground_truth(
        const std::vector<GroundTruthLabel>& labels, const std::vector<ScaleHead>& heads)
{
    if (heads.empty() || heads[0].anchors.empty()) {
        throw ConfigError("encoding needs at least one scale with anchors");
    }
    const int input_size = heads[0].grid * heads[0].stride;
    for (const ScaleHead& head : heads) {
        if (head.grid * head.stride != input_size) {
            throw ConfigError("scale heads disagree on the network input size");
        }
    }

    std::vector<TargetTensor> targets;
    for (const ScaleHead& head : heads) {
        TargetTensor t;
        t.grid = head.grid;
        t.anchors_per_scale = static_cast<int>(head.anchors.size());
        t.cells.resize(static_cast<std::size_t>(head.grid) * head.grid *
                       t.anchors_per_scale);
        targets.push_back(std::move(t));
    }

    for (const GroundTruthLabel& label : labels) {
        const Box& b = label.box;
        if (b.cx < 0.0f || b.cx > 1.0f || b.cy < 0.0f || b.cy > 1.0f || b.w < 0.0f ||
            b.w > 1.0f || b.h < 0.0f || b.h > 1.0f) {
            throw ValidationError("label box fields must lie in [0,1]");
        }

        const AnchorAssignment slot = assign_anchor(label, heads, input_size);
        const int grid = heads[slot.head].grid;
        const int col = std::min(static_cast<int>(b.cx * static_cast<float>(grid)), grid - 1);
        const int row = std::min(static_cast<int>(b.cy * static_cast<float>(grid)), grid - 1);

        TargetCell& cell = targets[slot.head].at(row, col, slot.anchor);
        if (cell.box_care && cell.b_w * cell.b_h >= b.area()) continue;
        cell.objectness = 1.0f;
        cell.b_x = b.cx * static_cast<float>(grid) - static_cast<float>(col);
        cell.b_y = b.cy * static_cast<float>(grid) - static_cast<float>(row);
        cell.b_w = b.w;
        cell.b_h = b.h;
        cell.class_id = label.class_id;
        cell.box_care = true;
    }
    return targets;
}

}  // namespace dronedet

#endif  // DRONEDET_YOLO_HPP
