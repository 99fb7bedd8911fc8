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

// Dataset plumbing: YOLO-format label files (`class cx cy w h`, one box
// per row, all box fields normalized), image list files (one path per
// line), and seeded deterministic train/test splitting.

#ifndef DRONEDET_DATASET_HPP
#define DRONEDET_DATASET_HPP

#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dronedet/box.hpp"
#include "dronedet/config.hpp"
#include "dronedet/error.hpp"

namespace dronedet {

struct DatasetItem {
    std::string image_path;
    std::vector<GroundTruthLabel> labels;
};

/// Parses a YOLO label file: five whitespace-separated numbers per
/// non-blank line. Box fields must lie in [0,1].
inline std::vector<GroundTruthLabel> parse_label_file(std::string_view text)
{
    std::vector<GroundTruthLabel> labels;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(
                pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        std::vector<float> fields;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
                ++i;
            }
            if (i >= line.size()) break;
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') {
                ++j;
            }
            float v = 0.0f;
            const auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, v);
            if (ec != std::errc() || ptr != line.data() + j) {
                throw ParseError("bad number '" + std::string(line.substr(i, j - i)) +
                                         "' in label file",
                                 line_no);
            }
            fields.push_back(v);
            i = j;
        }
        if (fields.empty()) continue;
        if (fields.size() != 5) {
            throw ParseError("label rows need 5 fields (class cx cy w h), got " +
                                     std::to_string(fields.size()),
                             line_no);
        }

        GroundTruthLabel label;
        label.class_id = static_cast<int>(fields[0]);
        if (static_cast<float>(label.class_id) != fields[0] || label.class_id < 0) {
            throw ParseError("class id must be a non-negative integer", line_no);
        }
        label.box = {fields[1], fields[2], fields[3], fields[4]};
        for (int f = 1; f <= 4; ++f) {
            if (fields[f] < 0.0f || fields[f] > 1.0f) {
                throw ValidationError("line " + std::to_string(line_no) + ": box field " +
                                      std::to_string(fields[f]) + " outside [0,1]");
            }
        }
        labels.push_back(label);
    }
    return labels;
}

/// Inverse of parse_label_file at 6 decimal places.
inline std::string render_label_file(const std::vector<GroundTruthLabel>& labels)
{
    std::string out;
    char buf[128];
    for (const GroundTruthLabel& l : labels) {
        std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.6f %.6f\n", l.class_id,
                      static_cast<double>(l.box.cx), static_cast<double>(l.box.cy),
                      static_cast<double>(l.box.w), static_cast<double>(l.box.h));
        out += buf;
    }
    return out;
}

/// One image path per line, blanks ignored.
inline std::vector<std::string> parse_list_file(std::string_view text)
{
    return parse_names_file(text);
}

/// Label file convention: the image path with its extension replaced
/// by `.txt` (same directory).
inline std::string label_path_for_image(const std::string& image_path)
{
    const std::size_t slash = image_path.find_last_of('/');
    const std::size_t dot = image_path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return image_path + ".txt";
    }
    return image_path.substr(0, dot) + ".txt";
}

/// Deterministic seeded split: Fisher-Yates over a mt19937 stream, then
/// the first round(n * train_fraction) shuffled items become the train
/// set. The two sides always partition the input.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_dataset(const std::vector<T>& items,
                                                        double train_fraction,
                                                        std::uint32_t seed)
{
    if (items.empty()) throw ValidationError("cannot split an empty dataset");
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
        throw ValidationError("train fraction must lie strictly between 0 and 1");
    }

    std::vector<std::size_t> order(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937 rng(seed);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        const std::size_t j = rng() % (i + 1);
        std::swap(order[i], order[j]);
    }

    const auto train_size = static_cast<std::size_t>(
            std::lround(static_cast<double>(items.size()) * train_fraction));
    std::pair<std::vector<T>, std::vector<T>> out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < train_size ? out.first : out.second).push_back(items[order[i]]);
    }
    return out;
}

}  // namespace dronedet

#endif  // DRONEDET_DATASET_HPP
