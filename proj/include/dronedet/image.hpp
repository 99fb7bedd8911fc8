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

// Binary netpbm (P5 grayscale, P6 RGB) reading and writing, plain-stretch
// bilinear resizing, and rectangle burning for annotated output. Pixels
// map to [0,1] floats in a (1, channels, height, width) tensor, RGB order.

#ifndef DRONEDET_IMAGE_HPP
#define DRONEDET_IMAGE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dronedet/box.hpp"
#include "dronedet/error.hpp"
#include "dronedet/tensor.hpp"

namespace dronedet {

struct LoadedImage {
    Tensor tensor;  // (1, channels, height, width), values in [0,1]
    int width = 0;
    int height = 0;
    int channels = 0;
};

namespace detail {

class PnmHeaderReader {
public:
    explicit PnmHeaderReader(std::string_view bytes) : bytes_(bytes) {}

    std::string magic()
    {
        if (bytes_.size() < 2) throw IoError("netpbm stream too short for a magic number");
        pos_ = 2;
        return std::string(bytes_.substr(0, 2));
    }

    int value()
    {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            throw IoError("malformed netpbm header");
        }
        long v = 0;
        while (pos_ < bytes_.size() &&
               std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            v = v * 10 + (bytes_[pos_++] - '0');
            if (v > 1 << 30) throw IoError("netpbm header value out of range");
        }
        return static_cast<int>(v);
    }

    // Exactly one whitespace byte separates the maxval from pixel data.
    std::size_t pixel_offset()
    {
        if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
            throw IoError("missing whitespace before netpbm pixel data");
        }
        return pos_ + 1;
    }

private:
    void skip_space_and_comments()
    {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Decodes a binary netpbm payload (P5 or P6, maxval <= 255).
inline LoadedImage decode_netpbm(std::string_view bytes)
{
    detail::PnmHeaderReader header(bytes);
    const std::string magic = header.magic();
    int channels = 0;
    if (magic == "P6") {
        channels = 3;
    } else if (magic == "P5") {
        channels = 1;
    } else {
        throw IoError("unsupported image format '" + magic +
                      "' (binary netpbm P5/P6 expected)");
    }

    const int width = header.value();
    const int height = header.value();
    const int maxval = header.value();
    if (width < 1 || height < 1) throw IoError("netpbm image has empty dimensions");
    if (maxval < 1 || maxval > 255) {
        throw IoError("netpbm maxval " + std::to_string(maxval) + " not supported");
    }

    const std::size_t offset = header.pixel_offset();
    const std::size_t need = static_cast<std::size_t>(width) * height * channels;
    if (bytes.size() - offset < need) {
        throw IoError("netpbm pixel data truncated: need " + std::to_string(need) +
                      " bytes, have " + std::to_string(bytes.size() - offset));
    }

    LoadedImage img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.tensor = Tensor(1, channels, height, width);
    const float scale = 1.0f / static_cast<float>(maxval);
    const auto* pixels = reinterpret_cast<const std::uint8_t*>(bytes.data() + offset);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < channels; ++c) {
                img.tensor.at(0, c, y, x) =
                        scale * pixels[(static_cast<std::size_t>(y) * width + x) * channels +
                                       c];
            }
        }
    }
    return img;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

inline void write_file(const std::string& path, std::string_view bytes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to '" + path + "'");
}

inline LoadedImage load_image(const std::string& path)
{
    try {
        return decode_netpbm(read_file(path));
    } catch (const IoError& e) {
        throw IoError(std::string(e.what()) + " while loading '" + path + "'");
    }
}

/// Encodes a (1, 1|3, h, w) tensor as binary netpbm, clamping to [0,1].
inline std::string encode_netpbm(const Tensor& t)
{
    if (t.batch() != 1 || (t.channels() != 1 && t.channels() != 3)) {
        throw ConfigError("netpbm encoding needs a single 1- or 3-channel image, got " +
                          t.shape_string());
    }
    std::string out = t.channels() == 3 ? "P6\n" : "P5\n";
    out += std::to_string(t.width()) + " " + std::to_string(t.height()) + "\n255\n";
    out.reserve(out.size() + static_cast<std::size_t>(t.width()) * t.height() * t.channels());
    for (int y = 0; y < t.height(); ++y) {
        for (int x = 0; x < t.width(); ++x) {
            for (int c = 0; c < t.channels(); ++c) {
                const float v = std::clamp(t.at(0, c, y, x), 0.0f, 1.0f);
                out.push_back(static_cast<char>(
                        static_cast<int>(std::lround(v * 255.0f))));
            }
        }
    }
    return out;
}

inline void save_image(const std::string& path, const Tensor& t)
{
    write_file(path, encode_netpbm(t));
}

/// Replicates a single gray channel into `channels` identical planes.
inline Tensor expand_channels(const Tensor& t, int channels)
{
    if (t.channels() == channels) return t;
    if (t.channels() != 1) {
        throw ShapeError("cannot expand " + std::to_string(t.channels()) + " channels to " +
                         std::to_string(channels));
    }
    Tensor out(t.batch(), channels, t.height(), t.width());
    const std::size_t plane = static_cast<std::size_t>(t.height()) * t.width();
    for (int b = 0; b < t.batch(); ++b) {
        for (int c = 0; c < channels; ++c) {
            std::copy(t.plane(b, 0), t.plane(b, 0) + plane, out.plane(b, c));
        }
    }
    return out;
}

/// Plain-stretch bilinear resize (no letterboxing). Source coordinates
/// map edge-to-edge: sx = x*(sw-1)/(dw-1), so identical sizes copy
/// exactly and output values stay inside the input range.
inline Tensor resize_bilinear(const Tensor& t, int out_w, int out_h)
{
    if (out_w < 1 || out_h < 1) throw ConfigError("resize target must be >= 1x1");
    if (out_w == t.width() && out_h == t.height()) return t;

    Tensor out(t.batch(), t.channels(), out_h, out_w);
    const float sx_scale =
            out_w > 1 ? static_cast<float>(t.width() - 1) / static_cast<float>(out_w - 1)
                      : 0.0f;
    const float sy_scale =
            out_h > 1 ? static_cast<float>(t.height() - 1) / static_cast<float>(out_h - 1)
                      : 0.0f;

    for (int b = 0; b < t.batch(); ++b) {
        for (int c = 0; c < t.channels(); ++c) {
            const float* src = t.plane(b, c);
            float* dst = out.plane(b, c);
            for (int y = 0; y < out_h; ++y) {
                const float sy = sy_scale * static_cast<float>(y);
                const int y0 = std::min(static_cast<int>(sy), t.height() - 1);
                const int y1 = std::min(y0 + 1, t.height() - 1);
                const float fy = sy - static_cast<float>(y0);
                for (int x = 0; x < out_w; ++x) {
                    const float sx = sx_scale * static_cast<float>(x);
                    const int x0 = std::min(static_cast<int>(sx), t.width() - 1);
                    const int x1 = std::min(x0 + 1, t.width() - 1);
                    const float fx = sx - static_cast<float>(x0);
                    const float top = src[static_cast<std::size_t>(y0) * t.width() + x0] *
                                              (1.0f - fx) +
                                      src[static_cast<std::size_t>(y0) * t.width() + x1] * fx;
                    const float bottom =
                            src[static_cast<std::size_t>(y1) * t.width() + x0] * (1.0f - fx) +
                            src[static_cast<std::size_t>(y1) * t.width() + x1] * fx;
                    dst[static_cast<std::size_t>(y) * out_w + x] =
                            top * (1.0f - fy) + bottom * fy;
                }
            }
        }
    }
    return out;
}

/// Resizes and channel-expands an image to the network input layout.
inline Tensor resize_to_net(const LoadedImage& img, int net_w, int net_h, int net_c = 3)
{
    return expand_channels(resize_bilinear(img.tensor, net_w, net_h), net_c);
}

/// Burns a rectangle outline into an RGB tensor. The box is in image
/// fractions; the stroke grows inward from the outline.
inline void draw_box(Tensor& image, const Box& box, float r, float g, float b, int stroke = 2)
{
    const int w = image.width();
    const int h = image.height();
    const auto clamp_x = [w](int x) { return std::clamp(x, 0, w - 1); };
    const auto clamp_y = [h](int y) { return std::clamp(y, 0, h - 1); };
    const int x1 = clamp_x(static_cast<int>(std::lround(box.x1() * (w - 1))));
    const int x2 = clamp_x(static_cast<int>(std::lround(box.x2() * (w - 1))));
    const int y1 = clamp_y(static_cast<int>(std::lround(box.y1() * (h - 1))));
    const int y2 = clamp_y(static_cast<int>(std::lround(box.y2() * (h - 1))));

    const auto paint = [&](int x, int y) {
        image.at(0, 0, y, x) = r;
        if (image.channels() > 1) image.at(0, 1, y, x) = g;
        if (image.channels() > 2) image.at(0, 2, y, x) = b;
    };
    for (int s = 0; s < stroke; ++s) {
        const int top = clamp_y(y1 + s);
        const int bottom = clamp_y(y2 - s);
        for (int x = x1; x <= x2; ++x) {
            paint(x, top);
            paint(x, bottom);
        }
        const int left = clamp_x(x1 + s);
        const int right = clamp_x(x2 - s);
        for (int y = y1; y <= y2; ++y) {
            paint(left, y);
            paint(right, y);
        }
    }
}

}  // namespace dronedet

#endif  // DRONEDET_IMAGE_HPP
