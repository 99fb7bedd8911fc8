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

#ifndef DRONEDET_TENSOR_HPP
#define DRONEDET_TENSOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dronedet/error.hpp"

namespace dronedet {

/// Dense rank-4 tensor of 32-bit floats in (batch, channel, row, column)
/// order, batch-major. This is the currency of every kernel in the library.
/// All dims must be >= 1, except channels which may be 0 so that channel
/// concatenation has an identity element.
class Tensor {
public:
    Tensor() = default;

    Tensor(int batch, int channels, int height, int width, float fill = 0.0f)
            : batch_(batch), channels_(channels), height_(height), width_(width),
              data_(check_dims(batch, channels, height, width), fill)
    {
    }

    Tensor(int batch, int channels, int height, int width, std::vector<float> values)
            : batch_(batch), channels_(channels), height_(height), width_(width),
              data_(std::move(values))
    {
        if (data_.size() != check_dims(batch, channels, height, width)) {
            throw ValidationError("tensor data length " + std::to_string(data_.size()) +
                                  " does not match dims " + shape_string());
        }
    }

    int batch() const { return batch_; }
    int channels() const { return channels_; }
    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return data_.size(); }
    std::size_t bytes() const { return data_.size() * sizeof(float); }

    float& at(int b, int c, int y, int x) { return data_[index(b, c, y, x)]; }
    float at(int b, int c, int y, int x) const { return data_[index(b, c, y, x)]; }

    float* plane(int b, int c) { return data_.data() + index(b, c, 0, 0); }
    const float* plane(int b, int c) const { return data_.data() + index(b, c, 0, 0); }

    std::vector<float>& data() { return data_; }
    const std::vector<float>& data() const { return data_; }

    bool same_shape(const Tensor& other) const
    {
        return batch_ == other.batch_ && channels_ == other.channels_ &&
               height_ == other.height_ && width_ == other.width_;
    }

    std::string shape_string() const
    {
        return std::to_string(batch_) + "x" + std::to_string(channels_) + "x" +
               std::to_string(height_) + "x" + std::to_string(width_);
    }

    bool operator==(const Tensor& other) const = default;

private:
    static std::size_t check_dims(int batch, int channels, int height, int width)
    {
        if (batch < 1 || channels < 0 || height < 1 || width < 1) {
            throw ValidationError("invalid tensor dims " + std::to_string(batch) + "x" +
                                  std::to_string(channels) + "x" + std::to_string(height) +
                                  "x" + std::to_string(width));
        }
        return static_cast<std::size_t>(batch) * channels * height * width;
    }

    std::size_t index(int b, int c, int y, int x) const
    {
        return ((static_cast<std::size_t>(b) * channels_ + c) * height_ + y) * width_ + x;
    }

    int batch_ = 1, channels_ = 0, height_ = 1, width_ = 1;
    std::vector<float> data_;
};

enum class Activation { Linear, Relu, Leaky };

/// Negative-side slope of the leaky rectifier.
inline constexpr float kLeakySlope = 0.1f;

/// Epsilon added to the running variance in batch-norm inference.
inline constexpr float kBatchNormEpsilon = 1e-5f;

inline float apply_activation(float x, Activation kind)
{
    switch (kind) {
        case Activation::Relu:
            return x > 0.0f ? x : 0.0f;
        case Activation::Leaky:
            return x > 0.0f ? x : kLeakySlope * x;
        case Activation::Linear:
        default:
            return x;
    }
}

/// Per-output-channel batch normalization statistics, inference form:
/// y = gamma * (x - mean) / sqrt(variance + eps) + beta.
struct BatchNormParams {
    std::vector<float> gamma;
    std::vector<float> beta;
    std::vector<float> mean;
    std::vector<float> variance;

    bool operator==(const BatchNormParams&) const = default;
};

/// Convolution parameters. Weights are laid out
/// (out_channel, in_channel, kernel_row, kernel_col), one bias per
/// out channel. `pad` is pixels added symmetrically per side.
struct ConvParams {
    int out_channels = 0;
    int kernel_h = 0;
    int kernel_w = 0;
    int stride = 1;
    int pad = 0;
    Activation activation = Activation::Linear;
    std::vector<float> weights;
    std::vector<float> bias;
    std::optional<BatchNormParams> batch_norm;

    int in_channels() const
    {
        const std::size_t per_filter =
                static_cast<std::size_t>(out_channels) * kernel_h * kernel_w;
        if (per_filter == 0 || weights.size() % per_filter != 0) return -1;
        return static_cast<int>(weights.size() / per_filter);
    }
};

namespace detail {

inline void validate_conv(const Tensor& input, const ConvParams& p)
{
    if (p.out_channels < 1 || p.kernel_h < 1 || p.kernel_w < 1 || p.stride < 1 || p.pad < 0) {
        throw ConfigError("bad convolution geometry");
    }
    const int in_c = p.in_channels();
    if (in_c != input.channels()) {
        throw ConfigError("convolution channel mismatch: input has " +
                          std::to_string(input.channels()) + " channels, weights expect " +
                          std::to_string(in_c));
    }
    if (p.bias.size() != static_cast<std::size_t>(p.out_channels)) {
        throw ConfigError("convolution bias count " + std::to_string(p.bias.size()) +
                          " != out channels " + std::to_string(p.out_channels));
    }
    if (p.kernel_h > input.height() + 2 * p.pad || p.kernel_w > input.width() + 2 * p.pad) {
        throw ConfigError("kernel " + std::to_string(p.kernel_h) + "x" +
                          std::to_string(p.kernel_w) + " larger than padded input " +
                          std::to_string(input.height() + 2 * p.pad) + "x" +
                          std::to_string(input.width() + 2 * p.pad));
    }
    if (p.batch_norm) {
        const auto n = static_cast<std::size_t>(p.out_channels);
        const BatchNormParams& bn = *p.batch_norm;
        if (bn.gamma.size() != n || bn.beta.size() != n || bn.mean.size() != n ||
            bn.variance.size() != n) {
            throw ConfigError("batch-norm parameter count != out channels");
        }
        for (float v : bn.variance) {
            if (v < 0.0f) throw ValidationError("negative running variance");
        }
    }
}

// Unpacks one batch of `input` into a (in_c*kh*kw) x (out_h*out_w) column
// matrix so the convolution becomes a single matrix product.
inline void im2col(const Tensor& input, int b, const ConvParams& p, int out_h, int out_w,
                   std::vector<float>& cols)
{
    const int in_c = input.channels();
    const int h = input.height();
    const int w = input.width();
    const std::size_t plane = static_cast<std::size_t>(out_h) * out_w;
    cols.assign(static_cast<std::size_t>(in_c) * p.kernel_h * p.kernel_w * plane, 0.0f);

    std::size_t row = 0;
    for (int c = 0; c < in_c; ++c) {
        const float* src = input.plane(b, c);
        for (int ky = 0; ky < p.kernel_h; ++ky) {
            for (int kx = 0; kx < p.kernel_w; ++kx, ++row) {
                float* dst = cols.data() + row * plane;
                for (int oy = 0; oy < out_h; ++oy) {
                    const int iy = oy * p.stride + ky - p.pad;
                    if (iy < 0 || iy >= h) continue;
                    const float* src_row = src + static_cast<std::size_t>(iy) * w;
                    float* dst_row = dst + static_cast<std::size_t>(oy) * out_w;
                    for (int ox = 0; ox < out_w; ++ox) {
                        const int ix = ox * p.stride + kx - p.pad;
                        if (ix >= 0 && ix < w) dst_row[ox] = src_row[ix];
                    }
                }
            }
        }
    }
}

}  // namespace detail

/// 2-D convolution with optional batch normalization and activation.
/// Output spatial dims are floor((h + 2*pad - kernel)/stride) + 1 per axis.
inline Tensor conv2d(const Tensor& input, const ConvParams& p)
{
    detail::validate_conv(input, p);

    const int out_h = (input.height() + 2 * p.pad - p.kernel_h) / p.stride + 1;
    const int out_w = (input.width() + 2 * p.pad - p.kernel_w) / p.stride + 1;
    const int in_c = input.channels();
    const std::size_t k = static_cast<std::size_t>(in_c) * p.kernel_h * p.kernel_w;
    const std::size_t plane = static_cast<std::size_t>(out_h) * out_w;

    Tensor out(input.batch(), p.out_channels, out_h, out_w);
    std::vector<float> cols;
    for (int b = 0; b < input.batch(); ++b) {
        detail::im2col(input, b, p, out_h, out_w, cols);
        for (int oc = 0; oc < p.out_channels; ++oc) {
            float* dst = out.plane(b, oc);
            for (std::size_t i = 0; i < plane; ++i) dst[i] = p.bias[oc];
            const float* wrow = p.weights.data() + static_cast<std::size_t>(oc) * k;
            for (std::size_t kk = 0; kk < k; ++kk) {
                const float wv = wrow[kk];
                if (wv == 0.0f) continue;
                const float* col = cols.data() + kk * plane;
                for (std::size_t i = 0; i < plane; ++i) dst[i] += wv * col[i];
            }
        }
    }

    for (int b = 0; b < input.batch(); ++b) {
        for (int oc = 0; oc < p.out_channels; ++oc) {
            float* dst = out.plane(b, oc);
            if (p.batch_norm) {
                const BatchNormParams& bn = *p.batch_norm;
                const float scale =
                        bn.gamma[oc] / std::sqrt(bn.variance[oc] + kBatchNormEpsilon);
                const float shift = bn.beta[oc] - bn.mean[oc] * scale;
                for (std::size_t i = 0; i < plane; ++i) dst[i] = dst[i] * scale + shift;
            }
            for (std::size_t i = 0; i < plane; ++i) {
                dst[i] = apply_activation(dst[i], p.activation);
            }
        }
    }
    return out;
}

/// Absorbs batch normalization into the convolution weights and bias.
/// The returned params have no batch_norm and produce the same output
/// to within float rounding.
inline ConvParams fold_batch_norm(ConvParams p)
{
    if (!p.batch_norm) return p;
    const BatchNormParams bn = std::move(*p.batch_norm);
    p.batch_norm.reset();

    const int in_c = p.in_channels();
    const std::size_t k = static_cast<std::size_t>(in_c) * p.kernel_h * p.kernel_w;
    for (int oc = 0; oc < p.out_channels; ++oc) {
        const float scale = bn.gamma[oc] / std::sqrt(bn.variance[oc] + kBatchNormEpsilon);
        float* w = p.weights.data() + static_cast<std::size_t>(oc) * k;
        for (std::size_t i = 0; i < k; ++i) w[i] *= scale;
        p.bias[oc] = bn.beta[oc] + (p.bias[oc] - bn.mean[oc]) * scale;
    }
    return p;
}

/// Max pooling with darknet semantics: `pad` is the total padding budget,
/// windows start at out_index*stride - pad/2 and out-of-range positions
/// contribute negative infinity, so pad=1 pads the right/bottom edge only.
/// Output dims are floor((h + pad - size)/stride) + 1 per axis.
inline Tensor maxpool(const Tensor& input, int size, int stride, int pad = 0)
{
    if (size < 1 || stride < 1 || pad < 0) throw ConfigError("bad pooling geometry");
    const int out_h = (input.height() + pad - size) / stride + 1;
    const int out_w = (input.width() + pad - size) / stride + 1;
    if (out_h < 1 || out_w < 1) {
        throw ConfigError("pooling window larger than padded input");
    }
    const int offset = -pad / 2;

    Tensor out(input.batch(), input.channels(), out_h, out_w);
    for (int b = 0; b < input.batch(); ++b) {
        for (int c = 0; c < input.channels(); ++c) {
            const float* src = input.plane(b, c);
            float* dst = out.plane(b, c);
            for (int oy = 0; oy < out_h; ++oy) {
                for (int ox = 0; ox < out_w; ++ox) {
                    float best = -std::numeric_limits<float>::infinity();
                    for (int ky = 0; ky < size; ++ky) {
                        const int iy = oy * stride + offset + ky;
                        if (iy < 0 || iy >= input.height()) continue;
                        for (int kx = 0; kx < size; ++kx) {
                            const int ix = ox * stride + offset + kx;
                            if (ix < 0 || ix >= input.width()) continue;
                            best = std::max(best, src[static_cast<std::size_t>(iy) *
                                                              input.width() +
                                                      ix]);
                        }
                    }
                    dst[static_cast<std::size_t>(oy) * out_w + ox] = best;
                }
            }
        }
    }
    return out;
}

/// Nearest-neighbor upsampling: every value becomes a factor x factor block.
inline Tensor upsample_nearest(const Tensor& input, int factor)
{
    if (factor < 1) throw ConfigError("upsample factor must be >= 1");
    Tensor out(input.batch(), input.channels(), input.height() * factor,
               input.width() * factor);
    for (int b = 0; b < input.batch(); ++b) {
        for (int c = 0; c < input.channels(); ++c) {
            const float* src = input.plane(b, c);
            float* dst = out.plane(b, c);
            const int ow = input.width() * factor;
            for (int oy = 0; oy < input.height() * factor; ++oy) {
                const float* src_row = src + static_cast<std::size_t>(oy / factor) *
                                                     input.width();
                float* dst_row = dst + static_cast<std::size_t>(oy) * ow;
                for (int ox = 0; ox < ow; ++ox) dst_row[ox] = src_row[ox / factor];
            }
        }
    }
    return out;
}

/// Concatenates along the channel axis, `a` first. Batch and spatial dims
/// must match.
inline Tensor concat_channels(const Tensor& a, const Tensor& b)
{
    if (a.batch() != b.batch() || a.height() != b.height() || a.width() != b.width()) {
        throw ConfigError("concat spatial mismatch: " + a.shape_string() + " vs " +
                          b.shape_string());
    }
    Tensor out(a.batch(), a.channels() + b.channels(), a.height(), a.width());
    const std::size_t plane = static_cast<std::size_t>(a.height()) * a.width();
    for (int n = 0; n < a.batch(); ++n) {
        for (int c = 0; c < a.channels(); ++c) {
            const float* src = a.plane(n, c);
            std::copy(src, src + plane, out.plane(n, c));
        }
        for (int c = 0; c < b.channels(); ++c) {
            const float* src = b.plane(n, c);
            std::copy(src, src + plane, out.plane(n, a.channels() + c));
        }
    }
    return out;
}

}  // namespace dronedet

#endif  // DRONEDET_TENSOR_HPP
