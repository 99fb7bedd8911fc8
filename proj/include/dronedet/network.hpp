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

// Runnable networks: the two tiny detector architectures emitted
// programmatically, plus a forward executor over the tensor kernels.
//
// The three-scale detector has 31 layers (16 convolutional, 3 yolo,
// 6 maxpool, 4 route, 2 upsample) and detects on 13/26/52 grids for a
// 416 input; the two-scale baseline has 24 layers (13 convolutional,
// 2 yolo, 6 maxpool, 2 route, 1 upsample) on 13/26 grids. Both share the
// conv16..conv1024 max-pooled trunk; extra scales branch off with a 1x1
// conv, a 2x upsample and a channel concat against the trunk feature of
// matching resolution.

#ifndef DRONEDET_NETWORK_HPP
#define DRONEDET_NETWORK_HPP

#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dronedet/config.hpp"
#include "dronedet/error.hpp"
#include "dronedet/tensor.hpp"
#include "dronedet/weights.hpp"
#include "dronedet/yolo.hpp"

namespace dronedet {

/// The six conventional tiny-detector anchors, ascending by area.
inline std::vector<Anchor> default_anchors()
{
    return {{10.0f, 14.0f}, {23.0f, 27.0f},   {37.0f, 58.0f},
            {81.0f, 82.0f}, {135.0f, 169.0f}, {344.0f, 319.0f}};
}

/// One raw map entering a yolo layer, tagged with its scale geometry.
struct RawFeatureMap {
    Tensor map;
    ScaleHead head;
};

/// Forward-pass accounting. Peak bytes cover the image and cached layer
/// outputs still waiting for a consumer; the returned feature maps are
/// not counted.
struct ForwardStats {
    std::size_t peak_live_bytes = 0;
    std::size_t total_output_bytes = 0;
};

/// A definition with inferred shapes, its raw parameters, and the
/// runnable per-conv-layer kernels (batch-norm folded by default).
/// Immutable after construction; forward() keeps all scratch local, so
/// one network may serve concurrent callers.
class BuiltNetwork {
public:
    BuiltNetwork(NetworkDef def, NetworkWeights weights, bool fold_bn = true)
            : def_(std::move(def)), fold_bn_(fold_bn)
    {
        if (def_.net.width != def_.net.height) {
            throw ConfigError("detection networks require a square input");
        }
        build_heads();
        set_weights(std::move(weights));
    }

    const NetworkDef& def() const { return def_; }
    const NetworkWeights& weights() const { return weights_; }
    const std::vector<ScaleHead>& heads() const { return heads_; }
    const std::vector<ConvParams>& conv_params() const { return conv_params_; }

    int input_width() const { return def_.net.width; }
    int input_height() const { return def_.net.height; }
    int input_channels() const { return def_.net.channels; }

    /// Replaces all parameters; sizes must match the definition.
    void set_weights(NetworkWeights weights)
    {
        conv_params_ = assemble_params(def_, weights, fold_bn_);
        weights_ = std::move(weights);
    }

    std::string to_cfg() const { return render_cfg(def_); }
    std::string to_weights_bytes() const { return save_weights(weights_, def_); }

    /// Runs the image through every layer and returns the raw map entering
    /// each yolo layer, in layer order. Layer outputs are cached only while
    /// a later consumer still needs them.
    std::vector<RawFeatureMap> forward(const Tensor& image,
                                       ForwardStats* stats = nullptr) const
    {
        if (image.batch() != 1 || image.channels() != def_.net.channels ||
            image.height() != def_.net.height || image.width() != def_.net.width) {
            throw ShapeError("input is " + image.shape_string() + ", network expects 1x" +
                             std::to_string(def_.net.channels) + "x" +
                             std::to_string(def_.net.height) + "x" +
                             std::to_string(def_.net.width));
        }

        // -1 keys the input image in the cache.
        std::vector<int> remaining = use_counts();
        std::unordered_map<int, Tensor> cache;
        cache.emplace(-1, image);

        std::size_t live = image.bytes();
        ForwardStats local;
        local.peak_live_bytes = live;

        const auto evict = [&](int idx) {
            auto it = cache.find(idx);
            if (it != cache.end() && --remaining[idx + 1] == 0) {
                live -= it->second.bytes();
                cache.erase(it);
            }
        };
        const auto fetch = [&](int idx) -> const Tensor& {
            const auto it = cache.find(idx);
            if (it == cache.end()) {
                throw ShapeError("internal: layer " + std::to_string(idx) +
                                 " output already evicted");
            }
            return it->second;
        };

        std::vector<RawFeatureMap> results;
        std::size_t conv_index = 0;
        for (std::size_t i = 0; i < def_.layers.size(); ++i) {
            const LayerDef& layer = def_.layers[i];
            const int self = static_cast<int>(i);
            Tensor out;

            if (layer.is<ConvolutionalDef>()) {
                out = conv2d(fetch(self - 1), conv_params_[conv_index++]);
                evict(self - 1);
            } else if (layer.is<MaxpoolDef>()) {
                const MaxpoolDef& m = layer.as<MaxpoolDef>();
                out = maxpool(fetch(self - 1), m.size, m.stride, m.padding);
                evict(self - 1);
            } else if (layer.is<UpsampleDef>()) {
                out = upsample_nearest(fetch(self - 1), layer.as<UpsampleDef>().stride);
                evict(self - 1);
            } else if (layer.is<RouteDef>()) {
                const RouteDef& rt = layer.as<RouteDef>();
                out = fetch(resolve_route_ref(rt.layers[0], self));
                for (std::size_t k = 1; k < rt.layers.size(); ++k) {
                    out = concat_channels(out, fetch(resolve_route_ref(rt.layers[k], self)));
                }
                for (int ref : rt.layers) evict(resolve_route_ref(ref, self));
            } else {  // yolo: pass-through; capture the incoming map
                const Tensor& in = fetch(self - 1);
                results.push_back({in, heads_[results.size()]});
                out = in;
                evict(self - 1);
            }

            local.total_output_bytes += out.bytes();
            if (remaining[self + 1] > 0) {
                live += out.bytes();
                local.peak_live_bytes = std::max(local.peak_live_bytes, live);
                cache.emplace(self, std::move(out));
            } else {
                local.peak_live_bytes = std::max(local.peak_live_bytes, live + out.bytes());
            }
        }

        if (stats) *stats = local;
        return results;
    }

private:
    static bool consumes_previous(const LayerDef& layer)
    {
        return !layer.is<RouteDef>();
    }

    // remaining[0] guards the image; remaining[i+1] guards layer i.
    std::vector<int> use_counts() const
    {
        std::vector<int> uses(def_.layers.size() + 1, 0);
        for (std::size_t i = 0; i < def_.layers.size(); ++i) {
            const LayerDef& layer = def_.layers[i];
            if (consumes_previous(layer)) {
                ++uses[i];  // consumes output of layer i-1 (the image for i == 0)
            } else {
                for (int ref : layer.as<RouteDef>().layers) {
                    ++uses[resolve_route_ref(ref, static_cast<int>(i)) + 1];
                }
            }
        }
        return uses;
    }

    void build_heads()
    {
        for (std::size_t i = 0; i < def_.layers.size(); ++i) {
            if (!def_.layers[i].is<YoloDef>()) continue;
            const YoloDef& y = def_.layers[i].as<YoloDef>();
            const Shape3& shape = def_.layers[i].out_shape;
            if (shape.height != shape.width || shape.height < 1) {
                throw ShapeError("yolo layer " + std::to_string(i) +
                                 " has a non-square grid " + shape.to_string());
            }
            if (def_.net.width % shape.width != 0) {
                throw ShapeError("yolo grid does not divide the input size");
            }
            ScaleHead head;
            head.grid = shape.height;
            head.stride = def_.net.width / shape.width;
            head.layer_index = static_cast<int>(i);
            for (int m : y.mask) head.anchors.push_back(y.anchors[m]);
            heads_.push_back(std::move(head));
        }
    }

    static std::vector<ConvParams> assemble_params(const NetworkDef& def,
                                                   const NetworkWeights& weights,
                                                   bool fold_bn)
    {
        std::vector<ConvParams> params;
        std::size_t k = 0;
        for (const LayerDef& layer : def.layers) {
            if (!layer.is<ConvolutionalDef>()) continue;
            if (k >= weights.conv.size()) {
                throw ValidationError("parameter set has fewer conv layers than the network");
            }
            const ConvolutionalDef& c = layer.as<ConvolutionalDef>();
            const ConvLayerWeights& w = weights.conv[k++];
            const std::size_t n = static_cast<std::size_t>(c.filters);
            const std::size_t want_weights =
                    n * layer.in_channels * static_cast<std::size_t>(c.size) * c.size;
            if (w.biases.size() != n || w.weights.size() != want_weights ||
                (c.batch_normalize &&
                 (w.scales.size() != n || w.rolling_mean.size() != n ||
                  w.rolling_variance.size() != n))) {
                throw ValidationError("conv parameter sizes do not match the definition");
            }

            ConvParams p;
            p.out_channels = c.filters;
            p.kernel_h = p.kernel_w = c.size;
            p.stride = c.stride;
            p.pad = c.padding;
            p.activation = c.activation;
            p.weights = w.weights;
            if (c.batch_normalize) {
                p.bias.assign(n, 0.0f);
                p.batch_norm = BatchNormParams{w.scales, w.biases, w.rolling_mean,
                                               w.rolling_variance};
                if (fold_bn) p = fold_batch_norm(std::move(p));
            } else {
                p.bias = w.biases;
            }
            params.push_back(std::move(p));
        }
        if (k != weights.conv.size()) {
            throw ValidationError("parameter set has more conv layers than the network");
        }
        return params;
    }

    NetworkDef def_;
    NetworkWeights weights_;
    std::vector<ConvParams> conv_params_;
    std::vector<ScaleHead> heads_;
    bool fold_bn_;
};

namespace detail {

inline void check_six_anchors(const std::vector<Anchor>& anchors)
{
    if (anchors.size() != 6) {
        throw ConfigError("expected exactly 6 anchors, got " +
                          std::to_string(anchors.size()));
    }
    for (std::size_t i = 1; i < anchors.size(); ++i) {
        if (anchors[i].w * anchors[i].h < anchors[i - 1].w * anchors[i - 1].h) {
            throw ConfigError("anchors must be sorted ascending by area");
        }
    }
}

class DefBuilder {
public:
    DefBuilder(int classes, std::vector<Anchor> anchors, int input_size)
            : classes_(classes), anchors_(std::move(anchors))
    {
        def_.net.batch = 64;
        def_.net.subdivisions = 8;
        def_.net.width = input_size;
        def_.net.height = input_size;
        def_.net.channels = 3;
        def_.net.momentum = 0.9f;
        def_.net.decay = 0.0005f;
        def_.net.learning_rate = 0.001f;
        def_.net.max_batches = 50000;
    }

    void conv(int filters, int size, Activation act = Activation::Leaky,
              bool batch_normalize = true)
    {
        ConvolutionalDef c;
        c.filters = filters;
        c.size = size;
        c.stride = 1;
        c.padding = size / 2;
        c.batch_normalize = batch_normalize;
        c.activation = act;
        def_.layers.push_back({c, {}, 0, {}});
    }

    void detection_conv(int anchors_per_scale)
    {
        conv(anchors_per_scale * (5 + classes_), 1, Activation::Linear, false);
    }

    void maxpool(int size, int stride)
    {
        def_.layers.push_back({MaxpoolDef{size, stride, size - 1}, {}, 0, {}});
    }

    void route(std::vector<int> layers)
    {
        def_.layers.push_back({RouteDef{std::move(layers)}, {}, 0, {}});
    }

    void upsample(int factor) { def_.layers.push_back({UpsampleDef{factor}, {}, 0, {}}); }

    void yolo(std::vector<int> mask)
    {
        YoloDef y;
        y.mask = std::move(mask);
        y.anchors = anchors_;
        y.classes = classes_;
        y.total = static_cast<int>(anchors_.size());
        def_.layers.push_back({y, {}, 0, {}});
    }

    NetworkDef take() { return std::move(def_); }

private:
    int classes_;
    std::vector<Anchor> anchors_;
    NetworkDef def_;
};

// Shared conv16..conv1024 trunk plus the 13x13 detection stack
// (layers 0..16 of both architectures).
inline void trunk_and_first_head(DefBuilder& b, int anchors_per_scale,
                                 std::vector<int> first_mask)
{
    b.conv(16, 3);       //  0: 416
    b.maxpool(2, 2);     //  1: 208
    b.conv(32, 3);       //  2
    b.maxpool(2, 2);     //  3: 104
    b.conv(64, 3);       //  4
    b.maxpool(2, 2);     //  5: 52
    b.conv(128, 3);      //  6: 52x52 tap for the third scale
    b.maxpool(2, 2);     //  7: 26
    b.conv(256, 3);      //  8: 26x26 tap for the second scale
    b.maxpool(2, 2);     //  9: 13
    b.conv(512, 3);      // 10
    b.maxpool(2, 1);     // 11: stride-1 pool keeps 13x13
    b.conv(1024, 3);     // 12
    b.conv(256, 1);      // 13: branch point
    b.conv(512, 3);      // 14
    b.detection_conv(anchors_per_scale);  // 15
    b.yolo(std::move(first_mask));        // 16: 13x13 head
}

}  // namespace detail

/// Three-scale tiny detector: 31 layers, detection grids 13/26/52 at
/// strides 32/16/8 for a 416 input, six anchors split two per scale with
/// the largest pair on the coarsest grid.
inline BuiltNetwork three_scale_tiny(int classes, const std::vector<Anchor>& anchors,
                                     int input_size = 416)
{
    detail::check_six_anchors(anchors);
    detail::DefBuilder b(classes, anchors, input_size);
    detail::trunk_and_first_head(b, 2, {4, 5});

    b.route({-4});        // 17: conv256 at 13x13
    b.conv(128, 1);       // 18
    b.upsample(2);        // 19: 26x26
    b.route({-1, 8});     // 20: concat with the 256ch 26x26 trunk feature
    b.conv(256, 3);       // 21
    b.detection_conv(2);  // 22
    b.yolo({2, 3});       // 23: 26x26 head

    b.route({-3});        // 24: conv256 at 26x26
    b.conv(64, 1);        // 25
    b.upsample(2);        // 26: 52x52
    b.route({-1, 6});     // 27: concat with the 128ch 52x52 trunk feature
    b.conv(128, 3);       // 28
    b.detection_conv(2);  // 29
    b.yolo({0, 1});       // 30: 52x52 head

    NetworkDef def = infer_shapes(b.take());
    NetworkWeights zeros = zero_weights(def);
    return BuiltNetwork(std::move(def), std::move(zeros));
}

/// Two-scale tiny baseline: 24 layers, detection grids 13/26 at strides
/// 32/16 for a 416 input, six anchors split three per scale.
inline BuiltNetwork two_scale_tiny(int classes, const std::vector<Anchor>& anchors,
                                   int input_size = 416)
{
    detail::check_six_anchors(anchors);
    detail::DefBuilder b(classes, anchors, input_size);
    detail::trunk_and_first_head(b, 3, {3, 4, 5});

    b.route({-4});        // 17
    b.conv(128, 1);       // 18
    b.upsample(2);        // 19
    b.route({-1, 8});     // 20
    b.conv(256, 3);       // 21
    b.detection_conv(3);  // 22
    b.yolo({0, 1, 2});    // 23: 26x26 head

    NetworkDef def = infer_shapes(b.take());
    NetworkWeights zeros = zero_weights(def);
    return BuiltNetwork(std::move(def), std::move(zeros));
}

}  // namespace dronedet

#endif  // DRONEDET_NETWORK_HPP
