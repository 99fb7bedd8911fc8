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

#include <catch2/catch.hpp>

#include "helpers.hpp"

using namespace dronedet;
using ddtest::Rng;

namespace {

// Re-executes the definition layer by layer straight against the tensor
// kernels, retaining every output. Independent of BuiltNetwork::forward's
// caching and scheduling.
std::vector<Tensor> oracle_forward(const BuiltNetwork& net, const Tensor& image)
{
    const NetworkDef& def = net.def();
    std::vector<Tensor> outputs;
    std::vector<Tensor> yolo_maps;
    std::size_t conv_i = 0;
    const Tensor* prev = &image;

    for (std::size_t i = 0; i < def.layers.size(); ++i) {
        const LayerDef& layer = def.layers[i];
        Tensor out;
        if (layer.is<ConvolutionalDef>()) {
            out = conv2d(*prev, net.conv_params()[conv_i++]);
        } else if (layer.is<MaxpoolDef>()) {
            const MaxpoolDef& m = layer.as<MaxpoolDef>();
            out = maxpool(*prev, m.size, m.stride, m.padding);
        } else if (layer.is<UpsampleDef>()) {
            out = upsample_nearest(*prev, layer.as<UpsampleDef>().stride);
        } else if (layer.is<RouteDef>()) {
            const RouteDef& rt = layer.as<RouteDef>();
            out = outputs[resolve_route_ref(rt.layers[0], static_cast<int>(i))];
            for (std::size_t k = 1; k < rt.layers.size(); ++k) {
                out = concat_channels(
                        out, outputs[resolve_route_ref(rt.layers[k], static_cast<int>(i))]);
            }
        } else {
            out = *prev;
            yolo_maps.push_back(out);
        }
        outputs.push_back(std::move(out));
        prev = &outputs.back();
    }
    return yolo_maps;
}

}  // namespace

TEST_CASE("three-scale census is 31 layers of the right kinds", "[network]")
{
    const BuiltNetwork net = three_scale_tiny(1, default_anchors());
    const LayerCensus c = census(net.def());
    CHECK(c.total == 31);
    CHECK(c.convolutional == 16);
    CHECK(c.yolo == 3);
    CHECK(c.maxpool == 6);
    CHECK(c.route == 4);
    CHECK(c.upsample == 2);
}

TEST_CASE("two-scale census is 24 layers of the right kinds", "[network]")
{
    const BuiltNetwork net = two_scale_tiny(1, default_anchors());
    const LayerCensus c = census(net.def());
    CHECK(c.total == 24);
    CHECK(c.convolutional == 13);
    CHECK(c.yolo == 2);
    CHECK(c.maxpool == 6);
    CHECK(c.route == 2);
    CHECK(c.upsample == 1);
}

TEST_CASE("detection convs have anchors*(5+classes) filters", "[network]")
{
    const BuiltNetwork three = three_scale_tiny(1, default_anchors());
    int det_convs = 0;
    for (std::size_t i = 0; i + 1 < three.def().layers.size(); ++i) {
        if (!three.def().layers[i + 1].is<YoloDef>()) continue;
        CHECK(three.def().layers[i].as<ConvolutionalDef>().filters == 12);
        ++det_convs;
    }
    CHECK(det_convs == 3);

    const BuiltNetwork two = two_scale_tiny(1, default_anchors());
    for (std::size_t i = 0; i + 1 < two.def().layers.size(); ++i) {
        if (!two.def().layers[i + 1].is<YoloDef>()) continue;
        CHECK(two.def().layers[i].as<ConvolutionalDef>().filters == 18);
    }
}

TEST_CASE("detection grids and strides", "[network]")
{
    const BuiltNetwork three = three_scale_tiny(1, default_anchors());
    REQUIRE(three.heads().size() == 3);
    CHECK(three.heads()[0].grid == 13);
    CHECK(three.heads()[1].grid == 26);
    CHECK(three.heads()[2].grid == 52);
    CHECK(three.heads()[0].stride == 32);
    CHECK(three.heads()[1].stride == 16);
    CHECK(three.heads()[2].stride == 8);
    CHECK(three.heads()[0].anchors ==
          std::vector<Anchor>{{135.0f, 169.0f}, {344.0f, 319.0f}});
    CHECK(three.heads()[2].anchors == std::vector<Anchor>{{10.0f, 14.0f}, {23.0f, 27.0f}});

    const BuiltNetwork two = two_scale_tiny(1, default_anchors());
    REQUIRE(two.heads().size() == 2);
    CHECK(two.heads()[0].grid == 13);
    CHECK(two.heads()[1].grid == 26);
    CHECK(two.heads()[0].stride == 32);
    CHECK(two.heads()[1].stride == 16);
}

TEST_CASE("strides stay 32/16/8 for any 32-divisible input", "[network]")
{
    for (int input : {96, 416, 608}) {
        const BuiltNetwork net = three_scale_tiny(1, default_anchors(), input);
        REQUIRE(net.heads().size() == 3);
        CHECK(net.heads()[0].stride == 32);
        CHECK(net.heads()[1].stride == 16);
        CHECK(net.heads()[2].stride == 8);
        CHECK(net.heads()[0].grid == input / 32);
        CHECK(net.heads()[2].grid == input / 8);
    }
}

TEST_CASE("builders validate the anchor list", "[network]")
{
    const std::vector<Anchor> all = default_anchors();
    const std::vector<Anchor> five(all.begin(), all.begin() + 5);
    CHECK_THROWS_AS(three_scale_tiny(1, five), ConfigError);

    std::vector<Anchor> unsorted = all;
    std::swap(unsorted[0], unsorted[5]);
    CHECK_THROWS_AS(two_scale_tiny(1, unsorted), ConfigError);
}

TEST_CASE("forward with all-zero parameters yields all-zero maps", "[network]")
{
    const BuiltNetwork net = three_scale_tiny(1, default_anchors());
    const Tensor image(1, 3, 416, 416, 0.25f);
    const std::vector<RawFeatureMap> maps = net.forward(image);
    REQUIRE(maps.size() == 3);
    CHECK(maps[0].map.channels() == 12);
    CHECK(maps[0].map.height() == 13);
    CHECK(maps[1].map.height() == 26);
    CHECK(maps[2].map.height() == 52);
    for (const RawFeatureMap& m : maps) {
        for (float v : m.map.data()) REQUIRE(v == 0.0f);
    }
}

TEST_CASE("forward rejects mismatched input dims", "[network]")
{
    const BuiltNetwork net = three_scale_tiny(1, default_anchors(), 96);
    CHECK_THROWS_AS(net.forward(Tensor(1, 3, 416, 416)), ShapeError);
    CHECK_THROWS_AS(net.forward(Tensor(1, 1, 96, 96)), ShapeError);
}

TEST_CASE("forward matches the layer-by-layer oracle bit for bit", "[network]")
{
    for (bool three : {true, false}) {
        BuiltNetwork net = three ? three_scale_tiny(1, ddtest::small_anchors(), 96)
                                 : two_scale_tiny(1, ddtest::small_anchors(), 96);
        NetworkWeights w = net.weights();
        ddtest::randomize_weights(w, three ? 101 : 102);
        net.set_weights(std::move(w));

        Rng rng(three ? 11 : 12);
        const Tensor image = ddtest::random_tensor(rng, 1, 3, 96, 96, 0.0f, 1.0f);
        const std::vector<RawFeatureMap> got = net.forward(image);
        const std::vector<Tensor> want = oracle_forward(net, image);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            REQUIRE(got[i].map == want[i]);
        }
    }
}

TEST_CASE("forward is deterministic", "[network]")
{
    BuiltNetwork net = three_scale_tiny(1, ddtest::small_anchors(), 96);
    NetworkWeights w = net.weights();
    ddtest::randomize_weights(w, 103);
    net.set_weights(std::move(w));

    Rng rng(13);
    const Tensor image = ddtest::random_tensor(rng, 1, 3, 96, 96, 0.0f, 1.0f);
    const std::vector<RawFeatureMap> a = net.forward(image);
    const std::vector<RawFeatureMap> b = net.forward(image);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i].map == b[i].map);
}

TEST_CASE("forward evicts outputs once their consumers are done", "[network]")
{
    const BuiltNetwork net = three_scale_tiny(1, default_anchors());
    const Tensor image(1, 3, 416, 416, 0.5f);
    ForwardStats stats;
    net.forward(image, &stats);
    CHECK(stats.peak_live_bytes >= image.bytes());
    // Retaining everything would hold the image plus every output; the
    // cache policy must stay well under the full sum.
    CHECK(stats.peak_live_bytes < (stats.total_output_bytes * 6) / 10);
}

TEST_CASE("emitted defs survive a cfg round trip", "[network]")
{
    for (bool three : {true, false}) {
        const BuiltNetwork net = three ? three_scale_tiny(1, default_anchors())
                                       : two_scale_tiny(1, default_anchors());
        const NetworkDef back = infer_shapes(parse_cfg(net.to_cfg()));
        CHECK(back == net.def());
    }
}

TEST_CASE("built networks round-trip their weights bit-identically", "[network]")
{
    for (bool three : {true, false}) {
        BuiltNetwork net = three ? three_scale_tiny(1, ddtest::small_anchors(), 96)
                                 : two_scale_tiny(1, ddtest::small_anchors(), 96);
        NetworkWeights w = net.weights();
        ddtest::randomize_weights(w, three ? 104 : 105);
        net.set_weights(std::move(w));

        const std::string bytes = net.to_weights_bytes();
        const NetworkWeights back = load_weights(bytes, net.def());
        CHECK(back == net.weights());
    }
}
