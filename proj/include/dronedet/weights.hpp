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

// Darknet `.weights` binary layout, little-endian throughout:
//
//   int32 major, int32 minor, int32 revision
//   seen: uint64 when (major, minor) >= (0, 2), else uint32
//   then, for every convolutional layer in network order:
//     biases   float[filters]          (beta when batch-normalized)
//     if batch_normalize:
//       scales   float[filters]        (gamma)
//       mean     float[filters]
//       variance float[filters]
//     weights  float[filters * in_channels * size * size]
//
// Writers always emit version 0.2.0 with a 64-bit `seen`. The stream must
// be consumed exactly: both truncated and oversized payloads are rejected
// with the expected and actual byte counts.

#ifndef DRONEDET_WEIGHTS_HPP
#define DRONEDET_WEIGHTS_HPP

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "dronedet/config.hpp"
#include "dronedet/error.hpp"
#include "dronedet/tensor.hpp"

namespace dronedet {

struct WeightsHeader {
    std::int32_t major = 0;
    std::int32_t minor = 2;
    std::int32_t revision = 0;
    std::uint64_t seen = 0;

    bool operator==(const WeightsHeader&) const = default;
};

/// Parameters of one convolutional layer as stored on disk. For layers
/// without batch normalization the three statistics vectors stay empty
/// and `biases` is the plain bias.
struct ConvLayerWeights {
    std::vector<float> biases;
    std::vector<float> scales;
    std::vector<float> rolling_mean;
    std::vector<float> rolling_variance;
    std::vector<float> weights;

    bool operator==(const ConvLayerWeights&) const = default;
};

struct NetworkWeights {
    WeightsHeader header;
    std::vector<ConvLayerWeights> conv;

    bool operator==(const NetworkWeights&) const = default;
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v)
{
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u64(std::string& out, std::uint64_t v)
{
    put_u32(out, static_cast<std::uint32_t>(v & 0xffffffffu));
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

inline void put_floats(std::string& out, const std::vector<float>& values)
{
    for (float f : values) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

class ByteReader {
public:
    explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) {
            v = (v << 8) | static_cast<std::uint8_t>(bytes_[pos_ + i]);
        }
        pos_ += 4;
        return v;
    }

    std::uint64_t u64()
    {
        const std::uint64_t lo = u32();
        const std::uint64_t hi = u32();
        return lo | (hi << 32);
    }

    void floats(std::vector<float>& out, std::size_t count)
    {
        out.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            out[i] = std::bit_cast<float>(u32());
        }
    }

    std::size_t consumed() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n)
    {
        if (bytes_.size() - pos_ < n) {
            throw IoError("weights stream truncated: needed " + std::to_string(pos_ + n) +
                          " bytes so far, stream holds " + std::to_string(bytes_.size()));
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

struct ConvSlot {
    int filters = 0;
    std::size_t weight_count = 0;
    bool batch_normalize = false;
};

inline std::vector<ConvSlot> conv_slots(const NetworkDef& def)
{
    std::vector<ConvSlot> slots;
    for (const LayerDef& layer : def.layers) {
        if (!layer.is<ConvolutionalDef>()) continue;
        const ConvolutionalDef& c = layer.as<ConvolutionalDef>();
        if (layer.in_channels <= 0) {
            throw ValidationError("weights I/O requires inferred shapes (run infer_shapes)");
        }
        slots.push_back({c.filters,
                         static_cast<std::size_t>(c.filters) * layer.in_channels * c.size *
                                 c.size,
                         c.batch_normalize});
    }
    return slots;
}

inline std::size_t payload_floats(const std::vector<ConvSlot>& slots)
{
    std::size_t n = 0;
    for (const ConvSlot& s : slots) {
        n += static_cast<std::size_t>(s.filters) * (s.batch_normalize ? 4 : 1);
        n += s.weight_count;
    }
    return n;
}

}  // namespace detail

/// Parses a `.weights` byte stream against an inferred NetworkDef.
inline NetworkWeights load_weights(std::string_view bytes, const NetworkDef& def)
{
    const std::vector<detail::ConvSlot> slots = detail::conv_slots(def);

    detail::ByteReader reader(bytes);
    NetworkWeights out;
    out.header.major = static_cast<std::int32_t>(reader.u32());
    out.header.minor = static_cast<std::int32_t>(reader.u32());
    out.header.revision = static_cast<std::int32_t>(reader.u32());
    const bool wide_seen = out.header.major * 10 + out.header.minor >= 2;
    out.header.seen = wide_seen ? reader.u64() : reader.u32();

    const std::size_t expected =
            reader.consumed() + detail::payload_floats(slots) * sizeof(float);
    if (bytes.size() != expected) {
        throw IoError("weights stream holds " + std::to_string(bytes.size()) +
                      " bytes, network needs exactly " + std::to_string(expected));
    }

    for (const detail::ConvSlot& slot : slots) {
        ConvLayerWeights w;
        const std::size_t n = static_cast<std::size_t>(slot.filters);
        reader.floats(w.biases, n);
        if (slot.batch_normalize) {
            reader.floats(w.scales, n);
            reader.floats(w.rolling_mean, n);
            reader.floats(w.rolling_variance, n);
        }
        reader.floats(w.weights, slot.weight_count);
        out.conv.push_back(std::move(w));
    }
    return out;
}

/// Serializes parameters in the exact inverse of load_weights. Always
/// writes header version 0.2.0 with a 64-bit `seen`.
inline std::string save_weights(const NetworkWeights& params, const NetworkDef& def)
{
    const std::vector<detail::ConvSlot> slots = detail::conv_slots(def);
    if (params.conv.size() != slots.size()) {
        throw ValidationError("parameter set holds " + std::to_string(params.conv.size()) +
                              " conv layers, network has " + std::to_string(slots.size()));
    }

    std::string out;
    out.reserve(20 + detail::payload_floats(slots) * sizeof(float));
    detail::put_u32(out, 0);
    detail::put_u32(out, 2);
    detail::put_u32(out, 0);
    detail::put_u64(out, params.header.seen);

    for (std::size_t i = 0; i < slots.size(); ++i) {
        const detail::ConvSlot& slot = slots[i];
        const ConvLayerWeights& w = params.conv[i];
        const std::size_t n = static_cast<std::size_t>(slot.filters);
        if (w.biases.size() != n || w.weights.size() != slot.weight_count ||
            (slot.batch_normalize &&
             (w.scales.size() != n || w.rolling_mean.size() != n ||
              w.rolling_variance.size() != n)) ||
            (!slot.batch_normalize && !w.scales.empty())) {
            throw ValidationError("conv layer " + std::to_string(i) +
                                  " parameter sizes do not match the network definition");
        }
        detail::put_floats(out, w.biases);
        if (slot.batch_normalize) {
            detail::put_floats(out, w.scales);
            detail::put_floats(out, w.rolling_mean);
            detail::put_floats(out, w.rolling_variance);
        }
        detail::put_floats(out, w.weights);
    }
    return out;
}

/// All-zero parameter set shaped for `def`.
inline NetworkWeights zero_weights(const NetworkDef& def)
{
    NetworkWeights out;
    for (const detail::ConvSlot& slot : detail::conv_slots(def)) {
        ConvLayerWeights w;
        const std::size_t n = static_cast<std::size_t>(slot.filters);
        w.biases.assign(n, 0.0f);
        if (slot.batch_normalize) {
            w.scales.assign(n, 0.0f);
            w.rolling_mean.assign(n, 0.0f);
            w.rolling_variance.assign(n, 0.0f);
        }
        w.weights.assign(slot.weight_count, 0.0f);
        out.conv.push_back(std::move(w));
    }
    return out;
}

}  // namespace dronedet

#endif  // DRONEDET_WEIGHTS_HPP
