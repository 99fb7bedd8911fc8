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

// Darknet-style network description files:
//
//   - `.cfg`: `[section]` headers followed by `key=value` lines; `#` starts
//     a comment. The first section must be `[net]`; every later section
//     defines one layer.
//   - `.data`: flat `key = value` metadata (classes, train, valid, names,
//     backup).
//   - `.names`: one class name per line.
//
// Parsing is grammar-only and total: any rejection carries a line number.
// Semantic rules (shape arithmetic, reference resolution) live in
// infer_shapes.

#ifndef DRONEDET_CONFIG_HPP
#define DRONEDET_CONFIG_HPP

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dronedet/error.hpp"
#include "dronedet/tensor.hpp"

namespace dronedet {

/// One prior box size in network-input pixels.
struct Anchor {
    float w = 0.0f;
    float h = 0.0f;

    bool operator==(const Anchor&) const = default;
};

/// `[net]` section. Training-schedule keys beyond these are preserved in
/// `extra` but not interpreted.
struct NetOptions {
    int batch = 1;
    int subdivisions = 1;
    int width = 0;
    int height = 0;
    int channels = 0;
    float momentum = 0.9f;
    float decay = 0.0005f;
    float learning_rate = 0.001f;
    long long max_batches = 0;
    std::vector<std::pair<std::string, std::string>> extra;

    bool operator==(const NetOptions&) const = default;
};

struct ConvolutionalDef {
    int filters = 1;
    int size = 1;
    int stride = 1;
    int padding = 0;  // pixels per side; cfg `pad=1` resolves to size/2
    bool batch_normalize = false;
    Activation activation = Activation::Linear;

    bool operator==(const ConvolutionalDef&) const = default;
};

struct MaxpoolDef {
    int size = 2;
    int stride = 2;
    int padding = 1;  // darknet total-padding convention, default size-1

    bool operator==(const MaxpoolDef&) const = default;
};

struct RouteDef {
    std::vector<int> layers;  // negative = relative to this layer, else absolute

    bool operator==(const RouteDef&) const = default;
};

struct UpsampleDef {
    int stride = 2;

    bool operator==(const UpsampleDef&) const = default;
};

struct YoloDef {
    std::vector<int> mask;
    std::vector<Anchor> anchors;
    int classes = 1;
    int total = 0;  // the `num` key

    bool operator==(const YoloDef&) const = default;
};

enum class LayerKind { Convolutional, Maxpool, Route, Upsample, Yolo };

inline const char* layer_kind_name(LayerKind k)
{
    switch (k) {
        case LayerKind::Convolutional: return "convolutional";
        case LayerKind::Maxpool: return "maxpool";
        case LayerKind::Route: return "route";
        case LayerKind::Upsample: return "upsample";
        case LayerKind::Yolo: return "yolo";
    }
    return "?";
}

/// (channels, height, width) of a feature map.
struct Shape3 {
    int channels = 0;
    int height = 0;
    int width = 0;

    bool operator==(const Shape3&) const = default;

    std::string to_string() const
    {
        return std::to_string(channels) + "x" + std::to_string(height) + "x" +
               std::to_string(width);
    }
};

struct LayerDef {
    std::variant<ConvolutionalDef, MaxpoolDef, RouteDef, UpsampleDef, YoloDef> def;
    Shape3 out_shape{};    // filled by infer_shapes
    int in_channels = 0;   // filled by infer_shapes for convolutional layers
    std::vector<std::pair<std::string, std::string>> extra;

    LayerKind kind() const { return static_cast<LayerKind>(def.index()); }
    const char* kind_name() const { return layer_kind_name(kind()); }

    template <typename T>
    const T& as() const { return std::get<T>(def); }
    template <typename T>
    T& as() { return std::get<T>(def); }
    template <typename T>
    bool is() const { return std::holds_alternative<T>(def); }

    bool operator==(const LayerDef&) const = default;
};

struct NetworkDef {
    NetOptions net;
    std::vector<LayerDef> layers;

    bool operator==(const NetworkDef&) const = default;
};

struct LayerCensus {
    int convolutional = 0;
    int maxpool = 0;
    int route = 0;
    int upsample = 0;
    int yolo = 0;
    int total = 0;

    bool operator==(const LayerCensus&) const = default;
};

inline LayerCensus census(const NetworkDef& def)
{
    LayerCensus c;
    for (const LayerDef& l : def.layers) {
        switch (l.kind()) {
            case LayerKind::Convolutional: ++c.convolutional; break;
            case LayerKind::Maxpool: ++c.maxpool; break;
            case LayerKind::Route: ++c.route; break;
            case LayerKind::Upsample: ++c.upsample; break;
            case LayerKind::Yolo: ++c.yolo; break;
        }
        ++c.total;
    }
    return c;
}

/// Absolute index of a route reference written at `layer_index`.
inline int resolve_route_ref(int ref, int layer_index)
{
    return ref < 0 ? layer_index + ref : ref;
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

struct KeyValue {
    std::string key;
    std::string value;
    int line = 0;
    bool used = false;
};

struct RawSection {
    std::string name;
    int line = 0;
    std::vector<KeyValue> options;
};

inline long long to_int(const KeyValue& kv)
{
    const std::string_view v = kv.value;
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ParseError("non-numeric value '" + kv.value + "' for key '" + kv.key + "'",
                         kv.line);
    }
    return out;
}

inline float to_float(const KeyValue& kv)
{
    const std::string_view v = kv.value;
    float out = 0.0f;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ParseError("non-numeric value '" + kv.value + "' for key '" + kv.key + "'",
                         kv.line);
    }
    return out;
}

inline std::vector<float> to_float_list(const KeyValue& kv)
{
    std::vector<float> out;
    std::string_view rest = kv.value;
    while (!rest.empty()) {
        const std::size_t comma = rest.find(',');
        const std::string_view item = trim(rest.substr(0, comma));
        if (!item.empty()) {
            float v = 0.0f;
            const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            if (ec != std::errc() || ptr != item.data() + item.size()) {
                throw ParseError("non-numeric list entry '" + std::string(item) +
                                         "' for key '" + kv.key + "'",
                                 kv.line);
            }
            out.push_back(v);
        }
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

inline std::vector<int> to_int_list(const KeyValue& kv)
{
    std::vector<int> out;
    for (float v : to_float_list(kv)) {
        const int i = static_cast<int>(v);
        if (static_cast<float>(i) != v) {
            throw ParseError("non-integer list entry for key '" + kv.key + "'", kv.line);
        }
        out.push_back(i);
    }
    return out;
}

class OptionReader {
public:
    explicit OptionReader(RawSection& section) : section_(section) {}

    KeyValue* find(std::string_view key)
    {
        for (KeyValue& kv : section_.options) {
            if (kv.key == key) {
                kv.used = true;
                return &kv;
            }
        }
        return nullptr;
    }

    long long integer(std::string_view key, long long fallback)
    {
        const KeyValue* kv = find(key);
        return kv ? to_int(*kv) : fallback;
    }

    float real(std::string_view key, float fallback)
    {
        const KeyValue* kv = find(key);
        return kv ? to_float(*kv) : fallback;
    }

    std::vector<std::pair<std::string, std::string>> leftovers() const
    {
        std::vector<std::pair<std::string, std::string>> out;
        for (const KeyValue& kv : section_.options) {
            if (!kv.used) out.emplace_back(kv.key, kv.value);
        }
        return out;
    }

private:
    RawSection& section_;
};

inline Activation parse_activation(const KeyValue& kv)
{
    if (kv.value == "linear") return Activation::Linear;
    if (kv.value == "relu") return Activation::Relu;
    if (kv.value == "leaky") return Activation::Leaky;
    throw ParseError("unknown activation '" + kv.value + "'", kv.line);
}

inline const char* activation_name(Activation a)
{
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Leaky: return "leaky";
        case Activation::Linear:
        default: return "linear";
    }
}

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_float(float v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", static_cast<double>(v));
    float back = 0.0f;
    const auto [ptr, ec] = std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
    (void)ptr;
    if (ec == std::errc() && back == v) return buf;
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(v));
    return buf;
}

inline std::vector<RawSection> split_sections(std::string_view text)
{
    std::vector<RawSection> sections;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(
                pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ParseError("malformed section header '" + std::string(line) + "'",
                                 line_no);
            }
            sections.push_back(
                    {std::string(trim(line.substr(1, line.size() - 2))), line_no, {}});
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected key=value, got '" + std::string(line) + "'", line_no);
        }
        if (sections.empty()) {
            throw ParseError("key=value before any section", line_no);
        }
        sections.back().options.push_back({std::string(trim(line.substr(0, eq))),
                                           std::string(trim(line.substr(eq + 1))), line_no,
                                           false});
    }
    return sections;
}

}  // namespace detail

/// Parses `.cfg` text into a NetworkDef. Shapes are not yet inferred.
inline NetworkDef parse_cfg(std::string_view text)
{
    std::vector<detail::RawSection> sections = detail::split_sections(text);
    if (sections.empty()) {
        throw ParseError("missing [net] section: config has no sections");
    }
    if (sections.front().name != "net" && sections.front().name != "network") {
        throw ParseError("first section must be [net], got [" + sections.front().name + "]",
                         sections.front().line);
    }

    NetworkDef def;
    {
        detail::OptionReader r(sections.front());
        NetOptions& n = def.net;
        n.batch = static_cast<int>(r.integer("batch", 1));
        n.subdivisions = static_cast<int>(r.integer("subdivisions", 1));
        n.width = static_cast<int>(r.integer("width", 0));
        n.height = static_cast<int>(r.integer("height", 0));
        n.channels = static_cast<int>(r.integer("channels", 0));
        n.momentum = r.real("momentum", 0.9f);
        n.decay = r.real("decay", 0.0005f);
        n.learning_rate = r.real("learning_rate", 0.001f);
        n.max_batches = r.integer("max_batches", 0);
        n.extra = r.leftovers();
    }

    for (std::size_t s = 1; s < sections.size(); ++s) {
        detail::RawSection& sec = sections[s];
        detail::OptionReader r(sec);
        LayerDef layer;

        if (sec.name == "convolutional" || sec.name == "conv") {
            ConvolutionalDef c;
            c.filters = static_cast<int>(r.integer("filters", 1));
            c.size = static_cast<int>(r.integer("size", 1));
            c.stride = static_cast<int>(r.integer("stride", 1));
            c.batch_normalize = r.integer("batch_normalize", 0) != 0;
            const long long pad_flag = r.integer("pad", 0);
            c.padding = static_cast<int>(r.integer("padding", 0));
            if (pad_flag != 0) c.padding = c.size / 2;
            if (const detail::KeyValue* kv = r.find("activation")) {
                c.activation = detail::parse_activation(*kv);
            }
            layer.def = c;
        } else if (sec.name == "maxpool") {
            MaxpoolDef m;
            m.stride = static_cast<int>(r.integer("stride", 1));
            m.size = static_cast<int>(r.integer("size", m.stride));
            m.padding = static_cast<int>(r.integer("padding", m.size - 1));
            layer.def = m;
        } else if (sec.name == "route") {
            RouteDef rt;
            if (const detail::KeyValue* kv = r.find("layers")) {
                rt.layers = detail::to_int_list(*kv);
            }
            if (rt.layers.empty()) {
                throw ParseError("route section without layers", sec.line);
            }
            layer.def = rt;
        } else if (sec.name == "upsample") {
            UpsampleDef u;
            u.stride = static_cast<int>(r.integer("stride", 2));
            layer.def = u;
        } else if (sec.name == "yolo") {
            YoloDef y;
            if (const detail::KeyValue* kv = r.find("mask")) {
                y.mask = detail::to_int_list(*kv);
            }
            if (const detail::KeyValue* kv = r.find("anchors")) {
                const std::vector<float> flat = detail::to_float_list(*kv);
                if (flat.size() % 2 != 0) {
                    throw ParseError("anchors list must hold (w,h) pairs", kv->line);
                }
                for (std::size_t i = 0; i + 1 < flat.size(); i += 2) {
                    y.anchors.push_back({flat[i], flat[i + 1]});
                }
            }
            y.classes = static_cast<int>(r.integer("classes", 1));
            y.total = static_cast<int>(r.integer("num", static_cast<int>(y.anchors.size())));
            layer.def = y;
        } else {
            throw ParseError("unknown section [" + sec.name + "]", sec.line);
        }

        layer.extra = r.leftovers();
        def.layers.push_back(std::move(layer));
    }
    return def;
}

namespace detail {

inline void validate_net_options(const NetOptions& n)
{
    if (n.width < 32 || n.height < 32 || n.width % 32 != 0 || n.height % 32 != 0) {
        throw ValidationError("network input " + std::to_string(n.width) + "x" +
                              std::to_string(n.height) + " must be a positive multiple of 32");
    }
    if (n.channels < 1) throw ValidationError("network channels must be >= 1");
    if (n.subdivisions < 1 || n.batch < n.subdivisions) {
        throw ValidationError("need batch >= subdivisions >= 1");
    }
}

}  // namespace detail

/// Computes every layer's output shape (and input channel count for
/// convolutions) from the `[net]` input dims. Returns a filled copy.
inline NetworkDef infer_shapes(NetworkDef def)
{
    detail::validate_net_options(def.net);

    Shape3 prev{def.net.channels, def.net.height, def.net.width};
    for (std::size_t i = 0; i < def.layers.size(); ++i) {
        LayerDef& layer = def.layers[i];
        const std::string at = " at layer " + std::to_string(i);

        if (layer.is<ConvolutionalDef>()) {
            const ConvolutionalDef& c = layer.as<ConvolutionalDef>();
            if (c.filters < 1) throw ValidationError("convolution filters < 1" + at);
            if (c.size < 1 || c.stride < 1 || c.padding < 0) {
                throw ValidationError("bad convolution geometry" + at);
            }
            if (c.size > prev.height + 2 * c.padding || c.size > prev.width + 2 * c.padding) {
                throw ShapeError("kernel larger than padded input" + at);
            }
            layer.in_channels = prev.channels;
            layer.out_shape = {c.filters, (prev.height + 2 * c.padding - c.size) / c.stride + 1,
                               (prev.width + 2 * c.padding - c.size) / c.stride + 1};
        } else if (layer.is<MaxpoolDef>()) {
            const MaxpoolDef& m = layer.as<MaxpoolDef>();
            if (m.size < 1 || m.stride < 1 || m.padding < 0) {
                throw ValidationError("bad maxpool geometry" + at);
            }
            const int oh = (prev.height + m.padding - m.size) / m.stride + 1;
            const int ow = (prev.width + m.padding - m.size) / m.stride + 1;
            if (oh < 1 || ow < 1) throw ShapeError("maxpool output collapsed" + at);
            layer.out_shape = {prev.channels, oh, ow};
        } else if (layer.is<RouteDef>()) {
            const RouteDef& rt = layer.as<RouteDef>();
            Shape3 acc{};
            for (std::size_t k = 0; k < rt.layers.size(); ++k) {
                const int src = resolve_route_ref(rt.layers[k], static_cast<int>(i));
                if (src < 0 || src >= static_cast<int>(i)) {
                    throw ValidationError("route at layer " + std::to_string(i) +
                                          " references layer " + std::to_string(src) +
                                          ", which is not strictly earlier");
                }
                const Shape3& in = def.layers[src].out_shape;
                if (k == 0) {
                    acc = in;
                } else {
                    if (in.height != acc.height || in.width != acc.width) {
                        throw ShapeError(
                                "route at layer " + std::to_string(i) + " mixes " +
                                std::to_string(in.height) + "x" + std::to_string(in.width) +
                                " (layer " + std::to_string(src) + ") with " +
                                std::to_string(acc.height) + "x" + std::to_string(acc.width) +
                                " (layer " +
                                std::to_string(resolve_route_ref(rt.layers[0],
                                                                 static_cast<int>(i))) +
                                ")");
                    }
                    acc.channels += in.channels;
                }
            }
            layer.out_shape = acc;
        } else if (layer.is<UpsampleDef>()) {
            const UpsampleDef& u = layer.as<UpsampleDef>();
            if (u.stride < 1) throw ValidationError("bad upsample factor" + at);
            layer.out_shape = {prev.channels, prev.height * u.stride, prev.width * u.stride};
        } else if (layer.is<YoloDef>()) {
            const YoloDef& y = layer.as<YoloDef>();
            if (y.mask.empty()) throw ValidationError("yolo layer without mask" + at);
            if (y.classes < 1) throw ValidationError("yolo classes < 1" + at);
            const int max_mask = *std::max_element(y.mask.begin(), y.mask.end());
            if (static_cast<int>(y.anchors.size()) < max_mask + 1) {
                throw ValidationError("yolo anchor list shorter than mask indices" + at);
            }
            const int want = static_cast<int>(y.mask.size()) * (5 + y.classes);
            if (i == 0 || !def.layers[i - 1].is<ConvolutionalDef>()) {
                throw ShapeError("yolo layer must follow a convolutional layer" + at);
            }
            if (prev.channels != want) {
                throw ShapeError("yolo predecessor has " + std::to_string(prev.channels) +
                                 " channels, expected " + std::to_string(want) + at);
            }
            layer.out_shape = prev;
        }

        prev = layer.out_shape;
    }
    return def;
}

/// Renders a NetworkDef back to `.cfg` text. Re-parsing then re-inferring
/// the result reproduces the def structurally.
inline std::string render_cfg(const NetworkDef& def)
{
    std::string out;
    const auto kv = [&out](std::string_view key, const std::string& value) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    };

    out += "[net]\n";
    kv("batch", std::to_string(def.net.batch));
    kv("subdivisions", std::to_string(def.net.subdivisions));
    kv("width", std::to_string(def.net.width));
    kv("height", std::to_string(def.net.height));
    kv("channels", std::to_string(def.net.channels));
    kv("momentum", detail::format_float(def.net.momentum));
    kv("decay", detail::format_float(def.net.decay));
    kv("learning_rate", detail::format_float(def.net.learning_rate));
    kv("max_batches", std::to_string(def.net.max_batches));
    for (const auto& [k, v] : def.net.extra) kv(k, v);

    for (const LayerDef& layer : def.layers) {
        out += '\n';
        out += '[';
        out += layer.kind_name();
        out += "]\n";
        if (layer.is<ConvolutionalDef>()) {
            const ConvolutionalDef& c = layer.as<ConvolutionalDef>();
            if (c.batch_normalize) kv("batch_normalize", "1");
            kv("filters", std::to_string(c.filters));
            kv("size", std::to_string(c.size));
            kv("stride", std::to_string(c.stride));
            if (c.padding == c.size / 2 && c.padding > 0) {
                kv("pad", "1");
            } else if (c.padding > 0) {
                kv("padding", std::to_string(c.padding));
            }
            kv("activation", detail::activation_name(c.activation));
        } else if (layer.is<MaxpoolDef>()) {
            const MaxpoolDef& m = layer.as<MaxpoolDef>();
            kv("size", std::to_string(m.size));
            kv("stride", std::to_string(m.stride));
            if (m.padding != m.size - 1) kv("padding", std::to_string(m.padding));
        } else if (layer.is<RouteDef>()) {
            const RouteDef& rt = layer.as<RouteDef>();
            std::string list;
            for (std::size_t k = 0; k < rt.layers.size(); ++k) {
                if (k) list += ",";
                list += std::to_string(rt.layers[k]);
            }
            kv("layers", list);
        } else if (layer.is<UpsampleDef>()) {
            kv("stride", std::to_string(layer.as<UpsampleDef>().stride));
        } else if (layer.is<YoloDef>()) {
            const YoloDef& y = layer.as<YoloDef>();
            std::string mask;
            for (std::size_t k = 0; k < y.mask.size(); ++k) {
                if (k) mask += ",";
                mask += std::to_string(y.mask[k]);
            }
            kv("mask", mask);
            std::string anchors;
            for (std::size_t k = 0; k < y.anchors.size(); ++k) {
                if (k) anchors += ", ";
                anchors += detail::format_float(y.anchors[k].w);
                anchors += ",";
                anchors += detail::format_float(y.anchors[k].h);
            }
            kv("anchors", anchors);
            kv("classes", std::to_string(y.classes));
            kv("num", std::to_string(y.total));
        }
        for (const auto& [k, v] : layer.extra) kv(k, v);
    }
    return out;
}

/// Contents of a `.data` file. Paths are kept verbatim; the names list
/// itself lives in the `.names` file.
struct DataFileDef {
    int classes = 0;
    std::string train_list_path;
    std::string valid_list_path;
    std::string names_path;
    std::string backup_path;
    std::vector<std::pair<std::string, std::string>> extra;

    bool operator==(const DataFileDef&) const = default;
};

/// Dataset metadata joined from a `.data` file and its `.names` list.
struct DatasetMeta {
    int classes = 0;
    std::string train_list_path;
    std::string valid_list_path;
    std::vector<std::string> names;
    std::string backup_path;

    bool operator==(const DatasetMeta&) const = default;
};

inline DataFileDef parse_data_file(std::string_view text)
{
    DataFileDef out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(
                pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected key = value, got '" + std::string(line) + "'", line_no);
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key == "classes") {
            out.classes = static_cast<int>(detail::to_int({key, value, line_no, false}));
        } else if (key == "train") {
            out.train_list_path = value;
        } else if (key == "valid") {
            out.valid_list_path = value;
        } else if (key == "names") {
            out.names_path = value;
        } else if (key == "backup") {
            out.backup_path = value;
        } else {
            out.extra.emplace_back(key, value);
        }
    }
    return out;
}

/// One class name per line; blank lines ignored.
inline std::vector<std::string> parse_names_file(std::string_view text)
{
    std::vector<std::string> names;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        const std::string_view line = detail::trim(text.substr(
                pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        if (!line.empty()) names.emplace_back(line);
    }
    return names;
}

inline DatasetMeta make_dataset_meta(const DataFileDef& data, std::vector<std::string> names)
{
    if (static_cast<int>(names.size()) != data.classes) {
        throw ValidationError("classes = " + std::to_string(data.classes) +
                              " but names file lists " + std::to_string(names.size()) +
                              " entries");
    }
    return {data.classes, data.train_list_path, data.valid_list_path, std::move(names),
            data.backup_path};
}

}  // namespace dronedet

#endif  // DRONEDET_CONFIG_HPP
