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

// Test-only utilities: independent brute-force kernel references, random
// generators, scratch directories, a CLI process runner, and the crafted
// "planted detection" weight sets used by the end-to-end fixtures. The
// reference implementations deliberately share no code with the library
// kernels they check.

#ifndef DRONEDET_TESTS_HELPERS_HPP
#define DRONEDET_TESTS_HELPERS_HPP

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dronedet/dronedet.hpp"

namespace ddtest {

namespace dd = dronedet;

// ----------------------------------------------------------- randomness

struct Rng {
    explicit Rng(unsigned seed) : gen(seed) {}

    float uniform(float lo, float hi)
    {
        return std::uniform_real_distribution<float>(lo, hi)(gen);
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }

    std::mt19937 gen;
};

inline dd::Tensor random_tensor(Rng& rng, int b, int c, int h, int w, float lo = -1.0f,
                                float hi = 1.0f)
{
    dd::Tensor t(b, c, h, w);
    for (float& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

// ------------------------------------------------- reference kernels

// Six nested loops, double accumulation, no shared code with conv2d.
inline dd::Tensor reference_conv2d(const dd::Tensor& in, const dd::ConvParams& p)
{
    const int out_h = (in.height() + 2 * p.pad - p.kernel_h) / p.stride + 1;
    const int out_w = (in.width() + 2 * p.pad - p.kernel_w) / p.stride + 1;
    const int in_c = in.channels();
    dd::Tensor out(in.batch(), p.out_channels, out_h, out_w);

    for (int b = 0; b < in.batch(); ++b) {
        for (int oc = 0; oc < p.out_channels; ++oc) {
            for (int oy = 0; oy < out_h; ++oy) {
                for (int ox = 0; ox < out_w; ++ox) {
                    double acc = p.bias[oc];
                    for (int ic = 0; ic < in_c; ++ic) {
                        for (int ky = 0; ky < p.kernel_h; ++ky) {
                            for (int kx = 0; kx < p.kernel_w; ++kx) {
                                const int iy = oy * p.stride + ky - p.pad;
                                const int ix = ox * p.stride + kx - p.pad;
                                if (iy < 0 || iy >= in.height() || ix < 0 ||
                                    ix >= in.width()) {
                                    continue;
                                }
                                const double w =
                                        p.weights[((static_cast<std::size_t>(oc) * in_c +
                                                    ic) *
                                                           p.kernel_h +
                                                   ky) *
                                                          p.kernel_w +
                                                  kx];
                                acc += w * in.at(b, ic, iy, ix);
                            }
                        }
                    }
                    if (p.batch_norm) {
                        const dd::BatchNormParams& bn = *p.batch_norm;
                        acc = bn.gamma[oc] * (acc - bn.mean[oc]) /
                                      std::sqrt(static_cast<double>(bn.variance[oc]) +
                                                dd::kBatchNormEpsilon) +
                              bn.beta[oc];
                    }
                    switch (p.activation) {
                        case dd::Activation::Relu: acc = acc > 0 ? acc : 0; break;
                        case dd::Activation::Leaky:
                            acc = acc > 0 ? acc : dd::kLeakySlope * acc;
                            break;
                        case dd::Activation::Linear: break;
                    }
                    out.at(b, oc, oy, ox) = static_cast<float>(acc);
                }
            }
        }
    }
    return out;
}

inline dd::Tensor reference_maxpool(const dd::Tensor& in, int size, int stride, int pad)
{
    const int out_h = (in.height() + pad - size) / stride + 1;
    const int out_w = (in.width() + pad - size) / stride + 1;
    const int offset = -pad / 2;
    dd::Tensor out(in.batch(), in.channels(), out_h, out_w);
    for (int b = 0; b < in.batch(); ++b) {
        for (int c = 0; c < in.channels(); ++c) {
            for (int oy = 0; oy < out_h; ++oy) {
                for (int ox = 0; ox < out_w; ++ox) {
                    double best = -1e300;
                    for (int ky = 0; ky < size; ++ky) {
                        for (int kx = 0; kx < size; ++kx) {
                            const int iy = oy * stride + offset + ky;
                            const int ix = ox * stride + offset + kx;
                            if (iy < 0 || iy >= in.height() || ix < 0 || ix >= in.width()) {
                                continue;
                            }
                            best = std::max(best, static_cast<double>(in.at(b, c, iy, ix)));
                        }
                    }
                    out.at(b, c, oy, ox) = static_cast<float>(best);
                }
            }
        }
    }
    return out;
}

inline dd::Tensor reference_upsample(const dd::Tensor& in, int factor)
{
    dd::Tensor out(in.batch(), in.channels(), in.height() * factor, in.width() * factor);
    for (int b = 0; b < in.batch(); ++b) {
        for (int c = 0; c < in.channels(); ++c) {
            for (int y = 0; y < out.height(); ++y) {
                for (int x = 0; x < out.width(); ++x) {
                    out.at(b, c, y, x) = in.at(b, c, y / factor, x / factor);
                }
            }
        }
    }
    return out;
}

// Exhaustive NMS reference: repeatedly select the highest-scored remaining
// detection (first index wins ties) and kill overlapping same-class boxes.
// No pre-sorting, no shared code with nms().
inline std::vector<dd::Detection> oracle_nms(const std::vector<dd::Detection>& dets,
                                             float thresh)
{
    std::vector<bool> dead(dets.size(), false);
    std::vector<dd::Detection> out;
    while (true) {
        int best = -1;
        for (std::size_t i = 0; i < dets.size(); ++i) {
            if (!dead[i] && (best < 0 || dets[i].score > dets[best].score)) {
                best = static_cast<int>(i);
            }
        }
        if (best < 0) break;
        dead[best] = true;
        out.push_back(dets[best]);
        for (std::size_t i = 0; i < dets.size(); ++i) {
            if (!dead[i] && dets[i].class_id == dets[best].class_id &&
                dd::iou(dets[i].box, dets[best].box) > thresh) {
                dead[i] = true;
            }
        }
    }
    return out;
}

// A synthetic single-image scene over well-separated ground-truth spots.
// Detections either sit exactly on a spot or in empty space, so their
// TP/FP outcome is forced by construction.
struct DetectionScene {
    std::vector<std::vector<dd::Detection>> dets{1};
    std::vector<std::vector<dd::GroundTruthLabel>> gts{1};

    static dd::Detection det_at(const dd::Box& box, float score, int class_id = 0)
    {
        dd::Detection d;
        d.box = box;
        d.score = score;
        d.objectness = score;
        d.class_id = class_id;
        d.class_scores = {1.0f};
        return d;
    }

    dd::Box spot(int i) const
    {
        return {0.1f + 0.2f * (i % 5), 0.1f + 0.2f * (i / 5), 0.06f, 0.06f};
    }
    void add_gt(int i) { gts[0].push_back({0, spot(i)}); }
    void add_tp(int i, float score) { dets[0].push_back(det_at(spot(i), score)); }
    void add_fp(float score)
    {
        dets[0].push_back(det_at({0.97f, 0.97f, 0.01f, 0.01f}, score));
    }
};

// Rectangle-sum reference for the AP envelope integral: for every unique
// recall value scan ALL ranks with recall >= r for the best precision.
inline double oracle_ap(const std::vector<bool>& outcome_by_rank, long long total_gts)
{
    std::vector<double> precision, recall;
    long long tp = 0, fp = 0;
    for (bool is_tp : outcome_by_rank) {
        (is_tp ? tp : fp) += 1;
        precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
        recall.push_back(static_cast<double>(tp) / static_cast<double>(total_gts));
    }

    std::vector<double> unique;
    for (double r : recall) {
        if (unique.empty() || r > unique.back()) unique.push_back(r);
    }
    double ap = 0.0, prev = 0.0;
    for (double r : unique) {
        double env = 0.0;
        for (std::size_t k = 0; k < recall.size(); ++k) {
            if (recall[k] >= r) env = std::max(env, precision[k]);
        }
        ap += (r - prev) * env;
        prev = r;
    }
    return ap;
}

inline std::vector<dd::Detection> random_detections(Rng& rng, int count)
{
    std::vector<dd::Detection> dets;
    for (int i = 0; i < count; ++i) {
        dets.push_back(DetectionScene::det_at(
                {rng.uniform(0.1f, 0.9f), rng.uniform(0.1f, 0.9f), rng.uniform(0.05f, 0.5f),
                 rng.uniform(0.05f, 0.5f)},
                rng.uniform(0.0f, 1.0f), rng.integer(0, 1)));
    }
    return dets;
}

inline dd::ConvParams random_conv_params(Rng& rng, int in_c, int out_c, int size, int stride,
                                         int pad, bool with_bn, dd::Activation act)
{
    dd::ConvParams p;
    p.out_channels = out_c;
    p.kernel_h = p.kernel_w = size;
    p.stride = stride;
    p.pad = pad;
    p.activation = act;
    p.weights.resize(static_cast<std::size_t>(out_c) * in_c * size * size);
    for (float& w : p.weights) w = rng.uniform(-1.0f, 1.0f);
    p.bias.resize(out_c);
    for (float& b : p.bias) b = rng.uniform(-0.5f, 0.5f);
    if (with_bn) {
        dd::BatchNormParams bn;
        bn.gamma.resize(out_c);
        bn.beta.resize(out_c);
        bn.mean.resize(out_c);
        bn.variance.resize(out_c);
        for (int i = 0; i < out_c; ++i) {
            bn.gamma[i] = rng.uniform(0.5f, 1.5f);
            bn.beta[i] = rng.uniform(-0.5f, 0.5f);
            bn.mean[i] = rng.uniform(-0.5f, 0.5f);
            bn.variance[i] = rng.uniform(0.1f, 2.0f);
        }
        p.batch_norm = std::move(bn);
    }
    return p;
}

inline void randomize_weights(dd::NetworkWeights& w, unsigned seed, float scale = 0.1f)
{
    Rng rng(seed);
    for (dd::ConvLayerWeights& layer : w.conv) {
        for (float& v : layer.biases) v = rng.uniform(-scale, scale);
        for (float& v : layer.weights) v = rng.uniform(-scale, scale);
        for (float& v : layer.scales) v = rng.uniform(0.8f, 1.2f);
        for (float& v : layer.rolling_mean) v = rng.uniform(-scale, scale);
        for (float& v : layer.rolling_variance) v = rng.uniform(0.5f, 1.5f);
    }
}

// ------------------------------------------------------- scratch files

class TempDir {
public:
    TempDir()
    {
        static std::atomic<unsigned> counter{0};
        const auto base = std::filesystem::temp_directory_path();
        path_ = base / ("dronedet_test_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --------------------------------------------------------- CLI runner

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline CliResult run_cli(const std::string& args)
{
    static std::atomic<unsigned> counter{0};
    const unsigned id = counter.fetch_add(1);
    const auto base = std::filesystem::temp_directory_path();
    const std::string out_path =
            (base / ("dronedet_cli_out_" + std::to_string(::getpid()) + "_" +
                     std::to_string(id)))
                    .string();
    const std::string err_path = out_path + ".err";

    const std::string cmd = std::string(DRONEDET_CLI_PATH) + " " + args + " > " + out_path +
                            " 2> " + err_path;
    const int raw = std::system(cmd.c_str());

    CliResult res;
    res.exit_code = raw < 0 ? raw : WEXITSTATUS(raw);
    res.out = read_text(out_path);
    res.err = read_text(err_path);
    std::filesystem::remove(out_path);
    std::filesystem::remove(err_path);
    return res;
}

// ----------------------------------------------- planted-detection kit
//
// Weights crafted so a white top-left pixel on an otherwise black image
// produces exactly one detection: head 0, anchor 0, cell (0,0), with the
// given box logits and a score of ~1. The trunk forwards channel 0
// unchanged (batch-norm statistics are tuned so folding scales by exactly
// 1), branch convolutions are zeroed, and every other objectness channel
// is biased hard negative.

inline float identity_variance()
{
    float v = 1.0f - dd::kBatchNormEpsilon;
    while (std::sqrt(v + dd::kBatchNormEpsilon) > 1.0f) v = std::nextafterf(v, 0.0f);
    while (std::sqrt(v + dd::kBatchNormEpsilon) < 1.0f) v = std::nextafterf(v, 1.0f);
    return v;
}

inline std::vector<dd::Anchor> small_anchors()
{
    return {{6.0f, 8.0f},   {10.0f, 12.0f}, {16.0f, 20.0f},
            {24.0f, 30.0f}, {36.0f, 44.0f}, {48.0f, 60.0f}};
}

inline dd::NetworkWeights craft_plant_weights(const dd::NetworkDef& def,
                                              const dd::BoxLogits& logits)
{
    dd::NetworkWeights weights = dd::zero_weights(def);
    const float var1 = identity_variance();

    bool past_first_yolo = false;
    std::size_t slot = 0;
    for (std::size_t i = 0; i < def.layers.size(); ++i) {
        const dd::LayerDef& layer = def.layers[i];
        if (layer.is<dd::YoloDef>()) {
            past_first_yolo = true;
            continue;
        }
        if (!layer.is<dd::ConvolutionalDef>()) continue;

        const dd::ConvolutionalDef& c = layer.as<dd::ConvolutionalDef>();
        dd::ConvLayerWeights& w = weights.conv[slot++];
        if (c.batch_normalize) {
            std::fill(w.scales.begin(), w.scales.end(), 1.0f);
            std::fill(w.rolling_variance.begin(), w.rolling_variance.end(), var1);
        }

        const bool detection_conv =
                i + 1 < def.layers.size() && def.layers[i + 1].is<dd::YoloDef>();
        if (detection_conv) {
            const dd::YoloDef& y = def.layers[i + 1].as<dd::YoloDef>();
            const int per_anchor = 5 + y.classes;
            for (std::size_t a = 0; a < y.mask.size(); ++a) {
                w.biases[a * per_anchor + 4] = -20.0f;          // objectness
                w.biases[a * per_anchor + 5] = -20.0f;          // class 0
            }
            if (!past_first_yolo) {
                // Plant on anchor 0: weights read trunk channel 0 only.
                const auto at = [&](int filter) {
                    return static_cast<std::size_t>(filter) * layer.in_channels;
                };
                w.weights[at(0)] = logits.t_x;
                w.weights[at(1)] = logits.t_y;
                w.weights[at(2)] = logits.t_w;
                w.weights[at(3)] = logits.t_h;
                w.weights[at(4)] = 40.0f;
                w.weights[at(5)] = 40.0f;
                w.biases[4] = -20.0f;
                w.biases[5] = -20.0f;
            }
        } else if (!past_first_yolo) {
            // Trunk pass-through of channel 0: center tap only.
            const std::size_t center =
                    (static_cast<std::size_t>(c.size / 2)) * c.size + c.size / 2;
            w.weights[center] = 1.0f;
        }
        // Branch convolutions after the first head stay zero.
    }
    return weights;
}

/// Black P6 image with a single white pixel at (0,0).
inline std::string impulse_ppm(int width, int height)
{
    std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    std::string pixels(static_cast<std::size_t>(width) * height * 3, '\0');
    pixels[0] = pixels[1] = pixels[2] = static_cast<char>(255);
    return out + pixels;
}

// Three impulse images against one planted detection per image:
// D = (1/6, 1/6, 0.375, 44/96) on the 3x3 head of a 96-input net.
//   image 1: truth shifted by w/5  -> match with IoU 2/3
//   image 2: disjoint truth        -> one FP and one FN
//   image 3: truth shifted by w/9  -> match with IoU 4/5
// Every metric of the expected report below follows by hand from those
// three outcomes ([TP, FP, TP] ranking over 3 truths, AP = 5/9).
struct EvalFixture {
    std::string cfg;
    std::string weights;
    std::string names;
    std::string list;
};

inline EvalFixture make_eval_fixture(const TempDir& dir)
{
    const dd::BuiltNetwork net = dd::three_scale_tiny(1, small_anchors(), 96);
    const dd::NetworkWeights planted = craft_plant_weights(net.def(), dd::BoxLogits{});

    EvalFixture fx;
    fx.cfg = dir.file("plant.cfg");
    fx.weights = dir.file("plant.weights");
    fx.names = dir.file("plant.names");
    fx.list = dir.file("plant_valid.txt");
    write_text(fx.cfg, dd::render_cfg(net.def()));
    write_text(fx.weights, dd::save_weights(planted, net.def()));
    write_text(fx.names, "Drone\n");

    const float cx = 1.0f / 6.0f;
    const float w = 0.375f;
    const float h = 44.0f / 96.0f;
    const std::vector<dd::GroundTruthLabel> truths = {
            {0, {cx + w / 5.0f, cx, w, h}},
            {0, {0.75f, 0.75f, 0.1f, 0.1f}},
            {0, {cx + w / 9.0f, cx, w, h}},
    };

    std::string list_text;
    for (int i = 0; i < 3; ++i) {
        const std::string img = dir.file("plant_img" + std::to_string(i + 1) + ".ppm");
        write_text(img, impulse_ppm(96, 96));
        write_text(dd::label_path_for_image(img), dd::render_label_file({truths[i]}));
        list_text += img + "\n";
    }
    write_text(fx.list, list_text);
    return fx;
}

inline const char* expected_eval_report()
{
    return "detections_count = 3, unique_truth_count = 3\n"
           "class_id = 0, name = Drone, ap = 55.56% (TP = 2, FP = 1)\n"
           "\n"
           "for conf_thresh = 0.25, precision = 0.67, recall = 0.67, F1-score = 0.67\n"
           "for conf_thresh = 0.25, TP = 2, FP = 1, FN = 1, average IoU = 73.33 %\n"
           "\n"
           "IoU threshold = 50 %, used Area-Under-Curve for each unique Recall\n"
           "mean average precision (mAP@0.50) = 0.555556, or 55.56 %\n"
           "Total Detection Time: 0 Seconds\n";
}

}  // namespace ddtest

#endif  // DRONEDET_TESTS_HELPERS_HPP
