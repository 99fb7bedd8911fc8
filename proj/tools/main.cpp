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

// dronedet command-line front end.
//
//   detect   run the detector on one image or an image list
//   eval     score detections against YOLO-format labels
//   bench    measure detector throughput on a synthetic image
//   inspect  print a parsed architecture table and its layer census
//   split    write seeded train/valid list files
//
// Exit codes: 0 success, 1 usage error, 2 input or parse error.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dronedet/dronedet.hpp"

namespace dd = dronedet;

namespace {

struct Thresholds {
    float conf = 0.25f;
    float nms_iou = 0.45f;
    float eval_iou = 0.5f;
};

dd::BuiltNetwork load_network(const std::string& cfg_path, const std::string& weights_path)
{
    dd::NetworkDef def = dd::infer_shapes(dd::parse_cfg(dd::read_file(cfg_path)));
    dd::NetworkWeights weights = dd::load_weights(dd::read_file(weights_path), def);
    return dd::BuiltNetwork(std::move(def), std::move(weights));
}

std::vector<std::string> load_names(const std::string& names_path)
{
    return dd::parse_names_file(dd::read_file(names_path));
}

std::string class_label(const std::vector<std::string>& names, int id)
{
    if (id >= 0 && id < static_cast<int>(names.size())) return names[id];
    return "class_" + std::to_string(id);
}

void write_lines(const std::string& path, const std::vector<std::string>& lines)
{
    std::string text;
    for (const std::string& l : lines) {
        text += l;
        text += '\n';
    }
    dd::write_file(path, text);
}

// ---------------------------------------------------------------- detect

struct DetectArgs {
    std::string cfg, weights, image, list, names, out;
    Thresholds thr;
    int parallel = 1;
};

// Runs `work(i)` for every index in [0, count), in order when threads == 1
// and over a small pool otherwise. Outputs land in index order either way.
void for_each_index(std::size_t count, int threads,
                    const std::function<void(std::size_t)>& work)
{
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int n = std::min<int>(threads, static_cast<int>(count));
    for (int t = 0; t < n; ++t) {
        pool.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                work(i);
            }
        });
    }
    for (std::thread& w : pool) w.join();
}

int run_detect(const DetectArgs& args)
{
    if (args.image.empty() == args.list.empty()) {
        throw dd::ValidationError("detect needs exactly one of --image or --list");
    }
    const dd::BuiltNetwork net = load_network(args.cfg, args.weights);
    std::vector<std::string> names;
    if (!args.names.empty()) names = load_names(args.names);

    std::vector<std::string> paths;
    if (!args.image.empty()) {
        paths.push_back(args.image);
    } else {
        paths = dd::parse_list_file(dd::read_file(args.list));
    }

    std::vector<std::vector<dd::Detection>> results(paths.size());
    std::vector<dd::LoadedImage> images(paths.size());
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for_each_index(paths.size(), args.parallel, [&](std::size_t i) {
        try {
            images[i] = dd::load_image(paths[i]);
            const dd::Tensor input = dd::resize_to_net(
                    images[i], net.input_width(), net.input_height(), net.input_channels());
            results[i] = dd::detect(net, input, args.thr.conf, args.thr.nms_iou);
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);

    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (const dd::Detection& d : results[i]) {
            std::printf("%s: %s %.2f%% (cx=%.4f cy=%.4f w=%.4f h=%.4f)\n", paths[i].c_str(),
                        class_label(names, d.class_id).c_str(),
                        static_cast<double>(d.score) * 100.0,
                        static_cast<double>(d.box.cx), static_cast<double>(d.box.cy),
                        static_cast<double>(d.box.w), static_cast<double>(d.box.h));
        }
    }

    if (!args.out.empty()) {
        if (paths.size() == 1) {
            dd::Tensor annotated = dd::expand_channels(images[0].tensor, 3);
            for (const dd::Detection& d : results[0]) {
                dd::draw_box(annotated, d.box, 1.0f, 0.0f, 0.0f, 2);
            }
            dd::save_image(args.out, annotated);
        } else {
            std::cerr << "warning: --out is only written for single-image runs\n";
        }
    }
    return 0;
}

// ------------------------------------------------------------------ eval

struct EvalArgs {
    std::string cfg, weights, data, names, list, out = "eval_report.txt";
    Thresholds thr;
    int parallel = 1;
};

struct ImageResult {
    std::vector<dd::Detection> dets;
    std::vector<dd::GroundTruthLabel> gts;
    std::string warning;
};

ImageResult eval_one(const dd::BuiltNetwork& net, const std::string& path,
                     const Thresholds& thr)
{
    ImageResult res;
    const dd::LoadedImage img = dd::load_image(path);
    const dd::Tensor input = dd::resize_to_net(img, net.input_width(), net.input_height(),
                                               net.input_channels());
    res.dets = dd::detect(net, input, dd::kEvalScoreFloor, thr.nms_iou);

    const std::string label_path = dd::label_path_for_image(path);
    std::ifstream in(label_path, std::ios::binary);
    if (!in) {
        res.warning = "warning: no label file '" + label_path + "', assuming no objects";
        return res;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    res.gts = dd::parse_label_file(text);
    return res;
}

int run_eval(const EvalArgs& args)
{
    std::string names_path = args.names;
    std::string list_path = args.list;
    if (!args.data.empty()) {
        const dd::DataFileDef data = dd::parse_data_file(dd::read_file(args.data));
        if (names_path.empty()) names_path = data.names_path;
        if (list_path.empty()) list_path = data.valid_list_path;
        if (data.classes > 0 && !names_path.empty()) {
            // Surfaces classes/names disagreements before any compute.
            dd::make_dataset_meta(data, load_names(names_path));
        }
    }
    if (names_path.empty() || list_path.empty()) {
        throw dd::ValidationError("eval needs --data or both --names and --list");
    }

    const std::vector<std::string> names = load_names(names_path);
    const std::vector<std::string> paths = dd::parse_list_file(dd::read_file(list_path));
    if (paths.empty()) throw dd::ValidationError("validation list is empty");

    const dd::BuiltNetwork net = load_network(args.cfg, args.weights);

    std::vector<ImageResult> results(paths.size());
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto start = std::chrono::steady_clock::now();
    for_each_index(paths.size(), args.parallel, [&](std::size_t i) {
        try {
            results[i] = eval_one(net, paths[i], args.thr);
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    std::vector<std::vector<dd::Detection>> dets;
    std::vector<std::vector<dd::GroundTruthLabel>> gts;
    for (ImageResult& r : results) {
        if (!r.warning.empty()) std::cerr << r.warning << '\n';
        dets.push_back(std::move(r.dets));
        gts.push_back(std::move(r.gts));
    }

    const dd::EvalReport report = dd::evaluate(dets, gts, names, args.thr.eval_iou,
                                               args.thr.conf, elapsed.count());
    std::fputs(dd::render_report(report).c_str(), stdout);
    if (!args.out.empty()) dd::write_file(args.out, dd::render_report_kv(report));
    return 0;
}

// ----------------------------------------------------------------- bench

struct BenchArgs {
    std::string cfg, weights;
    int iterations = 5;
    unsigned seed = 0;
    Thresholds thr;
};

int run_bench(const BenchArgs& args)
{
    if (args.iterations < 1) throw dd::ValidationError("need at least one iteration");
    const dd::BuiltNetwork net = load_network(args.cfg, args.weights);

    dd::Tensor input(1, net.input_channels(), net.input_height(), net.input_width());
    std::mt19937 rng(args.seed);
    std::uniform_real_distribution<float> pixel(0.0f, 1.0f);
    for (float& v : input.data()) v = pixel(rng);

    double total = 0.0;
    for (int i = 1; i <= args.iterations; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<dd::Detection> dets =
                dd::detect(net, input, args.thr.conf, args.thr.nms_iou);
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        total += dt.count();
        std::printf("FPS:%.1f      AVG_FPS:%.1f\n", 1.0 / dt.count(),
                    static_cast<double>(i) / total);
        (void)dets;
    }
    std::printf("AVG_FPS:%.1f\n", static_cast<double>(args.iterations) / total);
    return 0;
}

// --------------------------------------------------------------- inspect

std::string layer_summary(const dd::LayerDef& layer)
{
    char buf[128];
    if (layer.is<dd::ConvolutionalDef>()) {
        const auto& c = layer.as<dd::ConvolutionalDef>();
        std::snprintf(buf, sizeof buf, "%d %dx%d/%d pad %d%s %s", c.filters, c.size, c.size,
                      c.stride, c.padding, c.batch_normalize ? " bn" : "",
                      dd::detail::activation_name(c.activation));
    } else if (layer.is<dd::MaxpoolDef>()) {
        const auto& m = layer.as<dd::MaxpoolDef>();
        std::snprintf(buf, sizeof buf, "%dx%d/%d", m.size, m.size, m.stride);
    } else if (layer.is<dd::RouteDef>()) {
        std::string list;
        for (std::size_t i = 0; i < layer.as<dd::RouteDef>().layers.size(); ++i) {
            if (i) list += ",";
            list += std::to_string(layer.as<dd::RouteDef>().layers[i]);
        }
        std::snprintf(buf, sizeof buf, "layers %s", list.c_str());
    } else if (layer.is<dd::UpsampleDef>()) {
        std::snprintf(buf, sizeof buf, "x%d", layer.as<dd::UpsampleDef>().stride);
    } else {
        const auto& y = layer.as<dd::YoloDef>();
        std::string mask;
        for (std::size_t i = 0; i < y.mask.size(); ++i) {
            if (i) mask += ",";
            mask += std::to_string(y.mask[i]);
        }
        std::snprintf(buf, sizeof buf, "mask %s classes %d", mask.c_str(), y.classes);
    }
    return buf;
}

int run_inspect(const std::string& cfg_path)
{
    const dd::NetworkDef def = dd::infer_shapes(dd::parse_cfg(dd::read_file(cfg_path)));

    std::printf("%4s  %-14s %-28s %s\n", "idx", "kind", "params", "output");
    for (std::size_t i = 0; i < def.layers.size(); ++i) {
        const dd::LayerDef& layer = def.layers[i];
        std::printf("%4zu  %-14s %-28s %s\n", i, layer.kind_name(),
                    layer_summary(layer).c_str(), layer.out_shape.to_string().c_str());
    }
    const dd::LayerCensus c = dd::census(def);
    std::printf("conv=%d yolo=%d maxpool=%d route=%d upsample=%d total=%d\n", c.convolutional,
                c.yolo, c.maxpool, c.route, c.upsample, c.total);
    return 0;
}

// ----------------------------------------------------------------- split

struct SplitArgs {
    std::string list, out;
    double fraction = 0.8;
    unsigned seed = 0;
};

int run_split(const SplitArgs& args)
{
    const std::vector<std::string> lines = dd::parse_list_file(dd::read_file(args.list));
    const auto [train, valid] = dd::split_dataset(lines, args.fraction, args.seed);

    std::string prefix = args.out;
    if (prefix.empty()) {
        const std::size_t dot = args.list.find_last_of('.');
        prefix = (dot == std::string::npos ? args.list : args.list.substr(0, dot)) + "_";
    }
    write_lines(prefix + "train.txt", train);
    write_lines(prefix + "valid.txt", valid);
    std::printf("wrote %zu train / %zu valid entries to %strain.txt and %svalid.txt\n",
                train.size(), valid.size(), prefix.c_str(), prefix.c_str());
    return 0;
}

void add_threshold_flags(CLI::App* cmd, Thresholds& thr, bool with_eval_iou)
{
    cmd->add_option("--conf", thr.conf, "Confidence threshold")
            ->envname("DRONEDET_CONF")
            ->check(CLI::Range(0.0f, 1.0f));
    cmd->add_option("--nms-iou", thr.nms_iou, "NMS IoU threshold")
            ->envname("DRONEDET_NMS_IOU")
            ->check(CLI::Range(0.0f, 1.0f));
    if (with_eval_iou) {
        cmd->add_option("--eval-iou", thr.eval_iou, "Matching IoU threshold")
                ->envname("DRONEDET_EVAL_IOU")
                ->check(CLI::Range(0.0f, 1.0f));
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"dronedet: tiny multi-scale drone detector toolkit"};
    app.require_subcommand(1);

    DetectArgs detect_args;
    CLI::App* detect = app.add_subcommand("detect", "Detect objects in images");
    detect->add_option("--cfg", detect_args.cfg, "Network .cfg file")->required();
    detect->add_option("--weights", detect_args.weights, "Network .weights file")->required();
    detect->add_option("--image", detect_args.image, "Input image (netpbm P5/P6)");
    detect->add_option("--list", detect_args.list, "List file of input images");
    detect->add_option("--names", detect_args.names, "Class names file");
    detect->add_option("--out", detect_args.out, "Annotated output image path");
    detect->add_option("--parallel", detect_args.parallel, "Worker thread count")
            ->envname("DRONEDET_PARALLEL")
            ->check(CLI::PositiveNumber);
    add_threshold_flags(detect, detect_args.thr, false);

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "Evaluate against YOLO-format labels");
    eval->add_option("--cfg", eval_args.cfg, "Network .cfg file")->required();
    eval->add_option("--weights", eval_args.weights, "Network .weights file")->required();
    eval->add_option("--data", eval_args.data, "Dataset .data file");
    eval->add_option("--names", eval_args.names, "Class names file (overrides --data)");
    eval->add_option("--list", eval_args.list, "Validation list file (overrides --data)");
    eval->add_option("--out", eval_args.out, "Machine-readable report path");
    eval->add_option("--parallel", eval_args.parallel, "Worker thread count")
            ->envname("DRONEDET_PARALLEL")
            ->check(CLI::PositiveNumber);
    add_threshold_flags(eval, eval_args.thr, true);

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "Measure detector throughput");
    bench->add_option("--cfg", bench_args.cfg, "Network .cfg file")->required();
    bench->add_option("--weights", bench_args.weights, "Network .weights file")->required();
    bench->add_option("--iterations", bench_args.iterations, "Iteration count");
    bench->add_option("--seed", bench_args.seed, "Synthetic image seed")
            ->envname("DRONEDET_SEED");
    add_threshold_flags(bench, bench_args.thr, false);

    std::string inspect_cfg;
    CLI::App* inspect = app.add_subcommand("inspect", "Print the architecture table");
    inspect->add_option("--cfg", inspect_cfg, "Network .cfg file")->required();

    SplitArgs split_args;
    CLI::App* split = app.add_subcommand("split", "Split a list file into train/valid");
    split->add_option("--list", split_args.list, "Input list file")->required();
    split->add_option("--fraction", split_args.fraction, "Train fraction in (0,1)")
            ->required();
    split->add_option("--seed", split_args.seed, "Shuffle seed")->envname("DRONEDET_SEED");
    split->add_option("--out", split_args.out, "Output prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (detect->parsed()) return run_detect(detect_args);
        if (eval->parsed()) return run_eval(eval_args);
        if (bench->parsed()) return run_bench(bench_args);
        if (inspect->parsed()) return run_inspect(inspect_cfg);
        if (split->parsed()) return run_split(split_args);
    } catch (const dronedet::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
