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

// Detection evaluation. Matching is greedy and one-to-one per image:
// detections above the confidence threshold are taken in descending score
// order and each claims the unmatched same-class ground truth with the
// highest IoU, provided that IoU reaches the threshold. Average precision
// integrates the precision envelope over unique recall values of the full
// (unthresholded) global ranking; mAP macro-averages the per-class APs.

#ifndef DRONEDET_EVAL_HPP
#define DRONEDET_EVAL_HPP

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "dronedet/box.hpp"
#include "dronedet/error.hpp"
#include "dronedet/yolo.hpp"

namespace dronedet {

struct PrfMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// precision = tp/(tp+fp), recall = tp/(tp+fn),
/// f1 = 2PR/(P+R); each term is 0 when its denominator is 0.
inline PrfMetrics precision_recall_f1(long long tp, long long fp, long long fn)
{
    if (tp < 0 || fp < 0 || fn < 0) throw ValidationError("negative match counts");
    PrfMetrics m;
    if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (m.precision + m.recall > 0.0) {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    return m;
}

struct MatchStats {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    std::vector<double> tp_ious;
    std::vector<long long> tp_per_class;
    std::vector<long long> fp_per_class;
};

/// Thresholded matching over aligned per-image detection and label lists.
inline MatchStats match_detections(const std::vector<std::vector<Detection>>& dets,
                                   const std::vector<std::vector<GroundTruthLabel>>& gts,
                                   double iou_thresh, double conf_thresh, int classes)
{
    if (dets.size() != gts.size()) {
        throw ValidationError("detection list covers " + std::to_string(dets.size()) +
                              " images, ground truth covers " + std::to_string(gts.size()));
    }
    if (classes < 1) throw ValidationError("need at least one class");

    MatchStats stats;
    stats.tp_per_class.assign(classes, 0);
    stats.fp_per_class.assign(classes, 0);

    for (std::size_t img = 0; img < dets.size(); ++img) {
        std::vector<const Detection*> picked;
        for (const Detection& d : dets[img]) {
            if (d.score >= conf_thresh) picked.push_back(&d);
        }
        std::stable_sort(picked.begin(), picked.end(),
                         [](const Detection* a, const Detection* b) {
                             return a->score > b->score;
                         });

        std::vector<bool> taken(gts[img].size(), false);
        for (const Detection* d : picked) {
            int best = -1;
            float best_iou = 0.0f;
            for (std::size_t g = 0; g < gts[img].size(); ++g) {
                if (taken[g] || gts[img][g].class_id != d->class_id) continue;
                const float v = iou(d->box, gts[img][g].box);
                if (v > best_iou) {
                    best_iou = v;
                    best = static_cast<int>(g);
                }
            }
            if (best >= 0 && best_iou >= static_cast<float>(iou_thresh)) {
                taken[best] = true;
                ++stats.tp;
                ++stats.tp_per_class[d->class_id];
                stats.tp_ious.push_back(best_iou);
            } else {
                ++stats.fp;
                ++stats.fp_per_class[d->class_id];
            }
        }
        for (std::size_t g = 0; g < gts[img].size(); ++g) {
            if (!taken[g]) ++stats.fn;
        }
    }
    return stats;
}

/// Mean IoU over true-positive pairs; 0 when there are none.
inline double average_iou(const MatchStats& stats)
{
    if (stats.tp_ious.empty()) return 0.0;
    return std::accumulate(stats.tp_ious.begin(), stats.tp_ious.end(), 0.0) /
           static_cast<double>(stats.tp_ious.size());
}

/// Average precision for one class over the full unthresholded ranking:
/// sweep detections by descending score, accumulate TP/FP, then integrate
/// precision over recall with the envelope
/// p_env(r) = max{ precision at any rank whose recall >= r }.
inline double compute_ap(const std::vector<std::vector<Detection>>& dets,
                         const std::vector<std::vector<GroundTruthLabel>>& gts,
                         double iou_thresh, int class_id)
{
    if (dets.size() != gts.size()) {
        throw ValidationError("detection list covers " + std::to_string(dets.size()) +
                              " images, ground truth covers " + std::to_string(gts.size()));
    }

    long long total_gts = 0;
    for (const auto& img : gts) {
        for (const GroundTruthLabel& g : img) {
            if (g.class_id == class_id) ++total_gts;
        }
    }
    if (total_gts == 0) {
        std::cerr << "warning: no ground truth for class " << class_id
                  << ", AP defined as 0\n";
        return 0.0;
    }

    struct Ranked {
        float score;
        int image;
        const Detection* det;
    };
    std::vector<Ranked> ranking;
    for (std::size_t img = 0; img < dets.size(); ++img) {
        for (const Detection& d : dets[img]) {
            if (d.class_id == class_id) {
                ranking.push_back({d.score, static_cast<int>(img), &d});
            }
        }
    }
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const Ranked& a, const Ranked& b) { return a.score > b.score; });
    if (ranking.empty()) return 0.0;

    std::vector<std::vector<bool>> taken(gts.size());
    for (std::size_t img = 0; img < gts.size(); ++img) {
        taken[img].assign(gts[img].size(), false);
    }

    std::vector<double> precision(ranking.size());
    std::vector<double> recall(ranking.size());
    long long tp = 0, fp = 0;
    for (std::size_t r = 0; r < ranking.size(); ++r) {
        const Ranked& cand = ranking[r];
        const auto& img_gts = gts[cand.image];
        int best = -1;
        float best_iou = 0.0f;
        for (std::size_t g = 0; g < img_gts.size(); ++g) {
            if (taken[cand.image][g] || img_gts[g].class_id != class_id) continue;
            const float v = iou(cand.det->box, img_gts[g].box);
            if (v > best_iou) {
                best_iou = v;
                best = static_cast<int>(g);
            }
        }
        if (best >= 0 && best_iou >= static_cast<float>(iou_thresh)) {
            taken[cand.image][best] = true;
            ++tp;
        } else {
            ++fp;
        }
        precision[r] = static_cast<double>(tp) / static_cast<double>(tp + fp);
        recall[r] = static_cast<double>(tp) / static_cast<double>(total_gts);
    }

    std::vector<double> envelope(ranking.size());
    double running = 0.0;
    for (std::size_t r = ranking.size(); r-- > 0;) {
        running = std::max(running, precision[r]);
        envelope[r] = running;
    }

    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t r = 0; r < ranking.size(); ++r) {
        if (recall[r] > prev_recall) {
            ap += (recall[r] - prev_recall) * envelope[r];
            prev_recall = recall[r];
        }
    }
    return ap;
}

struct EvalReport {
    struct PerClass {
        std::string name;
        double ap = 0.0;
        long long tp = 0;
        long long fp = 0;
    };

    long long detections_count = 0;
    long long unique_truth_count = 0;
    std::vector<PerClass> classes;
    double conf_thresh = 0.25;
    double iou_thresh = 0.5;
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double average_iou = 0.0;
    double map = 0.0;
    double total_seconds = 0.0;
};

/// Runs the full metric slate over aligned per-image detections and
/// labels. Detections are expected post-NMS; everything passed in counts
/// toward detections_count and the AP ranking, while the TP/FP/FN block is
/// taken at conf_thresh.
inline EvalReport evaluate(const std::vector<std::vector<Detection>>& dets,
                           const std::vector<std::vector<GroundTruthLabel>>& gts,
                           const std::vector<std::string>& class_names, double iou_thresh,
                           double conf_thresh, double total_seconds)
{
    if (class_names.empty()) throw ValidationError("need at least one class name");
    const int classes = static_cast<int>(class_names.size());

    EvalReport report;
    report.conf_thresh = conf_thresh;
    report.iou_thresh = iou_thresh;
    report.total_seconds = total_seconds;

    for (const auto& img : dets) {
        for (const Detection& d : img) {
            if (d.score > 0.0f) ++report.detections_count;
        }
    }
    for (const auto& img : gts) {
        report.unique_truth_count += static_cast<long long>(img.size());
    }

    const MatchStats stats = match_detections(dets, gts, iou_thresh, conf_thresh, classes);
    report.tp = stats.tp;
    report.fp = stats.fp;
    report.fn = stats.fn;
    const PrfMetrics prf = precision_recall_f1(stats.tp, stats.fp, stats.fn);
    report.precision = prf.precision;
    report.recall = prf.recall;
    report.f1 = prf.f1;
    report.average_iou = average_iou(stats);

    double ap_sum = 0.0;
    for (int c = 0; c < classes; ++c) {
        EvalReport::PerClass pc;
        pc.name = class_names[c];
        pc.ap = compute_ap(dets, gts, iou_thresh, c);
        pc.tp = stats.tp_per_class[c];
        pc.fp = stats.fp_per_class[c];
        ap_sum += pc.ap;
        report.classes.push_back(std::move(pc));
    }
    report.map = ap_sum / static_cast<double>(classes);
    return report;
}

/// Human-readable report block in the darknet validator's shape.
inline std::string render_report(const EvalReport& r)
{
    std::string out;
    char buf[256];

    std::snprintf(buf, sizeof buf, "detections_count = %lld, unique_truth_count = %lld\n",
                  r.detections_count, r.unique_truth_count);
    out += buf;
    for (std::size_t c = 0; c < r.classes.size(); ++c) {
        std::snprintf(buf, sizeof buf,
                      "class_id = %zu, name = %s, ap = %.2f%% (TP = %lld, FP = %lld)\n", c,
                      r.classes[c].name.c_str(), r.classes[c].ap * 100.0, r.classes[c].tp,
                      r.classes[c].fp);
        out += buf;
    }
    out += '\n';
    std::snprintf(buf, sizeof buf,
                  "for conf_thresh = %.2f, precision = %.2f, recall = %.2f, "
                  "F1-score = %.2f\n",
                  r.conf_thresh, r.precision, r.recall, r.f1);
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "for conf_thresh = %.2f, TP = %lld, FP = %lld, FN = %lld, "
                  "average IoU = %.2f %%\n",
                  r.conf_thresh, r.tp, r.fp, r.fn, r.average_iou * 100.0);
    out += buf;
    out += '\n';
    std::snprintf(buf, sizeof buf,
                  "IoU threshold = %.0f %%, used Area-Under-Curve for each unique Recall\n",
                  r.iou_thresh * 100.0);
    out += buf;
    std::snprintf(buf, sizeof buf, "mean average precision (mAP@%.2f) = %.6f, or %.2f %%\n",
                  r.iou_thresh, r.map, r.map * 100.0);
    out += buf;
    std::snprintf(buf, sizeof buf, "Total Detection Time: %lld Seconds\n",
                  static_cast<long long>(r.total_seconds));
    out += buf;
    return out;
}

/// Machine-readable flat key=value form, keys matching the report fields.
inline std::string render_report_kv(const EvalReport& r)
{
    std::string out;
    char buf[256];
    const auto add = [&](const char* key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    const auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };

    add("detections_count", std::to_string(r.detections_count));
    add("unique_truth_count", std::to_string(r.unique_truth_count));
    for (std::size_t c = 0; c < r.classes.size(); ++c) {
        const std::string prefix = "class_" + std::to_string(c) + "_";
        add((prefix + "name").c_str(), r.classes[c].name);
        add((prefix + "ap").c_str(), num(r.classes[c].ap));
        add((prefix + "tp").c_str(), std::to_string(r.classes[c].tp));
        add((prefix + "fp").c_str(), std::to_string(r.classes[c].fp));
    }
    add("conf_thresh", num(r.conf_thresh));
    add("iou_thresh", num(r.iou_thresh));
    add("tp", std::to_string(r.tp));
    add("fp", std::to_string(r.fp));
    add("fn", std::to_string(r.fn));
    add("precision", num(r.precision));
    add("recall", num(r.recall));
    add("f1", num(r.f1));
    add("average_iou", num(r.average_iou));
    add("map", num(r.map));
    add("total_detection_time", num(r.total_seconds));
    return out;
}

}  // namespace dronedet

#endif  // DRONEDET_EVAL_HPP
