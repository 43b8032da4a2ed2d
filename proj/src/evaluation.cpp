#include "bamc/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "bamc/common.hpp"

namespace bamc {

namespace fs = std::filesystem;

namespace {

void check_pair(const GrayImage8& map, const GrayImage8& gt) {
    if (map.width != gt.width || map.height != gt.height || map.data.size() != gt.data.size())
        throw InvalidInput("evaluate: map and ground truth dimensions differ");
    for (std::uint8_t v : gt.data)
        if (v != 0 && v != 255)
            throw InvalidInput("evaluate: ground truth is not strictly binary (0/255)");
}

void finalize_summary(EvalCurve& curve) {
    double best = -1.0;
    double sum = 0.0;
    for (const EvalPoint& pt : curve.points) {
        sum += pt.f_measure;
        if (pt.f_measure > best) {
            best = pt.f_measure;
            curve.threshold_at_max_f = pt.threshold;
        }
    }
    curve.max_f = best;
    curve.mean_f = sum / static_cast<double>(curve.points.size());
}

}  // namespace

ConfusionCounts confusion(const GrayImage8& map, const GrayImage8& gt, int threshold) {
    if (threshold < 0 || threshold > 255)
        throw InvalidInput("evaluate: threshold out of range [0,255]");
    check_pair(map, gt);
    ConfusionCounts c;
    for (std::size_t p = 0; p < map.data.size(); ++p) {
        const bool predicted = map.data[p] >= threshold;
        const bool actual = gt.data[p] == 255;
        if (predicted && actual)
            ++c.tp;
        else if (predicted)
            ++c.fp;
        else if (actual)
            ++c.fn;
    }
    return c;
}

std::pair<double, double> precision_recall(const ConfusionCounts& c) {
    if (c.tp < 0 || c.fp < 0 || c.fn < 0) throw InvalidInput("evaluate: negative counts");
    const double precision =
        (c.tp + c.fp == 0) ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    const double recall =
        (c.tp + c.fn == 0) ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    return {precision, recall};
}

double f_measure(double precision, double recall, double beta_sq) {
    const double denom = beta_sq * precision + recall;
    if (denom == 0.0) return 0.0;
    return (1.0 + beta_sq) * precision * recall / denom;
}

EvalCurve evaluate_image(const GrayImage8& map, const GrayImage8& gt, double beta_sq) {
    check_pair(map, gt);

    // One pass over the pixels, then suffix sums give every threshold's counts.
    std::array<long long, 256> pos{}, neg{};
    long long total_pos = 0;
    for (std::size_t p = 0; p < map.data.size(); ++p) {
        if (gt.data[p] == 255) {
            ++pos[map.data[p]];
            ++total_pos;
        } else {
            ++neg[map.data[p]];
        }
    }

    EvalCurve curve;
    curve.points.resize(256);
    long long tp = 0, fp = 0;
    for (int t = 255; t >= 0; --t) {
        tp += pos[t];
        fp += neg[t];
        ConfusionCounts c;
        c.tp = tp;
        c.fp = fp;
        c.fn = total_pos - tp;
        EvalPoint& pt = curve.points[t];
        pt.threshold = t;
        std::tie(pt.precision, pt.recall) = precision_recall(c);
        pt.f_measure = f_measure(pt.precision, pt.recall, beta_sq);
    }
    finalize_summary(curve);
    return curve;
}

DatasetEval evaluate_dataset(const std::string& map_dir, const std::string& gt_dir, double beta_sq) {
    if (!fs::is_directory(map_dir)) throw InvalidInput("evaluate: not a directory: " + map_dir);
    if (!fs::is_directory(gt_dir)) throw InvalidInput("evaluate: not a directory: " + gt_dir);

    const auto lower_ext = [](const fs::path& p) {
        std::string e = p.extension().string();
        std::transform(e.begin(), e.end(), e.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return e;
    };

    // std::map keys keep everything in stem order, which fixes the reduction
    // order and therefore the output bytes.
    std::map<std::string, fs::path> maps, masks;
    for (const auto& entry : fs::directory_iterator(map_dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = lower_ext(entry.path());
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg")
            maps[entry.path().stem().string()] = entry.path();
    }
    for (const auto& entry : fs::directory_iterator(gt_dir)) {
        if (!entry.is_regular_file()) continue;
        if (lower_ext(entry.path()) == ".png") masks[entry.path().stem().string()] = entry.path();
    }

    DatasetEval eval;
    std::array<double, 256> sum_p{}, sum_r{};
    for (const auto& [stem, map_path] : maps) {
        const auto it = masks.find(stem);
        if (it == masks.end()) {
            eval.skipped.push_back(map_path.filename().string() + " (no mask)");
            continue;
        }
        const GrayImage8 map = load_gray8(map_path.string());
        const GrayImage8 gt = load_gray8(it->second.string());
        EvalCurve curve = evaluate_image(map, gt, beta_sq);
        for (int t = 0; t < 256; ++t) {
            sum_p[t] += curve.points[t].precision;
            sum_r[t] += curve.points[t].recall;
        }
        eval.mean_best_f += curve.max_f;
        eval.per_image.emplace_back(stem, std::move(curve));
    }
    for (const auto& [stem, mask_path] : masks)
        if (!maps.count(stem)) eval.skipped.push_back(mask_path.filename().string() + " (no map)");

    if (eval.per_image.empty()) throw InvalidInput("evaluate: no matching map/mask pairs");

    const double n = static_cast<double>(eval.per_image.size());
    eval.aggregate.points.resize(256);
    for (int t = 0; t < 256; ++t) {
        EvalPoint& pt = eval.aggregate.points[t];
        pt.threshold = t;
        pt.precision = sum_p[t] / n;
        pt.recall = sum_r[t] / n;
        pt.f_measure = f_measure(pt.precision, pt.recall, beta_sq);
    }
    finalize_summary(eval.aggregate);
    eval.mean_best_f /= n;
    return eval;
}

void write_curve_csv(const EvalCurve& curve, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "threshold,precision,recall,f_measure\n";
    char buf[128];
    for (const EvalPoint& pt : curve.points) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f\n", pt.threshold, pt.precision,
                      pt.recall, pt.f_measure);
        out << buf;
    }
    if (!out) throw Error("write failed: " + path);
}

void write_summary_json(const DatasetEval& eval, const std::string& path) {
    nlohmann::json j;
    j["images"] = eval.per_image.size();
    j["max_f"] = eval.aggregate.max_f;
    j["mean_f"] = eval.aggregate.mean_f;
    j["threshold_at_max_f"] = eval.aggregate.threshold_at_max_f;
    j["mean_best_f"] = eval.mean_best_f;
    j["skipped"] = eval.skipped;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw Error("write failed: " + path);
}

}  // namespace bamc
