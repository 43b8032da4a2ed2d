#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bamc/image.hpp"

namespace bamc {

struct ConfusionCounts {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
};

struct EvalPoint {
    int threshold = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

struct EvalCurve {
    std::vector<EvalPoint> points;  // 256 entries, thresholds 0..255
    double max_f = 0.0;
    double mean_f = 0.0;
    int threshold_at_max_f = 0;  // smallest threshold attaining max_f
};

// Pixel p is predicted salient iff map(p) >= threshold. The ground truth must
// be strictly binary (0/255) and share the map's dimensions; throws
// InvalidInput otherwise.
ConfusionCounts confusion(const GrayImage8& map, const GrayImage8& gt, int threshold);

// 0/0 conventions: empty prediction is vacuously precise (precision 1),
// empty ground truth gives recall 1.
std::pair<double, double> precision_recall(const ConfusionCounts& c);

// (1 + beta_sq) P R / (beta_sq P + R); 0 when the denominator vanishes.
double f_measure(double precision, double recall, double beta_sq = 0.3);

// Full 256-threshold curve for one map/mask pair. Histogram-based; agrees
// with per-threshold confusion() exactly.
EvalCurve evaluate_image(const GrayImage8& map, const GrayImage8& gt, double beta_sq = 0.3);

struct DatasetEval {
    EvalCurve aggregate;  // macro-averaged precision/recall per threshold, F from the averages
    std::vector<std::pair<std::string, EvalCurve>> per_image;  // sorted by stem
    std::vector<std::string> skipped;  // files without a counterpart
    double mean_best_f = 0.0;          // mean over images of each image's max_f
};

// Matches filename stems between the two directories (.png/.jpg/.jpeg maps,
// .png masks). Missing counterparts are reported, not fatal; throws
// InvalidInput when no pair matches.
DatasetEval evaluate_dataset(const std::string& map_dir, const std::string& gt_dir, double beta_sq = 0.3);

// threshold,precision,recall,f_measure per line, with a header.
void write_curve_csv(const EvalCurve& curve, const std::string& path);
void write_summary_json(const DatasetEval& eval, const std::string& path);

}  // namespace bamc
