#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bamc/image.hpp"
#include "bamc/superpixel.hpp"

namespace bamc {

struct PipelineConfig {
    double sigma_sq = 0.1;                    // edge-weight scale
    std::vector<int> scales = {200, 250, 300};  // superpixel counts
    double sigma_b = 1.0;                     // boundary-connectivity falloff in the prior
    double sigma_s = 0.25;                    // spatial falloff in the prior
    double compactness = 20.0;                // SLIC compactness
    int slic_iters = 10;
    double mu = 0.1;                          // smoothness regularizer added to each edge weight
    double sigma_clr = 0.1;                   // geodesic color similarity scale

    void validate() const;  // throws ConfigError
};

// Strict JSON parsers: unknown keys are errors. Missing keys keep defaults.
PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::string& path);

struct SaliencyMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // per pixel, in [0,1]
};

struct ScaleResult {
    Eigen::VectorXd saliency;  // per superpixel, in [0,1]
    SuperpixelSegmentation seg;
    bool prior_fallback = false;  // degenerate prior: saliency is the foreground possibility
};

// One scale of the detector: segmentation, boundary-absorbing chain,
// prior-absorbing chain, quadratic fusion. A degenerate prior falls back to
// the foreground possibility instead of failing.
ScaleResult detect_scale(const LabImage& lab, int target_count, const PipelineConfig& cfg,
                         const std::string& debug_dir = {});

// Paint each scale's superpixel saliency onto pixels, sum, then min-max
// normalize to [0,1] (all 0.5 when the sum is constant).
SaliencyMap fuse_scales(const std::vector<ScaleResult>& per_scale, int width, int height);

// Full detector. Deterministic for fixed config and input. When debug_dir is
// nonempty, per-scale label maps, graph matrices, and prior scores are dumped
// beneath it.
SaliencyMap detect(const Rgb8Image& image, const PipelineConfig& cfg, const std::string& debug_dir = {});

// Quantize to 8 bits (round half away from zero).
GrayImage8 quantize_map(const SaliencyMap& map);

}  // namespace bamc
