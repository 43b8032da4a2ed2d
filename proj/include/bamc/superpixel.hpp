#pragma once

#include <array>
#include <vector>

#include "bamc/image.hpp"

namespace bamc {

struct SuperpixelFeatures {
    std::array<double, 3> mean_lab{};  // arithmetic mean of member pixels, normalized Lab
    double centroid_row = 0.0;         // mean pixel position / image diagonal
    double centroid_col = 0.0;
    int pixel_count = 0;
    bool is_boundary = false;          // owns at least one pixel on the image border
    std::vector<int> neighbors;        // 4-connected adjacency, sorted
};

struct SuperpixelSegmentation {
    int width = 0;
    int height = 0;
    std::vector<int> labels;  // row-major, one label per pixel, in [0, count)
    int count = 0;
    std::vector<SuperpixelFeatures> features;

    int label(int row, int col) const { return labels[row * width + col]; }
};

// SLIC superpixels on normalized Lab features. Grid-seeded cluster centers
// perturbed to the lowest-gradient pixel in a 3x3 window, fixed iteration
// count, and a connectivity post-pass that merges orphan fragments into the
// largest adjacent superpixel. Compactness is on the conventional CIELAB
// scale (useful range roughly 1..40).
SuperpixelSegmentation slic_segment(const LabImage& lab, int target_count, double compactness,
                                    int iterations = 10);

// Per-superpixel features from an existing label map. `count` is the number
// of labels; every label in [0, count) must own at least one pixel.
std::vector<SuperpixelFeatures> extract_features(const LabImage& lab, const std::vector<int>& labels,
                                                 int count);

}  // namespace bamc
