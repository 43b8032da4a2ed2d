#pragma once

// Shared test scaffolding: scratch directories and hand-built segmentations.

#include <unistd.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bamc/rng.hpp"
#include "bamc/superpixel.hpp"

namespace testutil {

// Scratch directory that cleans up after itself.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("bamc-test-" + tag + "-" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str(const std::string& rel = {}) const {
        return rel.empty() ? path_.string() : (path_ / rel).string();
    }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Segmentation stub built directly from per-node features; the graph and
// prior modules only consume count + features, so no pixel raster is needed.
struct SegBuilder {
    bamc::SuperpixelSegmentation seg;

    explicit SegBuilder(int count) {
        seg.count = count;
        seg.features.resize(count);
    }

    SegBuilder& color(int i, double l, double a, double b) {
        seg.features[i].mean_lab = {l, a, b};
        return *this;
    }
    SegBuilder& centroid(int i, double row, double col) {
        seg.features[i].centroid_row = row;
        seg.features[i].centroid_col = col;
        return *this;
    }
    SegBuilder& boundary(int i, bool flag = true) {
        seg.features[i].is_boundary = flag;
        return *this;
    }
    SegBuilder& edge(int i, int j) {
        seg.features[i].neighbors.push_back(j);
        seg.features[j].neighbors.push_back(i);
        return *this;
    }
};

// Path graph 0-1-2-...-(n-1) with the given per-node colors.
inline bamc::SuperpixelSegmentation path_seg(const std::vector<std::array<double, 3>>& colors) {
    SegBuilder b(static_cast<int>(colors.size()));
    for (std::size_t i = 0; i < colors.size(); ++i) {
        b.color(static_cast<int>(i), colors[i][0], colors[i][1], colors[i][2]);
        b.centroid(static_cast<int>(i), 0.0, 0.1 * static_cast<double>(i));
        if (i + 1 < colors.size()) b.edge(static_cast<int>(i), static_cast<int>(i + 1));
    }
    return b.seg;
}

// Grid of rows x cols superpixels with rook adjacency; border cells are
// boundary superpixels. Colors default to a constant unless filled in later.
inline bamc::SuperpixelSegmentation grid_seg(int rows, int cols) {
    SegBuilder b(rows * cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int i = r * cols + c;
            b.color(i, 0.5, 0.5, 0.5);
            b.centroid(i, static_cast<double>(r) / rows, static_cast<double>(c) / cols);
            b.boundary(i, r == 0 || c == 0 || r == rows - 1 || c == cols - 1);
            if (c + 1 < cols) b.edge(i, i + 1);
            if (r + 1 < rows) b.edge(i, i + cols);
        }
    }
    return b.seg;
}

// Random connected segmentation stub: spanning-tree edges plus extras.
inline bamc::SuperpixelSegmentation random_seg(bamc::Rng& rng, int count) {
    SegBuilder b(count);
    for (int i = 0; i < count; ++i) {
        b.color(i, rng.uniform(), rng.uniform(), rng.uniform());
        b.centroid(i, rng.uniform(), rng.uniform());
        b.boundary(i, rng.uniform() < 0.3);
        if (i > 0) b.edge(i, rng.uniform_int(0, i - 1));
    }
    for (int extra = 0; extra < count / 2; ++extra) {
        const int i = rng.uniform_int(0, count - 1);
        const int j = rng.uniform_int(0, count - 1);
        if (i != j) b.edge(i, j);
    }
    if (!b.seg.features[0].is_boundary) b.boundary(0);  // prior code needs >= 1
    return b.seg;
}

}  // namespace testutil
