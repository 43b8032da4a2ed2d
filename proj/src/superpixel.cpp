#include "bamc/superpixel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "bamc/common.hpp"

namespace bamc {

namespace {

struct Cluster {
    double l = 0, a = 0, b = 0;  // normalized Lab
    double row = 0, col = 0;     // pixel coordinates
};

double color_gradient(const LabImage& lab, int row, int col) {
    const double* left = lab.pixel(row, col - 1);
    const double* right = lab.pixel(row, col + 1);
    const double* up = lab.pixel(row - 1, col);
    const double* down = lab.pixel(row + 1, col);
    double g = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double dx = right[c] - left[c];
        const double dy = down[c] - up[c];
        g += dx * dx + dy * dy;
    }
    return g;
}

// Grid dimensions whose product lands closest to the requested count.
std::pair<int, int> seed_grid(int width, int height, int target_count) {
    const double step = std::sqrt(static_cast<double>(width) * height / target_count);
    int best_nx = 1, best_ny = 1;
    long long best_err = std::numeric_limits<long long>::max();
    for (int nx : {static_cast<int>(std::floor(width / step)), static_cast<int>(std::ceil(width / step))}) {
        for (int ny : {static_cast<int>(std::floor(height / step)), static_cast<int>(std::ceil(height / step))}) {
            const int cx = std::max(1, std::min(nx, width));
            const int cy = std::max(1, std::min(ny, height));
            const long long err = std::llabs(static_cast<long long>(cx) * cy - target_count);
            if (err < best_err) {
                best_err = err;
                best_nx = cx;
                best_ny = cy;
            }
        }
    }
    return {best_nx, best_ny};
}

std::vector<Cluster> init_clusters(const LabImage& lab, int target_count) {
    const int w = lab.width, h = lab.height;
    const auto [nx, ny] = seed_grid(w, h, target_count);
    std::vector<Cluster> clusters;
    clusters.reserve(static_cast<std::size_t>(nx) * ny);
    for (int gy = 0; gy < ny; ++gy) {
        for (int gx = 0; gx < nx; ++gx) {
            int row = static_cast<int>((gy + 0.5) * h / ny);
            int col = static_cast<int>((gx + 0.5) * w / nx);
            row = std::clamp(row, 1, std::max(1, h - 2));
            col = std::clamp(col, 1, std::max(1, w - 2));
            // Perturb to the lowest-gradient pixel in a 3x3 window.
            if (w >= 3 && h >= 3) {
                int best_r = row, best_c = col;
                double best_g = std::numeric_limits<double>::infinity();
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int r = std::clamp(row + dr, 1, h - 2);
                        const int c = std::clamp(col + dc, 1, w - 2);
                        const double g = color_gradient(lab, r, c);
                        if (g < best_g) {
                            best_g = g;
                            best_r = r;
                            best_c = c;
                        }
                    }
                }
                row = best_r;
                col = best_c;
            }
            const double* px = lab.pixel(row, col);
            clusters.push_back({px[0], px[1], px[2], static_cast<double>(row), static_cast<double>(col)});
        }
    }
    return clusters;
}

// Relabel into 4-connected components, keep each label's largest component,
// and fold orphan fragments into the largest adjacent surviving superpixel.
std::vector<int> enforce_connectivity(const std::vector<int>& labels, int width, int height, int& count_out) {
    const int n_px = width * height;
    std::vector<int> comp(n_px, -1);
    std::vector<int> comp_label;
    std::vector<int> comp_size;
    std::vector<int> stack;

    for (int p = 0; p < n_px; ++p) {
        if (comp[p] >= 0) continue;
        const int id = static_cast<int>(comp_label.size());
        comp_label.push_back(labels[p]);
        comp_size.push_back(0);
        comp[p] = id;
        stack.assign(1, p);
        while (!stack.empty()) {
            const int q = stack.back();
            stack.pop_back();
            ++comp_size[id];
            const int r = q / width, c = q % width;
            const int nb[4] = {r > 0 ? q - width : -1, r + 1 < height ? q + width : -1,
                               c > 0 ? q - 1 : -1, c + 1 < width ? q + 1 : -1};
            for (int x : nb) {
                if (x >= 0 && comp[x] < 0 && labels[x] == labels[p]) {
                    comp[x] = id;
                    stack.push_back(x);
                }
            }
        }
    }

    const int n_comp = static_cast<int>(comp_label.size());
    const int n_labels = 1 + *std::max_element(labels.begin(), labels.end());

    // Largest component per label survives; scan order breaks ties.
    std::vector<int> best_comp(n_labels, -1);
    for (int id = 0; id < n_comp; ++id) {
        const int lab = comp_label[id];
        if (best_comp[lab] < 0 || comp_size[id] > comp_size[best_comp[lab]]) best_comp[lab] = id;
    }

    std::vector<int> final_id(n_comp, -1);
    std::vector<long long> region_size;
    for (int p = 0; p < n_px; ++p) {  // new ids in scan order of first pixel
        const int id = comp[p];
        if (final_id[id] < 0 && best_comp[comp_label[id]] == id) {
            final_id[id] = static_cast<int>(region_size.size());
            region_size.push_back(comp_size[id]);
        }
    }

    // Orphans merge into the largest adjacent settled region; passes repeat
    // until every fragment found one.
    std::vector<int> orphans;
    for (int id = 0; id < n_comp; ++id)
        if (final_id[id] < 0) orphans.push_back(id);

    std::vector<std::vector<int>> comp_pixels(n_comp);
    if (!orphans.empty()) {
        for (int p = 0; p < n_px; ++p)
            if (final_id[comp[p]] < 0) comp_pixels[comp[p]].push_back(p);
    }

    while (!orphans.empty()) {
        std::vector<int> deferred;
        bool progress = false;
        for (int id : orphans) {
            int target = -1;
            long long target_size = -1;
            for (int p : comp_pixels[id]) {
                const int r = p / width, c = p % width;
                const int nb[4] = {r > 0 ? p - width : -1, r + 1 < height ? p + width : -1,
                                   c > 0 ? p - 1 : -1, c + 1 < width ? p + 1 : -1};
                for (int x : nb) {
                    if (x < 0) continue;
                    const int fid = final_id[comp[x]];
                    if (fid < 0) continue;
                    if (region_size[fid] > target_size || (region_size[fid] == target_size && fid < target)) {
                        target = fid;
                        target_size = region_size[fid];
                    }
                }
            }
            if (target >= 0) {
                final_id[id] = target;
                region_size[target] += comp_size[id];
                progress = true;
            } else {
                deferred.push_back(id);
            }
        }
        if (!progress && !deferred.empty())
            throw InternalError("connectivity enforcement: orphan fragment with no settled neighbor");
        orphans.swap(deferred);
    }

    std::vector<int> out(n_px);
    for (int p = 0; p < n_px; ++p) out[p] = final_id[comp[p]];
    count_out = static_cast<int>(region_size.size());
    return out;
}

}  // namespace

SuperpixelSegmentation slic_segment(const LabImage& lab, int target_count, double compactness,
                                    int iterations) {
    const int w = lab.width, h = lab.height;
    if (w <= 0 || h <= 0) throw InvalidInput("slic_segment: empty image");
    if (target_count < 1) throw InvalidInput("slic_segment: target_count must be positive");
    if (target_count > w * h) throw InvalidInput("slic_segment: target_count exceeds pixel count");
    if (!(compactness > 0.0)) throw InvalidInput("slic_segment: compactness must be positive");
    if (iterations < 1) throw InvalidInput("slic_segment: iterations must be positive");

    std::vector<Cluster> clusters = init_clusters(lab, target_count);
    const int k = static_cast<int>(clusters.size());
    const double step = std::max(1.0, std::sqrt(static_cast<double>(w) * h / k));
    // Compactness is calibrated against the conventional 0..100 L* scale;
    // features here are normalized to [0,1], so it scales down by 100.
    const double spatial_scale = (compactness / 100.0) / step;
    const double spatial_sq = spatial_scale * spatial_scale;
    const int window = static_cast<int>(std::lround(step));

    std::vector<int> labels(static_cast<std::size_t>(w) * h, -1);
    std::vector<double> dists(labels.size());
    std::vector<double> sums(static_cast<std::size_t>(k) * 5);
    std::vector<int> sizes(k);

    for (int iter = 0; iter < iterations; ++iter) {
        std::fill(dists.begin(), dists.end(), std::numeric_limits<double>::infinity());
        for (int ci = 0; ci < k; ++ci) {
            const Cluster& cl = clusters[ci];
            const int r0 = std::max(0, static_cast<int>(cl.row) - window);
            const int r1 = std::min(h - 1, static_cast<int>(cl.row) + window);
            const int c0 = std::max(0, static_cast<int>(cl.col) - window);
            const int c1 = std::min(w - 1, static_cast<int>(cl.col) + window);
            for (int r = r0; r <= r1; ++r) {
                const double dr = r - cl.row;
                const double* px = lab.pixel(r, c0);
                double* dist_row = dists.data() + static_cast<std::size_t>(r) * w;
                int* label_row = labels.data() + static_cast<std::size_t>(r) * w;
                for (int c = c0; c <= c1; ++c, px += 3) {
                    const double dl = px[0] - cl.l;
                    const double da = px[1] - cl.a;
                    const double db = px[2] - cl.b;
                    const double dc = c - cl.col;
                    const double d = dl * dl + da * da + db * db + spatial_sq * (dr * dr + dc * dc);
                    if (d < dist_row[c]) {
                        dist_row[c] = d;
                        label_row[c] = ci;
                    }
                }
            }
        }

        // Pixels outside every search window (possible after centers drift):
        // assign to the spatially nearest center.
        for (int p = 0; p < w * h; ++p) {
            if (labels[p] >= 0) continue;
            const int r = p / w, c = p % w;
            double best = std::numeric_limits<double>::infinity();
            for (int ci = 0; ci < k; ++ci) {
                const double dr = r - clusters[ci].row, dc = c - clusters[ci].col;
                const double d = dr * dr + dc * dc;
                if (d < best) {
                    best = d;
                    labels[p] = ci;
                }
            }
        }

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(sizes.begin(), sizes.end(), 0);
        const double* px = lab.data.data();
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c, px += 3) {
                const int ci = labels[static_cast<std::size_t>(r) * w + c];
                double* s = sums.data() + static_cast<std::size_t>(ci) * 5;
                s[0] += px[0];
                s[1] += px[1];
                s[2] += px[2];
                s[3] += r;
                s[4] += c;
                ++sizes[ci];
            }
        }
        for (int ci = 0; ci < k; ++ci) {
            if (sizes[ci] == 0) continue;  // empty cluster keeps its center
            const double inv = 1.0 / sizes[ci];
            const double* s = sums.data() + static_cast<std::size_t>(ci) * 5;
            clusters[ci] = {s[0] * inv, s[1] * inv, s[2] * inv, s[3] * inv, s[4] * inv};
        }
    }

    SuperpixelSegmentation seg;
    seg.width = w;
    seg.height = h;
    seg.labels = enforce_connectivity(labels, w, h, seg.count);
    seg.features = extract_features(lab, seg.labels, seg.count);
    return seg;
}

std::vector<SuperpixelFeatures> extract_features(const LabImage& lab, const std::vector<int>& labels,
                                                 int count) {
    const int w = lab.width, h = lab.height;
    if (labels.size() != static_cast<std::size_t>(w) * h)
        throw InvalidInput("extract_features: label map size does not match image");
    if (count < 1) throw InvalidInput("extract_features: count must be positive");

    std::vector<SuperpixelFeatures> feats(count);
    std::vector<std::array<double, 5>> acc(count, {0, 0, 0, 0, 0});

    const double* px = lab.data.data();
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c, px += 3) {
            const int id = labels[static_cast<std::size_t>(r) * w + c];
            if (id < 0 || id >= count) throw InvalidInput("extract_features: label out of range");
            auto& a = acc[id];
            a[0] += px[0];
            a[1] += px[1];
            a[2] += px[2];
            a[3] += r;
            a[4] += c;
            ++feats[id].pixel_count;
            if (r == 0 || c == 0 || r == h - 1 || c == w - 1) feats[id].is_boundary = true;
        }
    }

    const double diagonal = std::sqrt(static_cast<double>(w) * w + static_cast<double>(h) * h);
    for (int id = 0; id < count; ++id) {
        if (feats[id].pixel_count == 0)
            throw InternalError("extract_features: empty superpixel " + std::to_string(id));
        const double inv = 1.0 / feats[id].pixel_count;
        feats[id].mean_lab = {acc[id][0] * inv, acc[id][1] * inv, acc[id][2] * inv};
        feats[id].centroid_row = acc[id][3] * inv / diagonal;
        feats[id].centroid_col = acc[id][4] * inv / diagonal;
    }

    // Adjacency from 4-connected pixel borders.
    std::vector<std::vector<char>> adj(count, std::vector<char>(count, 0));
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const int id = labels[static_cast<std::size_t>(r) * w + c];
            if (c + 1 < w) {
                const int right = labels[static_cast<std::size_t>(r) * w + c + 1];
                if (right != id) adj[id][right] = adj[right][id] = 1;
            }
            if (r + 1 < h) {
                const int down = labels[(static_cast<std::size_t>(r) + 1) * w + c];
                if (down != id) adj[id][down] = adj[down][id] = 1;
            }
        }
    }
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < count; ++j)
            if (adj[i][j]) feats[i].neighbors.push_back(j);

    return feats;
}

}  // namespace bamc
