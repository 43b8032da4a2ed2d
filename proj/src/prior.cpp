#include "bamc/prior.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "bamc/common.hpp"

namespace bamc {

namespace {

double color_distance(const SuperpixelFeatures& a, const SuperpixelFeatures& b) {
    const double d0 = a.mean_lab[0] - b.mean_lab[0];
    const double d1 = a.mean_lab[1] - b.mean_lab[1];
    const double d2 = a.mean_lab[2] - b.mean_lab[2];
    return std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
}

// All-pairs shortest paths over the adjacency graph with CIELAB edge costs.
// Dijkstra per source; N stays in the hundreds.
std::vector<double> geodesic_distances(const SuperpixelSegmentation& seg) {
    const int n = seg.count;
    std::vector<double> dist(static_cast<std::size_t>(n) * n,
                             std::numeric_limits<double>::infinity());

    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j : seg.features[i].neighbors)
            adj[i].emplace_back(j, color_distance(seg.features[i], seg.features[j]));

    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (int src = 0; src < n; ++src) {
        double* d = dist.data() + static_cast<std::size_t>(src) * n;
        d[src] = 0.0;
        heap.emplace(0.0, src);
        while (!heap.empty()) {
            const auto [cur, v] = heap.top();
            heap.pop();
            if (cur > d[v]) continue;
            for (const auto& [u, cost] : adj[v]) {
                const double cand = cur + cost;
                if (cand < d[u]) {
                    d[u] = cand;
                    heap.emplace(cand, u);
                }
            }
        }
    }
    return dist;
}

}  // namespace

Eigen::VectorXd boundary_connectivity(const SuperpixelSegmentation& seg, double sigma_clr) {
    const int n = seg.count;
    if (n < 1) throw InvalidInput("boundary_connectivity: empty segmentation");
    if (!(sigma_clr > 0.0)) throw InvalidInput("boundary_connectivity: sigma_clr must be positive");

    std::vector<int> boundary;
    for (int i = 0; i < n; ++i)
        if (seg.features[i].is_boundary) boundary.push_back(i);
    if (boundary.empty()) throw InvalidInput("boundary_connectivity: no boundary superpixels");

    const std::vector<double> geo = geodesic_distances(seg);
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma_clr * sigma_clr);

    Eigen::VectorXd bc(n);
    for (int i = 0; i < n; ++i) {
        const double* d = geo.data() + static_cast<std::size_t>(i) * n;
        double boundary_sum = 0.0;
        double total_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            const double w = std::isfinite(d[j]) ? std::exp(-d[j] * d[j] * inv_two_sigma_sq) : 0.0;
            total_sum += w;
            if (seg.features[j].is_boundary) boundary_sum += w;
        }
        bc[i] = boundary_sum / std::sqrt(total_sum);
    }
    return bc;
}

Eigen::VectorXd foreground_prior_scores(const SuperpixelSegmentation& seg, const Eigen::VectorXd& bc,
                                        double sigma_b, double sigma_s) {
    const int n = seg.count;
    if (bc.size() != n) throw InvalidInput("foreground_prior_scores: bc length mismatch");
    if (!(sigma_b > 0.0) || !(sigma_s > 0.0))
        throw InvalidInput("foreground_prior_scores: sigma parameters must be positive");

    Eigen::VectorXd bc_term(n);
    for (int j = 0; j < n; ++j)
        bc_term[j] = 1.0 - std::exp(-bc[j] * bc[j] / (2.0 * sigma_b * sigma_b));

    const double inv_two_sigma_s_sq = 1.0 / (2.0 * sigma_s * sigma_s);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        const auto& fi = seg.features[i];
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const auto& fj = seg.features[j];
            const double da = color_distance(fi, fj);
            const double drow = fi.centroid_row - fj.centroid_row;
            const double dcol = fi.centroid_col - fj.centroid_col;
            const double ds_sq = drow * drow + dcol * dcol;
            acc += bc_term[j] * da * std::exp(-ds_sq * inv_two_sigma_s_sq);
        }
        f[i] = acc;
    }
    return f;
}

std::vector<int> select_prior_nodes(const Eigen::VectorXd& f) {
    if (f.size() == 0) throw InvalidInput("select_prior_nodes: empty score vector");
    const double mean = f.mean();
    std::vector<int> selected;
    for (int i = 0; i < f.size(); ++i)
        if (f[i] > mean) selected.push_back(i);
    if (selected.empty())
        throw DegeneratePrior("select_prior_nodes: constant foreground prior, no node above the mean");
    return selected;
}

PriorScores compute_prior(const SuperpixelSegmentation& seg, double sigma_clr, double sigma_b,
                          double sigma_s) {
    PriorScores scores;
    scores.bc = boundary_connectivity(seg, sigma_clr);
    scores.f = foreground_prior_scores(seg, scores.bc, sigma_b, sigma_s);
    scores.selected = select_prior_nodes(scores.f);
    return scores;
}

}  // namespace bamc
