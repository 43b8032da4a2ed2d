#include "bamc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>

#include "bamc/common.hpp"

namespace bamc {

double edge_weight(const std::array<double, 3>& xi, const std::array<double, 3>& xj, double sigma_sq) {
    if (!(sigma_sq > 0.0)) throw InvalidInput("edge_weight: sigma_sq must be positive");
    const double d0 = xi[0] - xj[0], d1 = xi[1] - xj[1], d2 = xi[2] - xj[2];
    return std::exp(-std::sqrt(d0 * d0 + d1 * d1 + d2 * d2) / sigma_sq);
}

std::vector<std::pair<int, int>> transient_edges(const SuperpixelSegmentation& seg) {
    const int n = seg.count;
    std::vector<std::vector<char>> connected(n, std::vector<char>(n, 0));

    for (int i = 0; i < n; ++i)
        for (int j : seg.features[i].neighbors)
            connected[i][j] = connected[j][i] = 1;

    // Shared-neighbor pairs: both endpoints of any 2-path.
    for (int k = 0; k < n; ++k) {
        const auto& nbrs = seg.features[k].neighbors;
        for (std::size_t a = 0; a < nbrs.size(); ++a)
            for (std::size_t b = a + 1; b < nbrs.size(); ++b)
                connected[nbrs[a]][nbrs[b]] = connected[nbrs[b]][nbrs[a]] = 1;
    }

    // Boundary superpixels form a clique.
    for (int i = 0; i < n; ++i) {
        if (!seg.features[i].is_boundary) continue;
        for (int j = i + 1; j < n; ++j)
            if (seg.features[j].is_boundary) connected[i][j] = connected[j][i] = 1;
    }

    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (connected[i][j]) edges.emplace_back(i, j);
    return edges;
}

AbsorbingGraph build_graph(const SuperpixelSegmentation& seg, const std::vector<int>& absorb_set,
                           double sigma_sq) {
    const int n = seg.count;
    if (absorb_set.empty()) throw InvalidInput("build_graph: empty absorb set");
    std::vector<int> absorbers = absorb_set;
    std::sort(absorbers.begin(), absorbers.end());
    absorbers.erase(std::unique(absorbers.begin(), absorbers.end()), absorbers.end());
    if (absorbers.front() < 0 || absorbers.back() >= n)
        throw InvalidInput("build_graph: absorb set index out of range");

    const int m = static_cast<int>(absorbers.size());
    const int total = n + m;
    const auto edges = transient_edges(seg);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(2 * edges.size() + static_cast<std::size_t>(total) + 4 * absorbers.size());

    for (int i = 0; i < total; ++i) triplets.emplace_back(i, i, 1.0);

    std::vector<std::vector<int>> transient_adj(n);
    for (const auto& [i, j] : edges) {
        const double w = edge_weight(seg.features[i].mean_lab, seg.features[j].mean_lab, sigma_sq);
        triplets.emplace_back(i, j, w);
        triplets.emplace_back(j, i, w);
        transient_adj[i].push_back(j);
        transient_adj[j].push_back(i);
    }

    // Absorbing duplicates: reachable from their origin and from the origin's
    // transient neighbors, never from each other. Only transient rows carry
    // these entries, so absorbing rows stay identity after normalization.
    for (int a = 0; a < m; ++a) {
        const int origin = absorbers[a];
        const int dup = n + a;
        triplets.emplace_back(origin, dup, 1.0);  // edge_weight(x, x)
        for (int t : transient_adj[origin]) {
            const double w = edge_weight(seg.features[t].mean_lab, seg.features[origin].mean_lab, sigma_sq);
            triplets.emplace_back(t, dup, w);
        }
    }

    AbsorbingGraph g;
    g.n_transient = n;
    g.m_absorbing = m;
    g.absorb_origin = std::move(absorbers);
    g.affinity.resize(total, total);
    g.affinity.setFromTriplets(triplets.begin(), triplets.end());

    g.degree.resize(total);
    g.transition.resize(total, total);
    g.transition = g.affinity;
    for (int i = 0; i < total; ++i) {
        double row_sum = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(g.affinity, i); it; ++it)
            row_sum += it.value();
        g.degree[i] = row_sum;
        const double inv = 1.0 / row_sum;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(g.transition, i); it; ++it)
            it.valueRef() *= inv;
    }

    // Every transient node must reach an absorbing one through the support of
    // P; walk the reversed support from the absorbers.
    std::vector<char> reached(total, 0);
    std::queue<int> frontier;
    for (int a = 0; a < m; ++a) {
        reached[n + a] = 1;
        frontier.push(n + a);
    }
    std::vector<std::vector<int>> rev(total);
    for (int i = 0; i < total; ++i)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(g.transition, i); it; ++it)
            if (it.col() != i) rev[it.col()].push_back(i);
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop();
        for (int u : rev[v]) {
            if (!reached[u]) {
                reached[u] = 1;
                frontier.push(u);
            }
        }
    }
    for (int i = 0; i < n; ++i)
        if (!reached[i])
            throw ChainNotAbsorbing("build_graph: transient node " + std::to_string(i) +
                                    " cannot reach an absorbing node");

    return g;
}

void write_matrix_market(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
    char buf[64];
    for (int i = 0; i < m.outerSize(); ++i) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m, i); it; ++it) {
            std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", static_cast<int>(it.row()) + 1,
                          static_cast<int>(it.col()) + 1, it.value());
            out << buf;
        }
    }
    if (!out) throw Error("write failed: " + path);
}

}  // namespace bamc
