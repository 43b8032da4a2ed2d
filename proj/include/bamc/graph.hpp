#pragma once

#include <Eigen/Sparse>
#include <array>
#include <string>
#include <utility>
#include <vector>

#include "bamc/superpixel.hpp"

namespace bamc {

// Absorbing-chain graph over one segmentation. Nodes [0, n_transient) are the
// superpixels; nodes [n_transient, n_transient + m_absorbing) are duplicated
// absorbing nodes. The block structure of the transition matrix is positional.
struct AbsorbingGraph {
    int n_transient = 0;
    int m_absorbing = 0;
    Eigen::SparseMatrix<double, Eigen::RowMajor> affinity;    // a_ii = 1, absorbing rows keep only the diagonal
    Eigen::VectorXd degree;                                   // row sums of affinity
    Eigen::SparseMatrix<double, Eigen::RowMajor> transition;  // P = D^-1 A, row-stochastic
    std::vector<int> absorb_origin;                           // absorbing node k duplicates transient absorb_origin[k]
};

// exp(-||xi - xj|| / sigma_sq); the norm is unsquared.
double edge_weight(const std::array<double, 3>& xi, const std::array<double, 3>& xj, double sigma_sq);

// Transient-transient edge set: (i,j) with i < j present iff the superpixels
// are adjacent, share a neighbor, or are both boundary superpixels. No
// self-edges.
std::vector<std::pair<int, int>> transient_edges(const SuperpixelSegmentation& seg);

// Duplicate each member of absorb_set as an absorbing node. The duplicate
// attaches to its origin (weight 1) and to every transient neighbor of the
// origin under transient_edges, weighted by the origin's color features.
// Throws InvalidInput on an empty or out-of-range absorb set, and
// ChainNotAbsorbing when some transient node cannot reach an absorbing node.
AbsorbingGraph build_graph(const SuperpixelSegmentation& seg, const std::vector<int>& absorb_set,
                           double sigma_sq);

// Matrix Market coordinate text dump.
void write_matrix_market(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m, const std::string& path);

}  // namespace bamc
