#pragma once

#include <Eigen/Sparse>
#include <utility>

#include "bamc/graph.hpp"

namespace bamc {

enum class PossibilityKind { foreground, background };

// Min-max-normalized absorbed times over the transient nodes.
struct PossibilityVector {
    Eigen::VectorXd values;  // in [0,1]
    PossibilityKind kind = PossibilityKind::foreground;
};

// Positional split of the transition matrix: Q is the n x n transient block,
// R the n x m transient-to-absorbing block.
std::pair<Eigen::SparseMatrix<double>, Eigen::SparseMatrix<double>> partition(const AbsorbingGraph& graph);

// Expected steps to absorption for each transient state: the solution of
// (I - Q) z = 1, solved sparsely without forming the fundamental matrix.
// Throws ChainNotAbsorbing when the system is singular or the residual stays
// above 1e-8.
Eigen::VectorXd absorbed_time(const Eigen::SparseMatrix<double>& Q);

// (z - min) / (max - min); all 0.5 when the spread is below 1e-12.
PossibilityVector normalize(const Eigen::VectorXd& z, PossibilityKind kind);

}  // namespace bamc
