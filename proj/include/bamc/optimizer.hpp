#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bamc {

struct WeightedEdge {
    int i = 0;
    int j = 0;
    double w = 0.0;
};

// Quadratic fusion cost: sum_i zb_i s_i^2 + sum_i zf_i (s_i - 1)^2
// + sum_{(i,j)} w_ij (s_i - s_j)^2, each undirected edge counted once.
// Written as a direct summation so tests can check the solver against it.
double fusion_cost(const Eigen::VectorXd& zb, const Eigen::VectorXd& zf,
                   const std::vector<WeightedEdge>& smooth_edges, const Eigen::VectorXd& s);

// Closed-form minimizer of fusion_cost: the solution of
// (diag(zb) + diag(zf) + L) s = zf with L the Laplacian of the smoothness
// weights, clamped to [0,1]. Throws OptimizerError when the system is
// singular (all unary weights zero).
Eigen::VectorXd optimize(const Eigen::VectorXd& zb, const Eigen::VectorXd& zf,
                         const std::vector<WeightedEdge>& smooth_edges);

}  // namespace bamc
