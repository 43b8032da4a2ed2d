#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bamc/superpixel.hpp"

namespace bamc {

struct PriorScores {
    Eigen::VectorXd bc;         // boundary connectivity per superpixel
    Eigen::VectorXd f;          // foreground-prior score per superpixel
    std::vector<int> selected;  // indices with f above the mean
};

// BC_i = sum_{j in boundary} w_ij / sqrt(sum_j w_ij), with
// w_ij = exp(-d_geo(i,j)^2 / (2 sigma_clr^2)) and d_geo the shortest-path
// distance over the superpixel adjacency graph under CIELAB edge costs.
// Throws InvalidInput when the segmentation has no boundary superpixel.
Eigen::VectorXd boundary_connectivity(const SuperpixelSegmentation& seg, double sigma_clr = 0.1);

// f_i = sum_j (1 - exp(-BC_j^2 / (2 sigma_b^2))) * d_a(i,j) * exp(-d_s(i,j)^2 / (2 sigma_s^2)),
// with d_a the CIELAB distance and d_s the centroid distance on
// diagonal-normalized coordinates.
Eigen::VectorXd foreground_prior_scores(const SuperpixelSegmentation& seg, const Eigen::VectorXd& bc,
                                        double sigma_b = 1.0, double sigma_s = 0.25);

// { i : f_i > mean(f) }. Throws DegeneratePrior when f is constant.
std::vector<int> select_prior_nodes(const Eigen::VectorXd& f);

PriorScores compute_prior(const SuperpixelSegmentation& seg, double sigma_clr = 0.1, double sigma_b = 1.0,
                          double sigma_s = 0.25);

}  // namespace bamc
