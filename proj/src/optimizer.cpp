#include "bamc/optimizer.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>

#include "bamc/common.hpp"

namespace bamc {

double fusion_cost(const Eigen::VectorXd& zb, const Eigen::VectorXd& zf,
                   const std::vector<WeightedEdge>& smooth_edges, const Eigen::VectorXd& s) {
    double cost = 0.0;
    for (int i = 0; i < s.size(); ++i) {
        cost += zb[i] * s[i] * s[i];
        cost += zf[i] * (s[i] - 1.0) * (s[i] - 1.0);
    }
    for (const auto& e : smooth_edges) {
        const double d = s[e.i] - s[e.j];
        cost += e.w * d * d;
    }
    return cost;
}

Eigen::VectorXd optimize(const Eigen::VectorXd& zb, const Eigen::VectorXd& zf,
                         const std::vector<WeightedEdge>& smooth_edges) {
    const int n = static_cast<int>(zb.size());
    if (zf.size() != n) throw InvalidInput("optimize: possibility vectors differ in length");
    if (n == 0) throw InvalidInput("optimize: empty input");
    for (const auto& e : smooth_edges)
        if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n || e.i == e.j || e.w < 0.0)
            throw InvalidInput("optimize: bad smoothness edge");
    if (zb.minCoeff() < 0.0 || zf.minCoeff() < 0.0)
        throw InvalidInput("optimize: possibility values must be non-negative");

    if ((zb.array() + zf.array()).maxCoeff() <= 0.0)
        throw OptimizerError("optimize: all unary weights zero, system singular");

    // (diag(zb) + diag(zf) + L) s = zf, symmetric positive definite.
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(4 * smooth_edges.size() + n);
    Eigen::VectorXd diag = zb + zf;
    for (const auto& e : smooth_edges) {
        diag[e.i] += e.w;
        diag[e.j] += e.w;
        triplets.emplace_back(e.i, e.j, -e.w);
        triplets.emplace_back(e.j, e.i, -e.w);
    }
    for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, diag[i]);

    Eigen::SparseMatrix<double> system(n, n);
    system.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(system);
    if (solver.info() != Eigen::Success) throw OptimizerError("optimize: factorization failed");
    Eigen::VectorXd s = solver.solve(zf);
    if (solver.info() != Eigen::Success || !s.allFinite())
        throw OptimizerError("optimize: solve failed");
    if ((system * s - zf).cwiseAbs().maxCoeff() > 1e-8)
        throw OptimizerError("optimize: residual above tolerance");

    for (int i = 0; i < n; ++i) s[i] = std::clamp(s[i], 0.0, 1.0);
    return s;
}

}  // namespace bamc
