#include "bamc/chain.hpp"

#include <Eigen/SparseLU>

#include "bamc/common.hpp"

namespace bamc {

std::pair<Eigen::SparseMatrix<double>, Eigen::SparseMatrix<double>> partition(const AbsorbingGraph& graph) {
    const int n = graph.n_transient;
    const int m = graph.m_absorbing;
    std::vector<Eigen::Triplet<double>> q_trip, r_trip;
    for (int i = 0; i < n; ++i) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(graph.transition, i); it; ++it) {
            if (it.col() < n)
                q_trip.emplace_back(i, static_cast<int>(it.col()), it.value());
            else
                r_trip.emplace_back(i, static_cast<int>(it.col()) - n, it.value());
        }
    }
    Eigen::SparseMatrix<double> Q(n, n), R(n, m);
    Q.setFromTriplets(q_trip.begin(), q_trip.end());
    R.setFromTriplets(r_trip.begin(), r_trip.end());
    return {std::move(Q), std::move(R)};
}

Eigen::VectorXd absorbed_time(const Eigen::SparseMatrix<double>& Q) {
    const int n = static_cast<int>(Q.rows());
    if (n == 0) throw InvalidInput("absorbed_time: empty transient block");
    if (Q.rows() != Q.cols()) throw InvalidInput("absorbed_time: Q must be square");

    Eigen::SparseMatrix<double> system(n, n);
    system.setIdentity();
    system -= Q;

    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.compute(system);
    if (solver.info() != Eigen::Success)
        throw ChainNotAbsorbing("absorbed_time: I - Q is singular (disconnected transient component?)");

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd z = solver.solve(ones);
    if (solver.info() != Eigen::Success || !z.allFinite())
        throw ChainNotAbsorbing("absorbed_time: solve failed");

    const double residual = (system * z - ones).cwiseAbs().maxCoeff();
    if (residual > 1e-8)
        throw ChainNotAbsorbing("absorbed_time: residual " + std::to_string(residual) +
                                " above tolerance");
    return z;
}

PossibilityVector normalize(const Eigen::VectorXd& z, PossibilityKind kind) {
    if (z.size() == 0) throw InvalidInput("normalize: empty vector");
    if (!z.allFinite()) throw InvalidInput("normalize: non-finite absorbed time");
    PossibilityVector out;
    out.kind = kind;
    const double lo = z.minCoeff();
    const double hi = z.maxCoeff();
    if (hi - lo < 1e-12)
        out.values = Eigen::VectorXd::Constant(z.size(), 0.5);
    else
        out.values = (z.array() - lo) / (hi - lo);
    return out;
}

}  // namespace bamc
