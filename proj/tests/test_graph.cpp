#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <sstream>

#include "bamc/common.hpp"
#include "bamc/graph.hpp"
#include "bamc/rng.hpp"
#include "helpers.hpp"

using namespace bamc;

namespace {

std::set<std::pair<int, int>> edge_set(const SuperpixelSegmentation& seg) {
    const auto edges = transient_edges(seg);
    return {edges.begin(), edges.end()};
}

Eigen::MatrixXd dense(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m) {
    return Eigen::MatrixXd(m);
}

}  // namespace

TEST_CASE("edge weight follows the unsquared-norm form") {
    const std::array<double, 3> x = {0.3, 0.4, 0.5};
    CHECK(edge_weight(x, x, 0.1) == 1.0);

    // Distance 0.1 at scale 0.1 lands exactly on 1/e.
    const std::array<double, 3> y = {0.4, 0.4, 0.5};
    CHECK(edge_weight(x, y, 0.1) == doctest::Approx(0.36787944117144233).epsilon(1e-14));

    // Contrast with the squared form, which would give exp(-0.1) here.
    CHECK(edge_weight(x, y, 0.1) != doctest::Approx(std::exp(-0.1)).epsilon(1e-3));

    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const std::array<double, 3> a = {rng.uniform(), rng.uniform(), rng.uniform()};
        const std::array<double, 3> b = {rng.uniform(), rng.uniform(), rng.uniform()};
        const double w = edge_weight(a, b, 0.1);
        CHECK(w == edge_weight(b, a, 0.1));
        CHECK(w > 0.0);
        CHECK(w <= 1.0);
    }
    CHECK_THROWS_AS(edge_weight(x, y, 0.0), InvalidInput);
    CHECK_THROWS_AS(edge_weight(x, y, -1.0), InvalidInput);
}

TEST_CASE("transient edges: adjacency, shared neighbors, boundary ring") {
    const SuperpixelSegmentation seg = testutil::grid_seg(5, 5);
    const auto edges = edge_set(seg);
    const auto has = [&](int i, int j) {
        return edges.count({std::min(i, j), std::max(i, j)}) > 0;
    };
    const auto id = [](int r, int c) { return r * 5 + c; };

    CHECK(has(id(1, 1), id(1, 2)));  // adjacent
    CHECK(has(id(1, 1), id(1, 3)));  // shared neighbor (1,2)
    CHECK(has(id(1, 1), id(3, 1)));  // shared neighbor (2,1)
    CHECK(has(id(1, 1), id(2, 2)));  // diagonal, shares two neighbors

    // Graph distance 3 between interior nodes: neither adjacent nor 2-ring.
    CHECK_FALSE(has(id(1, 1), id(2, 3)));
    CHECK_FALSE(has(id(1, 1), id(3, 3)));

    // Opposite corners are far apart but both on the border.
    CHECK(has(id(0, 0), id(4, 4)));
    CHECK(has(id(0, 4), id(4, 0)));

    for (const auto& [i, j] : edges) {
        CHECK(i < j);  // canonical order, no self edges
    }

    // Independent reconstruction of the rule over all pairs.
    for (int i = 0; i < seg.count; ++i) {
        std::set<int> ni(seg.features[i].neighbors.begin(), seg.features[i].neighbors.end());
        for (int j = i + 1; j < seg.count; ++j) {
            bool expect = ni.count(j) > 0;
            for (int k : seg.features[j].neighbors) expect = expect || ni.count(k) > 0;
            expect = expect || (seg.features[i].is_boundary && seg.features[j].is_boundary);
            CHECK(has(i, j) == expect);
        }
    }
}

TEST_CASE("a three-node path with one absorber matches the hand-built matrices") {
    // Colors chosen so every weight is distinct.
    const SuperpixelSegmentation seg =
        testutil::path_seg({{{0.2, 0.5, 0.5}}, {{0.5, 0.5, 0.5}}, {{0.9, 0.5, 0.5}}});
    const double sigma_sq = 0.1;
    const AbsorbingGraph g = build_graph(seg, {0}, sigma_sq);

    REQUIRE(g.n_transient == 3);
    REQUIRE(g.m_absorbing == 1);
    REQUIRE(g.absorb_origin == std::vector<int>{0});

    // 0-1 and 1-2 are adjacent; 0-2 share neighbor 1. The duplicate of node 0
    // attaches to 0 (weight 1) and to 0's edge neighbors 1 and 2, weighted by
    // node 0's color.
    const auto w = [&](int i, int j) {
        return edge_weight(seg.features[i].mean_lab, seg.features[j].mean_lab, sigma_sq);
    };
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
    A(0, 0) = A(1, 1) = A(2, 2) = A(3, 3) = 1.0;
    A(0, 1) = A(1, 0) = w(0, 1);
    A(1, 2) = A(2, 1) = w(1, 2);
    A(0, 2) = A(2, 0) = w(0, 2);
    A(0, 3) = 1.0;        // origin <- duplicate, weight 1
    A(1, 3) = w(1, 0);    // neighbor of origin
    A(2, 3) = w(2, 0);
    // Absorbing row keeps only its diagonal, so A is not symmetric there.

    const Eigen::MatrixXd got_A = dense(g.affinity);
    REQUIRE(got_A.rows() == 4);
    CHECK((got_A - A).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));

    Eigen::MatrixXd P = A;
    for (int r = 0; r < 4; ++r) P.row(r) /= A.row(r).sum();
    const Eigen::MatrixXd got_P = dense(g.transition);
    CHECK((got_P - P).cwiseAbs().maxCoeff() < 1e-15);

    for (int r = 0; r < 4; ++r) CHECK(g.degree[r] == doctest::Approx(A.row(r).sum()).epsilon(1e-15));

    // The absorbing row is exactly (0,0,0,1).
    CHECK(got_P(3, 0) == 0.0);
    CHECK(got_P(3, 1) == 0.0);
    CHECK(got_P(3, 2) == 0.0);
    CHECK(got_P(3, 3) == 1.0);
}

TEST_CASE("a four-node path keeps the far end away from the absorber") {
    const SuperpixelSegmentation seg = testutil::path_seg(
        {{{0.1, 0.5, 0.5}}, {{0.3, 0.5, 0.5}}, {{0.6, 0.5, 0.5}}, {{0.8, 0.5, 0.5}}});
    const AbsorbingGraph g = build_graph(seg, {0}, 0.1);
    REQUIRE(g.n_transient == 4);
    const Eigen::MatrixXd A = dense(g.affinity);
    // Node 3 is neither adjacent to 0 nor shares a neighbor with it, so its
    // affinity to the duplicate (column 4) is zero while nodes 1 and 2 keep
    // positive entries.
    CHECK(A(0, 4) == 1.0);
    CHECK(A(1, 4) > 0.0);
    CHECK(A(2, 4) > 0.0);
    CHECK(A(3, 4) == 0.0);
}

TEST_CASE("rows of the transition matrix are stochastic on random graphs") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const SuperpixelSegmentation seg = testutil::random_seg(rng, rng.uniform_int(6, 40));
        std::vector<int> absorb;
        for (int i = 0; i < seg.count; ++i)
            if (seg.features[i].is_boundary) absorb.push_back(i);
        const AbsorbingGraph g = build_graph(seg, absorb, 0.1);

        REQUIRE(g.transition.rows() == g.n_transient + g.m_absorbing);
        for (int r = 0; r < g.transition.rows(); ++r) {
            double sum = 0.0;
            int entries = 0;
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(g.transition, r);
                 it; ++it) {
                sum += it.value();
                ++entries;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-9);
            if (r >= g.n_transient) {
                CHECK(entries == 1);
                CHECK(g.transition.coeff(r, r) == 1.0);  // exact identity row
            }
        }

        // Transient-transient block of the affinity is symmetric.
        const Eigen::MatrixXd A = dense(g.affinity);
        const auto tt = A.topLeftCorner(g.n_transient, g.n_transient);
        CHECK((tt - tt.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (int i = 0; i < g.n_transient + g.m_absorbing; ++i) CHECK(A(i, i) == 1.0);
    }
}

TEST_CASE("graph construction rejects bad absorb sets and unreachable nodes") {
    const SuperpixelSegmentation seg = testutil::grid_seg(3, 3);
    CHECK_THROWS_AS(build_graph(seg, {}, 0.1), InvalidInput);
    CHECK_THROWS_AS(build_graph(seg, {9}, 0.1), InvalidInput);
    CHECK_THROWS_AS(build_graph(seg, {-1}, 0.1), InvalidInput);

    // Two isolated nodes, one absorbed: the other has no route to absorption.
    testutil::SegBuilder isolated(2);
    isolated.color(0, 0.2, 0.5, 0.5).color(1, 0.8, 0.5, 0.5);
    CHECK_THROWS_AS(build_graph(isolated.seg, {0}, 0.1), ChainNotAbsorbing);
}

TEST_CASE("matrix market dump round-trips entries") {
    testutil::TempDir tmp("mtx");
    Eigen::SparseMatrix<double, Eigen::RowMajor> m(3, 4);
    m.insert(0, 0) = 1.0;
    m.insert(1, 2) = 0.25;
    m.insert(2, 3) = 1.0 / 3.0;
    m.makeCompressed();
    write_matrix_market(m, tmp.str("m.mtx"));

    std::istringstream in(testutil::read_file(tmp.str("m.mtx")));
    std::string header;
    std::getline(in, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real general");
    int rows = 0, cols = 0, nnz = 0;
    in >> rows >> cols >> nnz;
    CHECK(rows == 3);
    CHECK(cols == 4);
    CHECK(nnz == 3);
    for (int k = 0; k < nnz; ++k) {
        int r = 0, c = 0;
        double v = 0.0;
        in >> r >> c >> v;
        CHECK(m.coeff(r - 1, c - 1) == v);  // %.17g is lossless for doubles
    }
}
