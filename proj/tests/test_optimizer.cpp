#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "bamc/common.hpp"
#include "bamc/optimizer.hpp"
#include "bamc/rng.hpp"

using namespace bamc;

namespace {

struct Instance {
    Eigen::VectorXd zb, zf;
    std::vector<WeightedEdge> edges;
};

Instance random_instance(Rng& rng, int n) {
    Instance inst;
    inst.zb.resize(n);
    inst.zf.resize(n);
    for (int i = 0; i < n; ++i) {
        inst.zb[i] = rng.uniform();
        inst.zf[i] = rng.uniform();
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < 0.4) inst.edges.push_back({i, j, rng.uniform(0.05, 1.0)});
    return inst;
}

// Analytic gradient of the fusion cost, derived independently:
// dC/ds_i = 2 zb_i s_i + 2 zf_i (s_i - 1) + 2 sum_j w_ij (s_i - s_j).
Eigen::VectorXd analytic_gradient(const Instance& inst, const Eigen::VectorXd& s) {
    Eigen::VectorXd g = 2.0 * (inst.zb.cwiseProduct(s) + inst.zf.cwiseProduct(s) - inst.zf);
    for (const auto& e : inst.edges) {
        g[e.i] += 2.0 * e.w * (s[e.i] - s[e.j]);
        g[e.j] += 2.0 * e.w * (s[e.j] - s[e.i]);
    }
    return g;
}

}  // namespace

TEST_CASE("single-node problems solve by inspection") {
    Eigen::VectorXd zb(1), zf(1);

    zb << 0.0;
    zf << 1.0;
    CHECK(optimize(zb, zf, {})[0] == doctest::Approx(1.0).epsilon(1e-12));

    zb << 1.0;
    zf << 1.0;
    CHECK(optimize(zb, zf, {})[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fusion cost is the literal three-term sum") {
    Eigen::VectorXd zb(2), zf(2), s(2);
    zb << 0.5, 0.25;
    zf << 1.0, 0.0;
    s << 0.4, 0.8;
    const std::vector<WeightedEdge> edges = {{0, 1, 2.0}};
    // 0.5*0.16 + 0.25*0.64 + [1*(0.36) + 0*...] + 2*(0.4-0.8)^2
    const double expected = 0.08 + 0.16 + 0.36 + 0.32;
    CHECK(fusion_cost(zb, zf, edges, s) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("the closed-form solution beats random search and has zero gradient") {
    Rng rng(71);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 10;
        const Instance inst = random_instance(rng, n);
        const Eigen::VectorXd s = optimize(inst.zb, inst.zf, inst.edges);
        const double cost = fusion_cost(inst.zb, inst.zf, inst.edges, s);

        Eigen::VectorXd candidate(n);
        for (int k = 0; k < 1000; ++k) {
            for (int i = 0; i < n; ++i) candidate[i] = rng.uniform();
            CHECK(cost <= fusion_cost(inst.zb, inst.zf, inst.edges, candidate) + 1e-12);
        }

        const Eigen::VectorXd g = analytic_gradient(inst, s);
        CHECK(g.cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("analytic gradient agrees with central finite differences") {
    Rng rng(73);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = random_instance(rng, 10);
        Eigen::VectorXd s(10);
        for (int i = 0; i < 10; ++i) s[i] = rng.uniform();  // generic point, not the minimum

        const Eigen::VectorXd g = analytic_gradient(inst, s);
        const double h = 1e-6;
        for (int i = 0; i < 10; ++i) {
            Eigen::VectorXd up = s, dn = s;
            up[i] += h;
            dn[i] -= h;
            const double fd = (fusion_cost(inst.zb, inst.zf, inst.edges, up) -
                               fusion_cost(inst.zb, inst.zf, inst.edges, dn)) /
                              (2.0 * h);
            CHECK(std::abs(g[i] - fd) <= 1e-5 * std::max(1.0, std::abs(g[i])));
        }
    }
}

TEST_CASE("solutions respect the maximum principle without needing the clamp") {
    Rng rng(79);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 12;
        const Instance inst = random_instance(rng, n);
        const Eigen::VectorXd s = optimize(inst.zb, inst.zf, inst.edges);

        // Solve the same system densely; the raw solution must already lie in
        // [0,1], so clamping is a no-op and both solutions coincide.
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) M(i, i) = inst.zb[i] + inst.zf[i];
        for (const auto& e : inst.edges) {
            M(e.i, e.i) += e.w;
            M(e.j, e.j) += e.w;
            M(e.i, e.j) -= e.w;
            M(e.j, e.i) -= e.w;
        }
        const Eigen::VectorXd raw = M.ldlt().solve(inst.zf);
        for (int i = 0; i < n; ++i) {
            CHECK(raw[i] >= -1e-12);
            CHECK(raw[i] <= 1.0 + 1e-12);
        }
        CHECK((s - raw).cwiseAbs().maxCoeff() <= 1e-9);
        for (int i = 0; i < n; ++i) {
            CHECK(s[i] >= 0.0);
            CHECK(s[i] <= 1.0);
        }
    }
}

TEST_CASE("raising the background possibility of a node can only lower it") {
    Rng rng(83);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance inst = random_instance(rng, 10);
        const Eigen::VectorXd s = optimize(inst.zb, inst.zf, inst.edges);

        Instance bumped = inst;
        const int k = rng.uniform_int(0, 9);
        bumped.zb[k] += rng.uniform(0.1, 1.0);
        const Eigen::VectorXd s2 = optimize(bumped.zb, bumped.zf, bumped.edges);
        CHECK(s2[k] <= s[k] + 1e-12);
    }
}

TEST_CASE("degenerate and malformed systems are rejected") {
    Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(optimize(zero2, zero2, {{0, 1, 0.5}}), OptimizerError);
    CHECK_THROWS_AS(optimize(zero2, zero2, {}), OptimizerError);

    Eigen::VectorXd one1 = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd one2 = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(optimize(one1, one2, {}), InvalidInput);
    CHECK_THROWS_AS(optimize(one2, one2, {{0, 5, 0.5}}), InvalidInput);
    CHECK_THROWS_AS(optimize(one2, one2, {{0, 0, 0.5}}), InvalidInput);
    CHECK_THROWS_AS(optimize(one2, one2, {{0, 1, -0.5}}), InvalidInput);
    CHECK_THROWS_AS(optimize(Eigen::VectorXd(), Eigen::VectorXd(), {}), InvalidInput);
}
