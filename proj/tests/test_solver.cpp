#include <random>

#include <gtest/gtest.h>

#include "cce/solver.hpp"
#include "oracles.hpp"

using namespace cce;

TEST(Collocation, GaussPointsForThreeStages) {
    CollocationScheme cs(3);
    const double r = std::sqrt(15.0) / 10.0;
    EXPECT_NEAR(cs.tau[0], 0.5 - r, 1e-15);
    EXPECT_NEAR(cs.tau[1], 0.5, 1e-15);
    EXPECT_NEAR(cs.tau[2], 0.5 + r, 1e-15);
    for (double t : {0.0, 0.3, 1.0}) {
        double s = 0.0;
        for (int l = 0; l < 3; ++l) s += cs.L(l, t);
        EXPECT_NEAR(s, 1.0, 1e-13);
    }
    EXPECT_THROW(CollocationScheme(0), usage_error);
}

TEST(Collocation, IntegratesQuadraticSecondDerivativesExactly) {
    // y'' = 1 + 2t + 3t^2 is reproduced from its values at the stages
    CollocationScheme cs(3);
    auto g = [](double t) { return 1 + 2 * t + 3 * t * t; };
    for (double t : {0.2, 0.7, 1.0}) {
        double i1 = 0, i2 = 0;
        for (int l = 0; l < 3; ++l) {
            i1 += g(cs.tau[l]) * cs.I1(l, t);
            i2 += g(cs.tau[l]) * cs.I2(l, t);
        }
        EXPECT_NEAR(i1, t + t * t + t * t * t, 1e-13);
        EXPECT_NEAR(i2, t * t / 2 + t * t * t / 3 + t * t * t * t / 4, 1e-13);
    }
}

TEST(Mesh, GradingAndValidation) {
    auto m = make_mesh(65, 0.1, 0.85, 3.0);
    EXPECT_EQ(m.size(), 65);
    EXPECT_DOUBLE_EQ(m.left(), 0.1);
    EXPECT_DOUBLE_EQ(m.right(), 0.85);
    EXPECT_NO_THROW(m.validate());
    const double first = m.nodes[1] - m.nodes[0], mid = m.nodes[33] - m.nodes[32], last = m.nodes[64] - m.nodes[63];
    EXPECT_LT(first, 0.5 * mid);
    EXPECT_LT(last, 0.5 * mid);
    auto u = make_mesh(11, 0.1, 0.85, 1.0);
    EXPECT_EQ(u.grading, Grading::Uniform);
    for (int j = 1; j < 11; ++j) EXPECT_NEAR(u.nodes[j] - u.nodes[j - 1], 0.075, 1e-14);
    EXPECT_THROW(make_mesh(2, 0.1, 0.85), usage_error);
    EXPECT_THROW(make_mesh(10, 0.5, 0.4), usage_error);
    EXPECT_THROW(make_mesh(10, 0.3, 0.85).validate(), usage_error);  // outside the origin trust radius
}

TEST(Solver, SystemIsSquare) {
    for (auto [kind, n] : std::vector<std::pair<SystemKind, int>>{{SystemKind::GeneralizedBerger, 3}, {SystemKind::SUInvariant, 5}, {SystemKind::SpInvariant, 7}}) {
        auto bd = round_data(kind, n);
        CollocationSystem sys(bd, make_mesh(20, 0.1, 0.85), 3, 30, 30);
        EXPECT_EQ(sys.size(), sys.residual_count());
    }
}

TEST(Solver, HyperbolicFixture) {
    for (auto [kind, n] : std::vector<std::pair<SystemKind, int>>{{SystemKind::GeneralizedBerger, 3}, {SystemKind::SUInvariant, 3}, {SystemKind::SUInvariant, 5}, {SystemKind::SpInvariant, 7}}) {
        auto [p, rep] = solve_bvp(round_data(kind, n));
        EXPECT_TRUE(p.converged);
        EXPECT_LE(rep.residual_norm, 1e-12);
        EXPECT_LE(p.y.cwiseAbs().maxCoeff(), 1e-12);
        for (double a : p.free.coeffs) EXPECT_LE(std::abs(a), 1e-10);
        EXPECT_LE(std::abs(p.log_k0), 1e-12);
    }
}

TEST(Solver, JacobianMatchesFiniteDifferences) {
    BoundaryData bd{SystemKind::SUInvariant, 5, {0.8}};
    SolutionProfile g = seed_profile(bd, make_mesh(12, 0.1, 0.85), 3);
    g.log_k0 = -0.01;
    g.free.coeffs = {0.2};
    CollocationSystem sys(bd, g.mesh, 3, 30, 30);
    Eigen::VectorXd u = sys.pack(g), F, Fp, Fm;
    Eigen::SparseMatrix<double> J;
    sys.evaluate(u, F, &J);
    Eigen::MatrixXd Jd(J);
    std::mt19937 rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        const int c = std::uniform_int_distribution<int>(0, sys.size() - 1)(rng);
        const double h = 1e-6;
        Eigen::VectorXd up = u, um = u;
        up(c) += h;
        um(c) -= h;
        sys.evaluate(up, Fp, nullptr);
        sys.evaluate(um, Fm, nullptr);
        Eigen::VectorXd fd = (Fp - Fm) / (2 * h);
        EXPECT_LT((fd - Jd.col(c)).lpNorm<Eigen::Infinity>(), 1e-5 * std::max(1.0, Jd.col(c).lpNorm<Eigen::Infinity>())) << "column " << c;
    }
}

TEST(Solver, ConvergesAndSatisfiesEquationsAtNodes) {
    BoundaryData bd{SystemKind::SUInvariant, 5, {0.8}};
    auto [p, rep] = solve_bvp(bd);
    ASSERT_TRUE(p.converged) << rep.message;
    EXPECT_LE(rep.residual_norm, 1e-10);
    EXPECT_LT(p.K0(), 1.0);
    // the stored second derivatives come from the equations; compare to the collocation polynomial
    double worst = 0.0;
    for (int j = 1; j + 1 < p.nodes(); ++j) {
        auto s = profile_state_at(p, p.mesh.nodes[j]);
        auto o = oracle::su(5, {s.x, s.y, s.yp, s.ypp});
        worst = std::max({worst, std::abs(o[0]), std::abs(o[1])});
    }
    EXPECT_LT(worst, 1e-4);
    // the endpoint series meet the mesh continuously
    auto left = profile_state_at(p, p.mesh.left() - 1e-12);
    auto right = profile_state_at(p, p.mesh.right() + 1e-12);
    for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(left.y[i], p.y(0, i), 1e-9);
        EXPECT_NEAR(right.y[i], p.y(p.nodes() - 1, i), 1e-9);
    }
}

TEST(Solver, SeedIndependence) {
    BoundaryData bd{SystemKind::GeneralizedBerger, 3, {0.95, 1.02}};
    SolveOptions a, b;
    b.seed = SeedMode::Cosine;
    auto [p, r1] = solve_bvp(bd, a);
    auto [q, r2] = solve_bvp(bd, b);
    ASSERT_TRUE(p.converged && q.converged);
    EXPECT_LT((p.y - q.y).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Solver, WarmStartReusesSolution) {
    BoundaryData bd{SystemKind::SUInvariant, 3, {0.7}};
    auto [p, r] = solve_bvp(bd);
    ASSERT_TRUE(p.converged);
    BoundaryData near{SystemKind::SUInvariant, 3, {0.69}};
    auto [q, r2] = solve_bvp(near, {}, &p);
    ASSERT_TRUE(q.converged);
    EXPECT_LE(r2.iterations, r.iterations);
}

TEST(Solver, FailureIsReported) {
    BoundaryData bd{SystemKind::SUInvariant, 5, {1.6}};
    SolveOptions o;
    o.max_iter = 1;
    o.homotopy_retry = false;
    auto [p, rep] = solve_bvp(bd, o);
    EXPECT_FALSE(p.converged);
    EXPECT_FALSE(rep.converged);
    EXPECT_FALSE(rep.message.empty());
    EXPECT_THROW(solve_bvp({SystemKind::SUInvariant, 4, {0.8}}), usage_error);
}

TEST(Solver, NewtonConvergesQuadratically) {
    auto [p, rep] = solve_bvp({SystemKind::SUInvariant, 5, {1.25}});
    ASSERT_TRUE(p.converged);
    const auto& h = rep.residual_history;
    ASSERT_GE(h.size(), 3u);
    // last full step: the residual at least squares (up to a modest constant)
    const std::size_t k = h.size() - 1;
    if (h[k - 1] < 1e-2 && h[k] > 1e-14) EXPECT_LT(h[k], 10 * h[k - 1] * h[k - 1]);
    for (double d : rep.damping_history) EXPECT_GT(d, 0.0);
}

TEST(Solver, InterpolationPreservesNodeValues) {
    auto [p, rep] = solve_bvp({SystemKind::SUInvariant, 5, {0.8}});
    auto q = interpolate_profile(p, p.mesh);
    EXPECT_LT((q.y - p.y).cwiseAbs().maxCoeff(), 1e-14);
    auto refined = refine_mesh(p, 0.0);
    EXPECT_EQ(refined.size(), 2 * p.nodes() - 1);
    EXPECT_NO_THROW(refined.validate());
}

TEST(Solver, GridConvergenceOrder) {
    BoundaryData bd{SystemKind::SUInvariant, 5, {0.8}};
    std::vector<SolutionProfile> ps;
    for (int N : {64, 128, 256}) {
        SolveOptions o;
        o.nodes = N;
        o.refine_target = 0.0;
        auto [p, rep] = solve_bvp(bd, o);
        ASSERT_LE(rep.residual_norm, o.tol);
        ps.push_back(p);
    }
    auto diff = [](const SolutionProfile& a, const SolutionProfile& b) {
        double d = 0.0;
        for (int j = 0; j < a.nodes(); ++j) {
            auto s = profile_state_at(b, a.mesh.nodes[j]);
            for (int i = 0; i < a.unknowns(); ++i) d = std::max(d, std::abs(a.y(j, i) - s.y[i]));
        }
        return d;
    };
    const double d1 = diff(ps[0], ps[1]), d2 = diff(ps[1], ps[2]);
    EXPECT_LT(d2, 1e-7);
    EXPECT_GT(std::log2(d1 / d2), 2.0);
}
