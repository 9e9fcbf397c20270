#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "aoapos/array_model.hpp"
#include "aoapos/errors.hpp"
#include "aoapos/montecarlo.hpp"
#include "aoapos/wls_positioner.hpp"

using namespace aoapos;

namespace {

const std::vector<Eigen::Vector3d> kAnchors = {{2, 20, 3}, {-12, -16, 58}, {-10, -6, -8}, {10, 6, -20}};

PositioningProblem exact_problem(const std::vector<Eigen::Vector3d>& anchors, const Eigen::Vector3d& q,
                                 double var = 0.0) {
    PositioningProblem p;
    p.anchors = anchors;
    for (const auto& s : anchors) {
        const auto a = true_angles(s, q);
        p.theta_hats.push_back(a.theta);
        p.phi_hats.push_back(a.phi);
        p.sigma2_theta.push_back(var);
        p.sigma2_phi.push_back(var);
    }
    return p;
}

std::vector<double> distances(const PositioningProblem& p, const Eigen::Vector3d& q) {
    std::vector<double> d;
    for (const auto& s : p.anchors) d.push_back((q - s).norm());
    return d;
}

}  // namespace

TEST(PseudolinearSystem, ShapesAndZeroResidual) {
    const Eigen::Vector3d q(3, 4, 5);
    const auto p = exact_problem(kAnchors, q);
    const auto sys = pseudolinear_system(p, distances(p, q));
    EXPECT_EQ(sys.g.rows(), 8);
    EXPECT_EQ(sys.g.cols(), 3);
    EXPECT_EQ(sys.h.size(), 8);
    EXPECT_EQ(sys.b_matrix().rows(), 8);
    EXPECT_EQ(sys.b_matrix().cols(), 8);
    EXPECT_LT((sys.g * q - sys.h).cwiseAbs().maxCoeff(), 1e-12);
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(sys.b(i), -(q - kAnchors[i]).norm() * std::cos(p.phi_hats[i]), 1e-12);
        EXPECT_NEAR(sys.b(4 + i), -(q - kAnchors[i]).norm(), 1e-12);
    }
    const Eigen::MatrixXd bm = sys.b_matrix();
    EXPECT_EQ((bm - Eigen::MatrixXd(bm.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.0);
}

TEST(PseudolinearSystem, RowsAsDefined) {
    PositioningProblem p;
    p.anchors = {{1, 2, 3}, {4, 5, 6}};
    p.theta_hats = {0.3, 1.1};
    p.phi_hats = {0.2, -0.4};
    p.sigma2_theta = p.sigma2_phi = {0, 0};
    const auto sys = pseudolinear_system(p, {1, 1});
    const double t = 1.1, f = -0.4;
    EXPECT_DOUBLE_EQ(sys.g(1, 0), -std::cos(t));
    EXPECT_DOUBLE_EQ(sys.g(1, 1), std::sin(t));
    EXPECT_DOUBLE_EQ(sys.g(1, 2), 0.0);
    EXPECT_DOUBLE_EQ(sys.g(3, 0), std::sin(f) * std::sin(t));
    EXPECT_DOUBLE_EQ(sys.g(3, 1), std::sin(f) * std::cos(t));
    EXPECT_DOUBLE_EQ(sys.g(3, 2), -std::cos(f));
    EXPECT_DOUBLE_EQ(sys.h(3), sys.g.row(3).dot(Eigen::Vector3d(4, 5, 6)));
    EXPECT_THROW(pseudolinear_system(p, {1, 0}), GeometryError);
}

TEST(PseudolinearSystem, DistanceScalingLeavesSolutionUnchanged) {
    const Eigen::Vector3d q(3, 4, 5);
    auto p = exact_problem(kAnchors, q);
    p.phi_hats[1] += 0.01;
    p.theta_hats[2] -= 0.02;
    const std::vector<double> v = {1e-6, 4e-6, 2e-6, 3e-6};
    auto d = distances(p, q);
    auto solve_with = [&](double c) {
        std::vector<double> dc = d;
        for (auto& x : dc) x *= c;
        const auto sys = pseudolinear_system(p, dc);
        Eigen::VectorXd qd(8);
        for (int i = 0; i < 4; ++i) qd(i) = qd(4 + i) = v[i];
        const Eigen::VectorXd w = (sys.b.array().square() * qd.array()).inverse();
        EXPECT_LT((sys.b - c * pseudolinear_system(p, d).b).norm(), 1e-12 * c * sys.b.norm());
        return wls_solve(sys.g, sys.h, Eigen::MatrixXd(w.asDiagonal()));
    };
    EXPECT_LT((solve_with(1.0) - solve_with(7.5)).norm(), 1e-10);
}

TEST(WlsSolve, ExactRecoveryAndScalarWeights) {
    const Eigen::Vector3d q(60, 40, 70);
    const auto p = exact_problem(kAnchors, q);
    const auto sys = pseudolinear_system(p, distances(p, q));
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(8, 8);
    const auto q1 = wls_solve(sys.g, sys.h, id);
    EXPECT_LT((q1 - q).norm(), 1e-9);
    EXPECT_LT((wls_solve(sys.g, sys.h, 42.0 * id) - q1).norm(), 1e-12);
    // OLS by an independent route
    const Eigen::Vector3d ols = sys.g.colPivHouseholderQr().solve(sys.h);
    EXPECT_LT((q1 - ols).norm(), 1e-10);
}

TEST(WlsSolve, LowWeightEquationMovesSolutionLess) {
    const Eigen::Vector3d q(60, 40, 70);
    const auto p = exact_problem(kAnchors, q);
    auto sys = pseudolinear_system(p, distances(p, q));
    Eigen::VectorXd w = Eigen::VectorXd::Ones(8);
    w(1) = 1e-3;  // large variance
    w(2) = 1e3;   // small variance
    const Eigen::MatrixXd wm = w.asDiagonal();
    const double delta = 0.5;
    Eigen::VectorXd h1 = sys.h, h2 = sys.h;
    h1(1) += delta;
    h2(2) += delta;
    const Eigen::Vector3d base = wls_solve(sys.g, sys.h, wm);
    const Eigen::Vector3d m1 = wls_solve(sys.g, h1, wm) - base;
    const Eigen::Vector3d m2 = wls_solve(sys.g, h2, wm) - base;
    EXPECT_LT(m1.norm(), m2.norm());
    for (int k = 0; k < 3; ++k) EXPECT_LE(std::abs(m1(k)), std::abs(m2(k)) + 1e-12);
}

TEST(WlsSolve, RankFailure) {
    Eigen::MatrixXd g(4, 3);
    g << 1, 0, 0, 2, 0, 0, 0, 1, 0, 0, 3, 0;
    Eigen::VectorXd h = Eigen::VectorXd::Ones(4);
    try {
        wls_solve(g, h, Eigen::MatrixXd::Identity(4, 4));
        FAIL() << "expected RankError";
    } catch (const RankError& e) {
        EXPECT_GE(e.condition(), 1e12);
    }
    EXPECT_THROW(wls_solve(g, h, Eigen::MatrixXd::Identity(3, 3)), std::invalid_argument);
}

TEST(Locate, NoiselessRecovery) {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(-30, 30);
    for (int k = 0; k < 200; ++k) {
        const Eigen::Vector3d q(15 + std::abs(u(rng)), u(rng), u(rng));
        const auto p = exact_problem(kAnchors, q);
        const auto r = locate(p);
        EXPECT_LT((r.q_hat - q).norm(), 1e-9);
        EXPECT_LT((geometry_baseline(p) - q).norm(), 1e-9);
    }
    const auto r = locate(exact_problem(kAnchors, {60, 40, 70}));
    EXPECT_EQ(r.passes, 1);  // zero variances: weighting skipped
    EXPECT_LT(r.residual_norm, 1e-9);
}

TEST(Locate, ExactAnglesWithVariancesStayExact) {
    const Eigen::Vector3d q(60, 40, 70);
    const auto p = exact_problem(kAnchors, q, 1e-6);
    const auto r = locate(p);
    EXPECT_EQ(r.passes, 2);
    EXPECT_LT((r.q_hat - q).norm(), 1e-9);
    LocateOptions three;
    three.passes = 3;
    EXPECT_EQ(locate(p, three).passes, 3);
}

TEST(Locate, WeightedPassMatchesHandAssembledSolve) {
    // phi_i = 0 and equal variances: every weight is 1 / d_i^2 with d_i taken
    // from the unweighted first pass
    const Eigen::Vector3d q(0, 0, 0);
    std::vector<Eigen::Vector3d> anchors = {{-10, 0, 0}, {0, -10, 0}, {0, 10, 0}, {-7.0710678118654755, 7.0710678118654755, 0}};
    auto p = exact_problem(anchors, q, 2e-6);
    for (auto& t : p.theta_hats) t += 0.01;
    for (auto& f : p.phi_hats) f = 0.0;
    const Eigen::Vector3d first = geometry_baseline(p);
    std::vector<double> d;
    for (const auto& s : anchors) d.push_back((first - s).norm());
    const auto sys = pseudolinear_system(p, d);
    Eigen::VectorXd sw(8);
    for (int i = 0; i < 4; ++i) sw(i) = sw(i + 4) = 1.0 / d[i];
    const Eigen::Vector3d ref = (sw.asDiagonal() * sys.g).colPivHouseholderQr().solve(sw.asDiagonal() * sys.h);
    LocateOptions two;
    two.passes = 2;
    const auto r = locate(p, two);
    EXPECT_LT((r.q_hat - ref).norm(), 1e-10);
    EXPECT_GT((first - ref).norm(), 1e-4);  // the weighting does change the answer here
}

TEST(Locate, InflatedVarianceApproachesLeaveOneOut) {
    const Eigen::Vector3d q(60, 40, 70);
    auto p = exact_problem(kAnchors, q, 1e-6);
    // perturb all measurements so anchor 0 matters
    const double dt[] = {0.004, -0.003, 0.002, -0.001}, dp[] = {-0.002, 0.003, -0.001, 0.002};
    for (int i = 0; i < 4; ++i) {
        p.theta_hats[i] += dt[i];
        p.phi_hats[i] += dp[i];
    }
    PositioningProblem without = p;
    without.anchors.erase(without.anchors.begin());
    for (auto* v : {&without.theta_hats, &without.phi_hats, &without.sigma2_theta, &without.sigma2_phi})
        v->erase(v->begin());
    const Eigen::Vector3d target = locate(without).q_hat;
    double prev = (locate(p).q_hat - target).norm();
    for (double scale : {1e2, 1e4, 1e6}) {
        auto inflated = p;
        inflated.sigma2_theta[0] *= scale;
        inflated.sigma2_phi[0] *= scale;
        const double d = (locate(inflated).q_hat - target).norm();
        EXPECT_LE(d, prev);
        prev = d;
    }
    EXPECT_LT(prev, 1e-3);
}

TEST(Locate, Validation) {
    auto p = exact_problem(kAnchors, {60, 40, 70});
    p.sigma2_phi[2] = -1;
    EXPECT_THROW(locate(p), std::invalid_argument);
    auto one = exact_problem({kAnchors[0]}, {60, 40, 70});
    EXPECT_THROW(locate(one), std::invalid_argument);
    auto bad = exact_problem(kAnchors, {60, 40, 70});
    bad.theta_hats.pop_back();
    EXPECT_THROW(geometry_baseline(bad), std::invalid_argument);
    LocateOptions zero;
    zero.passes = 0;
    EXPECT_THROW(locate(exact_problem(kAnchors, {60, 40, 70}), zero), std::invalid_argument);
}

TEST(Locate, CollinearAnchorsRankFailure) {
    // two anchors on one line through the MU give parallel constraints
    auto p = exact_problem({{0, 0, 0}, {-1, -1, -1}}, {5, 5, 5});
    EXPECT_THROW(locate(p), RankError);
}

TEST(Locate, DefaultScenarioMonteCarlo) {
    Scenario sc = default_scenario();
    sc.trials = 10000;
    const auto r16 = run_positioning_experiment(sc);
    sc.geom.n_y = sc.geom.n_z = 32;
    const auto r32 = run_positioning_experiment(sc);
    EXPECT_TRUE(std::isfinite(r16.mse));
    EXPECT_LT(r32.mse, r16.mse);
    EXPECT_LE(r16.mse, r16.mse_baseline);
    Scenario two = default_scenario(), three = default_scenario();
    two.anchors.resize(2);
    three.anchors.resize(3);
    EXPECT_LT(run_positioning_experiment(three).mse, run_positioning_experiment(two).mse);
}
