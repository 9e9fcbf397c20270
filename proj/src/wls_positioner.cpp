#include "aoapos/wls_positioner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "aoapos/errors.hpp"

namespace aoapos {

namespace {

bool finite_nonneg(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x) && x >= 0.0; });
}

struct Solve {
    Eigen::Vector3d q;
    double condition;
};

Solve checked_solve(const Eigen::Matrix3d& n, const Eigen::Vector3d& rhs) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(n, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0), lmax = es.eigenvalues()(2);
    const double cond = lmin > 0.0 ? lmax / lmin : INFINITY;
    if (!(cond < kMaxCondition))
        throw RankError("normal matrix is singular or ill-conditioned (cond = " + std::to_string(cond) + ")", cond);
    return {n.ldlt().solve(rhs), cond};
}

Solve solve_normal(const Eigen::MatrixXd& g, const Eigen::VectorXd& h, const Eigen::VectorXd& w) {
    const Eigen::MatrixXd gtw = g.transpose() * w.asDiagonal();
    return checked_solve(gtw * g, gtw * h);
}

}  // namespace

void PositioningProblem::validate() const {
    const std::size_t n = anchors.size();
    if (n < 2) throw std::invalid_argument("positioning needs at least two anchors");
    if (theta_hats.size() != n || phi_hats.size() != n || sigma2_theta.size() != n || sigma2_phi.size() != n)
        throw std::invalid_argument("positioning problem: per-anchor arrays differ in length");
    for (std::size_t i = 0; i < n; ++i)
        if (!anchors[i].allFinite() || !std::isfinite(theta_hats[i]) || !std::isfinite(phi_hats[i]))
            throw std::invalid_argument("positioning problem: non-finite input");
    if (!finite_nonneg(sigma2_theta) || !finite_nonneg(sigma2_phi))
        throw std::invalid_argument("positioning problem: variances must be finite and >= 0");
}

PseudolinearSystem pseudolinear_system(const PositioningProblem& problem, const std::vector<double>& distances) {
    const auto n = static_cast<Eigen::Index>(problem.size());
    if (static_cast<Eigen::Index>(distances.size()) != n)
        throw std::invalid_argument("pseudolinear_system: one distance per anchor required");
    PseudolinearSystem sys{Eigen::MatrixXd(2 * n, 3), Eigen::VectorXd(2 * n), Eigen::VectorXd(2 * n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(distances[i] > 0.0)) throw GeometryError("pseudolinear_system: distances must be positive");
        const double st = std::sin(problem.theta_hats[i]), ct = std::cos(problem.theta_hats[i]);
        const double sp = std::sin(problem.phi_hats[i]), cp = std::cos(problem.phi_hats[i]);
        const Eigen::RowVector3d gt(-ct, st, 0.0);
        const Eigen::RowVector3d gp(sp * st, sp * ct, -cp);
        sys.g.row(i) = gt;
        sys.g.row(n + i) = gp;
        sys.h(i) = gt.dot(problem.anchors[i]);
        sys.h(n + i) = gp.dot(problem.anchors[i]);
        sys.b(i) = -distances[i] * cp;
        sys.b(n + i) = -distances[i];
    }
    return sys;
}

Eigen::Vector3d wls_solve(const Eigen::MatrixXd& g, const Eigen::VectorXd& h, const Eigen::MatrixXd& w) {
    if (g.cols() != 3 || g.rows() != h.size() || w.rows() != g.rows() || w.cols() != g.rows())
        throw std::invalid_argument("wls_solve: dimension mismatch");
    const Eigen::MatrixXd gtw = g.transpose() * w;
    return checked_solve(gtw * g, gtw * h).q;
}

PositionEstimate locate(const PositioningProblem& problem, const LocateOptions& options) {
    problem.validate();
    if (options.passes < 1) throw std::invalid_argument("locate: passes must be >= 1");
    const std::size_t n = problem.size();

    std::vector<double> unit(n, 1.0);
    PseudolinearSystem sys = pseudolinear_system(problem, unit);
    Solve s = solve_normal(sys.g, sys.h, Eigen::VectorXd::Ones(2 * n));
    PositionEstimate out;
    out.passes = 1;

    // Q diagonal; zero entries are floored relative to the largest one so the
    // inverse weight stays finite.
    Eigen::VectorXd q(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        q(i) = problem.sigma2_theta[i];
        q(n + i) = problem.sigma2_phi[i];
    }
    const double qmax = q.maxCoeff();
    if (qmax > 0.0) {
        q = q.cwiseMax(1e-12 * qmax);
        for (int pass = 2; pass <= options.passes; ++pass) {
            std::vector<double> d(n);
            for (std::size_t i = 0; i < n; ++i) {
                d[i] = (s.q - problem.anchors[i]).norm();
                if (!(d[i] > 0.0)) throw GeometryError("locate: estimate coincides with an anchor");
            }
            sys = pseudolinear_system(problem, d);
            // W = (B Q B^T)^-1, diagonal; normalized so its scale does not matter.
            Eigen::VectorXd w = (sys.b.array().square() * q.array()).inverse().matrix();
            w /= w.maxCoeff();
            s = solve_normal(sys.g, sys.h, w);
            out.passes = pass;
        }
    }
    out.q_hat = s.q;
    out.residual_norm = (sys.h - sys.g * s.q).norm();
    out.condition_warning = s.condition > kWarnCondition;
    return out;
}

Eigen::Vector3d geometry_baseline(const PositioningProblem& problem) {
    problem.validate();
    const auto sys = pseudolinear_system(problem, std::vector<double>(problem.size(), 1.0));
    return solve_normal(sys.g, sys.h, Eigen::VectorXd::Ones(sys.g.rows())).q;
}

}  // namespace aoapos
