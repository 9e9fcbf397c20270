#pragma once

#include <vector>

#include <Eigen/Core>

namespace aoapos {

struct PositioningProblem {
    std::vector<Eigen::Vector3d> anchors;
    std::vector<double> theta_hats;
    std::vector<double> phi_hats;
    std::vector<double> sigma2_theta;
    std::vector<double> sigma2_phi;

    std::size_t size() const { return anchors.size(); }
    // Throws std::invalid_argument on size mismatch, < 2 anchors, negative or non-finite values.
    void validate() const;
};

// Rows 0..I-1 are the theta equations, I..2I-1 the phi equations.
// b is the diagonal of B: -d_i cos(phi_i) for theta rows, -d_i for phi rows.
struct PseudolinearSystem {
    Eigen::MatrixXd g;
    Eigen::VectorXd h;
    Eigen::VectorXd b;

    Eigen::MatrixXd b_matrix() const { return b.asDiagonal(); }
};

PseudolinearSystem pseudolinear_system(const PositioningProblem& problem,
                                       const std::vector<double>& distances);

inline constexpr double kMaxCondition = 1e12;
inline constexpr double kWarnCondition = 1e8;

// Solves (G^T W G) q = G^T W h. Throws RankError when cond(G^T W G) >= 1e12.
Eigen::Vector3d wls_solve(const Eigen::MatrixXd& g, const Eigen::VectorXd& h,
                          const Eigen::MatrixXd& w);

struct PositionEstimate {
    Eigen::Vector3d q_hat = Eigen::Vector3d::Zero();
    double residual_norm = 0.0;  // ||h - G q_hat|| of the final system
    int passes = 0;
    bool condition_warning = false;  // final normal matrix condition above 1e8
};

struct LocateOptions {
    int passes = 2;  // 1 = identity weights only; each extra pass refreshes d_i
};

// Pass 1 uses W = I; later passes use W = (B Q B^T)^-1 with distances from
// the previous pass. If every variance is zero the weighted pass is skipped.
PositionEstimate locate(const PositioningProblem& problem, const LocateOptions& options = {});

// Unweighted single-pass least squares.
Eigen::Vector3d geometry_baseline(const PositioningProblem& problem);

}  // namespace aoapos
