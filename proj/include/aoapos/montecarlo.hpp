#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "aoapos/array_model.hpp"
#include "aoapos/dft_estimator.hpp"
#include "aoapos/error_pdf.hpp"

namespace aoapos {

// Stateless generator: the same (seed, index, stream) always gives the same
// double in [0, 1), so work can be split across threads in any way.
double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t stream);

// Seed for the k-th value of a sweep; k = 0 returns the base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k);

struct ConditionalSamples {
    std::vector<double> phi_err;
    std::vector<double> theta_err;
    std::size_t attempts = 0;
    std::size_t rejected = 0;
    double rejection_rate = 0.0;
    bool domain_warning = false;  // rejection rate above 1%
};

// Y ~ U[Y-a, Y+a], Z ~ U[Z-b, Z+b], rejecting |Z / sqrt(1 - Y^2)| > 1.
ConditionalSamples sample_conditional_errors(const EstimateState& st, std::size_t n, std::uint64_t seed);

// Sum over bins of |empirical mass - analytic mass| on [pdf support].
double histogram_l1(const std::vector<double>& samples, const PiecewisePdf& pdf, int bins);

// Per-bin probability density of the samples on [lo, hi].
std::vector<double> histogram_density(const std::vector<double>& samples, int bins, double lo, double hi);

// Pairwise (cascade) summation; result depends only on the element order.
double pairwise_sum(const double* x, std::size_t n);

struct Scenario {
    std::vector<Eigen::Vector3d> anchors;
    Eigen::Vector3d mu = Eigen::Vector3d::Zero();
    ArrayGeometry geom;
    SearchGrid grid;
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    bool noiseless = false;  // feed true angles and zero variances

    // Throws std::invalid_argument; requires mu.x > anchor.x for every anchor.
    void validate() const;
};

// Four anchors, 16x16 arrays, 64x64 rotation grid, d = lambda/2, 10k trials.
Scenario default_scenario();
// Extra anchor used when sweeping the anchor count up to five.
Eigen::Vector3d fifth_anchor();

struct ExperimentResult {
    double mse = 0.0;           // weighted (locate)
    double mse_baseline = 0.0;  // geometry baseline on the same realizations
    std::size_t trials = 0;
    std::size_t failures = 0;
    double failure_fraction = 0.0;
};

inline constexpr double kMaxFailureFraction = 1e-3;

// workers = 0 uses the hardware concurrency. Results do not depend on it.
ExperimentResult run_positioning_experiment(const Scenario& scenario, unsigned workers = 0);

enum class SweepParameter { anchor_size, anchor_count, grid_size };
enum class SweepQuantity { mse, variance };

struct SweepRow {
    int value = 0;
    ExperimentResult result;     // filled for SweepQuantity::mse
    double var_theta = 0.0;      // filled for SweepQuantity::variance,
    double var_phi = 0.0;        // evaluated at the first anchor's true angles
};

std::vector<SweepRow> sweep(const Scenario& base, SweepParameter parameter, const std::vector<int>& values,
                            SweepQuantity quantity = SweepQuantity::mse, unsigned workers = 0);

}  // namespace aoapos
