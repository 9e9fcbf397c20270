#pragma once

#include <complex>

#include <Eigen/Core>

namespace aoapos {

struct ArrayGeometry {
    int n_y = 16;
    int n_z = 16;
    double d_r = 0.0107 / 2.0;   // element spacing [m]
    double lambda_c = 0.0107;    // carrier wavelength [m], ~28 GHz

    // Throws std::invalid_argument unless n_y, n_z >= 1 and 0 < d_r <= lambda_c/2.
    void validate() const;
};

// theta is the horizontal angle measured from the array's y axis toward +x,
// phi the elevation above the x-y plane.
struct AnglePair {
    double theta = 0.0;
    double phi = 0.0;
};

// The two spatial frequencies the array measures.
struct DirectionCosines {
    double sin_phi = 0.0;   // along z
    double cos_cos = 0.0;   // cos(theta) cos(phi), along y
};

struct LosPath {
    double distance = 0.0;
    std::complex<double> gain;
    AnglePair angles;
};

DirectionCosines direction_cosines(const AnglePair& angles);

// Unit vector from the anchor to the MU implied by the angles.
Eigen::Vector3d unit_direction(const AnglePair& angles);

// n_y x n_z matrix with entry (m, n) = exp(-j (m u + n v)).
Eigen::MatrixXcd steering_matrix(const AnglePair& angles, const ArrayGeometry& geom);

std::complex<double> los_gain(double distance, const ArrayGeometry& geom);

AnglePair true_angles(const Eigen::Vector3d& anchor, const Eigen::Vector3d& mu);

LosPath los_path(const Eigen::Vector3d& anchor, const Eigen::Vector3d& mu,
                 const ArrayGeometry& geom);

}  // namespace aoapos
