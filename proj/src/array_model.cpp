#include "aoapos/array_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aoapos/errors.hpp"

namespace aoapos {

using std::numbers::pi;

void ArrayGeometry::validate() const {
    if (n_y < 1 || n_z < 1) throw std::invalid_argument("array needs at least one element per axis");
    if (!(lambda_c > 0.0) || !std::isfinite(lambda_c))
        throw std::invalid_argument("lambda_c must be positive");
    if (!(d_r > 0.0) || d_r > lambda_c / 2.0)
        throw std::invalid_argument("d_r must lie in (0, lambda_c/2]");
}

DirectionCosines direction_cosines(const AnglePair& angles) {
    return {std::sin(angles.phi), std::cos(angles.theta) * std::cos(angles.phi)};
}

Eigen::Vector3d unit_direction(const AnglePair& angles) {
    const double cp = std::cos(angles.phi);
    return {std::sin(angles.theta) * cp, std::cos(angles.theta) * cp, std::sin(angles.phi)};
}

Eigen::MatrixXcd steering_matrix(const AnglePair& angles, const ArrayGeometry& geom) {
    geom.validate();
    if (!std::isfinite(angles.theta) || !std::isfinite(angles.phi))
        throw std::invalid_argument("steering_matrix: non-finite angle");
    const auto dc = direction_cosines(angles);
    const double k = 2.0 * pi * geom.d_r / geom.lambda_c;
    const double u = k * dc.cos_cos;
    const double v = k * dc.sin_phi;
    Eigen::MatrixXcd a(geom.n_y, geom.n_z);
    for (int m = 0; m < geom.n_y; ++m)
        for (int n = 0; n < geom.n_z; ++n)
            a(m, n) = std::polar(1.0, -(m * u + n * v));
    return a;
}

std::complex<double> los_gain(double distance, const ArrayGeometry& geom) {
    if (!(distance > 0.0) || !std::isfinite(distance))
        throw DomainError("los_gain: distance must be positive");
    const double mag = geom.lambda_c / (4.0 * pi * distance);
    double phase = std::remainder(-2.0 * pi * distance / geom.lambda_c, 2.0 * pi);
    if (phase <= -pi) phase += 2.0 * pi;
    return std::polar(mag, phase);
}

AnglePair true_angles(const Eigen::Vector3d& anchor, const Eigen::Vector3d& mu) {
    const Eigen::Vector3d d = mu - anchor;
    if (d.norm() == 0.0) throw GeometryError("true_angles: MU coincides with the anchor");
    const double rho = std::hypot(d.x(), d.y());
    return {std::atan2(d.x(), d.y()), std::atan2(d.z(), rho)};
}

LosPath los_path(const Eigen::Vector3d& anchor, const Eigen::Vector3d& mu,
                 const ArrayGeometry& geom) {
    const double dist = (mu - anchor).norm();
    return {dist, los_gain(dist, geom), true_angles(anchor, mu)};
}

}  // namespace aoapos
