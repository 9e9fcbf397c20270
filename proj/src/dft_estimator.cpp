#include "aoapos/dft_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "aoapos/errors.hpp"

namespace aoapos {

using std::numbers::pi;
using cd = std::complex<double>;

namespace {

constexpr double kClampTol = 1e-9;

int unwrap_bin(int k, int n) { return 2 * k >= n ? k - n : k; }

int wrap_bin(int p, int n) {
    int k = p % n;
    if (k < 0) k += n;
    return unwrap_bin(k, n);
}

int floor_div(long long num, long long den) {
    long long q = num / den;
    if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
    return static_cast<int>(q);
}

Eigen::MatrixXcd dft_matrix(int n) {
    Eigen::MatrixXcd f(n, n);
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m)
            f(k, m) = std::polar(1.0, -2.0 * pi * static_cast<double>((static_cast<long long>(k) * m) % n) / n);
    return f;
}

// Phase ramp exp(-j m (2 pi p / N + w)) for m = 0..N-1.
Eigen::VectorXcd ramp(int p, double w, int n) {
    Eigen::VectorXcd r(n);
    for (int m = 0; m < n; ++m)
        r(m) = std::polar(1.0, -static_cast<double>(m) * (2.0 * pi * p / n + w));
    return r;
}

// Index of the largest rotated-peak magnitude; ties go to the smallest s.
int best_rotation(const Eigen::VectorXcd& line, int p, int n, int s_count) {
    int best = 1;
    double best_mag = -1.0;
    for (int s = 1; s <= s_count; ++s) {
        const double mag = std::abs((line.array() * ramp(p, rotation_parameter(s, n, s_count), n).array()).sum());
        if (mag > best_mag) {
            best_mag = mag;
            best = s;
        }
    }
    return best;
}

double checked_unit(double x, const char* what) {
    if (!std::isfinite(x) || std::abs(x) > 1.0 + kClampTol)
        throw EstimationDomainError(std::string(what) + " argument out of [-1, 1]");
    return std::clamp(x, -1.0, 1.0);
}

// Nearest composite grid point for scaled coordinate x = value / step, split
// into a DFT cell index and a rotation index.
void snap(double x, int n, int s_count, int& cell, int& s) {
    if (!std::isfinite(x)) throw EstimationDomainError("non-finite direction cosine");
    const bool even = s_count % 2 == 0;
    const long long k = static_cast<long long>(even ? std::floor(x) : std::floor(x + 0.5));
    // grid point / step = m + (S+1)/2 with m = cell*S - s
    const long long m = even ? k - s_count / 2 : k - (s_count + 1) / 2;
    int q = floor_div(m + s_count, s_count);
    s = static_cast<int>(static_cast<long long>(q) * s_count - m);
    // The DFT only sees q modulo N; mirror its unwrapping of the peak bin.
    cell = -wrap_bin(-q, n);
}

}  // namespace

void SearchGrid::validate() const {
    if (s1 < 1 || s2 < 1) throw std::invalid_argument("search grid needs s1, s2 >= 1");
}

Eigen::MatrixXd dft_spectrum(const Eigen::MatrixXcd& a, const ArrayGeometry& geom) {
    if (a.rows() != geom.n_y || a.cols() != geom.n_z)
        throw std::invalid_argument("dft_spectrum: matrix shape does not match geometry");
    const Eigen::MatrixXcd f = dft_matrix(geom.n_y) * a * dft_matrix(geom.n_z).transpose();
    return f.cwiseAbs();
}

PeakBins peak_bins(const Eigen::MatrixXd& spectrum) {
    const int ny = static_cast<int>(spectrum.rows());
    const int nz = static_cast<int>(spectrum.cols());
    if (ny == 0 || nz == 0) throw std::invalid_argument("peak_bins: empty spectrum");
    double best = 0.0;
    PeakBins out;
    bool found = false;
    for (int k = 0; k < ny; ++k) {
        for (int l = 0; l < nz; ++l) {
            const double v = spectrum(k, l);
            if (!(v >= 0.0)) throw std::invalid_argument("peak_bins: spectrum must be nonnegative");
            const int b = unwrap_bin(k, ny);
            const int q = unwrap_bin(l, nz);
            const bool better = !found || v > best ||
                                (v == best && (b < out.b_n || (b == out.b_n && q < out.q_n)));
            if (v > 0.0 && better) {
                best = v;
                out = {b, q};
                found = true;
            }
        }
    }
    if (!found) throw std::invalid_argument("peak_bins: all-zero spectrum");
    return out;
}

double rotation_parameter(int s, int n, int s_count) {
    return -pi / n + (s - 0.5) * (2.0 * pi / (static_cast<double>(n) * s_count));
}

double sin_step(const ArrayGeometry& geom, const SearchGrid& grid) {
    return geom.lambda_c / (geom.n_z * geom.d_r * grid.s2);
}

double coscos_step(const ArrayGeometry& geom, const SearchGrid& grid) {
    return geom.lambda_c / (geom.n_y * geom.d_r * grid.s1);
}

AnglePair angles_from_cosines(const DirectionCosines& dc) {
    const double y = checked_unit(dc.sin_phi, "arcsin");
    const double phi = std::asin(y);
    const double c = std::sqrt((1.0 - y) * (1.0 + y));
    if (c == 0.0) throw EstimationDomainError("estimated elevation at +-90 degrees leaves theta undefined");
    const double theta = std::acos(checked_unit(dc.cos_cos / c, "arccos"));
    return {theta, phi};
}

AngleEstimate angles_from_indices(int b_n, int q_n, int s1, int s2, const ArrayGeometry& geom,
                                  const SearchGrid& grid) {
    const double k = geom.lambda_c / geom.d_r;
    AngleEstimate e;
    e.b_n = b_n;
    e.q_n = q_n;
    e.s1 = s1;
    e.s2 = s2;
    e.cosines.sin_phi = k * q_n / geom.n_z - k * rotation_parameter(s2, geom.n_z, grid.s2) / (2.0 * pi);
    e.cosines.cos_cos = k * b_n / geom.n_y - k * rotation_parameter(s1, geom.n_y, grid.s1) / (2.0 * pi);
    e.angles = angles_from_cosines(e.cosines);
    return e;
}

AngleEstimate estimate(const AnglePair& truth, const ArrayGeometry& geom, const SearchGrid& grid) {
    grid.validate();
    const Eigen::MatrixXcd a = steering_matrix(truth, geom);
    const PeakBins pk = peak_bins(dft_spectrum(a, geom));

    // z axis first with no y rotation, then y with the chosen z rotation.
    const Eigen::VectorXcd wy0 = ramp(pk.b_n, 0.0, geom.n_y);
    const Eigen::VectorXcd along_z = a.transpose() * wy0;
    const int s2 = best_rotation(along_z, pk.q_n, geom.n_z, grid.s2);
    const Eigen::VectorXcd wz = ramp(pk.q_n, rotation_parameter(s2, geom.n_z, grid.s2), geom.n_z);
    const Eigen::VectorXcd along_y = a * wz;
    const int s1 = best_rotation(along_y, pk.b_n, geom.n_y, grid.s1);

    return angles_from_indices(-pk.b_n, -pk.q_n, s1, s2, geom, grid);
}

AngleEstimate quantize_cosines(const DirectionCosines& truth, const ArrayGeometry& geom,
                               const SearchGrid& grid) {
    geom.validate();
    grid.validate();
    int q_n = 0, s2 = 1, b_n = 0, s1 = 1;
    snap(truth.sin_phi * (geom.d_r * geom.n_z * grid.s2 / geom.lambda_c), geom.n_z, grid.s2, q_n, s2);
    snap(truth.cos_cos * (geom.d_r * geom.n_y * grid.s1 / geom.lambda_c), geom.n_y, grid.s1, b_n, s1);
    return angles_from_indices(b_n, q_n, s1, s2, geom, grid);
}

AngleEstimate quantize_model(const AnglePair& truth, const ArrayGeometry& geom,
                             const SearchGrid& grid) {
    if (!std::isfinite(truth.theta) || !std::isfinite(truth.phi))
        throw std::invalid_argument("quantize_model: non-finite angle");
    return quantize_cosines(direction_cosines(truth), geom, grid);
}

}  // namespace aoapos
