#pragma once

#include <Eigen/Core>

#include "aoapos/array_model.hpp"

namespace aoapos {

struct SearchGrid {
    int s1 = 64;  // rotation points per DFT cell along y
    int s2 = 64;  // along z

    void validate() const;
};

// Argmax of the spectrum, unwrapped to [-N/2, N/2).
struct PeakBins {
    int b_n = 0;
    int q_n = 0;
};

// Result of either estimation path. The spectrum peaks at bin -b (the
// steering phase and the DFT kernel share the same sign), so the cell
// indices here are the negated peak bins. s1, s2 are rotation indices in 1..S.
struct AngleEstimate {
    AnglePair angles;
    DirectionCosines cosines;
    int b_n = 0;
    int q_n = 0;
    int s1 = 1;
    int s2 = 1;
};

// |sum_{m,n} A(m,n) exp(-j 2 pi (b m / N_y + q n / N_z))| for b, q in 0..N-1.
Eigen::MatrixXd dft_spectrum(const Eigen::MatrixXcd& a, const ArrayGeometry& geom);

PeakBins peak_bins(const Eigen::MatrixXd& spectrum);

// Cell-centered rotation grid: -pi/N + (s - 1/2) * 2 pi / (N S), s in 1..S.
double rotation_parameter(int s, int n, int s_count);

// Composite-grid steps lambda/(N d S) in the sin and coscos domains.
double sin_step(const ArrayGeometry& geom, const SearchGrid& grid);
double coscos_step(const ArrayGeometry& geom, const SearchGrid& grid);

// Full path: steering matrix, 2D DFT peak, then per-axis rotation scan.
// Reliable for N >= 2; with a single element the scan cannot discriminate.
AngleEstimate estimate(const AnglePair& truth, const ArrayGeometry& geom, const SearchGrid& grid);

// Fast path: snap the direction cosines to the nearest composite grid point.
// Bit-identical to estimate() wherever the latter is well posed.
AngleEstimate quantize_model(const AnglePair& truth, const ArrayGeometry& geom,
                             const SearchGrid& grid);
AngleEstimate quantize_cosines(const DirectionCosines& truth, const ArrayGeometry& geom,
                               const SearchGrid& grid);

// Shared final step of both paths.
AngleEstimate angles_from_indices(int b_n, int q_n, int s1, int s2, const ArrayGeometry& geom,
                                  const SearchGrid& grid);

// Angles from estimated direction cosines, clamping arguments within 1e-9 of
// [-1, 1] and throwing EstimationDomainError beyond.
AnglePair angles_from_cosines(const DirectionCosines& dc);

}  // namespace aoapos
