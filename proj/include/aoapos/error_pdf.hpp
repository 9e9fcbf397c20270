#pragma once

#include <array>
#include <string>
#include <vector>

#include "aoapos/array_model.hpp"
#include "aoapos/dft_estimator.hpp"

namespace aoapos {

// Fields follow the estimate: X = cos(phi), Y = sin(phi), U = cos(theta),
// V = sin(theta), Z = U X. a and b are the sin- and coscos-domain half-widths.
struct EstimateState {
    double theta_hat = 0.0;
    double phi_hat = 0.0;
    double x_hat = 0.0;
    double y_hat = 0.0;
    double u_hat = 0.0;
    double v_hat = 0.0;
    double z_hat = 0.0;
    double a = 0.0;
    double b = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double b1 = 0.0;  // breakpoints of the theta error support, b1 <= min(b2, b3)
    double b2 = 0.0;
    double b3 = 0.0;
    double b4 = 0.0;  // max(b2, b3) <= b4
};

inline constexpr double kDegeneracyEps = 1e-6;

double half_width_a(const ArrayGeometry& geom, const SearchGrid& grid);
double half_width_b(const ArrayGeometry& geom, const SearchGrid& grid);

EstimateState build_estimate_state(double theta_hat, double phi_hat, const ArrayGeometry& geom,
                                   const SearchGrid& grid);
EstimateState build_estimate_state(double theta_hat, double phi_hat, double a, double b);

enum class ThetaCase { case1, case2 };

ThetaCase select_case(const EstimateState& st);

enum class PdfMode { exact, linear };

// Every functional form used by the densities below. Coefficients c0..c3;
// for the theta kinds c3 holds theta_hat and U, V are recomputed from it.
enum class SegmentKind {
    constant,            // c0
    phi_exact,           // c0 cos(c1 - t)
    phi_linear,          // c0 (c1 + c2 t)
    u_low,               // c0 (c1^2 - (c2/t)^2)
    u_high,              // c0 ((c2/t)^2 - c1^2)
    u_inv_square,        // c0 / t^2
    theta_low,           // c0 s (c1^2 - (c2/w)^2), s = sin(c3 - t), w = cos(c3 - t)
    theta_mid,           // c0 s
    theta_high,          // c0 s ((c2/w)^2 - c1^2)
    theta_inv_square,    // c0 s / w^2
    theta_low_linear,    // as above with s = V - tU, w = U + tV
    theta_mid_linear,
    theta_high_linear,
    theta_inv_square_linear,
};

const char* kind_name(SegmentKind kind);

struct Segment {
    double lo = 0.0;
    double hi = 0.0;
    SegmentKind kind = SegmentKind::constant;
    std::array<double, 4> c{};

    double eval(double t) const;
};

struct PiecewisePdf {
    std::vector<Segment> segments;

    double support_lo() const { return segments.front().lo; }
    double support_hi() const { return segments.back().hi; }
};

PiecewisePdf phi_error_pdf(const EstimateState& st, PdfMode mode);
// Half-width only; admits phi_hat = 0, where the theta chain is undefined.
PiecewisePdf phi_error_pdf(double phi_hat, double a, PdfMode mode);

// First-order law of X = cos(arcsin Y): uniform on [alpha1, alpha2].
PiecewisePdf x_pdf(const EstimateState& st);
PiecewisePdf z_pdf(const EstimateState& st);
PiecewisePdf u_pdf(const EstimateState& st);

PiecewisePdf theta_error_pdf(const EstimateState& st, PdfMode mode);
// Builds the segments of the given case regardless of select_case. Only
// meaningful near a tie; used to check the two forms join continuously.
PiecewisePdf theta_error_pdf(const EstimateState& st, PdfMode mode, ThetaCase forced);

// 0 outside the support. Linear-mode theta densities can dip below zero by
// O(a b) next to the outer breakpoints; the value is returned as is.
double pdf_eval(const PiecewisePdf& pdf, double t);

enum class Weight { none, t, t2 };

// Adaptive Gauss-Kronrod per segment over [lo, hi] intersected with the support.
double pdf_integrate(const PiecewisePdf& pdf, double lo, double hi, Weight weight);
double pdf_integrate(const PiecewisePdf& pdf, Weight weight);

// One "lo,hi,kind,c0,c1,c2,c3" line per segment, 17 significant digits.
std::string to_csv(const PiecewisePdf& pdf);

}  // namespace aoapos
