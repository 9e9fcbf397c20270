#include "aoapos/error_pdf.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "aoapos/errors.hpp"
#include "aoapos/format.hpp"

namespace aoapos {

namespace {

void check_acos_arg(double x, const char* name) {
    if (!(x >= -1.0 && x <= 1.0))
        throw StateConstructionError(std::string("arccos argument ") + name + " outside [-1, 1]");
}

Segment seg(double lo, double hi, SegmentKind kind, double c0, double c1 = 0.0, double c2 = 0.0,
            double c3 = 0.0) {
    return {lo, hi, kind, {c0, c1, c2, c3}};
}

double k_coef(const EstimateState& st) { return st.x_hat / (8.0 * st.a * st.b * st.y_hat); }

}  // namespace

double half_width_a(const ArrayGeometry& geom, const SearchGrid& grid) {
    return geom.lambda_c / (2.0 * geom.n_z * geom.d_r * grid.s2);
}

double half_width_b(const ArrayGeometry& geom, const SearchGrid& grid) {
    return geom.lambda_c / (2.0 * geom.n_y * geom.d_r * grid.s1);
}

EstimateState build_estimate_state(double theta_hat, double phi_hat, const ArrayGeometry& geom,
                                   const SearchGrid& grid) {
    geom.validate();
    grid.validate();
    return build_estimate_state(theta_hat, phi_hat, half_width_a(geom, grid), half_width_b(geom, grid));
}

EstimateState build_estimate_state(double theta_hat, double phi_hat, double a, double b) {
    if (!std::isfinite(theta_hat) || !std::isfinite(phi_hat))
        throw std::invalid_argument("build_estimate_state: non-finite angle");
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("half-widths must be positive");
    EstimateState st;
    st.theta_hat = theta_hat;
    st.phi_hat = phi_hat;
    st.a = a;
    st.b = b;
    st.x_hat = std::cos(phi_hat);
    st.y_hat = std::sin(phi_hat);
    st.u_hat = std::cos(theta_hat);
    st.v_hat = std::sin(theta_hat);
    st.z_hat = st.u_hat * st.x_hat;
    if (st.y_hat < kDegeneracyEps) throw DegenerateStateError("sin(phi_hat) below degeneracy threshold");
    if (st.u_hat < kDegeneracyEps) throw DegenerateStateError("cos(theta_hat) below degeneracy threshold");
    if (st.x_hat < kDegeneracyEps || st.v_hat < kDegeneracyEps)
        throw DegenerateStateError("angles outside (0, pi/2)");

    const double shift = st.y_hat / st.x_hat * a;
    st.alpha1 = st.x_hat - shift;
    st.alpha2 = st.x_hat + shift;
    st.beta1 = st.z_hat - b;
    st.beta2 = st.z_hat + b;
    if (!(st.alpha1 > 0.0)) throw StateConstructionError("alpha1 must be positive");

    const double r11 = st.beta1 / st.alpha1, r12 = st.beta1 / st.alpha2;
    const double r21 = st.beta2 / st.alpha1, r22 = st.beta2 / st.alpha2;
    check_acos_arg(r12, "beta1/alpha2");
    check_acos_arg(r11, "beta1/alpha1");
    check_acos_arg(r22, "beta2/alpha2");
    check_acos_arg(r21, "beta2/alpha1");
    st.b1 = theta_hat - std::acos(r12);
    st.b2 = theta_hat - std::acos(r11);
    st.b3 = theta_hat - std::acos(r22);
    st.b4 = theta_hat - std::acos(r21);
    return st;
}

ThetaCase select_case(const EstimateState& st) {
    return st.beta2 / st.alpha2 >= st.beta1 / st.alpha1 ? ThetaCase::case1 : ThetaCase::case2;
}

const char* kind_name(SegmentKind kind) {
    switch (kind) {
        case SegmentKind::constant: return "constant";
        case SegmentKind::phi_exact: return "phi_exact";
        case SegmentKind::phi_linear: return "phi_linear";
        case SegmentKind::u_low: return "u_low";
        case SegmentKind::u_high: return "u_high";
        case SegmentKind::u_inv_square: return "u_inv_square";
        case SegmentKind::theta_low: return "theta_low";
        case SegmentKind::theta_mid: return "theta_mid";
        case SegmentKind::theta_high: return "theta_high";
        case SegmentKind::theta_inv_square: return "theta_inv_square";
        case SegmentKind::theta_low_linear: return "theta_low_linear";
        case SegmentKind::theta_mid_linear: return "theta_mid_linear";
        case SegmentKind::theta_high_linear: return "theta_high_linear";
        case SegmentKind::theta_inv_square_linear: return "theta_inv_square_linear";
    }
    return "unknown";
}

double Segment::eval(double t) const {
    switch (kind) {
        case SegmentKind::constant: return c[0];
        case SegmentKind::phi_exact: return c[0] * std::cos(c[1] - t);
        case SegmentKind::phi_linear: return c[0] * (c[1] + c[2] * t);
        case SegmentKind::u_low: {
            const double r = c[2] / t;
            return c[0] * (c[1] * c[1] - r * r);
        }
        case SegmentKind::u_high: {
            const double r = c[2] / t;
            return c[0] * (r * r - c[1] * c[1]);
        }
        case SegmentKind::u_inv_square: return c[0] / (t * t);
        default: break;
    }
    double s, w;
    switch (kind) {
        case SegmentKind::theta_low:
        case SegmentKind::theta_mid:
        case SegmentKind::theta_high:
        case SegmentKind::theta_inv_square:
            s = std::sin(c[3] - t);
            w = std::cos(c[3] - t);
            break;
        default: {
            const double u = std::cos(c[3]), v = std::sin(c[3]);
            s = v - t * u;
            w = u + t * v;
        }
    }
    switch (kind) {
        case SegmentKind::theta_low:
        case SegmentKind::theta_low_linear: {
            const double r = c[2] / w;
            return c[0] * s * (c[1] * c[1] - r * r);
        }
        case SegmentKind::theta_mid:
        case SegmentKind::theta_mid_linear: return c[0] * s;
        case SegmentKind::theta_high:
        case SegmentKind::theta_high_linear: {
            const double r = c[2] / w;
            return c[0] * s * (r * r - c[1] * c[1]);
        }
        default: return c[0] * s / (w * w);
    }
}

PiecewisePdf phi_error_pdf(double phi_hat, double a, PdfMode mode) {
    if (!std::isfinite(phi_hat) || !(a > 0.0)) throw std::invalid_argument("phi_error_pdf: bad arguments");
    const double y = std::sin(phi_hat);
    if (y + a > 1.0 || y - a < -1.0) throw StateConstructionError("phi error support leaves [-1, 1]");
    const double lo = phi_hat - std::asin(y + a);
    const double hi = phi_hat - std::asin(y - a);
    const double scale = 1.0 / (2.0 * a);
    PiecewisePdf pdf;
    if (mode == PdfMode::exact)
        pdf.segments.push_back(seg(lo, hi, SegmentKind::phi_exact, scale, phi_hat));
    else
        pdf.segments.push_back(seg(lo, hi, SegmentKind::phi_linear, scale, std::cos(phi_hat), y));
    return pdf;
}

PiecewisePdf phi_error_pdf(const EstimateState& st, PdfMode mode) {
    return phi_error_pdf(st.phi_hat, st.a, mode);
}

PiecewisePdf x_pdf(const EstimateState& st) {
    return {{seg(st.alpha1, st.alpha2, SegmentKind::constant, 1.0 / (st.alpha2 - st.alpha1))}};
}

PiecewisePdf z_pdf(const EstimateState& st) {
    return {{seg(st.beta1, st.beta2, SegmentKind::constant, 1.0 / (2.0 * st.b))}};
}

PiecewisePdf u_pdf(const EstimateState& st) {
    const double k = k_coef(st);
    const double lo = st.beta1 / st.alpha2, hi = st.beta2 / st.alpha1;
    const double p = st.beta1 / st.alpha1, q = st.beta2 / st.alpha2;
    PiecewisePdf pdf;
    if (select_case(st) == ThetaCase::case1) {
        pdf.segments = {seg(lo, p, SegmentKind::u_low, k, st.alpha2, st.beta1),
                        seg(p, q, SegmentKind::constant, st.x_hat / (2.0 * st.b)),
                        seg(q, hi, SegmentKind::u_high, k, st.alpha1, st.beta2)};
    } else {
        pdf.segments = {seg(lo, q, SegmentKind::u_low, k, st.alpha2, st.beta1),
                        seg(q, p, SegmentKind::u_inv_square, st.x_hat * st.z_hat / (2.0 * st.a * st.y_hat)),
                        seg(p, hi, SegmentKind::u_high, k, st.alpha1, st.beta2)};
    }
    return pdf;
}

PiecewisePdf theta_error_pdf(const EstimateState& st, PdfMode mode, ThetaCase forced) {
    const bool lin = mode == PdfMode::linear;
    const auto low = lin ? SegmentKind::theta_low_linear : SegmentKind::theta_low;
    const auto mid = lin ? SegmentKind::theta_mid_linear : SegmentKind::theta_mid;
    const auto high = lin ? SegmentKind::theta_high_linear : SegmentKind::theta_high;
    const auto inv = lin ? SegmentKind::theta_inv_square_linear : SegmentKind::theta_inv_square;
    const double k = k_coef(st);
    const double th = st.theta_hat;
    PiecewisePdf pdf;
    if (forced == ThetaCase::case1) {
        pdf.segments = {seg(st.b1, st.b2, low, k, st.alpha2, st.beta1, th),
                        seg(st.b2, st.b3, mid, st.x_hat / (2.0 * st.b), 0.0, 0.0, th),
                        seg(st.b3, st.b4, high, k, st.alpha1, st.beta2, th)};
    } else {
        pdf.segments = {seg(st.b1, st.b3, low, k, st.alpha2, st.beta1, th),
                        seg(st.b3, st.b2, inv, st.x_hat * st.z_hat / (2.0 * st.a * st.y_hat), 0.0, 0.0, th),
                        seg(st.b2, st.b4, high, k, st.alpha1, st.beta2, th)};
    }
    return pdf;
}

PiecewisePdf theta_error_pdf(const EstimateState& st, PdfMode mode) {
    return theta_error_pdf(st, mode, select_case(st));
}

double pdf_eval(const PiecewisePdf& pdf, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("pdf_eval: non-finite argument");
    const auto& s = pdf.segments;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const bool last = i + 1 == s.size();
        if (t >= s[i].lo && (t < s[i].hi || (last && t == s[i].hi))) return s[i].eval(t);
    }
    return 0.0;
}

double pdf_integrate(const PiecewisePdf& pdf, double lo, double hi, Weight weight) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("pdf_integrate: non-finite bounds");
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    for (const auto& s : pdf.segments) {
        const double l = std::max(lo, s.lo), h = std::min(hi, s.hi);
        if (!(h > l)) continue;
        auto f = [&](double t) {
            const double v = s.eval(t);
            switch (weight) {
                case Weight::t: return t * v;
                case Weight::t2: return t * t * v;
                default: return v;
            }
        };
        total += gauss_kronrod<double, 31>::integrate(f, l, h, 15, 1e-14);
    }
    return total;
}

double pdf_integrate(const PiecewisePdf& pdf, Weight weight) {
    return pdf_integrate(pdf, pdf.support_lo(), pdf.support_hi(), weight);
}

std::string to_csv(const PiecewisePdf& pdf) {
    std::ostringstream os;
    for (const auto& s : pdf.segments) {
        os << fmt17(s.lo) << ',' << fmt17(s.hi) << ',' << kind_name(s.kind);
        for (double c : s.c) os << ',' << fmt17(c);
        os << '\n';
    }
    return os.str();
}

}  // namespace aoapos
