#include "aoapos/error_variance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "aoapos/errors.hpp"

namespace aoapos {

namespace {

double series_2f1(int mu, double z) {
    // sum_n (n + 1) mu / (mu + n) z^n
    double sum = 0.0, zn = 1.0;
    for (int n = 0; n < 200; ++n) {
        const double term = (n + 1.0) * mu / (mu + n) * zn;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
        zn *= z;
    }
    return sum;
}

// int_1^T (y - 1)^(mu-1) / y^2 dy
double elementary_core(int mu, double t) {
    const double lt = std::log(t), it = 1.0 / t;
    switch (mu) {
        case 2: return lt + it - 1.0;
        case 3: return t - 2.0 * lt - it;
        default: return 0.5 * (t * t - 1.0) - 3.0 * (t - 1.0) + 3.0 * lt + it - 1.0;
    }
}

double poly1(const EstimateState& st, double t) {
    return st.v_hat * t * t * t / 3.0 - st.u_hat * t * t * t * t / 4.0;
}

double poly2(const EstimateState& st, double t) {
    return st.v_hat * t * t / 2.0 - st.u_hat * t * t * t / 3.0;
}

struct Pieces {
    const EstimateState& st;
    double c;  // V / U
    double k;  // X / (8 a b Y)

    double dI(int mu, double lo, double hi) const {
        return power_ratio_integral(mu, c, hi) - power_ratio_integral(mu, c, lo);
    }
    double dP(int order, double lo, double hi) const {
        return order == 1 ? poly1(st, hi) - poly1(st, lo) : poly2(st, hi) - poly2(st, lo);
    }
    // order 1: second-moment piece (I3, I4); order 2: first moment (I2, I3)
    double low(int order, double lo, double hi) const {
        const int m1 = order == 1 ? 3 : 2;
        const double bb = st.beta1 * st.beta1, u = st.u_hat;
        return k * st.alpha2 * st.alpha2 * dP(order, lo, hi) -
               (k * bb * st.v_hat / (u * u) * dI(m1, lo, hi) - k * bb / u * dI(m1 + 1, lo, hi));
    }
    double high(int order, double lo, double hi) const {
        const int m1 = order == 1 ? 3 : 2;
        const double bb = st.beta2 * st.beta2, u = st.u_hat;
        return (-k * bb / u * dI(m1 + 1, lo, hi) + k * bb * st.v_hat / (u * u) * dI(m1, lo, hi)) -
               k * st.alpha1 * st.alpha1 * dP(order, lo, hi);
    }
    double mid(int order, double lo, double hi) const {
        return st.x_hat / (2.0 * st.b) * dP(order, lo, hi);
    }
    double inv(int order, double lo, double hi) const {
        const int m1 = order == 1 ? 3 : 2;
        const double cc = st.x_hat * st.z_hat / (2.0 * st.a * st.y_hat), u = st.u_hat;
        return -cc / u * dI(m1 + 1, lo, hi) + cc * st.v_hat / (u * u) * dI(m1, lo, hi);
    }
};

}  // namespace

double hyp2f1_term(int nu, int mu, double beta_coef, double upper) {
    if (nu != 2 || mu < 2 || mu > 4) throw std::invalid_argument("hyp2f1_term: only nu = 2, mu in {2,3,4}");
    if (!std::isfinite(beta_coef) || !std::isfinite(upper))
        throw std::invalid_argument("hyp2f1_term: non-finite argument");
    const double z = -beta_coef * upper;
    if (!(1.0 - z > 0.0)) throw DomainError("hyp2f1_term: pole at 1 + beta*u <= 0");
    if (std::abs(z) <= 0.5) return series_2f1(mu, z);
    // mu / u^mu * beta^-mu * core(1 + beta u) = mu * core / (-z)^mu
    return mu * elementary_core(mu, 1.0 - z) / std::pow(-z, mu);
}

double power_ratio_integral(int mu, double c, double u) {
    if (u == 0.0) return 0.0;
    return std::pow(u, mu) / mu * hyp2f1_term(2, mu, c, u);
}

double variance_phi(double phi_hat, double a) {
    const double y = std::sin(phi_hat), x = std::cos(phi_hat);
    if (!(a > 0.0) || y + a > 1.0 || y - a < -1.0) throw StateConstructionError("phi support leaves [-1, 1]");
    const double lo = phi_hat - std::asin(y + a), hi = phi_hat - std::asin(y - a);
    auto m2 = [&](double t) { return x * t * t * t / 3.0 + y * t * t * t * t / 4.0; };
    auto m1 = [&](double t) { return x * t * t / 2.0 + y * t * t * t / 3.0; };
    const double s = 1.0 / (2.0 * a);
    const double d1 = s * (m2(hi) - m2(lo));
    const double d2 = s * (m1(hi) - m1(lo));
    return d1 - d2 * d2;
}

double variance_phi(const EstimateState& st) { return variance_phi(st.phi_hat, st.a); }

VarianceTerms variance_theta(const EstimateState& st) {
    const Pieces p{st, st.v_hat / st.u_hat, st.x_hat / (8.0 * st.a * st.b * st.y_hat)};
    VarianceTerms vt;
    vt.theta_case = select_case(st);
    if (vt.theta_case == ThetaCase::case1) {
        vt.d11 = p.low(1, st.b1, st.b2);
        vt.d12 = p.mid(1, st.b2, st.b3);
        vt.d13 = p.high(1, st.b3, st.b4);
        vt.d21 = p.low(2, st.b1, st.b2);
        vt.d22 = p.mid(2, st.b2, st.b3);
        vt.d23 = p.high(2, st.b3, st.b4);
    } else {
        vt.d11 = p.low(1, st.b1, st.b3);
        vt.d12 = p.inv(1, st.b3, st.b2);
        vt.d13 = p.high(1, st.b2, st.b4);
        vt.d21 = p.low(2, st.b1, st.b3);
        vt.d22 = p.inv(2, st.b3, st.b2);
        vt.d23 = p.high(2, st.b2, st.b4);
    }
    const double d2 = vt.d21 + vt.d22 + vt.d23;
    vt.variance = (vt.d11 + vt.d12 + vt.d13) - d2 * d2;
    return vt;
}

double variance_numeric(const PiecewisePdf& pdf) {
    const double m1 = pdf_integrate(pdf, Weight::t);
    return pdf_integrate(pdf, Weight::t2) - m1 * m1;
}

double generative_variance_phi(double phi_hat, double a) {
    using boost::math::quadrature::gauss_kronrod;
    const double lo = std::max(-1.0, std::sin(phi_hat) - a);
    const double hi = std::min(1.0, std::sin(phi_hat) + a);
    if (!(hi > lo)) throw DomainError("phi error support is empty");
    auto moment = [&](int k) {
        return gauss_kronrod<double, 31>::integrate(
            [&](double y) { return std::pow(phi_hat - std::asin(y), k); }, lo, hi, 15, 1e-12);
    };
    const double m0 = hi - lo;
    const double m1 = moment(1) / m0;
    return std::max(0.0, moment(2) / m0 - m1 * m1);
}

double generative_variance_theta(double theta_hat, double phi_hat, double a, double b) {
    using boost::math::quadrature::gauss;
    const double y0 = std::sin(phi_hat), z0 = std::cos(theta_hat) * std::cos(phi_hat);
    const double ylo = std::max(-1.0, y0 - a), yhi = std::min(1.0, y0 + a);
    double m[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        m[k] = gauss<double, 40>::integrate(
            [&](double y) {
                const double c = std::sqrt(std::max(0.0, (1.0 - y) * (1.0 + y)));
                const double zlo = std::max(z0 - b, -c), zhi = std::min(z0 + b, c);
                if (!(zhi > zlo) || c == 0.0) return 0.0;
                return gauss<double, 40>::integrate(
                    [&](double z) {
                        const double e = theta_hat - std::acos(std::clamp(z / c, -1.0, 1.0));
                        return k == 0 ? 1.0 : (k == 1 ? e : e * e);
                    },
                    zlo, zhi);
            },
            ylo, yhi);
    }
    if (!(m[0] > 0.0)) throw DomainError("generative model has no admissible (Y, Z) pairs");
    const double mean = m[1] / m[0];
    return std::max(0.0, m[2] / m[0] - mean * mean);
}

AngleVariances angle_variances(double theta_hat, double phi_hat, double a, double b) {
    AngleVariances out;
    try {
        out.phi = variance_phi(phi_hat, a);
        out.phi_closed_form = std::isfinite(out.phi) && out.phi >= 0.0;
    } catch (const DomainError&) {
    }
    if (!out.phi_closed_form) out.phi = generative_variance_phi(phi_hat, a);
    try {
        const auto st = build_estimate_state(theta_hat, phi_hat, a, b);
        out.theta = variance_theta(st).variance;
        out.theta_closed_form = std::isfinite(out.theta) && out.theta >= 0.0;
    } catch (const DomainError&) {
    }
    if (!out.theta_closed_form) out.theta = generative_variance_theta(theta_hat, phi_hat, a, b);
    return out;
}

AngleVariances angle_variances(double theta_hat, double phi_hat, const ArrayGeometry& geom,
                               const SearchGrid& grid) {
    return angle_variances(theta_hat, phi_hat, half_width_a(geom, grid), half_width_b(geom, grid));
}

}  // namespace aoapos
