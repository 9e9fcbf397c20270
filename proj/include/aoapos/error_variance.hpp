#pragma once

#include "aoapos/error_pdf.hpp"

namespace aoapos {

// 2F1(nu, mu; 1 + mu; -beta_coef * upper) for nu = 2, mu in {2, 3, 4}.
// Throws DomainError when 1 + beta_coef * upper <= 0.
double hyp2f1_term(int nu, int mu, double beta_coef, double upper);

// int_0^u x^(mu-1) / (1 + c x)^2 dx via the identity (u^mu / mu) 2F1(...).
double power_ratio_integral(int mu, double c, double u);

// Closed form over the linearized phi error density.
double variance_phi(const EstimateState& st);
double variance_phi(double phi_hat, double a);

// d1k are the second-moment pieces per segment, d2k the first-moment pieces.
// In Case 2 they hold the primed terms.
struct VarianceTerms {
    ThetaCase theta_case = ThetaCase::case1;
    double d11 = 0.0, d12 = 0.0, d13 = 0.0;
    double d21 = 0.0, d22 = 0.0, d23 = 0.0;
    double variance = 0.0;
};

// Closed form over the linearized theta error density.
VarianceTerms variance_theta(const EstimateState& st);

// int t^2 f - (int t f)^2 of the density as given (not renormalized).
double variance_numeric(const PiecewisePdf& pdf);

struct AngleVariances {
    double theta = 0.0;
    double phi = 0.0;
    bool theta_closed_form = false;
    bool phi_closed_form = false;
};

// Closed forms where the state is valid; otherwise quadrature over the
// generative model (Y, Z uniform, Phi = asin Y, Theta = acos(Z / cos Phi)).
// Always finite.
AngleVariances angle_variances(double theta_hat, double phi_hat, double a, double b);
AngleVariances angle_variances(double theta_hat, double phi_hat, const ArrayGeometry& geom,
                               const SearchGrid& grid);

// Generative-model moments by quadrature. Exposed for tests.
double generative_variance_phi(double phi_hat, double a);
double generative_variance_theta(double theta_hat, double phi_hat, double a, double b);

}  // namespace aoapos
