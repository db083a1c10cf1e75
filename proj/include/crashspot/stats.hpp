#pragma once

namespace crashspot {

// Regularized lower incomplete gamma P(a, x), evaluated by power series for
// x < a + 1 and by continued fraction otherwise. Q(a, x) = 1 - P(a, x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Chi-square survival function: P(X >= x) for df degrees of freedom.
// Monotone decreasing in x. Throws DataError on non-finite or negative x,
// or df < 1.
double chi2_sf(double x, int df);

// Standard normal CDF via erfc.
double normal_cdf(double z);

// Two-tailed normal p-value: 2 * (1 - Phi(|z|)).
double two_tailed_p(double z);

}  // namespace crashspot
