#pragma once

namespace revana::dist {

/// Standard normal CDF, Phi(z) = erfc(-z / sqrt(2)) / 2.
double normal_cdf(double z);

/// Standard normal upper tail, 1 - Phi(z), computed without cancellation.
double normal_sf(double z);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series expansion for x < a + 1, continued fraction otherwise.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double beta_i(double a, double b, double x);

double chi_square_cdf(double x, double df);

/// Upper-tail chi-square probability, the p-value side.
double chi_square_sf(double x, double df);

double student_t_cdf(double t, double df);

/// Two-tailed normal p-value from a z statistic: erfc(|z| / sqrt(2)).
double two_tailed_p_from_z(double z);

/// Two-tailed p-value from a t statistic with df degrees of freedom.
double two_tailed_p_from_t(double t, double df);

} // namespace revana::dist
