#pragma once

namespace fadingsched::special {

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
///
/// Evaluated directly (continued fraction for x >= a + 1) so that the far
/// tail keeps full relative precision instead of cancelling in 1 - P.
double gamma_q(double a, double x);

/// Standard normal cdf and its complement, via erfc for tail accuracy.
double normal_cdf(double z);
double normal_ccdf(double z);

}  // namespace fadingsched::special
