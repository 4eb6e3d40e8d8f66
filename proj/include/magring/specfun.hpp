#pragma once

namespace magring {

// Digamma psi(x) for real non-pole x (poles: 0, -1, -2, ...).
// Accuracy target ~1e-13 relative over the ranges used here.
double digamma(double x);

// log|Gamma(x)| and the sign of Gamma(x) (+1/-1), defined off the poles.
double log_gamma_abs(double x);
int gamma_sign(double x);

// Gamma(x) itself; overflows to +-inf beyond ~171.6 like std::tgamma.
double gamma_fn(double x);

// Tricomi confluent hypergeometric U(a, b, zeta) for zeta > 0 and
// b in {1, 2} (the only second arguments this problem needs).
// Supports any real a away from non-positive-integer poles *of the
// implementation's recurrences*; a may be negative (handled by downward
// contiguous recurrence, exact Laguerre form at non-positive integers).
double kummer_u(double a, int b, double zeta);

// d/dzeta U(a, b, zeta) = -a * U(a+1, b+1, zeta).
double kummer_u_dz(double a, int b, double zeta);

// log of the product Gamma(a) U(a, b, zeta) for a > 0, by exp-sinh
// quadrature of the Laplace integral with nodes centered on the integrand
// peak; finite for a far beyond Gamma overflow. -inf when the product
// underflows to zero.
double log_laplace_product(double a, int b, double zeta);

// Generalized Laguerre polynomial L_m^{(k)}(x), m >= 0, by the stable
// three-term recurrence (used for U at non-positive integer a and in tests).
double laguerre(int m, int k, double x);

} // namespace magring
