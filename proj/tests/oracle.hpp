#pragma once

// Independent reference implementations used only by tests. Everything here
// is long-double and deliberately built on different mathematics than the
// library paths it checks:
//   - U(a,b,zeta) by adaptive-Simpson quadrature of the Laplace integral
//     (finite-part form for a <= 0), not by series/recurrences;
//   - ln Gamma by the Weierstrass product series with an Euler-Maclaurin tail,
//     not by libm;
//   - digamma by the harmonic series with an Euler-Maclaurin tail, not by
//     the Bernoulli asymptotic the library uses.

#include <functional>

namespace oracle {

long double adaptive_simpson(const std::function<long double(long double)>& f,
                             long double a, long double b, long double rel_tol);

long double log_gamma(long double x); // x > 0
long double digamma(long double x);   // x > 0

// Tricomi U for zeta > 0, real b, any real a (non-positive integer a gives
// the exact terminating polynomial).
long double kummer_u(long double a, long double b, long double zeta);

// Central difference with one Richardson step, h then h/2 (double precision
// is enough for gradient checks).
double fd_derivative(const std::function<double(double)>& f, double x, double h);

} // namespace oracle
