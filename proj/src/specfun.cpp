#include "magring/specfun.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include "magring/errors.hpp"

namespace magring {
namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

bool near_nonpositive_integer(double x, double tol_scale = 1e-12) {
    if (x > 0.5) return false;
    const double r = std::nearbyint(x);
    return r <= 0.5 && std::fabs(x - r) <= tol_scale * std::max(1.0, std::fabs(x));
}

// Bernoulli asymptotic after shifting the argument above 14.
double digamma_shifted(double x) {
    double acc = 0.0;
    while (x < 14.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv2 = 1.0 / (x * x);
    // B_{2n}/(2n) coefficients of the expansion
    static const double coef[] = {
        1.0 / 12.0,   -1.0 / 120.0,  1.0 / 252.0,      -1.0 / 240.0,
        1.0 / 132.0,  -691.0 / 32760.0, 1.0 / 12.0,
    };
    double pw = inv2;
    double tail = 0.0;
    for (double cn : coef) {
        tail += cn * pw;
        pw *= inv2;
    }
    return acc + std::log(x) - 0.5 / x - tail;
}

} // namespace

double digamma(double x) {
    if (!std::isfinite(x)) throw DomainError("digamma: non-finite argument");
    if (near_nonpositive_integer(x)) throw DomainError("digamma: pole at non-positive integer");
    if (x >= 0.5) return digamma_shifted(x);
    // Reflection psi(x) = psi(1-x) - pi cot(pi x), with exact period reduction.
    const double r = x - std::nearbyint(x); // in [-0.5, 0.5], never 0 here
    return digamma_shifted(1.0 - x) - kPi / std::tan(kPi * r);
}

double log_gamma_abs(double x) {
    if (!std::isfinite(x)) throw DomainError("log_gamma: non-finite argument");
    if (near_nonpositive_integer(x)) throw DomainError("log_gamma: pole at non-positive integer");
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

int gamma_sign(double x) {
    if (near_nonpositive_integer(x)) throw DomainError("gamma_sign: pole at non-positive integer");
    int sign = 0;
    (void)::lgamma_r(x, &sign);
    return sign;
}

double gamma_fn(double x) {
    if (near_nonpositive_integer(x)) throw DomainError("gamma: pole at non-positive integer");
    return std::tgamma(x);
}

double laguerre(int m, int k, double x) {
    if (m < 0) throw DomainError("laguerre: degree >= 0 required");
    double lkm2 = 1.0;            // L_0
    if (m == 0) return lkm2;
    double lkm1 = k + 1.0 - x;    // L_1
    for (int i = 2; i <= m; ++i) {
        const double li = ((2.0 * i - 1.0 + k - x) * lkm1 - (i - 1.0 + k) * lkm2) / i;
        lkm2 = lkm1;
        lkm1 = li;
    }
    return lkm1;
}

namespace {

// ---- positive-a evaluation paths -------------------------------------------

// Logarithmic series around zeta = 0 (b = 1 and b = 2 are the integer-b
// degenerate cases where U picks up a ln zeta term).
double u_log_series(double a, int b, double zeta) {
    const double lz = std::log(zeta);
    double sum = 0.0;
    if (b == 1) {
        // U(a,1,z) = -(1/Gamma(a)) sum_k (a)_k / (k!)^2 z^k [ln z + psi(a+k) - 2 psi(k+1)]
        double factor = 1.0; // (a)_k z^k / (k!)^2
        double psi_ak = digamma(a);
        double psi_k1 = -0.57721566490153286060651209008240243;
        for (int k = 0; k < 600; ++k) {
            const double term = factor * (lz + psi_ak - 2.0 * psi_k1);
            sum += term;
            if (k > 4 && std::fabs(term) < 1e-18 * std::fabs(sum) + 1e-300) break;
            factor *= (a + k) * zeta / ((k + 1.0) * (k + 1.0));
            psi_ak += 1.0 / (a + k);
            psi_k1 += 1.0 / (k + 1.0);
            if (k == 599) throw ConvergenceError("kummer_u: log series (b=1) did not converge");
        }
        return -std::exp(-log_gamma_abs(a)) * gamma_sign(a) * sum;
    }
    // b = 2:
    // U(a,2,z) = 1/(Gamma(a) z)
    //   + (1/Gamma(a-1)) sum_k (a)_k/((2)_k k!) z^k [ln z + psi(a+k) - psi(k+1) - psi(k+2)]
    double factor = 1.0; // (a)_k z^k / ((2)_k k!)
    double psi_ak = digamma(a);
    double psi_k1 = -0.57721566490153286060651209008240243;
    double psi_k2 = 1.0 - 0.57721566490153286060651209008240243;
    for (int k = 0; k < 600; ++k) {
        const double term = factor * (lz + psi_ak - psi_k1 - psi_k2);
        sum += term;
        if (k > 4 && std::fabs(term) < 1e-18 * std::fabs(sum) + 1e-300) break;
        factor *= (a + k) * zeta / ((2.0 + k) * (k + 1.0));
        psi_ak += 1.0 / (a + k);
        psi_k1 += 1.0 / (k + 1.0);
        psi_k2 += 1.0 / (k + 2.0);
        if (k == 599) throw ConvergenceError("kummer_u: log series (b=2) did not converge");
    }
    const double lead = std::exp(-log_gamma_abs(a)) * gamma_sign(a) / zeta;
    double series = 0.0;
    if (!near_nonpositive_integer(a - 1.0)) // 1/Gamma(0) = 0 kills the series at a = 1
        series = std::exp(-log_gamma_abs(a - 1.0)) * gamma_sign(a - 1.0) * sum;
    return lead + series;
}

// Poincare expansion for large zeta: U ~ zeta^-a sum_k (a)_k (a-b+1)_k / (k! (-zeta)^k).
// Returns false if the series fails to reach the requested relative accuracy
// before its terms start growing.
bool u_asymptotic(double a, int b, double zeta, double& out) {
    double term = 1.0;
    double sum = term;
    double smallest = std::fabs(term);
    for (int k = 0; k < 200; ++k) {
        term *= (a + k) * (a - b + 1.0 + k) / ((k + 1.0) * (-zeta));
        if (std::fabs(term) >= smallest) break; // divergent tail reached
        sum += term;
        smallest = std::fabs(term);
        if (smallest < 1e-12 * std::fabs(sum)) {
            out = std::exp(-a * std::log(zeta)) * sum;
            return true;
        }
    }
    return false;
}

double u_positive(double a, int b, double zeta) {
    // The small-zeta log series cancels catastrophically once its terms peak
    // well above the result (growing like e^{2 sqrt(a zeta)}), so hand large a
    // to the Laplace-integral path, which is uniformly accurate there.
    if (zeta < 1.0 && a < 15.0) return u_log_series(a, b, zeta);
    if (zeta >= 30.0) {
        double v = 0.0;
        if (u_asymptotic(a, b, zeta, v)) return v;
    }
    const double log_u = log_laplace_product(a, b, zeta) - log_gamma_abs(a);
    if (log_u < -745.0) return 0.0;
    return std::exp(log_u);
}

} // namespace

double log_laplace_product(double a, int b, double zeta) {
    if (!(a > 0.0)) throw DomainError("log_laplace_product: a > 0 required");
    if (!(zeta > 0.0)) throw DomainError("log_laplace_product: zeta > 0 required");
    // Gamma(a) U(a,b,zeta) = int_0^inf e^{-zeta t} t^{a-1} (1+t)^{b-a-1} dt.
    // exp-sinh nodes t = t* exp(s - e^{-s}) centered on the integrand peak
    // t*(1 + t*) = a / zeta. Both cutoffs adapt to where the tails actually
    // die: the t^{a-1} mass for tiny a sits at log t ~ -1/a, so the lower end
    // needs a e^{-s_lo} >~ 40, and when zeta t* << 1 the integrand plateaus
    // up to t ~ 1/zeta, so the upper end needs zeta t* e^{s_hi} >~ 40.
    const double t_star = std::max(1.0, 0.5 * (std::sqrt(1.0 + 4.0 * a / zeta) - 1.0));
    const double lt_star = std::log(t_star);
    const double s_lo = -std::max(14.0, std::log(40.0 / a));
    const double s_hi = std::max(8.0, std::log(40.0 / (zeta * t_star)));
    // a-dependent part as -a log1p(1/t) so huge a stays finite; includes
    // dt/ds = t (1 + e^{-s}); works from log t when t itself underflows
    auto log_f = [&](double s) -> double {
        const double lt = lt_star + s - std::exp(-s); // log t
        const double ljac = s > -37.0 ? std::log1p(std::exp(-s)) : -s;
        if (lt <= -37.0) return a * lt + ljac; // t^{a-1} dominates, rest is O(t)
        const double t = std::exp(lt);
        return -zeta * t - a * std::log1p(1.0 / t) + (b - 1.0) * std::log1p(t) + ljac;
    };

    std::vector<double> lf; // log integrand on the current uniform grid
    double h = 0.5;
    const int n0 = static_cast<int>(std::lround((s_hi - s_lo) / h));
    lf.reserve(8192);
    for (int i = 0; i <= n0; ++i) lf.push_back(log_f(s_lo + i * h));

    auto level_log_value = [&](double step) -> double {
        double m = -std::numeric_limits<double>::infinity();
        for (double v : lf) m = std::max(m, v);
        if (!std::isfinite(m)) return m;
        double s = 0.0;
        for (std::size_t i = 0; i < lf.size(); ++i) {
            const double w = (i == 0 || i + 1 == lf.size()) ? 0.5 : 1.0;
            s += w * std::exp(lf[i] - m);
        }
        return m + std::log(s * step);
    };

    double prev = level_log_value(h);
    for (int level = 0;; ++level) {
        std::vector<double> next;
        next.reserve(lf.size() * 2 - 1);
        for (std::size_t i = 0; i + 1 < lf.size(); ++i) {
            next.push_back(lf[i]);
            next.push_back(log_f(s_lo + (2.0 * i + 1.0) * h * 0.5));
        }
        next.push_back(lf.back());
        lf.swap(next);
        h *= 0.5;
        const double cur = level_log_value(h);
        if (!std::isfinite(cur) && !std::isfinite(prev)) return cur;
        if (level >= 2 && std::fabs(cur - prev) < 1e-13 * std::max(1.0, std::fabs(cur)))
            return cur;
        prev = cur;
        if (level == 7)
            throw ConvergenceError("log_laplace_product: quadrature did not converge");
    }
}

double kummer_u(double a, int b, double zeta) {
    if (b != 1 && b != 2) throw DomainError("kummer_u: only b in {1,2} supported");
    if (!(zeta > 0.0)) throw DomainError("kummer_u: zeta > 0 required");
    if (!std::isfinite(a)) throw DomainError("kummer_u: non-finite a");

    if (a == 0.0) return 1.0;

    const double r = std::nearbyint(a);
    if (a < 0.0 && std::fabs(a - r) <= 1e-13 * std::max(1.0, std::fabs(a))) {
        const int m = static_cast<int>(-r);
        // U(-m, b, zeta) = (-1)^m m! L_m^{(b-1)}(zeta)
        double mf = 1.0;
        for (int i = 2; i <= m; ++i) mf *= i;
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        return sign * mf * laguerre(m, b - 1, zeta);
    }

    if (a > 0.0) return u_positive(a, b, zeta);

    // Negative non-integer a: downward contiguous recurrence from the
    // fractional seed pair, stable because U grows toward negative a.
    if (a < -64.0) throw DomainError("kummer_u: a < -64 not supported");
    const double frac = a - std::floor(a); // in (0,1)
    const int steps = static_cast<int>(std::lround(frac - a));
    double u_hi = u_positive(frac + 1.0, b, zeta); // U(frac+1)
    double u_lo = u_positive(frac, b, zeta);       // U(frac)
    double acur = frac;
    for (int i = 0; i < steps; ++i) {
        // U(a-1,b,z) = (2a - b + z) U(a,b,z) - a (a - b + 1) U(a+1,b,z)
        const double u_minus = (2.0 * acur - b + zeta) * u_lo - acur * (acur - b + 1.0) * u_hi;
        u_hi = u_lo;
        u_lo = u_minus;
        acur -= 1.0;
    }
    return u_lo;
}

double kummer_u_dz(double a, int b, double zeta) {
    if (b != 1) throw DomainError("kummer_u_dz: only b = 1 supported");
    if (a == 0.0) return 0.0;
    return -a * kummer_u(a + 1.0, 2, zeta);
}

} // namespace magring
