#include "magring/green.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "magring/errors.hpp"
#include "magring/specfun.hpp"

namespace magring {
namespace {

constexpr double kPi = 3.141592653589793238462643383279503;
constexpr double kGammaE = 0.57721566490153286060651209008240243;
constexpr double kLargeA = 60.0; // switch to the log-space product kernel

void require_field(double B) {
    if (!(std::fabs(B) > 0.0) || !std::isfinite(B))
        throw DomainError("field strength B must be nonzero and finite");
}

} // namespace

double landau_level(double B, int n) {
    require_field(B);
    return std::fabs(B) * (2.0 * n + 1.0);
}

int gap_index_of(double B, double z) {
    require_field(B);
    const double u = (z / std::fabs(B) + 1.0) / 2.0;
    const int k = static_cast<int>(std::floor(u));
    return k < 0 ? 0 : k;
}

double spectral_a(double B, double z) {
    require_field(B);
    return (std::fabs(B) - z) / (2.0 * std::fabs(B));
}

double xi(double B, double z) {
    const double a = spectral_a(B, z);
    const double r = std::nearbyint(a);
    if (r <= 0.5 && std::fabs(a - r) <= 1e-10 * std::max(1.0, std::fabs(a)))
        throw PoleError("xi: z at a Landau level");
    return -(digamma(a) + 2.0 * kGammaE + std::log(std::fabs(B) / 2.0)) / (4.0 * kPi);
}

double green_radial(double a, double zeta) {
    if (!(zeta > 0.0)) throw DomainError("green_radial: zeta > 0 required");
    if (a <= kLargeA) return gamma_fn(a) * kummer_u(a, 1, zeta);
    const double lg = log_laplace_product(a, 1, zeta);
    if (lg < -744.0) return 0.0;
    return std::exp(lg);
}

double green_radial_dz(double a, double zeta) {
    if (!(zeta > 0.0)) throw DomainError("green_radial: zeta > 0 required");
    // d/dzeta [Gamma(a) U(a,1,zeta)] = -Gamma(a+1) U(a+1,2,zeta)
    if (a <= kLargeA) return -gamma_fn(a + 1.0) * kummer_u(a + 1.0, 2, zeta);
    const double lg = log_laplace_product(a + 1.0, 2, zeta);
    if (lg < -744.0) return 0.0;
    return -std::exp(lg);
}

namespace {

struct GreenParts {
    double a = 0.0;
    double zeta = 0.0;
    Complex phase; // exp(i (B/2) cross(x', x))
    double gauss = 0.0; // exp(-|B| r^2 / 4)
};

GreenParts green_parts(Vec2 x, Vec2 xp, FieldPoint fp) {
    require_field(fp.B);
    const Vec2 d = x - xp;
    const double r2 = d.norm2();
    if (r2 < 1e-24)
        throw CoincidenceError("green: evaluation at the source point");
    GreenParts gp;
    gp.a = spectral_a(fp.B, fp.z);
    const double r = std::nearbyint(gp.a);
    if (r <= 0.5 && std::fabs(gp.a - r) <= 1e-10 * std::max(1.0, std::fabs(gp.a)))
        throw PoleError("green: z at a Landau level");
    gp.zeta = 0.5 * std::fabs(fp.B) * r2;
    const double arg = 0.5 * fp.B * cross(xp, x);
    gp.phase = Complex(std::cos(arg), std::sin(arg));
    gp.gauss = std::exp(-0.25 * std::fabs(fp.B) * r2);
    return gp;
}

} // namespace

Complex green(Vec2 x, Vec2 xp, FieldPoint fp) {
    const GreenParts gp = green_parts(x, xp, fp);
    const double radial = green_radial(gp.a, gp.zeta);
    return (0.25 / kPi) * gp.phase * (gp.gauss * radial);
}

GreenValue green_with_gradient(Vec2 x, Vec2 xp, FieldPoint fp) {
    const GreenParts gp = green_parts(x, xp, fp);
    const double radial = green_radial(gp.a, gp.zeta);
    const double radial_dz = green_radial_dz(gp.a, gp.zeta);
    const Vec2 d = x - xp;
    const double absB = std::fabs(fp.B);

    GreenValue out;
    out.value = (0.25 / kPi) * gp.phase * (gp.gauss * radial);
    // grad = G * [ i (B/2) grad(cross(x',x)) - (|B|/2)(x - x') ]
    //        + (1/4pi) phase gauss radial'(zeta) * |B| (x - x')
    const Complex i_half_B(0.0, 0.5 * fp.B);
    const Complex common = (0.25 / kPi) * gp.phase * (gp.gauss * radial_dz) * absB;
    out.grad_x = out.value * (i_half_B * (-xp.y) - Complex(0.5 * absB * d.x)) + common * d.x;
    out.grad_y = out.value * (i_half_B * (xp.x) - Complex(0.5 * absB * d.y)) + common * d.y;
    return out;
}

} // namespace magring
