#pragma once

#include "magring/types.hpp"

namespace magring {

// Landau level energies B(2n+1); index of the gap containing z (0 = below
// the lowest level). Uses |B|.
double landau_level(double B, int n);
int gap_index_of(double B, double z);

// Spectral parameter a = (|B| - z) / (2|B|); integer-pole-free iff z is
// off the Landau levels.
double spectral_a(double B, double z);

// Regularized diagonal value xi(B; z) = -(1/4pi) [psi(a) + 2*gamma_E + ln(|B|/2)].
// Throws PoleError within ~1e-10 of a Landau level.
double xi(double B, double z);

// Product Gamma(a) * U(a, 1, zeta) evaluated without forming the factors,
// stable for the huge a (~1e5) the deep states need. Returns exact 0.0 when
// the true value underflows double range. d/dzeta variant likewise
// (equal to -Gamma(a+1) * U(a+1, 2, zeta)).
double green_radial(double a, double zeta);
double green_radial_dz(double a, double zeta);

struct GreenValue {
    Complex value;
    Complex grad_x;  // d/dx1 at the first argument
    Complex grad_y;  // d/dx2 at the first argument
};

// Magnetic Green function G_B(x, x'; z) in the circular gauge
// A = (-B x2 / 2, B x1 / 2):
//   G = (1/4pi) * exp(i (B/2) cross(x', x) - (B/4)|x-x'|^2)
//             * Gamma(a) U(a, 1, (B/2)|x-x'|^2).
// Hermitian in its arguments: G(x, x'; z) = conj(G(x', x; z)).
// Throws CoincidenceError when |x - x'| < 1e-12 and PoleError at Landau levels.
Complex green(Vec2 x, Vec2 xp, FieldPoint fp);

// Value plus gradient with respect to the first argument.
GreenValue green_with_gradient(Vec2 x, Vec2 xp, FieldPoint fp);

// Vector potential of the circular gauge (needed by the current formula).
inline Vec2 vector_potential(double B, Vec2 x) { return {-0.5 * B * x.y, 0.5 * B * x.x}; }

} // namespace magring
