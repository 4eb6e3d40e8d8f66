#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "magring/exec.hpp"
#include "magring/types.hpp"

namespace magring {

// Obstacle positions per the ring parameterization a_j = R (cos 2pi j/N,
// sin 2pi j/N), j = 1..N, all couplings = spec.alpha.
PointArray ring_points(const RingSpec& spec);

// Coupling constant reproducing the low-energy scattering of a hard disk
// of radius rho: alpha = ln(rho) / 2pi.
double alpha_from_radius(double rho);

// The N x N Krein matrix Lambda(z):
//   Lambda_jm = (alpha_j - xi(B; z)) delta_jm - G_B(a_j, a_m; z) (1 - delta_jm).
// Hermitian for real z in a spectral gap.
struct LambdaMatrix {
    Eigen::MatrixXcd m;
    FieldPoint fp;
    // Natural magnitude of the entries, floored at 1; the scale against
    // which root/null-vector residuals are measured (a literal matrix norm
    // vanishes at an N=1 root, which would make every residual bound empty).
    double scale = 1.0;
};

LambdaMatrix build_lambda(const PointArray& pts, FieldPoint fp);

// One discrete eigenvalue of the perturbed operator: a z where det Lambda = 0.
struct SpectralRoot {
    double z0 = 0.0;
    int multiplicity = 1;
    int sector = -1;        // circulant momentum sector, -1 when unlabeled
    double residual_z = 0.0;  // final bisection bracket width
    double residual_mu = 0.0; // |eigenvalue branch| at z0, relative to scale
};

struct RootOptions {
    int initial_scan = 64;       // scan points per gap window
    int max_scan = 1 << 14;      // refinement cap
    double z_tol = 1e-10;        // bisection bracket target (absolute in z)
    double cluster_tol = 1e-8;   // roots closer than this merge, multiplicities add
    double standoff_rel = 1e-6;  // window shrink at each Landau edge, relative to B
    Exec exec = Exec::parallel;
};

// All roots of det Lambda(z) = 0 in (window_lo, window_hi), which must lie
// strictly inside one spectral gap (WindowError otherwise). Found by
// bisecting each sorted eigenvalue branch of the Hermitian matrix: every
// branch is strictly decreasing in z inside a gap, so the k-th smallest
// eigenvalue crosses zero at most once and cannot be missed by a sign scan.
std::vector<SpectralRoot> find_roots(const PointArray& pts, double B,
                                     double window_lo, double window_hi,
                                     const RootOptions& opts = {});

// Gap windows and the wrapper that splits a window crossing Landau levels
// into per-gap segments (with the standoff applied) and unions the results.
// gap_index 0 is the window below the lowest level; its floor starts at
// floor_hint (or B - 40|B| when the hint is NaN) and extends downward by
// doubling while the lowest branch of Lambda is still negative there, so
// arbitrarily deep bound states cannot escape it.
std::pair<double, double> gap_window(const PointArray& pts, double B, int gap_index,
                                     double floor_hint = std::nan(""),
                                     const RootOptions& opts = {});
std::vector<SpectralRoot> scan_window(const PointArray& pts, double B,
                                      double window_lo, double window_hi,
                                      const RootOptions& opts = {});

// Fast path for clean rings: Lambda is circulant in the rotation-invariant
// gauge, so it diagonalizes into N momentum sectors with real branches
// mu_k(z) = sum_p Lambda_0p exp(2pi i k p / N); one scalar bisection per
// sector. Roots agree with find_roots, but coincident roots from different
// sectors stay separate entries (each multiplicity 1) so the labels survive.
std::vector<SpectralRoot> circulant_roots(const RingSpec& spec, double B,
                                          double window_lo, double window_hi,
                                          const RootOptions& opts = {});
std::vector<SpectralRoot> circulant_scan_window(const RingSpec& spec, double B,
                                                double window_lo, double window_hi,
                                                const RootOptions& opts = {});

// Sector branch value mu_k(z), exposed for tests and experiments.
double circulant_branch(const RingSpec& spec, FieldPoint fp, int sector);

// Scaling map: positions -> s a_j, couplings -> alpha_j + ln(s)/2pi,
// B -> B / s^2; the spectrum then scales by s^-2 (a tested covariance).
std::pair<PointArray, double> scale_system(const PointArray& pts, double B, double s);

// Number of negative eigenvalue branches of Lambda at z (the root counter
// behind the scan; exposed for the gap-bound test).
int negative_branch_count(const PointArray& pts, FieldPoint fp);

} // namespace magring
