#pragma once

#include <Eigen/Dense>
#include <vector>

#include "magring/exec.hpp"
#include "magring/green.hpp"
#include "magring/krein.hpp"

namespace magring {

// Eigenstate assembled from a Krein null vector:
//   psi(x) = sum_j d_j G_B(x, a_j; z0).
struct EigenState {
    double z0 = 0.0;
    Eigen::VectorXcd d;       // unit norm, first nonzero component real > 0
    PointArray points;
    double B = 1.0;
    double norm_constant = 1.0; // grid L2 norm; 1 until current_grid sets it
    int sector = -1;
    double lambda_scale = 1.0;  // residual scale carried from the root solve
};

// Orthonormal basis of the (near-)null space of lm at a root; one vector per
// multiplicity. Throws NotARootError if the smallest |eigenvalue| exceeds
// 1e-8 * lm.scale.
std::vector<Eigen::VectorXcd> null_vectors(const LambdaMatrix& lm);

EigenState make_state(const PointArray& pts, FieldPoint fp,
                      const Eigen::VectorXcd& d, int sector = -1);

struct PsiValue {
    Complex value;
    Complex dx;
    Complex dy;
};

// psi and its gradient at x (CoincidenceError at obstacle positions).
PsiValue wavefunction(const EigenState& st, Vec2 x);

// Generalized boundary values at obstacle j: psi(x) = L0 ln|x-a_j| + L1 + o(1).
// Extracted from angular means over circles r in {1e-3, 5e-4, 2.5e-4} * R_local
// (R_local = min of the nearest obstacle distance, or 1 for a single obstacle,
// and the spectral length 1/sqrt(|B| + |z0|)) by fitting c0 ln r + c1 on
// radius pairs and one Richardson step.
struct BoundaryValues {
    Complex L0;
    Complex L1;
};
BoundaryValues boundary_values(const EigenState& st, int j);

// Probability current with 2m* = hbar = 1, H = (-i grad - A)^2:
//   j(x) = 2 Im[conj(psi) grad psi] - 2 A(x) |psi|^2,
// evaluated with psi / sqrt(norm_constant).
Vec2 current_density(const EigenState& st, Vec2 x);

struct GridSpec {
    Vec2 origin{-2.0, -2.0}; // lower-left node
    double h = 0.02;
    int nx = 201;
    int ny = 201;
    double mask_radius = 0.0; // 0 means the default 2h
};

// Grid of |psi|^2 and current. Nodes within the mask radius of an obstacle
// are masked (fields zero, flag set); norm_constant is fixed so that
// sum(density) h^2 = 1 over unmasked nodes. Row-major storage, y outer.
struct CurrentField {
    GridSpec grid;
    std::vector<double> density;
    std::vector<double> jx;
    std::vector<double> jy;
    std::vector<unsigned char> masked;
    double norm_constant = 1.0;

    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * grid.nx + ix;
    }
};

CurrentField current_grid(EigenState& st, const GridSpec& grid, Exec exec = Exec::parallel);

// Circular line integral of the current along radius `loop_radius` about the
// origin: 512-point trapezoid on bilinearly interpolated samples. Positive =
// counterclockwise. GridError if the loop leaves the grid or touches masked nodes.
double circulation(const CurrentField& field, double loop_radius);

// Default grid for a ring system: square of half-width 2R, 201 x 201.
GridSpec default_grid(double ring_radius);

} // namespace magring
