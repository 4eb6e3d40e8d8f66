#include "magring/states.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "magring/errors.hpp"

namespace magring {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

// First component of visible magnitude made real and positive; null vectors
// and amplitude vectors then have one reproducible representative per ray.
Eigen::VectorXcd phase_fixed(Eigen::VectorXcd v) {
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        const double m = std::abs(v(j));
        if (m > 1e-8) {
            v *= std::conj(v(j)) / m;
            v(j) = Complex(m, 0.0); // exact by construction
            break;
        }
    }
    return v;
}

Complex psi_raw(const EigenState& st, Vec2 x) {
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < st.points.size(); ++j)
        acc += st.d(static_cast<Eigen::Index>(j)) *
               green(x, st.points.pos[j], {st.B, st.z0});
    return acc;
}

// Radius scale of the ln r + const regime at obstacle j: stay clear of the
// neighbours and of the spectral length 1/sqrt(|B| + |z0|), below which the
// remainder of the local expansion (~ |z| r^2 ln r) is negligible.
double local_scale(const EigenState& st, int j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < st.points.size(); ++m)
        if (static_cast<int>(m) != j)
            best = std::min(best, (st.points.pos[j] - st.points.pos[m]).norm());
    if (!std::isfinite(best)) best = 1.0;
    return std::min(best, 1.0 / std::sqrt(std::fabs(st.B) + std::fabs(st.z0)));
}

} // namespace

std::vector<Eigen::VectorXcd> null_vectors(const LambdaMatrix& lm) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(lm.m);
    const double tol = 1e-8 * lm.scale;
    std::vector<Eigen::VectorXcd> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (std::fabs(es.eigenvalues()(i)) <= tol)
            out.push_back(phase_fixed(es.eigenvectors().col(i)));
    if (out.empty())
        throw NotARootError("null_vectors: smallest |eigenvalue| " +
                            std::to_string(es.eigenvalues().cwiseAbs().minCoeff()) +
                            " exceeds " + std::to_string(tol));
    return out;
}

EigenState make_state(const PointArray& pts, FieldPoint fp,
                      const Eigen::VectorXcd& d, int sector) {
    validate(pts);
    if (static_cast<std::size_t>(d.size()) != pts.size())
        throw ValidationError("make_state: one amplitude per obstacle required");
    const double n = d.norm();
    if (!(n > 0.0)) throw ValidationError("make_state: amplitude vector is zero");
    EigenState st;
    st.z0 = fp.z;
    st.B = fp.B;
    st.points = pts;
    st.sector = sector;
    st.d = phase_fixed(d / n);
    st.lambda_scale = build_lambda(pts, fp).scale;
    return st;
}

PsiValue wavefunction(const EigenState& st, Vec2 x) {
    PsiValue out{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
    for (std::size_t j = 0; j < st.points.size(); ++j) {
        const GreenValue g = green_with_gradient(x, st.points.pos[j], {st.B, st.z0});
        const Complex dj = st.d(static_cast<Eigen::Index>(j));
        out.value += dj * g.value;
        out.dx += dj * g.grad_x;
        out.dy += dj * g.grad_y;
    }
    return out;
}

BoundaryValues boundary_values(const EigenState& st, int j) {
    if (j < 0 || j >= static_cast<int>(st.points.size()))
        throw ValidationError("boundary_values: obstacle index out of range");
    const double r_local = local_scale(st, j);
    const double radii[3] = {1e-3 * r_local, 5e-4 * r_local, 2.5e-4 * r_local};

    // angular means kill every nonzero harmonic; what survives is
    // c0 ln r + c1 + O(r^2 ln r)
    Complex mean[3];
    for (int i = 0; i < 3; ++i) {
        Complex acc(0.0, 0.0);
        for (int t = 0; t < 64; ++t) {
            const double th = 2.0 * kPi * t / 64.0;
            const Vec2 x = st.points.pos[j] +
                           radii[i] * Vec2{std::cos(th), std::sin(th)};
            acc += psi_raw(st, x);
        }
        mean[i] = acc / 64.0;
    }

    const double lhalf = std::log(2.0); // ln(r_i / r_{i+1})
    const Complex c0_a = (mean[0] - mean[1]) / lhalf;
    const Complex c0_b = (mean[1] - mean[2]) / lhalf;
    const Complex c1_a = mean[1] - c0_a * std::log(radii[1]);
    const Complex c1_b = mean[2] - c0_b * std::log(radii[2]);

    BoundaryValues bv;
    // halving the radius divides the r^2 contamination by four
    bv.L0 = c0_b + (c0_b - c0_a) / 3.0;
    bv.L1 = c1_b + (c1_b - c1_a) / 3.0;

    const double drift = std::max(std::abs(c0_b - c0_a), std::abs(c1_b - c1_a));
    const double size = std::abs(bv.L0) + std::abs(bv.L1);
    if (drift > 1e-3 * std::max(size, 1e-12))
        throw FitError("boundary_values: log fit not in its asymptotic regime at "
                       "obstacle " + std::to_string(j));
    return bv;
}

Vec2 current_density(const EigenState& st, Vec2 x) {
    const PsiValue w = wavefunction(st, x);
    const double inv = 1.0 / st.norm_constant;
    const double rho = std::norm(w.value) * inv;
    const Vec2 a = vector_potential(st.B, x);
    return {2.0 * (std::conj(w.value) * w.dx).imag() * inv - 2.0 * a.x * rho,
            2.0 * (std::conj(w.value) * w.dy).imag() * inv - 2.0 * a.y * rho};
}

CurrentField current_grid(EigenState& st, const GridSpec& grid, Exec exec) {
    if (grid.nx < 2 || grid.ny < 2 || !(grid.h > 0.0))
        throw GridError("current_grid: need nx, ny >= 2 and h > 0");
    const double mask_r = grid.mask_radius > 0.0 ? grid.mask_radius : 2.0 * grid.h;

    // every obstacle pair must be resolved by a few nodes, or the masked
    // discs would swallow the geometry
    for (std::size_t j = 0; j < st.points.size(); ++j)
        for (std::size_t m = j + 1; m < st.points.size(); ++m)
            if ((st.points.pos[j] - st.points.pos[m]).norm() < 4.0 * grid.h)
                throw GridError("current_grid: obstacle spacing under four nodes");

    CurrentField field;
    field.grid = grid;
    field.grid.mask_radius = mask_r;
    const std::size_t total = static_cast<std::size_t>(grid.nx) * grid.ny;
    field.density.assign(total, 0.0);
    field.jx.assign(total, 0.0);
    field.jy.assign(total, 0.0);
    field.masked.assign(total, 0);

    std::vector<PsiValue> psi(total);
    for_each_index(exec, grid.ny, [&](int iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const Vec2 x{grid.origin.x + ix * grid.h, grid.origin.y + iy * grid.h};
            const std::size_t at = field.index(ix, iy);
            for (const auto& p : st.points.pos) {
                if ((x - p).norm() <= mask_r) {
                    field.masked[at] = 1;
                    break;
                }
            }
            if (!field.masked[at]) psi[at] = wavefunction(st, x);
        }
    });

    std::size_t n_masked = 0;
    double norm = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        if (field.masked[i])
            ++n_masked;
        else
            norm += std::norm(psi[i].value);
    }
    if (n_masked * 20 > total)
        throw GridError("current_grid: more than 5% of the grid is masked");
    norm *= grid.h * grid.h;
    if (!(norm > 0.0)) throw GridError("current_grid: state vanishes on the grid");

    field.norm_constant = norm;
    st.norm_constant = norm;
    const double inv = 1.0 / norm;
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const std::size_t at = field.index(ix, iy);
            if (field.masked[at]) continue;
            const PsiValue& w = psi[at];
            const Vec2 x{grid.origin.x + ix * grid.h, grid.origin.y + iy * grid.h};
            const Vec2 a = vector_potential(st.B, x);
            const double rho = std::norm(w.value) * inv;
            field.density[at] = rho;
            field.jx[at] = 2.0 * (std::conj(w.value) * w.dx).imag() * inv - 2.0 * a.x * rho;
            field.jy[at] = 2.0 * (std::conj(w.value) * w.dy).imag() * inv - 2.0 * a.y * rho;
        }
    }
    return field;
}

double circulation(const CurrentField& field, double loop_radius) {
    if (!(loop_radius > 0.0)) throw DomainError("circulation: loop radius must be positive");
    const GridSpec& g = field.grid;

    auto sample = [&](Vec2 p, const std::vector<double>& f) -> double {
        const double fx = (p.x - g.origin.x) / g.h;
        const double fy = (p.y - g.origin.y) / g.h;
        const int ix = static_cast<int>(std::floor(fx));
        const int iy = static_cast<int>(std::floor(fy));
        if (ix < 0 || iy < 0 || ix + 1 >= g.nx || iy + 1 >= g.ny)
            throw GridError("circulation: loop leaves the field grid");
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx)
                if (field.masked[field.index(ix + dx, iy + dy)])
                    throw GridError("circulation: loop touches a masked node");
        const double tx = fx - ix, ty = fy - iy;
        return (1.0 - ty) * ((1.0 - tx) * f[field.index(ix, iy)] +
                             tx * f[field.index(ix + 1, iy)]) +
               ty * ((1.0 - tx) * f[field.index(ix, iy + 1)] +
                     tx * f[field.index(ix + 1, iy + 1)]);
    };

    const int n = 512;
    double acc = 0.0;
    for (int t = 0; t < n; ++t) {
        const double th = 2.0 * kPi * t / n;
        const Vec2 p{loop_radius * std::cos(th), loop_radius * std::sin(th)};
        const Vec2 tangent{-std::sin(th), std::cos(th)};
        acc += sample(p, field.jx) * tangent.x + sample(p, field.jy) * tangent.y;
    }
    return acc * 2.0 * kPi * loop_radius / n;
}

GridSpec default_grid(double ring_radius) {
    if (!(ring_radius > 0.0)) throw ValidationError("default_grid: radius must be positive");
    GridSpec g;
    g.origin = {-2.0 * ring_radius, -2.0 * ring_radius};
    g.h = 0.02 * ring_radius;
    g.nx = 201;
    g.ny = 201;
    return g;
}

} // namespace magring
