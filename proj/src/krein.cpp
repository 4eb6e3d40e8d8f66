#include "magring/krein.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "magring/errors.hpp"
#include "magring/green.hpp"

namespace magring {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

double standoff_abs(double B, const RootOptions& opts) {
    return opts.standoff_rel * std::fabs(B);
}

// Shrink [lo, hi] away from Landau levels sitting within one standoff of an
// endpoint; a level strictly inside is a caller error (split first).
std::pair<double, double> clamp_window(double B, double lo, double hi,
                                       const RootOptions& opts) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw WindowError("root window: need finite lo < hi");
    const double d = standoff_abs(B, opts);
    const double babs = std::fabs(B);
    if (!(babs > 0.0)) throw DomainError("root window: field strength must be nonzero");
    for (int n = 0;; ++n) {
        const double level = babs * (2.0 * n + 1.0);
        if (level > hi + d) break;
        if (level < lo - d) continue;
        const bool at_lo = level <= lo + d;
        const bool at_hi = level >= hi - d;
        if (at_lo) lo = level + d;
        if (at_hi) hi = level - d;
        if (!at_lo && !at_hi)
            throw WindowError("root window straddles Landau level " + std::to_string(n) +
                              "; split it with scan_window");
    }
    if (!(lo < hi)) throw WindowError("root window empty after Landau-level standoff");
    return {lo, hi};
}

// All sorted eigenvalue branches of Lambda at z (ascending).
Eigen::VectorXd branches_at(const PointArray& pts, FieldPoint fp, double* scale = nullptr) {
    const LambdaMatrix lam = build_lambda(pts, fp);
    if (scale) *scale = lam.scale;
    if (pts.size() == 1) return Eigen::VectorXd::Constant(1, lam.m(0, 0).real());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(lam.m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

// Landau levels strictly inside (lo, hi), ascending.
std::vector<double> levels_inside(double B, double lo, double hi) {
    std::vector<double> out;
    const double babs = std::fabs(B);
    for (int n = 0;; ++n) {
        const double level = babs * (2.0 * n + 1.0);
        if (level >= hi) break;
        if (level > lo) out.push_back(level);
    }
    return out;
}

// Cluster bisected crossings into roots; multiplicities add within cluster_tol.
struct Crossing {
    double z = 0.0;
    double width = 0.0;
    int sector = -1;
};

template <class ResidualFn>
std::vector<SpectralRoot> cluster_roots(std::vector<Crossing> xs, double cluster_tol,
                                        ResidualFn&& residual_mu) {
    std::sort(xs.begin(), xs.end(), [](const Crossing& a, const Crossing& b) {
        return a.z < b.z;
    });
    std::vector<SpectralRoot> roots;
    for (std::size_t i = 0; i < xs.size();) {
        std::size_t j = i + 1;
        while (j < xs.size() && xs[j].z - xs[j - 1].z <= cluster_tol) ++j;
        SpectralRoot r;
        r.multiplicity = static_cast<int>(j - i);
        double zsum = 0.0;
        for (std::size_t t = i; t < j; ++t) {
            zsum += xs[t].z;
            r.residual_z = std::max(r.residual_z, xs[t].width);
        }
        r.z0 = zsum / r.multiplicity;
        r.sector = (r.multiplicity == 1) ? xs[i].sector : -1;
        r.residual_mu = residual_mu(r.z0, r.multiplicity);
        roots.push_back(r);
        i = j;
    }
    return roots;
}

// --- circulant fast path -------------------------------------------------

// First row c_p of the circulant Lambda for a clean ring; c_{N-p} = conj(c_p)
// so only half the Green values are computed.
struct CirculantRow {
    std::vector<Complex> c;
    double scale = 1.0;
};

CirculantRow circulant_row(const PointArray& pts, double alpha, FieldPoint fp) {
    const int n = static_cast<int>(pts.size());
    CirculantRow row;
    row.c.assign(n, Complex(0.0, 0.0));
    row.c[0] = alpha - xi(fp.B, fp.z);
    row.scale = std::max(1.0, std::abs(row.c[0]));
    for (int p = 1; p <= n / 2; ++p) {
        Complex g = -green(pts.pos[0], pts.pos[p], fp);
        if (2 * p == n) g = Complex(g.real(), 0.0); // antipodal entry is real
        row.c[p] = g;
        row.c[(n - p) % n] = std::conj(g);
        row.scale = std::max(row.scale, std::abs(g));
    }
    return row;
}

// mu_k = sum_p c_p exp(2 pi i k p / N), real by the Hermitian pairing.
double branch_of_row(const CirculantRow& row, int k) {
    const int n = static_cast<int>(row.c.size());
    double s = row.c[0].real();
    for (int p = 1; 2 * p < n; ++p) {
        const double phi = 2.0 * kPi * k * p / n;
        const Complex w(std::cos(phi), std::sin(phi));
        s += 2.0 * (row.c[p] * w).real();
    }
    if (n % 2 == 0) s += row.c[n / 2].real() * (k % 2 == 0 ? 1.0 : -1.0);
    return s;
}

} // namespace

PointArray ring_points(const RingSpec& spec) {
    validate(spec);
    PointArray pts;
    pts.pos.reserve(spec.n);
    pts.alpha.assign(spec.n, spec.alpha);
    for (int j = 1; j <= spec.n; ++j) {
        const double th = 2.0 * kPi * j / spec.n;
        pts.pos.push_back({spec.radius * std::cos(th), spec.radius * std::sin(th)});
    }
    return pts;
}

double alpha_from_radius(double rho) {
    if (!(rho > 0.0)) throw DomainError("alpha_from_radius: disk radius must be positive");
    return std::log(rho) / (2.0 * kPi);
}

LambdaMatrix build_lambda(const PointArray& pts, FieldPoint fp) {
    validate(pts);
    const int n = static_cast<int>(pts.size());
    LambdaMatrix lam;
    lam.fp = fp;
    lam.m.resize(n, n);
    const double x = xi(fp.B, fp.z);
    double scale = 1.0;
    for (int j = 0; j < n; ++j) {
        lam.m(j, j) = Complex(pts.alpha[j] - x, 0.0);
        scale = std::max(scale, std::fabs(pts.alpha[j] - x));
        for (int m = j + 1; m < n; ++m) {
            const Complex g = green(pts.pos[j], pts.pos[m], fp);
            lam.m(j, m) = -g;
            lam.m(m, j) = -std::conj(g);
            scale = std::max(scale, std::abs(g));
        }
    }
    lam.scale = scale;
    return lam;
}

int negative_branch_count(const PointArray& pts, FieldPoint fp) {
    const Eigen::VectorXd mu = branches_at(pts, fp);
    int count = 0;
    for (Eigen::Index k = 0; k < mu.size(); ++k)
        if (mu(k) <= 0.0) ++count;
    return count;
}

std::vector<SpectralRoot> find_roots(const PointArray& pts, double B,
                                     double window_lo, double window_hi,
                                     const RootOptions& opts) {
    validate(pts);
    const auto [lo, hi] = clamp_window(B, window_lo, window_hi, opts);
    const int nb = static_cast<int>(pts.size());

    // Scan grid dense enough that every sorted branch shows the monotone
    // + ... + - ... - sign pattern; strict decrease makes this the generic
    // outcome, so refinement only fires on near-root numerical wobble.
    int n = std::max(2, opts.initial_scan);
    std::vector<double> z;
    std::vector<Eigen::VectorXd> mu;
    for (;;) {
        z.resize(n);
        for (int i = 0; i < n; ++i) z[i] = lo + (hi - lo) * i / (n - 1.0);
        z.front() = lo;
        z.back() = hi;
        mu.assign(n, Eigen::VectorXd());
        std::vector<double> scales(n, 1.0);
        for_each_index(opts.exec, n, [&](int i) {
            mu[i] = branches_at(pts, {B, z[i]}, &scales[i]);
        });
        const double wobble = 1e-12 * *std::max_element(scales.begin(), scales.end());
        bool clean = true;
        for (int k = 0; k < nb && clean; ++k)
            for (int i = 0; i + 1 < n && clean; ++i)
                if (mu[i](k) <= 0.0 && mu[i + 1](k) > wobble) clean = false;
        if (clean) break;
        n *= 2;
        if (n > opts.max_scan)
            throw ScanResolutionError(
                "find_roots: eigenvalue branch not monotone at max scan resolution");
    }

    // Bracket: one sign change per crossing branch (z holds the left edge
    // until the bisection below replaces it with the root).
    std::vector<Crossing> hits;
    std::vector<int> hit_branch;
    for (int k = 0; k < nb; ++k) {
        if (!(mu.front()(k) > 0.0) || mu.back()(k) > 0.0) continue;
        for (int i = 0; i + 1 < n; ++i) {
            if (mu[i](k) > 0.0 && mu[i + 1](k) <= 0.0) {
                hits.push_back({z[i], z[i + 1] - z[i], -1});
                hit_branch.push_back(k);
                break;
            }
        }
    }

    const int expected = negative_branch_count(pts, {B, hi}) -
                         negative_branch_count(pts, {B, lo});
    if (static_cast<int>(hits.size()) != expected)
        throw ScanResolutionError("find_roots: crossing count disagrees with the "
                                  "negative-eigenvalue count across the window");

    for_each_index(opts.exec, static_cast<int>(hits.size()), [&](int h) {
        const int k = hit_branch[h];
        double a = hits[h].z;
        double b = a + hits[h].width;
        while (b - a > opts.z_tol) {
            const double m = 0.5 * (a + b);
            if (!(m > a && m < b)) break; // spacing at machine limit
            if (branches_at(pts, {B, m})(k) > 0.0)
                a = m;
            else
                b = m;
        }
        hits[h].z = 0.5 * (a + b);
        hits[h].width = b - a;
    });

    return cluster_roots(std::move(hits), opts.cluster_tol,
                         [&](double z0, int mult) {
                             double scale = 1.0;
                             Eigen::VectorXd m = branches_at(pts, {B, z0}, &scale);
                             std::vector<double> mags(m.size());
                             for (Eigen::Index k = 0; k < m.size(); ++k)
                                 mags[k] = std::fabs(m(k));
                             std::sort(mags.begin(), mags.end());
                             return mags[mult - 1] / scale;
                         });
}

std::pair<double, double> gap_window(const PointArray& pts, double B, int gap_index,
                                     double floor_hint, const RootOptions& opts) {
    if (gap_index < 0) throw DomainError("gap_window: gap_index >= 0 required");
    const double d = standoff_abs(B, opts);
    if (gap_index > 0)
        return {landau_level(B, gap_index - 1) + d, landau_level(B, gap_index) - d};

    const double top = landau_level(B, 0) - d;
    double floor = std::isnan(floor_hint) ? B - 40.0 * std::fabs(B) : floor_hint;
    if (!(floor < top)) throw WindowError("gap_window: floor above the lowest gap");
    for (int step = 0; step < 64; ++step) {
        if (branches_at(pts, {B, floor})(0) > 0.0) return {floor, top};
        floor = B - 2.0 * (B - floor); // double the depth below B
    }
    throw ConvergenceError("gap_window: lowest branch still negative after 64 doublings");
}

std::vector<SpectralRoot> scan_window(const PointArray& pts, double B,
                                      double window_lo, double window_hi,
                                      const RootOptions& opts) {
    if (!std::isfinite(window_lo) || !std::isfinite(window_hi) || !(window_lo < window_hi))
        throw WindowError("scan window: need finite lo < hi");
    const double d = standoff_abs(B, opts);
    std::vector<double> cuts = levels_inside(B, window_lo, window_hi);
    std::vector<SpectralRoot> all;
    double lo = window_lo;
    cuts.push_back(window_hi + 2.0 * d); // sentinel so the last segment flushes
    for (double cut : cuts) {
        const double hi = std::min(window_hi, cut - d);
        if (hi - lo > 2.0 * d) {
            auto part = find_roots(pts, B, lo, hi, opts);
            all.insert(all.end(), part.begin(), part.end());
        }
        lo = cut + d;
    }
    std::sort(all.begin(), all.end(), [](const SpectralRoot& a, const SpectralRoot& b) {
        return a.z0 < b.z0;
    });
    return all;
}

std::vector<SpectralRoot> circulant_roots(const RingSpec& spec, double B,
                                          double window_lo, double window_hi,
                                          const RootOptions& opts) {
    validate(spec);
    const auto [lo, hi] = clamp_window(B, window_lo, window_hi, opts);
    const PointArray pts = ring_points(spec);
    const int n = spec.n;

    const CirculantRow row_lo = circulant_row(pts, spec.alpha, {B, lo});
    const CirculantRow row_hi = circulant_row(pts, spec.alpha, {B, hi});

    std::vector<int> sectors;
    for (int k = 0; k < n; ++k)
        if (branch_of_row(row_lo, k) > 0.0 && !(branch_of_row(row_hi, k) > 0.0))
            sectors.push_back(k);

    std::vector<Crossing> hits(sectors.size());
    for_each_index(opts.exec, static_cast<int>(sectors.size()), [&](int h) {
        const int k = sectors[h];
        double a = lo, b = hi;
        while (b - a > opts.z_tol) {
            const double m = 0.5 * (a + b);
            if (!(m > a && m < b)) break;
            if (branch_of_row(circulant_row(pts, spec.alpha, {B, m}), k) > 0.0)
                a = m;
            else
                b = m;
        }
        hits[h] = {0.5 * (a + b), b - a, k};
    });

    std::sort(hits.begin(), hits.end(), [](const Crossing& a, const Crossing& b) {
        return a.z < b.z;
    });
    std::vector<SpectralRoot> roots;
    roots.reserve(hits.size());
    for (const Crossing& hit : hits) {
        SpectralRoot r;
        r.z0 = hit.z;
        r.multiplicity = 1;
        r.sector = hit.sector;
        r.residual_z = hit.width;
        const CirculantRow row = circulant_row(pts, spec.alpha, {B, hit.z});
        r.residual_mu = std::fabs(branch_of_row(row, hit.sector)) / row.scale;
        roots.push_back(r);
    }
    return roots;
}

std::vector<SpectralRoot> circulant_scan_window(const RingSpec& spec, double B,
                                                double window_lo, double window_hi,
                                                const RootOptions& opts) {
    if (!std::isfinite(window_lo) || !std::isfinite(window_hi) || !(window_lo < window_hi))
        throw WindowError("scan window: need finite lo < hi");
    const double d = standoff_abs(B, opts);
    std::vector<double> cuts = levels_inside(B, window_lo, window_hi);
    std::vector<SpectralRoot> all;
    double lo = window_lo;
    cuts.push_back(window_hi + 2.0 * d);
    for (double cut : cuts) {
        const double hi = std::min(window_hi, cut - d);
        if (hi - lo > 2.0 * d) {
            auto part = circulant_roots(spec, B, lo, hi, opts);
            all.insert(all.end(), part.begin(), part.end());
        }
        lo = cut + d;
    }
    std::sort(all.begin(), all.end(), [](const SpectralRoot& a, const SpectralRoot& b) {
        return a.z0 < b.z0;
    });
    return all;
}

double circulant_branch(const RingSpec& spec, FieldPoint fp, int sector) {
    validate(spec);
    if (sector < 0 || sector >= spec.n)
        throw DomainError("circulant_branch: sector out of range");
    const PointArray pts = ring_points(spec);
    return branch_of_row(circulant_row(pts, spec.alpha, fp), sector);
}

std::pair<PointArray, double> scale_system(const PointArray& pts, double B, double s) {
    if (!(s > 0.0) || !std::isfinite(s))
        throw DomainError("scale_system: scale factor must be positive");
    PointArray out = pts;
    const double shift = std::log(s) / (2.0 * kPi);
    for (auto& p : out.pos) p = s * p;
    for (auto& a : out.alpha) a += shift;
    return {out, B / (s * s)};
}

} // namespace magring
