#include "magring/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "magring/errors.hpp"
#include "magring/green.hpp"
#include "magring/rng.hpp"

namespace magring {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

// Which spectral gap z sits in: 0 below the lowest Landau level, g between
// levels g-1 and g. Together with the momentum sector this identifies a
// branch, because a sector's eigenvalue is monotone inside a gap and can
// host at most one root there.
int gap_of(double B, double z) {
    const double ab = std::fabs(B);
    return z < ab ? 0 : static_cast<int>((z / ab + 1.0) / 2.0);
}

struct BranchTrace {
    int sector = -1;
    std::vector<int> step;    // grid indices where the branch is present
    std::vector<double> axis;
    std::vector<double> energy;
    std::vector<int> mult;
};

// Accumulate roots of one grid point into keyed traces, insisting that every
// branch occupies a contiguous index range (a key that vanishes and
// reappears has no well-defined identity).
void add_step(std::map<std::pair<int, int>, BranchTrace>& traces, int step,
              double axis_value, double B, const std::vector<SpectralRoot>& roots) {
    for (const SpectralRoot& r : roots) {
        const std::pair<int, int> key{r.sector, gap_of(B, r.z0)};
        BranchTrace& t = traces[key];
        t.sector = r.sector;
        if (!t.step.empty() && t.step.back() != step - 1)
            throw ContinuationError(
                "branch tracking: sector " + std::to_string(r.sector) +
                " leaves the window and re-enters; shrink the step size");
        if (!t.step.empty() && t.step.back() == step)
            throw ContinuationError(
                "branch tracking: two roots share sector " + std::to_string(r.sector) +
                " and gap " + std::to_string(key.second) + " in one window");
        // continuity guard: a step increment far out of line with the branch's
        // recent history means the tracker glued unrelated roots together.
        // The median is local (trailing window) because legitimate branches
        // can grow geometrically over a long sweep (deep states vs alpha).
        if (t.energy.size() >= 4) {
            const std::size_t w = std::min<std::size_t>(5, t.energy.size() - 1);
            std::vector<double> inc(w);
            for (std::size_t i = 0; i < w; ++i) {
                const std::size_t k = t.energy.size() - 1 - w + i;
                inc[i] = std::fabs(t.energy[k + 1] - t.energy[k]);
            }
            std::nth_element(inc.begin(), inc.begin() + inc.size() / 2, inc.end());
            const double med = inc[inc.size() / 2];
            const double jump = std::fabs(r.z0 - t.energy.back());
            if (jump > 5.0 * med + 1e-9 * (1.0 + std::fabs(r.z0)))
                throw ContinuationError(
                    "branch tracking: energy jump " + std::to_string(jump) +
                    " in sector " + std::to_string(r.sector) +
                    " exceeds 5x the local median increment; shrink the step size");
        }
        t.step.push_back(step);
        t.axis.push_back(axis_value);
        t.energy.push_back(r.z0);
        t.mult.push_back(r.multiplicity);
    }
}

// Rank traces by their lowest energy, keep n_lowest, emit ids in that order.
std::vector<BranchTrace> ranked(std::map<std::pair<int, int>, BranchTrace>&& traces,
                                int n_lowest) {
    std::vector<BranchTrace> all;
    all.reserve(traces.size());
    for (auto& [key, t] : traces) all.push_back(std::move(t));
    std::stable_sort(all.begin(), all.end(), [](const BranchTrace& a, const BranchTrace& b) {
        return *std::min_element(a.energy.begin(), a.energy.end()) <
               *std::min_element(b.energy.begin(), b.energy.end());
    });
    if (n_lowest > 0 && static_cast<int>(all.size()) > n_lowest) all.resize(n_lowest);
    return all;
}

} // namespace

std::pair<double, double> resolve_window(const WindowSpec& w, double B,
                                         const RootOptions& opts) {
    switch (w.kind) {
    case WindowSpec::Kind::explicit_range:
        if (!(w.lo < w.hi))
            throw ValidationError("window: explicit range needs lo < hi");
        return {w.lo, w.hi};
    case WindowSpec::Kind::gap: {
        if (w.gap < 1)
            throw DomainError("window: gap 0 depends on the obstacle set; "
                              "use roots_in_window");
        const double d = opts.standoff_rel * std::fabs(B);
        return {landau_level(B, w.gap - 1) + d, landau_level(B, w.gap) - d};
    }
    case WindowSpec::Kind::full:
        throw DomainError("window: the full window depends on the obstacle set; "
                          "use roots_in_window");
    }
    throw DomainError("window: unknown kind");
}

std::vector<SpectralRoot> roots_in_window(const RingSpec& spec, const PointArray& pts,
                                          bool clean_ring, double B,
                                          const WindowSpec& w, const RootOptions& opts) {
    double lo = 0.0, hi = 0.0;
    if (w.kind == WindowSpec::Kind::full) {
        lo = gap_window(pts, B, 0, std::nan(""), opts).first;
        hi = landau_level(B, 1) - opts.standoff_rel * std::fabs(B);
    } else if (w.kind == WindowSpec::Kind::gap && w.gap == 0) {
        std::tie(lo, hi) = gap_window(pts, B, 0, std::nan(""), opts);
    } else {
        std::tie(lo, hi) = resolve_window(w, B, opts);
    }
    return clean_ring ? circulant_scan_window(spec, B, lo, hi, opts)
                      : scan_window(pts, B, lo, hi, opts);
}

SweepResult alpha_sweep(const RingSpec& spec, double B, double alpha_lo,
                        double alpha_hi, int steps, const SweepOptions& opts) {
    validate(spec);
    if (steps < 2) throw ValidationError("alpha_sweep: steps >= 2 required");
    if (!(alpha_lo < alpha_hi)) throw ValidationError("alpha_sweep: need alpha_lo < alpha_hi");

    std::vector<std::vector<SpectralRoot>> per_step(steps);
    std::vector<double> axis(steps);
    for (int i = 0; i < steps; ++i)
        axis[i] = alpha_lo + (alpha_hi - alpha_lo) * i / (steps - 1);
    for_each_index(opts.exec, steps, [&](int i) {
        RingSpec si = spec;
        si.alpha = axis[i];
        per_step[i] = roots_in_window(si, ring_points(si), true, B, opts.window, opts.roots);
    });

    std::map<std::pair<int, int>, BranchTrace> traces;
    for (int i = 0; i < steps; ++i) add_step(traces, i, axis[i], B, per_step[i]);

    SweepResult out;
    out.axis_name = "alpha";
    int id = 0;
    for (BranchTrace& t : ranked(std::move(traces), opts.n_lowest)) {
        Branch b;
        b.id = id++;
        b.sector = t.sector;
        for (std::size_t k = 0; k < t.step.size(); ++k)
            b.points.push_back({t.axis[k], t.energy[k], t.mult[k]});
        out.branches.push_back(std::move(b));
    }
    return out;
}

std::pair<SweepResult, DerivativeTable> b_sweep(const RingSpec& spec, double alpha,
                                                double b_lo, double b_hi, int steps,
                                                const SweepOptions& opts) {
    validate(spec);
    if (steps < 8) throw ValidationError("b_sweep: steps >= 8 required");
    if (!(b_lo < b_hi)) throw ValidationError("b_sweep: need b_lo < b_hi");
    if (!(b_lo * b_hi > 0.0))
        throw ValidationError("b_sweep: the B range must exclude 0");

    RingSpec rs = spec;
    rs.alpha = alpha;

    // doubled grid: even indices are the reported sweep, odd ones feed the
    // half-step derivative check
    const int fine_n = 2 * steps - 1;
    const double delta = (b_hi - b_lo) / (fine_n - 1);
    std::vector<std::vector<SpectralRoot>> per_fine(fine_n);
    std::vector<double> baxis(fine_n);
    for (int m = 0; m < fine_n; ++m) baxis[m] = b_lo + delta * m;
    for_each_index(opts.exec, fine_n, [&](int m) {
        per_fine[m] =
            roots_in_window(rs, ring_points(rs), true, baxis[m], opts.window, opts.roots);
    });

    std::map<std::pair<int, int>, BranchTrace> traces;
    for (int m = 0; m < fine_n; ++m) {
        // the gap label must not depend on B through the window edges moving:
        // key against the midpoint field is wrong; each root is keyed at its
        // own B, which is stable because roots stay inside one gap
        add_step(traces, m, baxis[m], baxis[m], per_fine[m]);
    }

    SweepResult sweep;
    sweep.axis_name = "B";
    DerivativeTable table;
    table.h_B = 2.0 * delta;

    int id = 0;
    for (BranchTrace& t : ranked(std::move(traces), opts.n_lowest)) {
        Branch b;
        b.id = id;
        b.sector = t.sector;
        for (std::size_t k = 0; k < t.step.size(); ++k)
            if (t.step[k] % 2 == 0)
                b.points.push_back({t.axis[k], t.energy[k], t.mult[k]});
        if (b.points.empty()) continue; // lived only between coarse nodes

        std::vector<DerivRow> rows;
        const int first = t.step.front(), last = t.step.back();
        for (std::size_t k = 0; k < t.step.size(); ++k) {
            const int m = t.step[k];
            if (m % 2 != 0 || m - 2 < first || m + 2 > last) continue;
            const std::size_t at = k; // contiguous: step[k] == first + k
            DerivRow row;
            row.B = t.axis[at];
            row.dE = (t.energy[at + 2] - t.energy[at - 2]) / (2.0 * table.h_B);
            row.dE_half = (t.energy[at + 1] - t.energy[at - 1]) / table.h_B;
            row.d2E = (t.energy[at + 2] - 2.0 * t.energy[at] + t.energy[at - 2]) /
                      (table.h_B * table.h_B);
            table.richardson_max_delta =
                std::max(table.richardson_max_delta, std::fabs(row.dE - row.dE_half));
            table.max_abs_dE = std::max(table.max_abs_dE, std::fabs(row.dE));
            rows.push_back(row);
        }
        table.branch_id.push_back(id);
        table.rows.push_back(std::move(rows));
        sweep.branches.push_back(std::move(b));
        ++id;
    }
    return {std::move(sweep), std::move(table)};
}

double ideal_ring_energy(double L, double phi, int j) {
    if (!(L > 0.0)) throw ValidationError("ideal_ring_energy: circumference L > 0 required");
    if (!std::isfinite(phi)) throw ValidationError("ideal_ring_energy: non-finite flux");
    const double k = (2.0 * kPi / L) * (j + phi);
    return k * k;
}

std::vector<DisorderRun> disorder_ensemble(const RingSpec& spec, double B,
                                           double delta_alpha,
                                           const DisorderOptions& opts) {
    validate(spec);
    if (!(delta_alpha >= 0.0) || !std::isfinite(delta_alpha))
        throw ValidationError("disorder_ensemble: delta_alpha >= 0 required");
    if (opts.n_seeds < 1) throw ValidationError("disorder_ensemble: n_seeds >= 1 required");

    const GridSpec grid = opts.grid.nx == 0 ? default_grid(spec.radius) : opts.grid;
    const double loop_r = opts.loop_radius > 0.0 ? opts.loop_radius : 0.8 * spec.radius;
    const PointArray base = ring_points(spec);

    std::vector<DisorderRun> out(opts.n_seeds);
    for_each_index(opts.exec, opts.n_seeds, [&](int run) {
        DisorderRun dr;
        dr.base_seed = opts.base_seed;
        dr.run_index = run;
        dr.delta_alpha = delta_alpha;
        PointArray pts = base;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            const double u = uniform01(opts.base_seed, static_cast<std::uint64_t>(run), j);
            pts.alpha[j] = spec.alpha + delta_alpha * (2.0 * u - 1.0);
            dr.couplings.push_back(pts.alpha[j]);
        }
        try {
            RootOptions ropts;
            ropts.exec = Exec::serial; // the ensemble is the parallel axis
            dr.roots = roots_in_window(spec, pts, false, B, opts.window, ropts);
            if (dr.roots.empty()) {
                dr.failure = "no root in the window";
            } else {
                dr.lowest_energy = dr.roots.front().z0;
                const auto nv = null_vectors(build_lambda(pts, {B, dr.lowest_energy}));
                EigenState st = make_state(pts, {B, dr.lowest_energy}, nv[0]);
                const CurrentField field = current_grid(st, grid, Exec::serial);
                dr.circulation_lowest = circulation(field, loop_r);
            }
        } catch (const std::exception& e) {
            dr.failure = e.what();
        }
        out[run] = std::move(dr);
    });
    return out;
}

} // namespace magring
