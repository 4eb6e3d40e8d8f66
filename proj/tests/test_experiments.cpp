#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "magring/errors.hpp"
#include "magring/experiments.hpp"
#include "magring/green.hpp"
#include "oracle.hpp"
#include "testutil.hpp"

using namespace magring;
using testutil::rel_err;

namespace {

SweepOptions gap1_serial(int n_lowest = 0) {
    SweepOptions o;
    o.window = {WindowSpec::Kind::gap, 1, 0.0, 0.0};
    o.n_lowest = n_lowest;
    o.exec = Exec::serial;
    return o;
}

const Branch* branch_of_sector(const SweepResult& s, int sector) {
    for (const Branch& b : s.branches)
        if (b.sector == sector) return &b;
    return nullptr;
}

double energy_at(const Branch& b, double axis) {
    for (const SweepPoint& p : b.points)
        if (std::fabs(p.axis - axis) < 1e-12) return p.energy;
    FAIL("branch has no point at axis ", axis);
    return 0.0;
}

// Scalar fallback for one obstacle: the root of xi(B;z) = alpha on an
// interval where xi is monotone increasing in z.
double scalar_coupling_root(double B, double alpha, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (xi(B, mid) < alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("b_sweep tracks the Np=24 ring band across the field range") {
    RingSpec rs{24, 1.0, -1.0};
    auto [sweep, table] = b_sweep(rs, -1.0, 0.5, 2.0, 16, gap1_serial());
    CHECK(sweep.axis_name == "B");
    REQUIRE(sweep.branches.size() == 10);
    REQUIRE(table.rows.size() == 10);

    // axis strictly increasing and contiguous on the coarse grid
    for (const Branch& b : sweep.branches) {
        REQUIRE(b.points.size() >= 2);
        for (std::size_t i = 0; i + 1 < b.points.size(); ++i)
            CHECK(b.points[i + 1].axis - b.points[i].axis == doctest::Approx(0.1).epsilon(1e-9));
        for (const SweepPoint& p : b.points) {
            CHECK(std::isfinite(p.energy));
            CHECK(p.energy > p.axis);       // inside gap 1
            CHECK(p.energy < 3.0 * p.axis);
            CHECK(p.multiplicity == 1);
        }
    }

    // ranking: branch ids ordered by minimum energy
    auto min_energy = [](const Branch& b) {
        double m = b.points.front().energy;
        for (const SweepPoint& p : b.points) m = std::min(m, p.energy);
        return m;
    };
    for (std::size_t i = 0; i + 1 < sweep.branches.size(); ++i)
        CHECK(min_energy(sweep.branches[i]) <= min_energy(sweep.branches[i + 1]));

    // frozen spot values per sector (golden from a verified run of this code)
    struct Anchor { int sector; double B, E; };
    const Anchor anchors[] = {
        {6, 0.5, 0.50000060}, {6, 1.1, 1.10010786}, {6, 2.0, 2.00429960},
        {5, 0.5, 0.50001330}, {5, 1.4, 1.40383266}, {5, 2.0, 2.02297546},
        {4, 0.5, 0.50023683}, {4, 0.8, 0.80207103}, {4, 1.7, 1.75191867},
        {3, 0.5, 0.50315260}, {3, 1.1, 1.15002574}, {3, 2.0, 2.32639148},
        {2, 0.5, 0.52799046}, {2, 1.4, 1.77549007}, {2, 2.0, 2.85749664},
        {1, 0.5, 0.64979821}, {1, 0.8, 1.15548637}, {1, 1.7, 3.07871546},
        {0, 0.5, 0.99464241}, {0, 1.1, 2.54012642}, {0, 1.4, 3.36540373},
        {0, 2.0, 4.53445225},
        {7, 0.8, 0.80000083}, {7, 2.0, 2.00066550},
        {8, 1.4, 1.40000487}, {9, 1.7, 1.70000234},
    };
    for (const Anchor& a : anchors) {
        const Branch* b = branch_of_sector(sweep, a.sector);
        REQUIRE(b != nullptr);
        CHECK(energy_at(*b, a.B) == doctest::Approx(a.E).epsilon(1e-7));
    }

    // late sectors enter the window as the gap widens, never retroactively
    CHECK(branch_of_sector(sweep, 7)->points.front().axis >= 0.7);
    CHECK(branch_of_sector(sweep, 8)->points.front().axis >= 1.1);
    CHECK(branch_of_sector(sweep, 9)->points.front().axis >= 1.6);

    // derivative rows: step equals the coarse grid step, interior rows only
    CHECK(table.h_B == doctest::Approx(0.1));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const Branch& b = sweep.branches[i];
        CHECK(table.branch_id[i] == b.id);
        REQUIRE(table.rows[i].size() + 2 == b.points.size());
        for (const DerivRow& r : table.rows[i]) {
            CHECK(r.B > b.points.front().axis);
            CHECK(r.B < b.points.back().axis);
            CHECK(std::isfinite(r.d2E));
            CHECK(r.dE > 0.0); // the whole band rides the widening gap upward
        }
    }
    CHECK(table.max_abs_dE > 2.0);
    CHECK(table.max_abs_dE < 3.5);
}

TEST_CASE("derivative-table consistency delta shrinks as the square of the step") {
    RingSpec rs{12, 1.0, -1.0};
    auto [s9, t9] = b_sweep(rs, -1.0, 0.8, 1.2, 9, gap1_serial());
    auto [s17, t17] = b_sweep(rs, -1.0, 0.8, 1.2, 17, gap1_serial());
    CHECK(t9.h_B == doctest::Approx(0.05));
    CHECK(t17.h_B == doctest::Approx(0.025));
    CHECK(t9.richardson_max_delta > 0.0);
    const double ratio = t9.richardson_max_delta / t17.richardson_max_delta;
    CHECK(ratio > 3.2);
    CHECK(ratio < 4.8);
    // the two grids see the same branches and agree at shared field values
    REQUIRE(s9.branches.size() == s17.branches.size());
    for (const Branch& b : s9.branches) {
        const Branch* fine = branch_of_sector(s17, b.sector);
        REQUIRE(fine != nullptr);
        CHECK(energy_at(*fine, b.points.back().axis) ==
              doctest::Approx(b.points.back().energy).epsilon(1e-9));
    }
}

TEST_CASE("alpha_sweep reproduces the Np=12 gap band and its coupling trend") {
    RingSpec rs{12, 1.0, -1.0};
    auto sweep = alpha_sweep(rs, 1.0, -1.2, -0.8, 5, gap1_serial());
    CHECK(sweep.axis_name == "alpha");
    REQUIRE(sweep.branches.size() == 8);

    // energies grow with the (less attractive) coupling, staying in the gap
    for (const Branch& b : sweep.branches) {
        REQUIRE(b.points.size() == 5);
        for (std::size_t i = 0; i + 1 < b.points.size(); ++i)
            CHECK(b.points[i + 1].energy > b.points[i].energy);
        for (const SweepPoint& p : b.points) {
            CHECK(p.energy > 1.0);
            CHECK(p.energy < 3.0);
        }
    }

    struct Anchor { int sector; double E; };
    const Anchor at_minus_one[] = {
        {7, 1.00000216}, {6, 1.00003017}, {5, 1.00035224}, {4, 1.00330392},
        {3, 1.02346682}, {2, 1.11821476}, {1, 1.41266365}, {0, 1.99652601},
    };
    for (const Anchor& a : at_minus_one) {
        const Branch* b = branch_of_sector(sweep, a.sector);
        REQUIRE(b != nullptr);
        CHECK(energy_at(*b, -1.0) == doctest::Approx(a.E).epsilon(1e-7));
    }

    // n_lowest keeps the lowest-ranked branches only
    auto top3 = alpha_sweep(rs, 1.0, -1.2, -0.8, 5, gap1_serial(3));
    REQUIRE(top3.branches.size() == 3);
    CHECK(top3.branches[0].sector == 7);
    CHECK(top3.branches[1].sector == 6);
    CHECK(top3.branches[2].sector == 5);
}

TEST_CASE("alpha_sweep with one obstacle matches the scalar coupling equation") {
    RingSpec rs{1, 1.0, -1.0};
    auto sweep = alpha_sweep(rs, 1.0, -1.1, -0.9, 3, gap1_serial());
    REQUIRE(sweep.branches.size() == 1);
    const Branch& b = sweep.branches.front();
    REQUIRE(b.points.size() == 3);
    for (const SweepPoint& p : b.points) {
        const double want = scalar_coupling_root(1.0, p.axis, 1.0 + 1e-9, 3.0 - 1e-9);
        CHECK(rel_err(p.energy, want) < 1e-9);
    }
}

TEST_CASE("full-window alpha_sweep keeps the strong-coupling bunch below zero") {
    RingSpec rs{12, 1.0, -1.0};
    SweepOptions opts;
    opts.n_lowest = 0;
    opts.exec = Exec::serial;
    auto sweep = alpha_sweep(rs, 1.0, -1.1, -0.9, 5, opts);
    int deep = 0;
    for (const Branch& b : sweep.branches) {
        bool neg = true;
        for (const SweepPoint& p : b.points) neg = neg && p.energy < 0.0;
        if (!neg) continue;
        ++deep;
        REQUIRE(b.points.size() == 5); // present across the whole range
        // deeper (more attractive) coupling pushes the bunch further down
        for (std::size_t i = 0; i + 1 < b.points.size(); ++i)
            CHECK(b.points[i + 1].energy > b.points[i].energy);
    }
    CHECK(deep == 12);
}

TEST_CASE("b_sweep with one obstacle is monotone: no ring, no parabola") {
    RingSpec rs{1, 1.0, -1.0};
    auto [sweep, table] = b_sweep(rs, -1.0, 0.5, 2.0, 8, gap1_serial());
    REQUIRE(sweep.branches.size() == 1);
    const Branch& b = sweep.branches.front();
    REQUIRE(b.points.size() == 8);
    for (std::size_t i = 0; i + 1 < b.points.size(); ++i)
        CHECK(b.points[i + 1].energy > b.points[i].energy);
    for (const DerivRow& r : table.rows.front()) CHECK(r.dE > 0.0);
    // spot value against the scalar equation at the left edge
    const double want = scalar_coupling_root(0.5, -1.0, 0.5 + 1e-9, 1.5 - 1e-9);
    CHECK(rel_err(b.points.front().energy, want) < 1e-9);
}

TEST_CASE("full-window b_sweep: the deep bunch stays flat while the band rides the gap") {
    RingSpec rs{6, 1.0, -1.0};
    SweepOptions opts;
    opts.n_lowest = 0;
    opts.exec = Exec::serial;
    auto [sweep, table] = b_sweep(rs, -1.0, 0.9, 1.1, 8, opts);
    REQUIRE(sweep.branches.size() == 12);

    // one-obstacle deep root: hybridization between distant deep orbitals is
    // below double precision, so every deep branch must sit on the scalar root
    const double deep_want = scalar_coupling_root(1.0, -1.0, -1e7, 1.0 - 1e-9);
    REQUIRE(deep_want < -3e5);

    int deep = 0, band = 0;
    for (std::size_t i = 0; i < sweep.branches.size(); ++i) {
        const Branch& b = sweep.branches[i];
        if (b.points.front().energy < 0.0) {
            ++deep;
            for (const SweepPoint& p : b.points)
                CHECK(rel_err(p.energy, deep_want) < 1e-6);
            for (const DerivRow& r : table.rows[i]) {
                CHECK(r.dE > 0.0);
                CHECK(r.dE < 1e-5); // slope 1/(6a), a ~ 1.8e5
            }
        } else {
            ++band;
            for (const SweepPoint& p : b.points) {
                CHECK(p.energy > p.axis);
                CHECK(p.energy < 3.0 * p.axis);
            }
            for (const DerivRow& r : table.rows[i]) CHECK(r.dE > 0.99);
        }
    }
    CHECK(deep == 6);
    CHECK(band == 6);
    for (const Branch& b : sweep.branches)
        if (b.sector == 5 && b.points.front().energy > 0.0)
            CHECK(energy_at(b, 0.9) == doctest::Approx(0.90007555).epsilon(1e-7));
}

TEST_CASE("ideal ring energies follow the closed form") {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    CHECK(ideal_ring_energy(kTwoPi, 0.0, 0) == 0.0);
    CHECK(ideal_ring_energy(kTwoPi, 0.0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ideal_ring_energy(kTwoPi, 0.5, 0) ==
          doctest::Approx(ideal_ring_energy(kTwoPi, 0.5, -1)).epsilon(1e-15));
    CHECK(ideal_ring_energy(1.0, 0.25, 2) ==
          doctest::Approx(kTwoPi * kTwoPi * 2.25 * 2.25).epsilon(1e-14));
    CHECK_THROWS_AS(ideal_ring_energy(0.0, 0.0, 1), ValidationError);
    CHECK_THROWS_AS(ideal_ring_energy(-1.0, 0.0, 1), ValidationError);
    CHECK_THROWS_AS(ideal_ring_energy(kTwoPi, std::nan(""), 1), ValidationError);
}

TEST_CASE("window resolution and its refusal cases") {
    RootOptions ro;
    WindowSpec ex{WindowSpec::Kind::explicit_range, 1, 0.25, 0.75};
    auto [lo, hi] = resolve_window(ex, 1.0, ro);
    CHECK(lo == 0.25);
    CHECK(hi == 0.75);
    ex.lo = 0.75;
    CHECK_THROWS_AS(resolve_window(ex, 1.0, ro), ValidationError);

    WindowSpec g2{WindowSpec::Kind::gap, 2, 0.0, 0.0};
    auto [glo, ghi] = resolve_window(g2, 1.0, ro);
    CHECK(glo == doctest::Approx(3.0 + ro.standoff_rel).epsilon(1e-12));
    CHECK(ghi == doctest::Approx(5.0 - ro.standoff_rel).epsilon(1e-12));
    auto [blo, bhi] = resolve_window({WindowSpec::Kind::gap, 1, 0.0, 0.0}, 2.0, ro);
    CHECK(blo == doctest::Approx(2.0 + 2.0 * ro.standoff_rel).epsilon(1e-12));
    CHECK(bhi == doctest::Approx(6.0 - 2.0 * ro.standoff_rel).epsilon(1e-12));

    CHECK_THROWS_AS(resolve_window({WindowSpec::Kind::gap, 0, 0.0, 0.0}, 1.0, ro), DomainError);
    CHECK_THROWS_AS(resolve_window({WindowSpec::Kind::full, 1, 0.0, 0.0}, 1.0, ro), DomainError);

    // the full window is handled by roots_in_window: deep root plus gap band
    RingSpec rs{1, 1.0, -1.0};
    RootOptions serial;
    serial.exec = Exec::serial;
    auto roots = roots_in_window(rs, ring_points(rs), true, 1.0,
                                 {WindowSpec::Kind::full, 1, 0.0, 0.0}, serial);
    REQUIRE(roots.size() == 2);
    CHECK(roots.front().z0 < -3e5);
    CHECK(roots.back().z0 > 1.0);
    CHECK(roots.back().z0 < 3.0);
}

TEST_CASE("sweep argument validation") {
    RingSpec rs{12, 1.0, -1.0};
    CHECK_THROWS_AS(b_sweep(rs, -1.0, 0.5, 2.0, 7, gap1_serial()), ValidationError);
    CHECK_THROWS_AS(b_sweep(rs, -1.0, 2.0, 0.5, 16, gap1_serial()), ValidationError);
    CHECK_THROWS_AS(b_sweep(rs, -1.0, -0.5, 0.5, 16, gap1_serial()), ValidationError);
    CHECK_THROWS_AS(alpha_sweep(rs, 1.0, -1.0, -1.0, 5, gap1_serial()), ValidationError);
    CHECK_THROWS_AS(alpha_sweep(rs, 1.0, -1.2, -0.8, 1, gap1_serial()), ValidationError);
    RingSpec bad{0, 1.0, -1.0};
    CHECK_THROWS_AS(alpha_sweep(bad, 1.0, -1.2, -0.8, 5, gap1_serial()), ValidationError);
}

TEST_CASE("disorder ensemble is deterministic and honors the coupling law") {
    const RingSpec rs{12, 1.0, -1.0};
    DisorderOptions dop;
    dop.n_seeds = 2;
    dop.grid = {{-2.0, -2.0}, 4.0 / 60.0, 61, 61, 0.0};
    dop.loop_radius = 0.75; // keep the loop's bilinear stencil clear of the masks
    dop.exec = Exec::serial;

    // zero width: couplings pinned at the center, energies bit-identical
    auto clean = disorder_ensemble(rs, 0.5, 0.0, dop);
    REQUIRE(clean.size() == 2);
    for (const DisorderRun& r : clean) {
        CHECK(r.failure.empty());
        REQUIRE(r.couplings.size() == 12);
        for (double a : r.couplings) CHECK(a == -1.0);
        CHECK(r.delta_alpha == 0.0);
        CHECK(r.base_seed == dop.base_seed);
    }
    CHECK(clean[0].lowest_energy == clean[1].lowest_energy);
    CHECK(clean[0].circulation_lowest == clean[1].circulation_lowest);
    CHECK(clean[0].lowest_energy == doctest::Approx(0.50000717).epsilon(1e-7));
    CHECK(clean[0].circulation_lowest != 0.0);

    // repeated call: bit-identical draws and results; runs differ from each other
    auto e1 = disorder_ensemble(rs, 0.5, 0.02, dop);
    auto e2 = disorder_ensemble(rs, 0.5, 0.02, dop);
    REQUIRE(e1.size() == 2);
    for (std::size_t r = 0; r < e1.size(); ++r) {
        CHECK(e1[r].run_index == static_cast<int>(r));
        REQUIRE(e1[r].couplings.size() == 12);
        for (std::size_t j = 0; j < 12; ++j) {
            CHECK(e1[r].couplings[j] == e2[r].couplings[j]);
            CHECK(e1[r].couplings[j] >= -1.02);
            CHECK(e1[r].couplings[j] <= -0.98);
        }
        CHECK(e1[r].lowest_energy == e2[r].lowest_energy);
        CHECK(e1[r].circulation_lowest == e2[r].circulation_lowest);
        CHECK(e1[r].failure.empty());
        REQUIRE(!e1[r].roots.empty());
        CHECK(e1[r].lowest_energy == e1[r].roots.front().z0);
    }
    CHECK(e1[0].couplings != e1[1].couplings);

    // parallel execution cannot change counter-based draws or results
    DisorderOptions par = dop;
    par.exec = Exec::parallel;
    auto ep = disorder_ensemble(rs, 0.5, 0.02, par);
    for (std::size_t r = 0; r < ep.size(); ++r) {
        CHECK(ep[r].couplings == e1[r].couplings);
        CHECK(ep[r].lowest_energy == e1[r].lowest_energy);
        CHECK(ep[r].circulation_lowest == e1[r].circulation_lowest);
    }

    CHECK_THROWS_AS(disorder_ensemble(rs, 0.5, -0.01, dop), ValidationError);
    DisorderOptions none = dop;
    none.n_seeds = 0;
    CHECK_THROWS_AS(disorder_ensemble(rs, 0.5, 0.01, none), ValidationError);
}

TEST_CASE("disorder runs record failures instead of dropping them") {
    const RingSpec rs{12, 1.0, -1.0};
    DisorderOptions dop;
    dop.n_seeds = 2;
    dop.grid = {{-2.0, -2.0}, 4.0, 1, 1, 0.0}; // unusable grid: too coarse
    dop.exec = Exec::serial;
    auto runs = disorder_ensemble(rs, 0.5, 0.01, dop);
    REQUIRE(runs.size() == 2);
    for (const DisorderRun& r : runs) {
        CHECK(!r.failure.empty());
        REQUIRE(r.couplings.size() == 12); // draws recorded before the attempt
        CHECK(r.lowest_energy == doctest::Approx(0.50000717).epsilon(1e-5));
        CHECK(r.circulation_lowest == 0.0);
    }
}

TEST_CASE("lowest-state circulation keeps one sign while its branch slope keeps one") {
    const RingSpec rs{12, 1.0, -1.0};
    const GridSpec grid{{-2.0, -2.0}, 4.0 / 60.0, 61, 61, 0.0};
    const PointArray pts = ring_points(rs);
    std::vector<double> circs;
    for (double B : {0.5, 1.1}) {
        auto w = gap_window(pts, B, 1);
        RootOptions serial;
        serial.exec = Exec::serial;
        auto roots = circulant_scan_window(rs, B, w.first, w.second, serial);
        REQUIRE(!roots.empty());
        auto nv = null_vectors(build_lambda(pts, {B, roots.front().z0}));
        EigenState st = make_state(pts, {B, roots.front().z0}, nv.front(), roots.front().sector);
        auto field = current_grid(st, grid, Exec::serial);
        circs.push_back(circulation(field, 0.75));
    }
    REQUIRE(circs.size() == 2);
    CHECK(circs[0] != 0.0);
    // one consistent sign for the lowest state wherever the branch slope has one
    CHECK(std::signbit(circs[0]) == std::signbit(circs[1]));

    // and the slope of the lowest branch is single-signed over the same range
    auto [sweep, table] = b_sweep(rs, -1.0, 0.5, 1.1, 9, gap1_serial());
    bool any_row = false;
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        if (table.branch_id[i] == sweep.branches.front().id)
            for (const DerivRow& r : table.rows[i]) {
                any_row = true;
                CHECK(r.dE > 0.0);
            }
    CHECK(any_row);
}

} // TEST_SUITE
