#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "magring/krein.hpp"
#include "magring/states.hpp"

namespace magring {

// One tracked eigenvalue branch of a parameter sweep.
struct SweepPoint {
    double axis = 0.0;  // alpha or B
    double energy = 0.0;
    int multiplicity = 1;
};

struct Branch {
    int id = 0;
    int sector = -1;
    std::vector<SweepPoint> points;
};

struct SweepResult {
    std::string axis_name; // "alpha" or "B"
    std::vector<Branch> branches;
};

// Central-difference derivatives per branch, plus the half-step values the
// Richardson consistency check compares against.
struct DerivRow {
    double B = 0.0;
    double dE = 0.0;
    double d2E = 0.0;
    double dE_half = 0.0; // central difference at half step
};

struct DerivativeTable {
    double h_B = 0.0;
    std::vector<int> branch_id;
    std::vector<std::vector<DerivRow>> rows; // parallel to branch_id
    double richardson_max_delta = 0.0;       // max |dE - dE_half| over the table
    double max_abs_dE = 0.0;
};

// Window selection for sweeps: either an explicit (lo, hi) in z or a gap
// index; `full` means from the auto-extended floor below the spectrum up to
// just below 3B (the default of the spectral sweeps).
struct WindowSpec {
    enum class Kind { full, gap, explicit_range } kind = Kind::full;
    int gap = 1;
    double lo = 0.0, hi = 0.0;
};

struct SweepOptions {
    WindowSpec window{};
    int n_lowest = 8;       // branches kept (ranked by their minimum energy)
    RootOptions roots{};
    Exec exec = Exec::parallel;
};

// Spectrum vs common coupling alpha at fixed B (clean ring).
SweepResult alpha_sweep(const RingSpec& spec, double B, double alpha_lo,
                        double alpha_hi, int steps, const SweepOptions& opts = {});

// Spectrum vs B at fixed coupling, with branch continuation and a derivative
// table from an internal doubled grid (so the Richardson check needs no
// second solve). steps >= 8; B range must exclude 0.
std::pair<SweepResult, DerivativeTable> b_sweep(const RingSpec& spec, double alpha,
                                                double b_lo, double b_hi, int steps,
                                                const SweepOptions& opts = {});

// Ideal one-dimensional ring of circumference L threaded by phi flux quanta
// (2m* = 1): E_j = (2pi/L)^2 (j + phi)^2.
double ideal_ring_energy(double L, double phi, int j);

// One disorder realization: couplings alpha_j = -1 + Uniform[-da, da] drawn
// from the counter stream keyed (base_seed, run, j).
struct DisorderRun {
    std::uint64_t base_seed = 0;
    int run_index = 0;
    double delta_alpha = 0.0;
    std::vector<double> couplings;
    std::vector<SpectralRoot> roots;    // in the ring-state window at fixed B
    double lowest_energy = 0.0;
    double circulation_lowest = 0.0;
    std::string failure;                // empty on success
};

struct DisorderOptions {
    int n_seeds = 16;
    std::uint64_t base_seed = 20260814u;
    WindowSpec window{WindowSpec::Kind::gap, 1, 0.0, 0.0};
    GridSpec grid{};          // default_grid(R) when nx == 0
    double loop_radius = 0.0; // 0 means 0.8 R
    Exec exec = Exec::parallel;
};

// Ensemble at fixed B: spectra in the ring-state window plus the circulation
// of the lowest state per run (the Fig. 5 style study). Failed runs carry
// their reason, they are not dropped.
std::vector<DisorderRun> disorder_ensemble(const RingSpec& spec, double B,
                                           double delta_alpha,
                                           const DisorderOptions& opts = {});

// Helpers shared by experiments/tests.
std::pair<double, double> resolve_window(const WindowSpec& w, double B,
                                         const RootOptions& opts);
std::vector<SpectralRoot> roots_in_window(const RingSpec& spec, const PointArray& pts,
                                          bool clean_ring, double B,
                                          const WindowSpec& w, const RootOptions& opts);

} // namespace magring
