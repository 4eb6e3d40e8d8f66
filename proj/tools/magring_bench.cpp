// Compares the OpenMP kernels against the serial reference paths on the two
// hot spots: the spectral window scan and the current-field grid. Results
// must agree bitwise (both fill index-ordered buffers and reduce serially);
// timings show what the parallel schedule buys on this machine.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "magring/exec.hpp"
#include "magring/experiments.hpp"
#include "magring/krein.hpp"
#include "magring/states.hpp"

using namespace magring;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
double timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return seconds_since(t0);
}

} // namespace

int main() {
    const RingSpec ring{12, 1.0, -1.0};
    const double B = 0.5;
    const PointArray pts = ring_points(ring);

    std::printf("threads available to the parallel path: %d\n",
                thread_count(Exec::parallel));

    // --- spectral scan over the first gap ---------------------------------
    RootOptions serial_roots;
    serial_roots.exec = Exec::serial;
    RootOptions parallel_roots;
    parallel_roots.exec = Exec::parallel;

    const auto window = gap_window(pts, B, 1);
    std::vector<SpectralRoot> rs, rp;
    const double t_scan_serial =
        timed([&] { rs = scan_window(pts, B, window.first, window.second, serial_roots); });
    const double t_scan_parallel =
        timed([&] { rp = scan_window(pts, B, window.first, window.second, parallel_roots); });

    bool roots_equal = rs.size() == rp.size();
    for (std::size_t i = 0; roots_equal && i < rs.size(); ++i)
        roots_equal = rs[i].z0 == rp[i].z0 && rs[i].multiplicity == rp[i].multiplicity;
    std::printf("scan_window  (N=%d, gap 1)   serial %.3fs  parallel %.3fs  speedup %.2fx  %s\n",
                ring.n, t_scan_serial, t_scan_parallel, t_scan_serial / t_scan_parallel,
                roots_equal ? "identical" : "MISMATCH");

    // --- current field on the default grid --------------------------------
    double z_lowest = rs.front().z0;
    int sector = rs.front().sector;
    for (const auto& r : rs)
        if (r.z0 < z_lowest) {
            z_lowest = r.z0;
            sector = r.sector;
        }
    const FieldPoint fp{B, z_lowest};
    EigenState st = make_state(pts, fp, null_vectors(build_lambda(pts, fp)).front(), sector);
    const GridSpec grid = default_grid(ring.radius);

    CurrentField fs, fpar;
    const double t_grid_serial = timed([&] { fs = current_grid(st, grid, Exec::serial); });
    const double t_grid_parallel = timed([&] { fpar = current_grid(st, grid, Exec::parallel); });

    bool grid_equal = fs.norm_constant == fpar.norm_constant;
    for (std::size_t i = 0; grid_equal && i < fs.density.size(); ++i)
        grid_equal = fs.density[i] == fpar.density[i] && fs.jx[i] == fpar.jx[i] &&
                     fs.jy[i] == fpar.jy[i] && fs.masked[i] == fpar.masked[i];
    std::printf("current_grid (%dx%d nodes)  serial %.3fs  parallel %.3fs  speedup %.2fx  %s\n",
                grid.nx, grid.ny, t_grid_serial, t_grid_parallel,
                t_grid_serial / t_grid_parallel, grid_equal ? "identical" : "MISMATCH");

    if (!roots_equal || !grid_equal) {
        std::printf("FAIL: serial and parallel paths disagree\n");
        return 1;
    }
    return 0;
}
