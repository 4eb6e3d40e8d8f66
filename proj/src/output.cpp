#include "magring/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "magring/errors.hpp"
#include "magring/version.hpp"

namespace magring {

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v,
                                 std::chars_format::general, 17);
    if (ec != std::errc{}) throw IoError("format_double: conversion failed");
    return std::string(buf, p);
}

void write_result_file(const ResultFile& rf, const std::string& path) {
    namespace fs = std::filesystem;
    const fs::path target{path};
    const fs::path tmp{path + ".tmp"};
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << "# magring " << version_string << '\n';
        for (const auto& h : rf.header) out << "# " << h << '\n';
        out << "# columns = " << rf.schema << '\n';
        for (const auto& r : rf.rows) out << r << '\n';
        out.flush();
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move results into '" + path + "'");
    }
}

namespace {

std::string csv_text(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return out;
}

} // namespace

ResultFile make_spectrum_file(const SweepResult& result, const std::string& digest) {
    ResultFile rf;
    rf.header = {"config = " + digest, "axis = " + result.axis_name,
                 "branches = " + std::to_string(result.branches.size())};
    rf.schema = "axis_name,axis_value,branch_id,sector,energy";

    std::vector<const Branch*> order;
    order.reserve(result.branches.size());
    for (const auto& b : result.branches) order.push_back(&b);
    std::sort(order.begin(), order.end(),
              [](const Branch* a, const Branch* b) { return a->id < b->id; });
    for (const Branch* b : order)
        for (const auto& p : b->points)
            rf.rows.push_back(result.axis_name + "," + format_double(p.axis) + "," +
                              std::to_string(b->id) + "," + std::to_string(b->sector) +
                              "," + format_double(p.energy));
    return rf;
}

ResultFile make_derivative_file(const DerivativeTable& table, const std::string& digest) {
    ResultFile rf;
    rf.header = {"config = " + digest, "h_B = " + format_double(table.h_B),
                 "richardson_max_delta = " + format_double(table.richardson_max_delta),
                 "max_abs_dE_dB = " + format_double(table.max_abs_dE)};
    rf.schema = "B,branch_id,dE_dB,d2E_dB2";

    std::vector<std::size_t> order(table.branch_id.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&table](std::size_t a, std::size_t b) {
        return table.branch_id[a] < table.branch_id[b];
    });
    for (std::size_t i : order)
        for (const auto& r : table.rows[i])
            rf.rows.push_back(format_double(r.B) + "," +
                              std::to_string(table.branch_id[i]) + "," +
                              format_double(r.dE) + "," + format_double(r.d2E));
    return rf;
}

ResultFile make_current_file(const CurrentField& field, double circulation_value,
                             double loop_radius, const std::string& digest) {
    const GridSpec& g = field.grid;
    ResultFile rf;
    rf.header = {"config = " + digest,
                 "grid = origin_x=" + format_double(g.origin.x) +
                     " origin_y=" + format_double(g.origin.y) + " h=" + format_double(g.h) +
                     " nx=" + std::to_string(g.nx) + " ny=" + std::to_string(g.ny) +
                     " mask_radius=" + format_double(g.mask_radius),
                 "norm_constant = " + format_double(field.norm_constant),
                 "loop_radius = " + format_double(loop_radius),
                 "circulation_R=" + format_double(circulation_value)};
    rf.schema = "x,y,jx,jy,density,masked";
    rf.rows.reserve(static_cast<std::size_t>(g.nx) * g.ny);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const auto k = field.index(ix, iy);
            const bool m = field.masked[k] != 0;
            rf.rows.push_back(format_double(g.origin.x + ix * g.h) + "," +
                              format_double(g.origin.y + iy * g.h) + "," +
                              format_double(m ? 0.0 : field.jx[k]) + "," +
                              format_double(m ? 0.0 : field.jy[k]) + "," +
                              format_double(m ? 0.0 : field.density[k]) + "," +
                              (m ? "1" : "0"));
        }
    return rf;
}

ResultFile make_disorder_file(const std::vector<DisorderRun>& runs, const std::string& digest) {
    ResultFile rf;
    rf.header = {"config = " + digest, "runs = " + std::to_string(runs.size())};

    std::map<double, std::vector<double>> by_delta;
    for (const auto& r : runs)
        if (r.failure.empty()) by_delta[r.delta_alpha].push_back(std::fabs(r.circulation_lowest));
    for (auto& [delta, circs] : by_delta) {
        std::sort(circs.begin(), circs.end());
        const std::size_t n = circs.size();
        const double med = (n % 2) ? circs[n / 2] : 0.5 * (circs[n / 2 - 1] + circs[n / 2]);
        rf.header.push_back("median_abs_circulation[delta_alpha=" + format_double(delta) +
                            "] = " + format_double(med));
    }

    rf.schema = "run,delta_alpha,base_seed,lowest_energy,circulation,n_roots,failure";
    for (const auto& r : runs)
        rf.rows.push_back(std::to_string(r.run_index) + "," + format_double(r.delta_alpha) +
                          "," + std::to_string(r.base_seed) + "," +
                          format_double(r.lowest_energy) + "," +
                          format_double(r.circulation_lowest) + "," +
                          std::to_string(r.roots.size()) + "," + csv_text(r.failure));
    return rf;
}

ResultFile make_couplings_file(const std::vector<DisorderRun>& runs, const std::string& digest) {
    ResultFile rf;
    rf.header = {"config = " + digest};
    rf.schema = "run,delta_alpha,obstacle,alpha";
    for (const auto& r : runs)
        for (std::size_t j = 0; j < r.couplings.size(); ++j)
            rf.rows.push_back(std::to_string(r.run_index) + "," +
                              format_double(r.delta_alpha) + "," + std::to_string(j) + "," +
                              format_double(r.couplings[j]));
    return rf;
}

} // namespace magring
