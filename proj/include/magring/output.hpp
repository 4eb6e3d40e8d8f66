#pragma once

#include <string>
#include <vector>

#include "magring/config.hpp"
#include "magring/experiments.hpp"

namespace magring {

// Shortest round-trip decimal form (std::to_chars, 17 significant digits cap,
// '.' separator, locale-free).
std::string format_double(double v);

// CSV with a '#'-prefixed header block (tool version, config digest, column
// schema, plus caller lines). The body is byte-identical across reruns of the
// same inputs. Writes are atomic: temp file in the target directory, then rename.
struct ResultFile {
    std::vector<std::string> header; // without the '# ' prefix
    std::string schema;              // comma-separated column names
    std::vector<std::string> rows;
};

void write_result_file(const ResultFile& rf, const std::string& path);

// Branch energies: axis_name, axis_value, branch_id, sector, energy;
// sorted by (branch_id, axis_value).
ResultFile make_spectrum_file(const SweepResult& result, const std::string& digest);

// Companion derivative table: B, branch_id, dE_dB, d2E_dB2.
ResultFile make_derivative_file(const DerivativeTable& table, const std::string& digest);

// Current field: x, y, jx, jy, density, masked; row-major; circulation and
// grid spec recorded in the header.
ResultFile make_current_file(const CurrentField& field, double circulation_value,
                             double loop_radius, const std::string& digest);

// Disorder ensemble summary; per-delta medians of |circulation| over the
// successful runs go into the header.
ResultFile make_disorder_file(const std::vector<DisorderRun>& runs, const std::string& digest);

// Companion table with every drawn coupling: run, delta_alpha, obstacle, alpha.
ResultFile make_couplings_file(const std::vector<DisorderRun>& runs, const std::string& digest);

} // namespace magring
