#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "magring/experiments.hpp"

namespace magring {

enum class Command { alpha_sweep, b_sweep, current_field, disorder, single_point_check };

// Fully validated run description. Parsed from a flat key = value file with
// [section] grouping; unknown keys are hard errors.
struct RunConfig {
    Command command = Command::b_sweep;

    // [geometry]
    RingSpec ring{};
    std::optional<PointArray> explicit_points; // points = x1,y1; x2,y2; ...

    // [sweep]
    double alpha_from = -1.4, alpha_to = -0.6;
    double b_from = 0.5, b_to = 2.0;
    double b_fixed = 0.5;     // current-field / disorder / single-point-check
    double z_probe = 0.0;     // single-point-check
    int steps = 61;
    int n_lowest = 8;
    WindowSpec window{};      // window = full | gap:<k> | <lo>:<hi>

    // [grid]
    GridSpec grid{};
    bool grid_set = false;
    double loop_radius = 0.0; // 0 -> 0.8 R

    // [disorder]
    std::vector<double> delta_alphas{0.01, 0.02, 0.03};
    int n_seeds = 16;
    std::uint64_t base_seed = 20260814u;

    // [run]
    int threads = 0;          // 0 = library default
    std::string out_dir = ".";

    // canonical key=value lines (sorted) of everything above; digest input
    std::vector<std::string> canonical;
};

// `force_command` (the CLI subcommand) replaces the file's command key before
// validation, so command-specific constraints track the run actually requested.
RunConfig parse_config(const std::string& text,
                       std::optional<Command> force_command = std::nullopt);

// Canonical serialization (stable ordering, 17-digit floats). Feeding it
// back through parse_config yields a digest-equal config.
std::string serialize(const RunConfig& cfg);

// FNV-1a 64 over the canonical serialization, rendered as 16 hex digits.
std::string config_digest(const RunConfig& cfg);

} // namespace magring
