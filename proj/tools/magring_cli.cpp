// Command-line front end: parse a config file, run one experiment, write its
// CSV family under --out. Exit codes: 0 success, 2 config error, 3 numerical
// or I/O failure (the failing module class is named on stderr).

#include <CLI11.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "magring/config.hpp"
#include "magring/errors.hpp"
#include "magring/exec.hpp"
#include "magring/experiments.hpp"
#include "magring/krein.hpp"
#include "magring/output.hpp"
#include "magring/states.hpp"
#include "magring/version.hpp"

namespace fs = std::filesystem;
using namespace magring;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Geometry as the experiment sees it: explicit points win over the ring.
PointArray effective_points(const RunConfig& cfg) {
    return cfg.explicit_points ? *cfg.explicit_points : ring_points(cfg.ring);
}

double system_radius(const RunConfig& cfg) {
    if (!cfg.explicit_points) return cfg.ring.radius;
    double r = 0.0;
    for (const auto& p : cfg.explicit_points->pos) r = std::max(r, p.norm());
    return r > 0.0 ? r : 1.0;
}

GridSpec effective_grid(const RunConfig& cfg) {
    return cfg.grid_set ? cfg.grid : default_grid(system_radius(cfg));
}

double effective_loop(const RunConfig& cfg) {
    return cfg.loop_radius > 0.0 ? cfg.loop_radius : 0.8 * system_radius(cfg);
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

void emit(const ResultFile& rf, const std::string& path) {
    write_result_file(rf, path);
    std::printf("wrote %s (%zu rows)\n", path.c_str(), rf.rows.size());
}

SweepOptions sweep_options(const RunConfig& cfg) {
    SweepOptions so;
    so.window = cfg.window;
    so.n_lowest = cfg.n_lowest;
    return so;
}

void run_alpha_sweep(const RunConfig& cfg, const std::string& digest) {
    const SweepResult res = alpha_sweep(cfg.ring, cfg.b_fixed, cfg.alpha_from,
                                        cfg.alpha_to, cfg.steps, sweep_options(cfg));
    emit(make_spectrum_file(res, digest), out_path(cfg, "alpha_sweep.csv"));
}

void run_b_sweep(const RunConfig& cfg, const std::string& digest) {
    const auto [res, table] = b_sweep(cfg.ring, cfg.ring.alpha, cfg.b_from, cfg.b_to,
                                      cfg.steps, sweep_options(cfg));
    emit(make_spectrum_file(res, digest), out_path(cfg, "b_sweep.csv"));
    emit(make_derivative_file(table, digest), out_path(cfg, "b_sweep_derivatives.csv"));
    std::printf("richardson_max_delta = %s, max |dE/dB| = %s\n",
                format_double(table.richardson_max_delta).c_str(),
                format_double(table.max_abs_dE).c_str());
}

void run_current_field(const RunConfig& cfg, const std::string& digest) {
    const PointArray pts = effective_points(cfg);
    const bool clean = !cfg.explicit_points.has_value();
    const auto roots =
        roots_in_window(cfg.ring, pts, clean, cfg.b_fixed, cfg.window, RootOptions{});
    if (roots.empty())
        throw WindowError("current-field: no eigenvalue inside the requested window");
    const auto lowest = *std::min_element(
        roots.begin(), roots.end(),
        [](const SpectralRoot& a, const SpectralRoot& b) { return a.z0 < b.z0; });

    const FieldPoint fp{cfg.b_fixed, lowest.z0};
    EigenState st = make_state(pts, fp, null_vectors(build_lambda(pts, fp)).front(),
                               lowest.sector);
    const CurrentField field = current_grid(st, effective_grid(cfg));
    const double loop = effective_loop(cfg);
    const double circ = circulation(field, loop);
    emit(make_current_file(field, circ, loop, digest), out_path(cfg, "current_field.csv"));
    std::printf("state: z0 = %s, sector = %d, circulation = %s\n",
                format_double(lowest.z0).c_str(), lowest.sector,
                format_double(circ).c_str());
}

void run_disorder(const RunConfig& cfg, const std::string& digest) {
    DisorderOptions dop;
    dop.n_seeds = cfg.n_seeds;
    dop.base_seed = cfg.base_seed;
    dop.window = cfg.window;
    if (cfg.grid_set) {
        dop.grid = cfg.grid;
    } else {
        dop.grid.nx = 0; // let the ensemble pick the default grid for the ring
    }
    dop.loop_radius = cfg.loop_radius;

    std::vector<DisorderRun> all;
    for (double delta : cfg.delta_alphas) {
        const auto runs = disorder_ensemble(cfg.ring, cfg.b_fixed, delta, dop);
        all.insert(all.end(), runs.begin(), runs.end());
    }
    emit(make_disorder_file(all, digest), out_path(cfg, "disorder.csv"));
    emit(make_couplings_file(all, digest), out_path(cfg, "disorder_couplings.csv"));
}

void run_single_point_check(const RunConfig& cfg, const std::string& digest) {
    const PointArray pts = effective_points(cfg);
    const FieldPoint fp{cfg.b_fixed, cfg.z_probe};
    const double xi_val = xi(fp.B, fp.z);
    const LambdaMatrix lm = build_lambda(pts, fp);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(lm.m);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("single-point-check: eigenvalue solve failed");

    const int n_level = std::max(0, (int)std::lround((fp.z / std::fabs(fp.B) - 1.0) / 2.0));
    const double nearest = landau_level(fp.B, n_level);

    std::printf("B = %s, z = %s\n", format_double(fp.B).c_str(), format_double(fp.z).c_str());
    std::printf("xi(B; z) = %s\n", format_double(xi_val).c_str());
    std::printf("nearest Landau level = %s (n = %d)\n", format_double(nearest).c_str(),
                n_level);
    ResultFile rf;
    rf.header = {"config = " + digest, "xi = " + format_double(xi_val),
                 "nearest_landau_level = " + format_double(nearest)};
    rf.schema = "B,z,eig_index,lambda_eig";
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        std::printf("lambda eigenvalue %ld = %s\n", (long)i,
                    format_double(es.eigenvalues()[i]).c_str());
        rf.rows.push_back(format_double(fp.B) + "," + format_double(fp.z) + "," +
                          std::to_string(i) + "," + format_double(es.eigenvalues()[i]));
    }
    emit(rf, out_path(cfg, "single_point_check.csv"));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"point obstacles on a ring in a uniform magnetic field"};
    app.set_version_flag("--version", std::string("magring ") + version_string);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;

    struct SubSpec {
        std::string name;
        Command cmd;
        std::string help;
    };
    const std::vector<SubSpec> commands = {
        {"alpha-sweep", Command::alpha_sweep,
         "discrete spectrum vs common coupling strength at fixed B"},
        {"b-sweep", Command::b_sweep,
         "discrete spectrum vs B with dE/dB derivative table"},
        {"current-field", Command::current_field,
         "probability-current field and loop circulation of the lowest state"},
        {"disorder", Command::disorder,
         "circulation statistics under random coupling perturbations"},
        {"single-point-check", Command::single_point_check,
         "xi value and Krein matrix eigenvalues at one (B, z) point"},
    };
    for (const auto& [name, cmd, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "config file (key = value)")->required();
        sub->add_option("--out", out_dir, "output directory (overrides 'out')");
        sub->add_option("--threads", threads, "worker thread cap (overrides 'threads')");
        sub->add_option("--seed", seed, "disorder base seed (overrides 'base_seed')")
            ->each([&seed_set](const std::string&) { seed_set = true; });
        (void)cmd;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // bad invocation is a config error
    }

    try {
        std::optional<Command> chosen;
        for (const auto& [name, cmd, help] : commands)
            if (app.get_subcommand(name)->parsed()) chosen = cmd;
        RunConfig cfg = parse_config(read_file(config_path), chosen);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (threads >= 0) cfg.threads = threads;
        if (seed_set) cfg.base_seed = seed;
        cfg.canonical.clear();
        // revalidate with the effective command and overrides in place; the
        // digest then describes the run actually performed
        cfg = parse_config(serialize(cfg));
        const std::string digest = config_digest(cfg);

        set_thread_cap(cfg.threads);
        std::printf("magring %s, config digest %s\n", version_string, digest.c_str());

        switch (cfg.command) {
            case Command::alpha_sweep: run_alpha_sweep(cfg, digest); break;
            case Command::b_sweep: run_b_sweep(cfg, digest); break;
            case Command::current_field: run_current_field(cfg, digest); break;
            case Command::disorder: run_disorder(cfg, digest); break;
            case Command::single_point_check: run_single_point_check(cfg, digest); break;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error [%s] %s\n", e.kind().c_str(), e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error [unexpected] %s\n", e.what());
        return 3;
    }
    return 0;
}
