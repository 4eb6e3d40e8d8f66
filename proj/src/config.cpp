#include "magring/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <string_view>

#include "magring/errors.hpp"
#include "magring/output.hpp"

namespace magring {

namespace {

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    throw ParseError("line " + std::to_string(line) + ": " + msg);
}

double to_double(std::string_view v, int line, const std::string& key) {
    double out = 0.0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end)
        parse_fail(line, key + ": '" + std::string(v) + "' is not a number");
    return out;
}

long long to_int(std::string_view v, int line, const std::string& key) {
    long long out = 0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end)
        parse_fail(line, key + ": '" + std::string(v) + "' is not an integer");
    return out;
}

std::uint64_t to_u64(std::string_view v, int line, const std::string& key) {
    std::uint64_t out = 0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end)
        parse_fail(line, key + ": '" + std::string(v) + "' is not an unsigned integer");
    return out;
}

std::vector<std::string_view> split(std::string_view v, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = v.find(sep, start);
        out.push_back(trim(v.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

Command command_from(std::string_view v, int line) {
    if (v == "alpha-sweep") return Command::alpha_sweep;
    if (v == "b-sweep") return Command::b_sweep;
    if (v == "current-field") return Command::current_field;
    if (v == "disorder") return Command::disorder;
    if (v == "single-point-check") return Command::single_point_check;
    parse_fail(line, "command: '" + std::string(v) +
                         "' is not one of alpha-sweep, b-sweep, current-field, "
                         "disorder, single-point-check");
}

const char* command_name(Command c) {
    switch (c) {
        case Command::alpha_sweep: return "alpha-sweep";
        case Command::b_sweep: return "b-sweep";
        case Command::current_field: return "current-field";
        case Command::disorder: return "disorder";
        case Command::single_point_check: return "single-point-check";
    }
    return "?";
}

WindowSpec window_from(std::string_view v, int line) {
    WindowSpec w;
    if (v == "full") {
        w.kind = WindowSpec::Kind::full;
        return w;
    }
    if (v.rfind("gap:", 0) == 0) {
        w.kind = WindowSpec::Kind::gap;
        w.gap = static_cast<int>(to_int(trim(v.substr(4)), line, "window"));
        return w;
    }
    const auto pos = v.find(':');
    if (pos == std::string_view::npos)
        parse_fail(line, "window: expected full, gap:<k>, or <lo>:<hi>, got '" +
                             std::string(v) + "'");
    w.kind = WindowSpec::Kind::explicit_range;
    w.lo = to_double(trim(v.substr(0, pos)), line, "window");
    w.hi = to_double(trim(v.substr(pos + 1)), line, "window");
    return w;
}

std::string window_text(const WindowSpec& w) {
    switch (w.kind) {
        case WindowSpec::Kind::full: return "full";
        case WindowSpec::Kind::gap: return "gap:" + std::to_string(w.gap);
        case WindowSpec::Kind::explicit_range:
            return format_double(w.lo) + ":" + format_double(w.hi);
    }
    return "?";
}

// Raw key/value sink while scanning the file; validation happens after
// everything is read so diagnostics can name fields rather than lines.
struct Raw {
    RunConfig cfg;
    std::vector<Vec2> points;
    std::vector<double> couplings;
    bool have_points = false;
    bool have_couplings = false;

    void set(const std::string& key, std::string_view val, int line) {
        if (key == "command") {
            cfg.command = command_from(val, line);
        } else if (key == "np") {
            cfg.ring.n = static_cast<int>(to_int(val, line, key));
        } else if (key == "radius") {
            cfg.ring.radius = to_double(val, line, key);
        } else if (key == "alpha") {
            cfg.ring.alpha = to_double(val, line, key);
        } else if (key == "points") {
            for (auto pair : split(val, ';')) {
                const auto xy = split(pair, ',');
                if (xy.size() != 2)
                    parse_fail(line, "points: expected 'x,y; x,y; ...', got '" +
                                         std::string(pair) + "'");
                points.push_back({to_double(xy[0], line, key), to_double(xy[1], line, key)});
            }
            have_points = true;
        } else if (key == "couplings") {
            for (auto a : split(val, ','))
                couplings.push_back(to_double(a, line, key));
            have_couplings = true;
        } else if (key == "alpha_from") {
            cfg.alpha_from = to_double(val, line, key);
        } else if (key == "alpha_to") {
            cfg.alpha_to = to_double(val, line, key);
        } else if (key == "b_from") {
            cfg.b_from = to_double(val, line, key);
        } else if (key == "b_to") {
            cfg.b_to = to_double(val, line, key);
        } else if (key == "b") {
            cfg.b_fixed = to_double(val, line, key);
        } else if (key == "z") {
            cfg.z_probe = to_double(val, line, key);
        } else if (key == "steps") {
            cfg.steps = static_cast<int>(to_int(val, line, key));
        } else if (key == "n_lowest") {
            cfg.n_lowest = static_cast<int>(to_int(val, line, key));
        } else if (key == "window") {
            cfg.window = window_from(val, line);
        } else if (key == "origin_x") {
            cfg.grid.origin.x = to_double(val, line, key);
            cfg.grid_set = true;
        } else if (key == "origin_y") {
            cfg.grid.origin.y = to_double(val, line, key);
            cfg.grid_set = true;
        } else if (key == "h") {
            cfg.grid.h = to_double(val, line, key);
            cfg.grid_set = true;
        } else if (key == "nx") {
            cfg.grid.nx = static_cast<int>(to_int(val, line, key));
            cfg.grid_set = true;
        } else if (key == "ny") {
            cfg.grid.ny = static_cast<int>(to_int(val, line, key));
            cfg.grid_set = true;
        } else if (key == "mask_radius") {
            cfg.grid.mask_radius = to_double(val, line, key);
            cfg.grid_set = true;
        } else if (key == "loop_radius") {
            cfg.loop_radius = to_double(val, line, key);
        } else if (key == "delta_alpha") {
            cfg.delta_alphas.clear();
            for (auto d : split(val, ','))
                cfg.delta_alphas.push_back(to_double(d, line, key));
        } else if (key == "n_seeds") {
            cfg.n_seeds = static_cast<int>(to_int(val, line, key));
        } else if (key == "base_seed") {
            cfg.base_seed = to_u64(val, line, key);
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(to_int(val, line, key));
        } else if (key == "out") {
            cfg.out_dir = std::string(trim(val));
        } else {
            parse_fail(line, "unknown key '" + key + "'");
        }
    }
};

[[noreturn]] void invalid(const std::string& field, const std::string& constraint) {
    throw ValidationError(field + ": " + constraint);
}

void require_finite(const std::string& field, double v) {
    if (!std::isfinite(v)) invalid(field, "finite value required");
}

void validate(RunConfig& cfg) {
    if (cfg.ring.n < 1) invalid("np", "n_points >= 1 required");
    if (!(cfg.ring.radius > 0.0) || !std::isfinite(cfg.ring.radius))
        invalid("radius", "positive ring radius required");
    require_finite("alpha", cfg.ring.alpha);
    if (cfg.explicit_points) validate(*cfg.explicit_points);

    require_finite("b", cfg.b_fixed);
    require_finite("z", cfg.z_probe);
    if (cfg.n_lowest < 0) invalid("n_lowest", ">= 0 required (0 keeps every branch)");
    if (cfg.window.kind == WindowSpec::Kind::gap && cfg.window.gap < 1)
        invalid("window", "gap index >= 1 required");
    if (cfg.window.kind == WindowSpec::Kind::explicit_range && !(cfg.window.lo < cfg.window.hi))
        invalid("window", "lo < hi required");

    const bool ring_only = cfg.command == Command::alpha_sweep ||
                           cfg.command == Command::b_sweep ||
                           cfg.command == Command::disorder;
    if (ring_only && cfg.explicit_points)
        invalid("points", std::string(command_name(cfg.command)) +
                              " sweeps a clean ring; explicit points are not accepted");

    switch (cfg.command) {
        case Command::alpha_sweep:
            if (cfg.steps < 2) invalid("steps", ">= 2 required for alpha-sweep");
            if (!(cfg.alpha_from < cfg.alpha_to))
                invalid("alpha_from", "alpha_from < alpha_to required");
            require_finite("alpha_from", cfg.alpha_from);
            require_finite("alpha_to", cfg.alpha_to);
            if (cfg.b_fixed == 0.0) invalid("b", "nonzero field required");
            break;
        case Command::b_sweep:
            if (cfg.steps < 8) invalid("steps", ">= 8 required for b-sweep");
            if (!(cfg.b_from < cfg.b_to)) invalid("b_from", "b_from < b_to required");
            if (!(cfg.b_from * cfg.b_to > 0.0))
                invalid("b_from", "field range must not cross zero");
            require_finite("b_from", cfg.b_from);
            require_finite("b_to", cfg.b_to);
            break;
        case Command::current_field:
        case Command::single_point_check:
            if (cfg.b_fixed == 0.0) invalid("b", "nonzero field required");
            break;
        case Command::disorder:
            if (cfg.b_fixed == 0.0) invalid("b", "nonzero field required");
            if (cfg.n_seeds < 1) invalid("n_seeds", ">= 1 required");
            if (cfg.delta_alphas.empty()) invalid("delta_alpha", "at least one value required");
            for (double d : cfg.delta_alphas)
                if (!std::isfinite(d) || d < 0.0)
                    invalid("delta_alpha", "finite values >= 0 required");
            break;
    }

    if (cfg.grid_set) {
        if (cfg.grid.nx < 2 || cfg.grid.ny < 2) invalid("nx", "grid needs nx, ny >= 2");
        if (!(cfg.grid.h > 0.0) || !std::isfinite(cfg.grid.h))
            invalid("h", "positive grid spacing required");
        if (cfg.grid.mask_radius < 0.0) invalid("mask_radius", ">= 0 required");
        require_finite("origin_x", cfg.grid.origin.x);
        require_finite("origin_y", cfg.grid.origin.y);
    }
    if (cfg.loop_radius < 0.0 || !std::isfinite(cfg.loop_radius))
        invalid("loop_radius", ">= 0 required (0 selects 0.8 x ring radius)");
    if (cfg.threads < 0) invalid("threads", ">= 0 required (0 keeps the library default)");
    if (cfg.out_dir.empty()) invalid("out", "output directory must not be empty");
}

std::vector<std::string> canonical_lines(const RunConfig& cfg) {
    std::vector<std::string> out;
    auto kv = [&out](const std::string& k, const std::string& v) {
        out.push_back(k + " = " + v);
    };
    kv("command", command_name(cfg.command));
    kv("np", std::to_string(cfg.ring.n));
    kv("radius", format_double(cfg.ring.radius));
    kv("alpha", format_double(cfg.ring.alpha));
    if (cfg.explicit_points) {
        std::string pts, cpl;
        for (std::size_t j = 0; j < cfg.explicit_points->size(); ++j) {
            if (j) {
                pts += "; ";
                cpl += ", ";
            }
            pts += format_double(cfg.explicit_points->pos[j].x) + "," +
                   format_double(cfg.explicit_points->pos[j].y);
            cpl += format_double(cfg.explicit_points->alpha[j]);
        }
        kv("points", pts);
        kv("couplings", cpl);
    }
    kv("alpha_from", format_double(cfg.alpha_from));
    kv("alpha_to", format_double(cfg.alpha_to));
    kv("b_from", format_double(cfg.b_from));
    kv("b_to", format_double(cfg.b_to));
    kv("b", format_double(cfg.b_fixed));
    kv("z", format_double(cfg.z_probe));
    kv("steps", std::to_string(cfg.steps));
    kv("n_lowest", std::to_string(cfg.n_lowest));
    kv("window", window_text(cfg.window));
    if (cfg.grid_set) {
        kv("origin_x", format_double(cfg.grid.origin.x));
        kv("origin_y", format_double(cfg.grid.origin.y));
        kv("h", format_double(cfg.grid.h));
        kv("nx", std::to_string(cfg.grid.nx));
        kv("ny", std::to_string(cfg.grid.ny));
        kv("mask_radius", format_double(cfg.grid.mask_radius));
    }
    kv("loop_radius", format_double(cfg.loop_radius));
    std::string das;
    for (std::size_t i = 0; i < cfg.delta_alphas.size(); ++i) {
        if (i) das += ", ";
        das += format_double(cfg.delta_alphas[i]);
    }
    kv("delta_alpha", das);
    kv("n_seeds", std::to_string(cfg.n_seeds));
    kv("base_seed", std::to_string(cfg.base_seed));
    kv("threads", std::to_string(cfg.threads));
    kv("out", cfg.out_dir);
    return out;
}

} // namespace

RunConfig parse_config(const std::string& text, std::optional<Command> force_command) {
    static const std::set<std::string, std::less<>> sections{
        "geometry", "sweep", "grid", "disorder", "run"};

    Raw raw;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line_buf;
    int line = 0;
    while (std::getline(in, line_buf)) {
        ++line;
        auto s = trim(line_buf);
        if (s.empty() || s.front() == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']') parse_fail(line, "unterminated section header");
            const auto name = trim(s.substr(1, s.size() - 2));
            if (sections.find(name) == sections.end())
                parse_fail(line, "unknown section '" + std::string(name) + "'");
            continue; // sections organize the file; the key namespace is global
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            parse_fail(line, "expected 'key = value', got '" + std::string(s) + "'");
        const std::string key{trim(s.substr(0, eq))};
        const auto val = trim(s.substr(eq + 1));
        if (key.empty()) parse_fail(line, "empty key");
        if (!seen.insert(key).second) parse_fail(line, "duplicate key '" + key + "'");
        raw.set(key, val, line);
    }

    if (force_command) raw.cfg.command = *force_command;

    if (raw.have_points) {
        PointArray pts;
        pts.pos = raw.points;
        if (raw.have_couplings) {
            if (raw.couplings.size() != raw.points.size())
                throw ValidationError("couplings: one coupling per point required (got " +
                                      std::to_string(raw.couplings.size()) + " for " +
                                      std::to_string(raw.points.size()) + " points)");
            pts.alpha = raw.couplings;
        } else {
            pts.alpha.assign(raw.points.size(), raw.cfg.ring.alpha);
        }
        raw.cfg.explicit_points = std::move(pts);
    } else if (raw.have_couplings) {
        throw ValidationError("couplings: given without points");
    }

    validate(raw.cfg);
    raw.cfg.canonical = canonical_lines(raw.cfg);
    return raw.cfg;
}

std::string serialize(const RunConfig& cfg) {
    const auto lines = cfg.canonical.empty() ? canonical_lines(cfg) : cfg.canonical;
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

std::string config_digest(const RunConfig& cfg) {
    const std::string text = serialize(cfg);
    std::uint64_t h = 1469598103934665603ull; // FNV-1a 64 offset basis
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull; // FNV prime
    }
    static const char* hex = "0123456789abcdef";
    std::string dig(16, '0');
    for (int i = 15; i >= 0; --i) {
        dig[i] = hex[h & 0xf];
        h >>= 4;
    }
    return dig;
}

} // namespace magring
