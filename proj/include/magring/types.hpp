#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "magring/errors.hpp"

namespace magring {

using Complex = std::complex<double>;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::hypot(x, y); }
    // z-component of the cross product a x b
    friend double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
    friend double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
};

// Point obstacles: positions with per-point coupling constants.
struct PointArray {
    std::vector<Vec2> pos;
    std::vector<double> alpha;

    std::size_t size() const { return pos.size(); }
};

// Equidistant obstacles on a circle, common coupling.
struct RingSpec {
    int n = 12;
    double radius = 1.0;
    double alpha = -1.0;
};

// (B, z) pair at which Green function / Krein matrix things are evaluated.
struct FieldPoint {
    double B = 1.0;
    double z = 0.0;
};

inline void validate(const PointArray& pts) {
    if (pts.size() == 0)
        throw ValidationError("point array: n_points >= 1 required");
    if (pts.alpha.size() != pts.pos.size())
        throw ValidationError("point array: one coupling per position required");
    for (const auto& p : pts.pos)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw ValidationError("point array: non-finite position");
    for (double a : pts.alpha)
        if (!std::isfinite(a))
            throw ValidationError("point array: non-finite coupling");
    for (std::size_t j = 0; j < pts.size(); ++j)
        for (std::size_t m = j + 1; m < pts.size(); ++m)
            if ((pts.pos[j] - pts.pos[m]).norm() < 1e-9)
                throw CoincidenceError("point array: positions " + std::to_string(j) +
                                       " and " + std::to_string(m) + " coincide");
}

inline void validate(const RingSpec& spec) {
    if (spec.n < 1) throw ValidationError("ring spec: n_points >= 1 required");
    if (!(spec.radius > 0.0)) throw ValidationError("ring spec: radius > 0 required");
    if (!std::isfinite(spec.alpha)) throw ValidationError("ring spec: non-finite coupling");
}

} // namespace magring
