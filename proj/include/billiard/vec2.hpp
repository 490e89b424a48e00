#pragma once

#include <cmath>

namespace billiard {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double c) const { return {x * c, y * c}; }
    Vec2 operator/(double c) const { return {x / c, y / c}; }

    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }

    Vec2 normalized() const {
        const double n = norm();
        return {x / n, y / n};
    }
};

inline Vec2 operator*(double c, Vec2 v) { return {c * v.x, c * v.y}; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// Rotate v counterclockwise by angle (radians).
inline Vec2 rotate(Vec2 v, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Distance from point q to the closed segment [p0, p1].
inline double segment_distance(Vec2 p0, Vec2 p1, Vec2 q) {
    const Vec2 d = p1 - p0;
    const double dd = d.norm2();
    if (dd == 0.0) return (q - p0).norm();
    double t = dot(q - p0, d) / dd;
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    return (p0 + t * d - q).norm();
}

} // namespace billiard
