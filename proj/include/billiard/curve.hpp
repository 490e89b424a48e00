#pragma once

#include <memory>
#include <vector>

#include "billiard/vec2.hpp"

namespace billiard {

struct Harmonic {
    int index = 2;       // harmonic number, >= 2
    double cos_amp = 0.0;
    double sin_amp = 0.0;
};

/// Description of a smooth strictly convex closed curve. Construction of a
/// Curve validates convexity on a dense parameter grid and rejects specs
/// whose curvature is not strictly positive everywhere.
struct CurveSpec {
    enum class Kind { circle, ellipse, fourier_circle };

    Kind kind = Kind::circle;
    double radius = 1.0;              // circle
    double a = 1.0, b = 1.0;          // ellipse semi-axes, a >= b > 0
    double r0 = 1.0;                  // fourier_circle base radius
    std::vector<Harmonic> harmonics;  // fourier_circle perturbation

    static CurveSpec circle(double radius);
    static CurveSpec ellipse(double a, double b);
    static CurveSpec fourier_circle(double r0, std::vector<Harmonic> harmonics);
};

/// Immutable convex closed curve with arc-length parametrization.
///
/// The raw parameter t runs counterclockwise over [0, 2*pi); s(t) is the arc
/// length from t = 0. Copies share the underlying tables and are cheap; all
/// queries are const and safe for concurrent use.
class Curve {
public:
    struct LocalGeometry {
        Vec2 point;
        Vec2 tangent;      // unit, counterclockwise
        double curvature;  // > 0
    };

    explicit Curve(const CurveSpec& spec);

    const CurveSpec& spec() const;
    double length() const;    // total arc length L
    double diameter() const;  // max boundary-to-boundary distance
    double curvature_min() const;
    double curvature_max() const;
    double speed_max() const;  // max |d(position)/dt| over the grid

    Vec2 position_t(double t) const;
    Vec2 derivative_t(double t) const;  // d(position)/dt
    double speed_t(double t) const;
    double curvature_t(double t) const;

    /// Arc length s(t) for t in [0, 2*pi]; strictly increasing, s(0) = 0.
    double arclength(double t) const;

    /// Inverse of arclength; s is interpreted modulo L. Optional hint is a
    /// nearby t used to warm-start the Newton iteration.
    double parameter(double s) const;
    double parameter(double s, double hint) const;

    /// Position, unit tangent and curvature at arc length s (s modulo L).
    LocalGeometry geometry_at(double s) const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

Curve make_curve(const CurveSpec& spec);

/// Sub-arc of a curve between arc lengths s_a < s_b on one branch.
struct ArcSpec {
    double s_a = 0.0;
    double s_b = 0.0;

    double span() const { return s_b - s_a; }
};

ArcSpec make_arc(const Curve& curve, double s_a, double s_b);

/// Affine chart on an arc: u in [0, 1] -> arc length.
double arc_coordinates(const ArcSpec& arc, double u);
/// Inverse chart: arc length -> u in [0, 1].
double arc_coordinate_inverse(const ArcSpec& arc, double s);

} // namespace billiard
