#pragma once

#include <vector>

#include "billiard/curve.hpp"

namespace billiard {

/// Phase coordinates of an inward unit tangent vector at the boundary:
/// arc length s in [0, L) and angle phi in (0, pi) measured from the
/// positive (counterclockwise) tangent direction.
struct PhasePoint {
    double s = 0.0;
    double phi = 0.0;
};

/// Smallest admitted phi; the map is unspecified closer to tangency.
inline constexpr double kPhiCap = 1e-8;

/// One step of the billiard ball map: follow the chord from x, reflect with
/// equal angles at the next boundary intersection.
PhasePoint next_collision(const Curve& curve, PhasePoint x);

/// n iterations of next_collision; result has n+1 entries starting at x0.
std::vector<PhasePoint> orbit(const Curve& curve, PhasePoint x0, int n);

/// Jacobian determinant of the map in the coordinates (s, y), y = -cos(phi),
/// estimated by central differences with step h. The invariant area form is
/// dy ^ ds, so the exact value is 1.
double symplectic_check(const Curve& curve, PhasePoint x, double h = 1e-5);

} // namespace billiard
