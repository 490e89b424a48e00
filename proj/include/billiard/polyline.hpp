#pragma once

#include <span>
#include <vector>

#include "billiard/lazutkin.hpp"

namespace billiard {

/// Inscribed polyline from A to B with n chords and vertices on the arc.
/// An accepted solve is a critical point of total length, which is exactly
/// the equal-angle reflection law at every interior vertex.
struct Trajectory {
    int n = 0;
    std::vector<double> vertex_s;      // n+1 strictly increasing arc lengths
    std::vector<double> vertex_sigma;  // sigma images, 0 ... 1
    std::vector<double> phi;           // n+1 phase angles along the orbit
    double total_length = 0.0;
    double reflection_residual = 0.0;  // max interior |<T(s_i), u_i - u_{i+1}>|
    int iterations = 0;
    bool boundary_stick = false;  // a vertex within 1e-6 * span of an endpoint
};

struct SolveOptions {
    double tol_grad = 1e-12;  // gradient max-norm acceptance
    int max_iter = 200;
};

/// Interior starting positions: the sigma equipartition points Q_1..Q_{n-1}.
std::vector<double> initial_guess(const SigmaMap& sm, int n);

/// Total chord length of the polyline through the given vertices.
double polyline_length(const Curve& curve, std::span<const double> vertex_s);

/// Derivative of total length with respect to each interior vertex:
/// component i is <T(s_i), u_i - u_{i+1}> with u_i the unit vector along
/// chord i. Zero exactly at equal-angle configurations.
std::vector<double> length_gradient(const Curve& curve, std::span<const double> vertex_s);

/// Newton solve for the minimal inscribed polyline, starting from the sigma
/// equipartition guess.
Trajectory solve_min_polyline(const Curve& curve, const SigmaMap& sm, int n,
                              SolveOptions options = {});

/// Exhaustive grid search over interior vertex placements; n in {2, 3}.
/// Returns the extremal (equal-angle) configuration, which on the admitted
/// convex arcs is the length maximum over ordered vertices. Test oracle for
/// the solver; cost grows as grid_size^(n-1).
Trajectory brute_force_min(const Curve& curve, const SigmaMap& sm, int n,
                           int grid_size, int threads = 1);

/// Populate sigma images, phase angles, residual and length for a vertex
/// list that is already fixed (used by the solver and the grid oracle).
Trajectory finalize_trajectory(const Curve& curve, const SigmaMap& sm,
                               std::vector<double> vertex_s, int iterations);

} // namespace billiard
