#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "billiard/polyline.hpp"

namespace billiard {

/// Result slot for one solve in a batch; failures carry the error text.
struct SolveOutcome {
    std::optional<Trajectory> trajectory;
    std::string error;
};

/// Serial reference: solves each n in order on the calling thread.
std::vector<SolveOutcome> solve_batch_serial(const Curve& curve, const SigmaMap& sm,
                                             std::span<const int> n_values,
                                             SolveOptions options = {});

/// OpenMP fan-out over independent solves. Each solve is single-threaded
/// and results land in input order, so the output is identical to the
/// serial reference for any thread count.
std::vector<SolveOutcome> solve_batch_parallel(const Curve& curve, const SigmaMap& sm,
                                               std::span<const int> n_values,
                                               SolveOptions options, int threads);

/// Dispatch: threads <= 1 runs the serial reference.
std::vector<SolveOutcome> solve_batch(const Curve& curve, const SigmaMap& sm,
                                      std::span<const int> n_values,
                                      SolveOptions options = {}, int threads = 1);

/// Exhaustive grid kernels behind brute_force_min: the extremal polyline
/// over interior grid placements (the equal-angle critical configuration is
/// the length maximum over ordered vertices on these convex arcs). The
/// parallel variant reduces per-thread bests by (length, index)
/// lexicographic order, so the winner does not depend on the schedule.
struct GridBest {
    double length = 0.0;
    int j1 = 0;
    int j2 = 0;  // unused for n = 2
};

GridBest grid_best_serial(std::span<const Vec2> points, int n);
GridBest grid_best_parallel(std::span<const Vec2> points, int n, int threads);

} // namespace billiard
