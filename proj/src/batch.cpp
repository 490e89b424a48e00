#include "billiard/batch.hpp"

#include <cmath>
#include <limits>

#include "billiard/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace billiard {

namespace {

SolveOutcome solve_one(const Curve& curve, const SigmaMap& sm, int n,
                       const SolveOptions& options) {
    SolveOutcome out;
    try {
        out.trajectory = solve_min_polyline(curve, sm, n, options);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

} // namespace

std::vector<SolveOutcome> solve_batch_serial(const Curve& curve, const SigmaMap& sm,
                                             std::span<const int> n_values,
                                             SolveOptions options) {
    std::vector<SolveOutcome> out(n_values.size());
    for (std::size_t i = 0; i < n_values.size(); ++i)
        out[i] = solve_one(curve, sm, n_values[i], options);
    return out;
}

std::vector<SolveOutcome> solve_batch_parallel(const Curve& curve, const SigmaMap& sm,
                                               std::span<const int> n_values,
                                               SolveOptions options, int threads) {
    std::vector<SolveOutcome> out(n_values.size());
#ifdef _OPENMP
    const auto count = static_cast<std::ptrdiff_t>(n_values.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            solve_one(curve, sm, n_values[static_cast<std::size_t>(i)], options);
#else
    (void)threads;
    out = solve_batch_serial(curve, sm, n_values, options);
#endif
    return out;
}

std::vector<SolveOutcome> solve_batch(const Curve& curve, const SigmaMap& sm,
                                      std::span<const int> n_values,
                                      SolveOptions options, int threads) {
    if (threads <= 1) return solve_batch_serial(curve, sm, n_values, options);
    return solve_batch_parallel(curve, sm, n_values, options, threads);
}

namespace {

double polyline2(const Vec2& a, const Vec2& v, const Vec2& b) {
    return (v - a).norm() + (b - v).norm();
}

/// Lexicographic (-length, j1, j2) comparison; makes the extremum unique
/// and schedule-independent.
bool better(double len, int j1, int j2, const GridBest& cur) {
    if (len != cur.length) return len > cur.length;
    if (j1 != cur.j1) return j1 < cur.j1;
    return j2 < cur.j2;
}

} // namespace

GridBest grid_best_serial(std::span<const Vec2> points, int n) {
    const int g = static_cast<int>(points.size());
    const Vec2 a = points[0];
    const Vec2 b = points[static_cast<std::size_t>(g - 1)];
    GridBest best{-std::numeric_limits<double>::infinity(), 0, 0};
    if (n == 2) {
        for (int j = 1; j + 1 < g; ++j) {
            const double len = polyline2(a, points[static_cast<std::size_t>(j)], b);
            if (better(len, j, 0, best)) best = {len, j, 0};
        }
    } else {
        for (int j1 = 1; j1 + 2 < g; ++j1) {
            const Vec2 v1 = points[static_cast<std::size_t>(j1)];
            const double head = (v1 - a).norm();
            for (int j2 = j1 + 1; j2 + 1 < g; ++j2) {
                const Vec2 v2 = points[static_cast<std::size_t>(j2)];
                const double len = head + (v2 - v1).norm() + (b - v2).norm();
                if (better(len, j1, j2, best)) best = {len, j1, j2};
            }
        }
    }
    return best;
}

GridBest grid_best_parallel(std::span<const Vec2> points, int n, int threads) {
#ifdef _OPENMP
    const int g = static_cast<int>(points.size());
    const Vec2 a = points[0];
    const Vec2 b = points[static_cast<std::size_t>(g - 1)];
    GridBest best{-std::numeric_limits<double>::infinity(), 0, 0};
    if (n == 2) {
#pragma omp parallel num_threads(threads)
        {
            GridBest local{-std::numeric_limits<double>::infinity(), 0, 0};
#pragma omp for schedule(static)
            for (int j = 1; j < g - 1; ++j) {
                const double len = polyline2(a, points[static_cast<std::size_t>(j)], b);
                if (better(len, j, 0, local)) local = {len, j, 0};
            }
#pragma omp critical
            if (better(local.length, local.j1, local.j2, best)) best = local;
        }
    } else {
#pragma omp parallel num_threads(threads)
        {
            GridBest local{-std::numeric_limits<double>::infinity(), 0, 0};
#pragma omp for schedule(dynamic, 16)
            for (int j1 = 1; j1 < g - 2; ++j1) {
                const Vec2 v1 = points[static_cast<std::size_t>(j1)];
                const double head = (v1 - a).norm();
                for (int j2 = j1 + 1; j2 + 1 < g; ++j2) {
                    const Vec2 v2 = points[static_cast<std::size_t>(j2)];
                    const double len = head + (v2 - v1).norm() + (b - v2).norm();
                    if (better(len, j1, j2, local)) local = {len, j1, j2};
                }
            }
#pragma omp critical
            if (better(local.length, local.j1, local.j2, best)) best = local;
        }
    }
    return best;
#else
    (void)threads;
    return grid_best_serial(points, n);
#endif
}

} // namespace billiard
