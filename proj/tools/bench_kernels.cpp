// Compares the serial reference kernels against the OpenMP variants:
// batched minimal-polyline solves and the brute-force grid minimum.

#include <chrono>
#include <cstdio>
#include <numbers>
#include <vector>

#include <CLI11.hpp>

#include "billiard/batch.hpp"

using namespace billiard;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP kernel comparison"};
    int threads = 4;
    int grid = 1200;
    int solves = 24;
    app.add_option("--threads", threads, "OpenMP thread count");
    app.add_option("--grid", grid, "grid size for the brute-force kernel");
    app.add_option("--solves", solves, "number of batched solves");
    CLI11_PARSE(app, argc, argv);

    const Curve curve = make_curve(CurveSpec::ellipse(2.0, 1.0));
    const SigmaMap sm = build_sigma(curve, make_arc(curve, 0.0, curve.length() / 4.0));

    std::vector<int> ns;
    for (int i = 0; i < solves; ++i) ns.push_back(64 + 8 * i);

    auto t0 = std::chrono::steady_clock::now();
    const auto serial = solve_batch_serial(curve, sm, ns, {});
    const double t_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const auto parallel = solve_batch_parallel(curve, sm, ns, {}, threads);
    const double t_parallel = seconds_since(t0);

    bool identical = true;
    for (std::size_t i = 0; i < serial.size(); ++i) {
        if (!serial[i].trajectory || !parallel[i].trajectory) { identical = false; break; }
        if (serial[i].trajectory->vertex_s != parallel[i].trajectory->vertex_s) {
            identical = false;
            break;
        }
    }

    std::printf("batched solves (%d trajectories, n in [%d, %d])\n", solves, ns.front(), ns.back());
    std::printf("  serial    %8.3f s\n", t_serial);
    std::printf("  omp x%-3d  %8.3f s   speedup %.2fx   bitwise-identical: %s\n", threads,
                t_parallel, t_serial / t_parallel, identical ? "yes" : "NO");

    std::vector<Vec2> pts(static_cast<std::size_t>(grid));
    const ArcSpec& arc = sm.arc();
    for (int j = 0; j < grid; ++j)
        pts[static_cast<std::size_t>(j)] =
            curve.geometry_at(arc.s_a + arc.span() * j / (grid - 1)).point;

    t0 = std::chrono::steady_clock::now();
    const GridBest g_serial = grid_best_serial(pts, 3);
    const double tg_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const GridBest g_parallel = grid_best_parallel(pts, 3, threads);
    const double tg_parallel = seconds_since(t0);

    const bool g_same = g_serial.j1 == g_parallel.j1 && g_serial.j2 == g_parallel.j2 &&
                        g_serial.length == g_parallel.length;
    std::printf("brute-force grid extremum (n = 3, %d^2 candidates)\n", grid);
    std::printf("  serial    %8.3f s\n", tg_serial);
    std::printf("  omp x%-3d  %8.3f s   speedup %.2fx   identical argmin: %s\n", threads,
                tg_parallel, tg_serial / tg_parallel, g_same ? "yes" : "NO");
    return identical && g_same ? 0 : 1;
}
