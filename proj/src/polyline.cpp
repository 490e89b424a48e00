#include "billiard/polyline.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <string>

#include "billiard/batch.hpp"
#include "billiard/errors.hpp"

namespace billiard {

namespace {

struct VertexGeom {
    Vec2 point;
    Vec2 tangent;  // unit
    double t = 0.0;
};

VertexGeom eval_vertex(const Curve& curve, double s, double hint, bool has_hint) {
    const double t = has_hint ? curve.parameter(s, hint) : curve.parameter(s);
    return {curve.position_t(t), curve.derivative_t(t).normalized(), t};
}

/// Gradient component i (1..n-1) from the vertex geometry cache.
double gradient_component(const std::vector<VertexGeom>& geom, int i) {
    const Vec2 u_in = (geom[static_cast<std::size_t>(i)].point -
                       geom[static_cast<std::size_t>(i - 1)].point)
                          .normalized();
    const Vec2 u_out = (geom[static_cast<std::size_t>(i + 1)].point -
                        geom[static_cast<std::size_t>(i)].point)
                           .normalized();
    return dot(geom[static_cast<std::size_t>(i)].tangent, u_in - u_out);
}

double total_length_of(const std::vector<VertexGeom>& geom) {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < geom.size(); ++i)
        len += (geom[i + 1].point - geom[i].point).norm();
    return len;
}

/// Symmetric tridiagonal solve via LDL^T. Requires nonsingular pivots; the
/// sign is free (the length Hessian is negative definite on the admitted
/// convex arcs, where the equal-angle polyline maximizes length).
bool solve_tridiagonal(std::vector<double> diag, std::vector<double> sub,
                       std::vector<double> rhs, std::vector<double>& x) {
    const std::size_t m = diag.size();
    double scale = 0.0;
    for (double v : diag) scale = std::max(scale, std::abs(v));
    std::vector<double> d(m), l(m > 0 ? m - 1 : 0);
    for (std::size_t i = 0; i < m; ++i) {
        double di = diag[i];
        if (i > 0) di -= l[i - 1] * l[i - 1] * d[i - 1];
        if (std::abs(di) <= 1e-12 * scale) return false;
        d[i] = di;
        if (i + 1 < m) l[i] = sub[i] / di;
    }
    for (std::size_t i = 1; i < m; ++i) rhs[i] -= l[i - 1] * rhs[i - 1];
    for (std::size_t i = 0; i < m; ++i) rhs[i] /= d[i];
    x.assign(m, 0.0);
    for (std::size_t i = m; i-- > 0;)
        x[i] = rhs[i] - (i + 1 < m ? l[i] * x[i + 1] : 0.0);
    return true;
}

} // namespace

std::vector<double> initial_guess(const SigmaMap& sm, int n) {
    const std::vector<double> pts = equipartition_points(sm, n);
    return {pts.begin() + 1, pts.end() - 1};
}

double polyline_length(const Curve& curve, std::span<const double> vertex_s) {
    double len = 0.0;
    Vec2 prev = curve.geometry_at(vertex_s[0]).point;
    for (std::size_t i = 1; i < vertex_s.size(); ++i) {
        const Vec2 p = curve.geometry_at(vertex_s[i]).point;
        len += (p - prev).norm();
        prev = p;
    }
    return len;
}

std::vector<double> length_gradient(const Curve& curve, std::span<const double> vertex_s) {
    const std::size_t count = vertex_s.size();
    std::vector<VertexGeom> geom(count);
    for (std::size_t i = 0; i < count; ++i)
        geom[i] = eval_vertex(curve, vertex_s[i], 0.0, false);
    for (std::size_t i = 0; i + 1 < count; ++i)
        if ((geom[i + 1].point - geom[i].point).norm() < 1e-14)
            fail(Errc::degenerate_segment,
                 "consecutive vertices coincide at index " + std::to_string(i));
    std::vector<double> g(count - 2);
    for (std::size_t i = 1; i + 1 < count; ++i)
        g[i - 1] = gradient_component(geom, static_cast<int>(i));
    return g;
}

Trajectory finalize_trajectory(const Curve& curve, const SigmaMap& sm,
                               std::vector<double> vertex_s, int iterations) {
    Trajectory traj;
    traj.n = static_cast<int>(vertex_s.size()) - 1;
    traj.iterations = iterations;

    const std::size_t count = vertex_s.size();
    std::vector<VertexGeom> geom(count);
    for (std::size_t i = 0; i < count; ++i)
        geom[i] = eval_vertex(curve, vertex_s[i], 0.0, false);

    traj.total_length = total_length_of(geom);
    traj.reflection_residual = 0.0;
    for (std::size_t i = 1; i + 1 < count; ++i)
        traj.reflection_residual = std::max(
            traj.reflection_residual,
            std::abs(gradient_component(geom, static_cast<int>(i))));

    traj.phi.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const Vec2 chord = i + 1 < count ? geom[i + 1].point - geom[i].point
                                         : geom[i].point - geom[i - 1].point;
        const Vec2 u = chord.normalized();
        const double angle = std::atan2(cross(geom[i].tangent, u), dot(geom[i].tangent, u));
        // outgoing angle for vertices 0..n-1; the final phase point's angle
        // equals the (positive) incidence angle of the last chord
        traj.phi[i] = i + 1 < count ? angle : std::abs(angle);
    }

    traj.vertex_sigma.resize(count);
    for (std::size_t i = 0; i < count; ++i) traj.vertex_sigma[i] = sm.sigma(vertex_s[i]);

    const double span = sm.arc().span();
    for (std::size_t i = 1; i + 1 < count; ++i) {
        if (vertex_s[i] - sm.arc().s_a < 1e-6 * span ||
            sm.arc().s_b - vertex_s[i] < 1e-6 * span)
            traj.boundary_stick = true;
    }

    traj.vertex_s = std::move(vertex_s);
    return traj;
}

Trajectory solve_min_polyline(const Curve& curve, const SigmaMap& sm, int n,
                              SolveOptions options) {
    if (n < 2) fail(Errc::out_of_range, "solve_min_polyline requires n >= 2");

    const ArcSpec& arc = sm.arc();
    std::vector<double> vs(static_cast<std::size_t>(n) + 1);
    vs.front() = arc.s_a;
    vs.back() = arc.s_b;
    {
        const std::vector<double> interior = initial_guess(sm, n);
        std::copy(interior.begin(), interior.end(), vs.begin() + 1);
    }

    const std::size_t count = vs.size();
    const int m = n - 1;  // free vertices
    std::vector<VertexGeom> geom(count);
    for (std::size_t i = 0; i < count; ++i)
        geom[i] = eval_vertex(curve, vs[i], i > 0 ? geom[i - 1].t : 0.0, i > 0);

    const auto refresh = [&](const std::vector<double>& s_values) {
        for (std::size_t i = 1; i + 1 < count; ++i)
            geom[i] = eval_vertex(curve, s_values[i], geom[i].t, true);
    };
    const auto grad_inf = [&](const std::vector<double>& g) {
        double v = 0.0;
        for (double x : g) v = std::max(v, std::abs(x));
        return v;
    };
    const auto gradient = [&]() {
        std::vector<double> g(static_cast<std::size_t>(m));
        for (int i = 1; i <= m; ++i)
            g[static_cast<std::size_t>(i - 1)] = gradient_component(geom, i);
        return g;
    };

    // one Hessian column by central differences of the local gradient stencil
    const double fd_h = 1e-7 * arc.span() / n;
    const auto hessian_tridiag = [&](std::vector<double>& diag, std::vector<double>& sub) {
        diag.assign(static_cast<std::size_t>(m), 0.0);
        sub.assign(static_cast<std::size_t>(m > 0 ? m - 1 : 0), 0.0);
        std::vector<double> upper(static_cast<std::size_t>(m > 0 ? m - 1 : 0), 0.0);
        for (int j = 1; j <= m; ++j) {
            const VertexGeom saved = geom[static_cast<std::size_t>(j)];
            double col[3][2];  // rows j-1, j, j+1 at +/- h
            for (int sgn = 0; sgn < 2; ++sgn) {
                const double s_pert = vs[static_cast<std::size_t>(j)] + (sgn == 0 ? fd_h : -fd_h);
                geom[static_cast<std::size_t>(j)] = eval_vertex(curve, s_pert, saved.t, true);
                for (int r = -1; r <= 1; ++r) {
                    const int i = j + r;
                    col[r + 1][sgn] = (i >= 1 && i <= m) ? gradient_component(geom, i) : 0.0;
                }
            }
            geom[static_cast<std::size_t>(j)] = saved;
            const double inv2h = 1.0 / (2.0 * fd_h);
            if (j - 1 >= 1) upper[static_cast<std::size_t>(j - 2)] = (col[0][0] - col[0][1]) * inv2h;
            diag[static_cast<std::size_t>(j - 1)] = (col[1][0] - col[1][1]) * inv2h;
            if (j + 1 <= m) sub[static_cast<std::size_t>(j - 1)] = (col[2][0] - col[2][1]) * inv2h;
        }
        for (std::size_t i = 0; i < sub.size(); ++i) sub[i] = 0.5 * (sub[i] + upper[i]);
    };

    // Newton on the criticality system: the equal-angle configuration is the
    // unique interior critical point of total length over ordered vertices
    // (a length maximum on these convex arcs), so the merit function for the
    // line search is the gradient max-norm, not the length.
    const double step_tol = 1e-10 * arc.span();
    std::vector<double> g = gradient();
    double gn = grad_inf(g);
    double best_residual = gn;
    double last_step = std::numeric_limits<double>::infinity();
    int truncation_streak = 0;

    for (int iter = 0; iter < options.max_iter; ++iter) {
        if (gn <= options.tol_grad && last_step <= step_tol && iter > 0)
            return finalize_trajectory(curve, sm, std::move(vs), iter);

        std::vector<double> diag, sub, delta;
        hessian_tridiag(diag, sub);
        if (solve_tridiagonal(diag, sub, g, delta)) {
            for (double& d : delta) d = -d;
        } else {
            // near-singular Hessian: take a small residual-direction step and
            // let the merit line search sort out the scale
            delta.assign(static_cast<std::size_t>(m), 0.0);
            for (int i = 0; i < m; ++i)
                delta[static_cast<std::size_t>(i)] = -g[static_cast<std::size_t>(i)];
        }

        // largest step keeping the vertex ordering with a safety margin
        double alpha_max = 1.0;
        for (int i = 0; i <= m; ++i) {
            const double gap = vs[static_cast<std::size_t>(i + 1)] - vs[static_cast<std::size_t>(i)];
            const double dgap = (i + 1 <= m ? delta[static_cast<std::size_t>(i)] : 0.0) -
                                (i >= 1 ? delta[static_cast<std::size_t>(i - 1)] : 0.0);
            if (dgap < 0.0) alpha_max = std::min(alpha_max, -0.95 * gap / dgap);
        }
        if (alpha_max < 1e-12) {
            if (++truncation_streak >= 5)
                fail(Errc::ordering_violated,
                     "line search persistently crosses vertices at n = " + std::to_string(n));
        } else {
            truncation_streak = 0;
        }

        bool accepted = false;
        std::vector<double> vs_new(count);
        std::vector<double> g_new;
        double gn_new = 0.0, alpha = std::min(1.0, alpha_max);
        for (int back = 0; back < 40 && !accepted; ++back) {
            vs_new = vs;
            for (int i = 0; i < m; ++i)
                vs_new[static_cast<std::size_t>(i + 1)] += alpha * delta[static_cast<std::size_t>(i)];
            refresh(vs_new);
            g_new = gradient();
            gn_new = grad_inf(g_new);
            if (gn_new <= 0.9 * gn || gn_new <= options.tol_grad)
                accepted = true;
            else
                alpha *= 0.5;
        }
        if (!accepted) {
            refresh(vs);  // restore geometry cache
            // evaluation noise of the gradient scales like eps * diameter /
            // chord; on very short arcs it can sit above tol_grad, in which
            // case the stalled iterate is accepted up to the 1e-10 residual
            // contract
            double min_chord = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i + 1 < count; ++i)
                min_chord = std::min(min_chord, (geom[i + 1].point - geom[i].point).norm());
            const double noise_floor =
                32.0 * std::numeric_limits<double>::epsilon() * curve.diameter() / min_chord;
            if (gn <= std::min(1e-10, std::max(options.tol_grad, noise_floor)))
                return finalize_trajectory(curve, sm, std::move(vs), iter);
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "line search stalled at n = %d, residual %.3e (noise floor %.3e)",
                          n, gn, noise_floor);
            fail(Errc::no_convergence, buf);
        }

        last_step = 0.0;
        for (int i = 0; i < m; ++i)
            last_step = std::max(last_step, std::abs(alpha * delta[static_cast<std::size_t>(i)]));
        vs = std::move(vs_new);
        g = std::move(g_new);
        gn = gn_new;
        best_residual = std::min(best_residual, gn);
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "no convergence after %d iterations at n = %d, best residual %.3e",
                  options.max_iter, n, best_residual);
    fail(Errc::no_convergence, buf);
}

Trajectory brute_force_min(const Curve& curve, const SigmaMap& sm, int n,
                           int grid_size, int threads) {
    if (n != 2 && n != 3)
        fail(Errc::too_large, "brute_force_min supports n in {2, 3}");
    if (grid_size < 4) fail(Errc::out_of_range, "grid_size too small");

    const ArcSpec& arc = sm.arc();
    const double step = arc.span() / (grid_size - 1);
    std::vector<Vec2> pts(static_cast<std::size_t>(grid_size));
    double t_hint = curve.parameter(arc.s_a);
    for (int j = 0; j < grid_size; ++j) {
        const double s = j + 1 == grid_size ? arc.s_b : arc.s_a + j * step;
        t_hint = curve.parameter(s, t_hint);
        pts[static_cast<std::size_t>(j)] = curve.position_t(t_hint);
    }

    const GridBest best = threads > 1 ? grid_best_parallel(pts, n, threads)
                                      : grid_best_serial(pts, n);

    std::vector<double> vs;
    vs.push_back(arc.s_a);
    vs.push_back(arc.s_a + best.j1 * step);
    if (n == 3) vs.push_back(arc.s_a + best.j2 * step);
    vs.push_back(arc.s_b);
    return finalize_trajectory(curve, sm, std::move(vs), 0);
}

} // namespace billiard
