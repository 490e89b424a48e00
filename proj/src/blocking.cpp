#include "billiard/blocking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "billiard/batch.hpp"
#include "billiard/errors.hpp"

namespace billiard {

namespace {

constexpr std::int64_t kRationalScreenMaxDen = 1'000'000;

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r))
        fail(Errc::overflow, "64-bit overflow in exact integer arithmetic");
    return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r))
        fail(Errc::overflow, "64-bit overflow in exact integer arithmetic");
    return r;
}

} // namespace

BoundaryBlocker BoundaryBlocker::make_rational(std::int64_t p, std::int64_t q) {
    if (q == 0) fail(Errc::validation_error, "rational blocker with zero denominator");
    if (q < 0) { p = -p; q = -q; }
    if (!(p > 0 && p < q))
        fail(Errc::validation_error, "rational blocker must lie strictly in (0, 1)");
    const std::int64_t g = std::gcd(p, q);
    BoundaryBlocker blocker;
    blocker.rational = true;
    blocker.p = p / g;
    blocker.q = q / g;
    blocker.value = static_cast<double>(blocker.p) / static_cast<double>(blocker.q);
    return blocker;
}

BoundaryBlocker BoundaryBlocker::make_irrational(double value) {
    if (!(value > 0.0 && value < 1.0))
        fail(Errc::validation_error, "irrational blocker must lie strictly in (0, 1)");
    // sanity screen against mis-declared rationals: x within 1e-9/q of some
    // p/q with q <= 1e6 is rejected (any double rounded from such a fraction
    // has residual |x q - p| below 1e-10)
    for (std::int64_t q = 1; q <= kRationalScreenMaxDen; ++q) {
        const double scaled = value * static_cast<double>(q);
        const double p = std::round(scaled);
        if (p <= 0.0 || p >= static_cast<double>(q)) continue;
        if (std::abs(scaled - p) <= 1e-9)
            fail(Errc::validation_error,
                 "declared-irrational blocker is numerically rational: ~" +
                     std::to_string(static_cast<std::int64_t>(p)) + "/" + std::to_string(q));
    }
    BoundaryBlocker blocker;
    blocker.rational = false;
    blocker.value = value;
    return blocker;
}

ModuliPlan build_moduli(const BlockerSet& blockers) {
    ModuliPlan plan;
    plan.k = static_cast<int>(blockers.boundary.size());
    for (const BoundaryBlocker& blocker : blockers.boundary) {
        if (!blocker.rational) continue;
        plan.denominators.push_back(blocker.q);
        plan.q_product = checked_mul(plan.q_product, blocker.q);
    }
    return plan;
}

std::vector<std::int64_t> ModuliPlan::candidates(std::int64_t big_n) const {
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i)
        out.push_back(checked_add(1, checked_mul(checked_add(big_n, i), q_product)));
    return out;
}

DeltaReport compute_delta(const BlockerSet& blockers, const ModuliPlan& plan) {
    DeltaReport rep;
    rep.delta = std::numeric_limits<double>::infinity();
    rep.finite = false;
    for (const BoundaryBlocker& blocker : blockers.boundary) {
        if (blocker.rational) continue;
        for (int j = 1; j <= plan.k; ++j) {
            const std::int64_t den = checked_mul(j, plan.q_product);
            // nearest fractions m/den to the blocker; same minimum as the
            // full enumeration over 0 < m < den
            const std::int64_t m0 =
                std::llround(blocker.value * static_cast<double>(den));
            for (std::int64_t m = std::max<std::int64_t>(1, m0 - 1);
                 m <= std::min(den - 1, m0 + 1); ++m) {
                const double dist =
                    std::abs(blocker.value - static_cast<double>(m) / static_cast<double>(den));
                if (dist < rep.delta) {
                    rep.delta = dist;
                    rep.finite = true;
                    rep.blocker_value = blocker.value;
                    rep.num = m;
                    rep.den = den;
                }
            }
        }
    }
    return rep;
}

BoundsReport collision_bounds_check(double delta, std::int64_t q_product,
                                    std::int64_t big_n, double c_hat) {
    if (!std::isfinite(delta))
        fail(Errc::infinite_delta,
             "no irrational blockers: the bounds check is not applicable");
    if (!(c_hat > 0.0)) fail(Errc::out_of_range, "c_hat must be positive");
    BoundsReport rep;
    const double q2 = static_cast<double>(q_product) * static_cast<double>(q_product);
    rep.lower = 0.5 * delta * q2 * static_cast<double>(big_n);
    rep.upper = 3.0 * c_hat;
    // smallest N with delta Q^2 N / 2 > 3 c_hat
    const double threshold = 6.0 * c_hat / (delta * q2);
    rep.n_threshold = static_cast<std::int64_t>(std::floor(threshold)) + 1;
    return rep;
}

DeviationTable equidistribution_scan(const Curve& curve, const SigmaMap& sm,
                                     const std::vector<int>& n_list, int threads) {
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 4) fail(Errc::out_of_range, "scan requires every n >= 4");
        if (i > 0 && n_list[i] <= n_list[i - 1])
            fail(Errc::out_of_range, "scan requires strictly increasing n_list");
    }

    const std::vector<SolveOutcome> outcomes = solve_batch(curve, sm, n_list, {}, threads);

    DeviationTable table;
    table.rows.reserve(n_list.size());
    double sum_x = 0.0, sum_y = 0.0, sum_xx = 0.0, sum_xy = 0.0;
    int fit_count = 0;
    double max_d = 0.0;
    for (std::size_t r = 0; r < n_list.size(); ++r) {
        DeviationRow row;
        row.n = n_list[r];
        if (!outcomes[r].trajectory) {
            row.failed = true;
            row.error = outcomes[r].error;
            table.rows.push_back(row);
            continue;
        }
        const Trajectory& traj = *outcomes[r].trajectory;
        for (int m = 0; m <= row.n; ++m)
            row.d_n = std::max(row.d_n,
                               std::abs(traj.vertex_sigma[static_cast<std::size_t>(m)] -
                                        static_cast<double>(m) / row.n));
        row.n2dn = static_cast<double>(row.n) * row.n * row.d_n;
        for (double phi : traj.phi) row.phi_max = std::max(row.phi_max, std::abs(phi));
        row.shift = shift_consistency(sm, traj);
        row.h_spread = row.shift.h_spread_rel;
        table.c_hat = std::max(table.c_hat, row.n2dn);
        max_d = std::max(max_d, row.d_n);
        table.rows.push_back(row);
    }
    for (const DeviationRow& row : table.rows) {
        if (row.failed || row.d_n <= 0.0) continue;
        const double x = std::log(static_cast<double>(row.n));
        const double y = std::log(row.d_n);
        sum_x += x; sum_y += y; sum_xx += x * x; sum_xy += x * y;
        ++fit_count;
    }
    // all rows at the exact-symmetry noise floor: slope is meaningless
    table.degenerate = max_d <= 1e-9;
    if (!table.degenerate && fit_count >= 2) {
        const double denom = fit_count * sum_xx - sum_x * sum_x;
        table.slope = (fit_count * sum_xy - sum_x * sum_y) / denom;
    } else {
        table.slope = std::numeric_limits<double>::quiet_NaN();
    }
    return table;
}

namespace {

struct Clearances {
    double boundary = std::numeric_limits<double>::infinity();
    double interior = std::numeric_limits<double>::infinity();
};

Clearances clearances_of(const Curve& curve, const BlockerSet& blockers,
                         const Trajectory& traj) {
    Clearances c;
    for (int m = 1; m < traj.n; ++m) {
        const double sig = traj.vertex_sigma[static_cast<std::size_t>(m)];
        for (const BoundaryBlocker& blocker : blockers.boundary)
            c.boundary = std::min(c.boundary, std::abs(sig - blocker.value));
    }
    if (!blockers.interior.empty()) {
        std::vector<Vec2> pts(traj.vertex_s.size());
        for (std::size_t i = 0; i < traj.vertex_s.size(); ++i)
            pts[i] = curve.geometry_at(traj.vertex_s[i]).point;
        for (const Vec2& q : blockers.interior)
            for (std::size_t i = 0; i + 1 < pts.size(); ++i)
                c.interior = std::min(c.interior, segment_distance(pts[i], pts[i + 1], q));
    }
    return c;
}

} // namespace

EscapeCertificate escape_search(const Curve& curve, const SigmaMap& sm,
                                const BlockerSet& blockers, EscapeOptions options) {
    if (options.n_max < options.n_start)
        fail(Errc::out_of_range, "escape search requires N_max >= N_start");
    const double eps_interior = options.eps_interior >= 0.0
                                    ? options.eps_interior
                                    : 1e-6 * curve.diameter();
    const ModuliPlan plan = build_moduli(blockers);

    double best_boundary = -1.0;
    std::int64_t best_n = 0;
    for (std::int64_t big_n = options.n_start; big_n <= options.n_max; ++big_n) {
        const std::vector<std::int64_t> cand = plan.candidates(big_n);
        std::vector<int> ns;
        std::vector<int> idx;
        for (int i = 0; i < static_cast<int>(cand.size()); ++i) {
            if (cand[static_cast<std::size_t>(i)] < 2) continue;  // no interior vertices to place
            if (cand[static_cast<std::size_t>(i)] > std::numeric_limits<int>::max())
                fail(Errc::overflow, "candidate chord count exceeds solver range");
            ns.push_back(static_cast<int>(cand[static_cast<std::size_t>(i)]));
            idx.push_back(i);
        }
        const std::vector<SolveOutcome> outcomes =
            solve_batch(curve, sm, ns, {}, options.threads);
        for (std::size_t j = 0; j < outcomes.size(); ++j) {
            if (!outcomes[j].trajectory) continue;
            const Trajectory& traj = *outcomes[j].trajectory;
            const Clearances c = clearances_of(curve, blockers, traj);
            if (c.boundary > best_boundary) {
                best_boundary = c.boundary;
                best_n = traj.n;
            }
            if (c.boundary > options.eps_boundary && c.interior > eps_interior) {
                EscapeCertificate cert;
                cert.n_used = big_n;
                cert.i_used = idx[j];
                cert.n = traj.n;
                cert.trajectory = traj;
                cert.boundary_clearance = c.boundary;
                cert.interior_clearance = c.interior;
                cert.eps_boundary = options.eps_boundary;
                cert.eps_interior = eps_interior;
                if (verify_certificate(curve, sm, blockers, cert).passed) return cert;
            }
        }
    }
    fail(Errc::not_found,
         "no clearing candidate up to N_max = " + std::to_string(options.n_max) +
             "; best boundary clearance " + std::to_string(best_boundary) +
             " at n = " + std::to_string(best_n));
}

VerifyResult verify_certificate(const Curve& curve, const SigmaMap& sm,
                                const BlockerSet& blockers,
                                const EscapeCertificate& cert) {
    const Trajectory& traj = cert.trajectory;
    if (traj.n < 1 || traj.vertex_s.size() != static_cast<std::size_t>(traj.n) + 1)
        fail(Errc::validation_error, "certificate trajectory is malformed");

    VerifyResult res;
    // fresh sigma images and positions; stored values are not trusted
    std::vector<double> sig(traj.vertex_s.size());
    std::vector<Vec2> pts(traj.vertex_s.size());
    for (std::size_t i = 0; i < traj.vertex_s.size(); ++i) {
        sig[i] = sm.sigma(traj.vertex_s[i]);
        pts[i] = curve.geometry_at(traj.vertex_s[i]).point;
    }

    res.passed = true;
    for (std::size_t bi = 0; bi < blockers.boundary.size(); ++bi) {
        double dist = std::numeric_limits<double>::infinity();
        for (int m = 1; m < traj.n; ++m)
            dist = std::min(dist, std::abs(sig[static_cast<std::size_t>(m)] -
                                           blockers.boundary[bi].value));
        res.boundary_distance.push_back(dist);
        if (!(dist > cert.eps_boundary)) {
            res.passed = false;
            res.offending_boundary.push_back(static_cast<int>(bi));
        }
    }
    for (std::size_t bi = 0; bi < blockers.interior.size(); ++bi) {
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            dist = std::min(dist, segment_distance(pts[i], pts[i + 1], blockers.interior[bi]));
        res.interior_distance.push_back(dist);
        if (!(dist > cert.eps_interior)) {
            res.passed = false;
            res.offending_interior.push_back(static_cast<int>(bi));
        }
    }

    const std::vector<double> g = length_gradient(curve, traj.vertex_s);
    for (double x : g)
        res.reflection_residual = std::max(res.reflection_residual, std::abs(x));
    // blocker incidences are reported above even when the polyline is stale;
    // staleness alone invalidates a certificate whose distances look fine
    if (res.passed && res.reflection_residual > 1e-10)
        fail(Errc::stale_certificate,
             "trajectory reflection residual " + std::to_string(res.reflection_residual) +
                 " exceeds 1e-10");
    return res;
}

} // namespace billiard
