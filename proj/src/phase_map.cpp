#include "billiard/phase_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "billiard/errors.hpp"

namespace billiard {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPi = std::numbers::pi;
constexpr int kScanSamples = 256;

double reduce_mod(double x, double period) {
    double r = x - period * std::floor(x / period);
    if (r >= period) r -= period;
    return r;
}

} // namespace

PhasePoint next_collision(const Curve& curve, PhasePoint x) {
    if (!(x.phi > kPhiCap && x.phi < kPi - kPhiCap))
        fail(Errc::degenerate_chord,
             "phi = " + std::to_string(x.phi) + " outside admitted range");

    const double t0 = curve.parameter(x.s);
    const Vec2 p0 = curve.position_t(t0);
    const Vec2 tangent0 = curve.derivative_t(t0).normalized();
    const Vec2 dir = rotate(tangent0, x.phi);  // inward for phi in (0, pi)

    // signed distance from the ray line; vanishes only at t0 and the exit point
    const auto line_dist = [&](double t) { return cross(dir, curve.position_t(t) - p0); };

    // exclude a neighborhood of the launch point sized by a chord lower bound
    const double chord_lb = 2.0 * std::sin(x.phi) / curve.curvature_max();
    const double excl = std::max(0.45 * chord_lb / curve.speed_max(), 1e-9);

    const double lo_t = t0 + excl;
    const double hi_t = t0 + kTwoPi - excl;
    const double step = (hi_t - lo_t) / kScanSamples;

    double bl = 0.0, bh = 0.0, fl = 0.0;
    bool found = false;
    double prev_t = lo_t;
    double prev_f = line_dist(prev_t);
    for (int i = 1; i <= kScanSamples; ++i) {
        const double t = lo_t + i * step;
        const double f = line_dist(t);
        if (prev_f == 0.0 || prev_f * f < 0.0) {
            // keep the bracket on the forward side of the ray
            const double mid = 0.5 * (prev_t + t);
            if (dot(curve.position_t(mid) - p0, dir) > 0.0 || !found) {
                bl = prev_t; bh = t; fl = prev_f;
                found = true;
            }
        }
        prev_t = t;
        prev_f = f;
    }
    if (!found)
        fail(Errc::no_convergence, "no ray-curve intersection bracket found");

    // bisection to a narrow bracket, then Newton polish
    for (int i = 0; i < 20; ++i) {
        const double tm = 0.5 * (bl + bh);
        const double fm = line_dist(tm);
        if (fl * fm <= 0.0) { bh = tm; } else { bl = tm; fl = fm; }
    }
    double t = 0.5 * (bl + bh);
    const double tol = 1e-13 * curve.diameter();
    bool converged = false;
    for (int i = 0; i < 60; ++i) {
        const double f = line_dist(t);
        if (std::abs(f) <= tol) { converged = true; break; }
        if (fl * f <= 0.0) { bh = t; } else { bl = t; fl = f; }
        const double df = cross(dir, curve.derivative_t(t));
        double tn = df != 0.0 ? t - f / df : 0.5 * (bl + bh);
        if (!(tn > bl && tn < bh)) tn = 0.5 * (bl + bh);
        t = tn;
    }
    if (!converged)
        fail(Errc::no_convergence, "ray-curve intersection polish did not converge");

    const Vec2 p1 = curve.position_t(t);
    if ((p1 - p0).norm() < 1e-12)
        fail(Errc::degenerate_chord, "chord length below 1e-12");

    const Vec2 tangent1 = curve.derivative_t(t).normalized();
    const Vec2 reflected = 2.0 * dot(dir, tangent1) * tangent1 - dir;
    const double phi1 = std::atan2(cross(tangent1, reflected), dot(tangent1, reflected));
    if (!(phi1 > 0.0 && phi1 < kPi))
        fail(Errc::no_convergence, "reflected angle outside (0, pi)");

    return {reduce_mod(curve.arclength(t), curve.length()), phi1};
}

std::vector<PhasePoint> orbit(const Curve& curve, PhasePoint x0, int n) {
    if (n < 1) fail(Errc::out_of_range, "orbit requires n >= 1");
    std::vector<PhasePoint> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back(x0);
    for (int i = 0; i < n; ++i) {
        try {
            out.push_back(next_collision(curve, out.back()));
        } catch (const Error& e) {
            fail(e.code(), "orbit step " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

double symplectic_check(const Curve& curve, PhasePoint x, double h) {
    if (!(x.phi >= 10.0 * h && x.phi <= kPi - 10.0 * h))
        fail(Errc::out_of_range, "phi too close to 0 or pi for step h");

    const double L = curve.length();
    const double y0 = -std::cos(x.phi);
    if (std::abs(y0) + h >= 1.0)
        fail(Errc::out_of_range, "y = -cos(phi) too close to +-1 for step h");
    const auto map = [&](double s, double y) {
        const PhasePoint next = next_collision(curve, {reduce_mod(s, L), std::acos(-y)});
        return std::pair<double, double>{next.s, -std::cos(next.phi)};
    };
    const auto unwrap = [&](double a, double b) {
        double d = a - b;
        return d - L * std::round(d / L);
    };

    const auto [s_sp, y_sp] = map(x.s + h, y0);
    const auto [s_sm, y_sm] = map(x.s - h, y0);
    const auto [s_yp, y_yp] = map(x.s, y0 + h);
    const auto [s_ym, y_ym] = map(x.s, y0 - h);

    const double ds_ds = unwrap(s_sp, s_sm) / (2.0 * h);
    const double dy_ds = (y_sp - y_sm) / (2.0 * h);
    const double ds_dy = unwrap(s_yp, s_ym) / (2.0 * h);
    const double dy_dy = (y_yp - y_ym) / (2.0 * h);
    return ds_ds * dy_dy - dy_ds * ds_dy;
}

} // namespace billiard
