#include "billiard/lazutkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "billiard/errors.hpp"
#include "billiard/polyline.hpp"
#include "billiard/quadrature.hpp"

namespace billiard {

namespace {

constexpr int kSigmaPanels = 2048;
constexpr double kSigmaTol = 1e-12;  // absolute quadrature budget per panel

} // namespace

SigmaMap::SigmaMap(const Curve& curve, ArcSpec arc) : curve_(curve), arc_(arc) {
    if (!(arc.s_b - arc.s_a > 0.0) || !(arc.s_b - arc.s_a < curve.length()))
        fail(Errc::invalid_spec, "arc requires 0 < s_b - s_a < L");
    t_a_ = curve_.parameter(arc_.s_a);
    t_b_ = curve_.parameter(arc_.s_b);
    if (t_b_ <= t_a_) t_b_ += 2.0 * std::numbers::pi;

    const auto density = [this](double t) {
        return 0.5 * std::pow(curve_.curvature_t(t), 2.0 / 3.0) * curve_.speed_t(t);
    };
    const double dt = (t_b_ - t_a_) / kSigmaPanels;
    cumulative_.resize(kSigmaPanels + 1);
    cumulative_[0] = 0.0;
    for (int i = 0; i < kSigmaPanels; ++i) {
        const double t0 = t_a_ + i * dt;
        const double t1 = t_a_ + (i + 1) * dt;
        cumulative_[i + 1] = cumulative_[i] + adaptive_simpson(density, t0, t1, kSigmaTol);
    }
    total_mass_ = cumulative_[kSigmaPanels];
}

double SigmaMap::sigma_unnormalized_t(double t) const {
    const double dt = (t_b_ - t_a_) / kSigmaPanels;
    int i = static_cast<int>((t - t_a_) / dt);
    i = std::clamp(i, 0, kSigmaPanels - 1);
    const double t_i = t_a_ + i * dt;
    const auto density = [this](double u) {
        return 0.5 * std::pow(curve_.curvature_t(u), 2.0 / 3.0) * curve_.speed_t(u);
    };
    return cumulative_[i] + gauss7(density, t_i, t);
}

double SigmaMap::sigma(double s) const {
    const double slack = 1e-9 * arc_.span();
    if (!(s >= arc_.s_a - slack && s <= arc_.s_b + slack))
        fail(Errc::out_of_range, "arc length outside the sigma arc");
    const double sc = std::clamp(s, arc_.s_a, arc_.s_b);
    double t = curve_.parameter(sc, t_a_ + (t_b_ - t_a_) * (sc - arc_.s_a) / arc_.span());
    if (t < t_a_) t += 2.0 * std::numbers::pi;
    t = std::clamp(t, t_a_, t_b_);
    return sigma_unnormalized_t(t) / total_mass_;
}

double SigmaMap::inverse(double sigma) const {
    if (!(sigma >= -1e-12 && sigma <= 1.0 + 1e-12))
        fail(Errc::out_of_range, "sigma outside [0, 1]");
    if (sigma <= 0.0) return arc_.s_a;
    if (sigma >= 1.0) return arc_.s_b;

    const double target = sigma * total_mass_;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    const double dt = (t_b_ - t_a_) / kSigmaPanels;
    int i = std::clamp(static_cast<int>(it - cumulative_.begin()) - 1, 0, kSigmaPanels - 1);
    double lo = t_a_ + i * dt, hi = t_a_ + (i + 1) * dt;
    const double panel_mass = cumulative_[i + 1] - cumulative_[i];
    double t = lo + dt * std::clamp((target - cumulative_[i]) / panel_mass, 0.0, 1.0);
    const auto density = [this](double u) {
        return 0.5 * std::pow(curve_.curvature_t(u), 2.0 / 3.0) * curve_.speed_t(u);
    };
    for (int iter = 0; iter < 60; ++iter) {
        const double f = sigma_unnormalized_t(t) - target;
        if (std::abs(f) <= 1e-14 * std::max(1.0, total_mass_)) {
            const double s = curve_.arclength(t >= 2.0 * std::numbers::pi ? t - 2.0 * std::numbers::pi : t);
            // map the periodic representative back onto the arc branch
            double out = s;
            if (out < arc_.s_a - 0.5 * curve_.length()) out += curve_.length();
            return std::clamp(out, arc_.s_a, arc_.s_b);
        }
        if (f > 0.0) hi = t; else lo = t;
        double tn = t - f / density(t);
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        t = tn;
    }
    fail(Errc::no_convergence, "sigma inversion did not converge");
}

SigmaMap build_sigma(const Curve& curve, ArcSpec arc) { return SigmaMap(curve, arc); }

std::vector<double> equipartition_points(const SigmaMap& sm, int n) {
    if (n < 2) fail(Errc::out_of_range, "equipartition requires n >= 2");
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    out[0] = sm.arc().s_a;
    out[static_cast<std::size_t>(n)] = sm.arc().s_b;
    for (int m = 1; m < n; ++m)
        out[static_cast<std::size_t>(m)] = sm.inverse(static_cast<double>(m) / n);
    return out;
}

HamiltonianSample hamiltonian_at(const SigmaMap& sm, PhasePoint x) {
    const double k = sm.curve().geometry_at(x.s).curvature;
    const double st = sm.total_mass();
    return {std::pow(k, -2.0 / 3.0) * x.phi * x.phi / (st * st), x.phi};
}

ShiftReport shift_consistency(const SigmaMap& sm, const Trajectory& trajectory) {
    const int n = trajectory.n;
    ShiftReport rep;
    rep.n = n;

    double h_min = std::numeric_limits<double>::infinity();
    double h_max = 0.0;
    double h_sum = 0.0;
    for (int m = 0; m <= n; ++m) {
        const auto sample = hamiltonian_at(
            sm, {trajectory.vertex_s[static_cast<std::size_t>(m)],
                 trajectory.phi[static_cast<std::size_t>(m)]});
        h_min = std::min(h_min, sample.h_norm);
        h_max = std::max(h_max, sample.h_norm);
        h_sum += sample.h_norm;
    }
    const double h_mean = h_sum / (n + 1);
    const double sqrt_h = std::sqrt(h_mean);

    for (int m = 1; m <= n; ++m) {
        const double ds = trajectory.vertex_sigma[static_cast<std::size_t>(m)] -
                          trajectory.vertex_sigma[static_cast<std::size_t>(m - 1)];
        rep.max_dsigma_dev = std::max(rep.max_dsigma_dev, std::abs(ds - 1.0 / n));
        rep.max_sqrth_dev = std::max(rep.max_sqrth_dev, std::abs(ds - sqrt_h));
    }
    rep.h_spread_rel = h_mean > 0.0 ? (h_max - h_min) / h_mean : 0.0;
    return rep;
}

} // namespace billiard
