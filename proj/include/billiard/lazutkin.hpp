#pragma once

#include <vector>

#include "billiard/curve.hpp"
#include "billiard/phase_map.hpp"

namespace billiard {

struct Trajectory;

/// Lazutkin parameter on an arc: sigma with d(sigma) = (1/2) k^{2/3} ds,
/// normalized so sigma(s_a) = 0 and sigma(s_b) = 1. The unnormalized total
/// mass S_tot is kept for the Hamiltonian scaling.
class SigmaMap {
public:
    SigmaMap(const Curve& curve, ArcSpec arc);

    const ArcSpec& arc() const { return arc_; }
    const Curve& curve() const { return curve_; }
    double total_mass() const { return total_mass_; }

    /// Normalized sigma(s) in [0, 1] for s in [s_a, s_b].
    double sigma(double s) const;

    /// Inverse map: sigma in [0, 1] -> arc length in [s_a, s_b].
    double inverse(double sigma) const;

private:
    double sigma_unnormalized_t(double t) const;

    Curve curve_;
    ArcSpec arc_;
    double t_a_ = 0.0, t_b_ = 0.0;
    double total_mass_ = 0.0;
    std::vector<double> cumulative_;  // per-panel cumulative mass over [t_a, t_b]
};

SigmaMap build_sigma(const Curve& curve, ArcSpec arc);

/// Arc lengths Q_0 = s_a, ..., Q_n = s_b with sigma(Q_m) = m/n.
std::vector<double> equipartition_points(const SigmaMap& sm, int n);

/// Leading-order interpolating Hamiltonian, normalized by the sigma mass:
/// H_norm = k(s)^{-2/3} phi^2 / S_tot^2.
struct HamiltonianSample {
    double h_norm = 0.0;
    double phi = 0.0;
};

HamiltonianSample hamiltonian_at(const SigmaMap& sm, PhasePoint x);

/// Consistency of the shift relation along one trajectory: sigma increments
/// against 1/n and against sqrt(mean H_norm), plus the relative spread of
/// H_norm over the orbit samples.
struct ShiftReport {
    int n = 0;
    double max_dsigma_dev = 0.0;  // max_m |dsigma_m - 1/n|
    double max_sqrth_dev = 0.0;   // max_m |dsigma_m - sqrt(mean H_norm)|
    double h_spread_rel = 0.0;    // (max - min) / mean of H_norm
};

ShiftReport shift_consistency(const SigmaMap& sm, const Trajectory& trajectory);

} // namespace billiard
