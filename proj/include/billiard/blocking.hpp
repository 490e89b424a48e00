#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "billiard/polyline.hpp"

namespace billiard {

/// A boundary blocker position in sigma coordinates: either an exact
/// rational p/q in lowest terms or a declared-irrational real. Rationality
/// is declared by the input, never detected from the float.
struct BoundaryBlocker {
    bool rational = false;
    std::int64_t p = 0, q = 1;  // reduced, 0 < p/q < 1 when rational
    double value = 0.0;         // p/q for rationals, the raw real otherwise

    static BoundaryBlocker make_rational(std::int64_t p, std::int64_t q);
    static BoundaryBlocker make_irrational(double value);
};

struct BlockerSet {
    std::vector<BoundaryBlocker> boundary;
    std::vector<Vec2> interior;  // points strictly inside the table
};

/// Candidate chord counts n_i = 1 + (N + i) Q, i = 0..k, where Q is the
/// product of the rational blocker denominators and k the number of
/// boundary blockers. Every candidate is coprime to every denominator.
struct ModuliPlan {
    std::int64_t q_product = 1;            // Q
    int k = 0;                             // |S'|
    std::vector<std::int64_t> denominators;

    std::vector<std::int64_t> candidates(std::int64_t big_n) const;
};

ModuliPlan build_moduli(const BlockerSet& blockers);

/// Gap between the irrational boundary blockers and the fraction grid
/// M = { m / (jQ) : j = 1..k, fraction in (0,1) }. Infinite when there are
/// no irrational blockers.
struct DeltaReport {
    double delta = 0.0;  // +inf when no irrational blockers
    bool finite = false;
    double blocker_value = 0.0;  // witness blocker
    std::int64_t num = 0, den = 1;  // witness fraction m/(jQ)
};

DeltaReport compute_delta(const BlockerSet& blockers, const ModuliPlan& plan);

/// Quantitative form of the pigeonhole contradiction: the separation lower
/// bound delta Q^2 N / 2 against the collision upper bound 3 C.
struct BoundsReport {
    double lower = 0.0;          // delta Q^2 N / 2
    double upper = 0.0;          // 3 C_hat
    std::int64_t n_threshold = 0;  // smallest N with lower > upper
};

BoundsReport collision_bounds_check(double delta, std::int64_t q_product,
                                    std::int64_t big_n, double c_hat);

/// Equidistribution measurement: one row per chord count.
struct DeviationRow {
    int n = 0;
    double d_n = 0.0;      // max_m |sigma(P_m) - m/n|
    double n2dn = 0.0;     // n^2 D_n
    double phi_max = 0.0;
    double h_spread = 0.0;  // relative spread of H_norm along the orbit
    ShiftReport shift;      // full shift-relation report for this row
    bool failed = false;
    std::string error;
};

struct DeviationTable {
    std::vector<DeviationRow> rows;
    double slope = 0.0;   // least-squares slope of log D_n vs log n
    double c_hat = 0.0;   // max over rows of n^2 D_n
    bool degenerate = false;  // all rows at the noise floor (slope meaningless)
};

DeviationTable equidistribution_scan(const Curve& curve, const SigmaMap& sm,
                                     const std::vector<int>& n_list, int threads = 1);

struct EscapeOptions {
    std::int64_t n_start = 1;
    std::int64_t n_max = 50;
    double eps_boundary = 1e-6;   // sigma units
    double eps_interior = -1.0;   // < 0: use 1e-6 * curve diameter
    int threads = 1;
};

/// A concrete unblocked trajectory: candidate index, the trajectory itself
/// and its certified clearances from every blocker.
struct EscapeCertificate {
    std::int64_t n_used = 0;  // N of the winning candidate
    int i_used = 0;
    std::int64_t n = 0;       // chord count 1 + (N + i) Q
    Trajectory trajectory;
    double boundary_clearance = 0.0;  // min sigma distance, +inf if no boundary blockers
    double interior_clearance = 0.0;  // min Euclidean distance, +inf if none
    double eps_boundary = 0.0;
    double eps_interior = 0.0;
};

/// Search N = n_start..n_max, candidates in i order within each N; the first
/// candidate clearing every blocker wins. Throws Errc::not_found with the
/// best clearance seen if no candidate passes.
EscapeCertificate escape_search(const Curve& curve, const SigmaMap& sm,
                                const BlockerSet& blockers, EscapeOptions options = {});

/// Independent re-check of a certificate: recomputes sigma images, blocker
/// distances and the reflection residual from scratch; never trusts the
/// stored clearances.
struct VerifyResult {
    bool passed = false;
    std::vector<double> boundary_distance;  // per boundary blocker
    std::vector<double> interior_distance;  // per interior blocker
    std::vector<int> offending_boundary;
    std::vector<int> offending_interior;
    double reflection_residual = 0.0;
};

VerifyResult verify_certificate(const Curve& curve, const SigmaMap& sm,
                                const BlockerSet& blockers,
                                const EscapeCertificate& cert);

} // namespace billiard
