#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "billiard/blocking.hpp"
#include "billiard/lazutkin.hpp"
#include "billiard/phase_map.hpp"

namespace billiard::io {

/// 17-significant-digit decimal form; round-trips doubles exactly.
std::string format_double(double v);

/// FNV-1a 64-bit hash of the canonical (key-sorted) config serialization.
std::string config_hash(const nlohmann::json& canonical);

CurveSpec parse_curve_spec(const nlohmann::json& j, const std::string& path = "curve");
BlockerSet parse_blockers(const nlohmann::json& j, const std::string& path = "blockers");

struct ExperimentConfig {
    enum class Command { none, equidist, escape, orbit, trajectory };

    CurveSpec curve;
    bool has_arc = false;
    bool arc_quarter = false;
    double arc_s_a = 0.0, arc_s_b = 0.0;

    Command command = Command::none;
    std::vector<int> n_list;                      // equidist
    BlockerSet blockers;                          // escape
    std::int64_t n_start = 1, n_max = 50;         // escape
    double eps_boundary = 1e-6;                   // escape
    double eps_interior = -1.0;                   // escape; < 0 means auto
    double s0 = 0.0, phi0 = 0.0;                  // orbit
    int steps = 0;                                // orbit
    int trajectory_n = 0;                         // trajectory

    nlohmann::json raw;  // parsed document, echoed into the manifest
};

/// Parse and validate an experiment config; rejects unknown keys and
/// reports field-level errors. At most one command block is allowed.
ExperimentConfig parse_config(const std::string& text);

// deterministic artifact writers
std::string trajectory_json(const Trajectory& traj, const std::string& hash);
std::string trajectory_csv(const Curve& curve, const Trajectory& traj, const std::string& hash);
std::string orbit_csv(const Curve& curve, const std::vector<PhasePoint>& points,
                      const std::string& hash);
std::string deviation_csv(const DeviationTable& table, const std::string& hash);
std::string equidist_json(const DeviationTable& table, const std::string& hash);
std::string shift_report_json(const ShiftReport& rep, const std::string& hash);
std::string certificate_json(const EscapeCertificate& cert, const std::string& hash);
std::string escape_report_json(const ModuliPlan& plan, const DeltaReport& delta,
                               const std::optional<BoundsReport>& bounds,
                               const std::string& hash);
std::string verification_json(const VerifyResult& res, const std::string& hash);
std::string error_json(const std::string& kind, const std::string& message,
                       const std::string& config_path = "");

EscapeCertificate parse_certificate(const std::string& text);

} // namespace billiard::io
