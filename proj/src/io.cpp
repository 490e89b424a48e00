#include "billiard/io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "billiard/errors.hpp"

namespace billiard::io {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string finite_or_null(double v) {
    return std::isfinite(v) ? format_double(v) : "null";
}

std::string config_hash(const json& canonical) {
    const std::string text = canonical.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& reason) {
    fail(Errc::validation_error, path + ": " + reason);
}

void require_keys(const json& j, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    if (!j.is_object()) bad_field(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) { ok = true; break; }
        if (!ok) bad_field(path + "." + key, "unknown key");
    }
}

double get_number(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) bad_field(path + "." + key, "missing");
    if (!j.at(key).is_number()) bad_field(path + "." + key, "expected a number");
    return j.at(key).get<double>();
}

std::int64_t get_integer(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) bad_field(path + "." + key, "missing");
    if (!j.at(key).is_number_integer()) bad_field(path + "." + key, "expected an integer");
    return j.at(key).get<std::int64_t>();
}

} // namespace

CurveSpec parse_curve_spec(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        bad_field(path, "expected an object with a \"kind\" string");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "circle") {
        require_keys(j, path, {"kind", "radius"});
        const double radius = get_number(j, path, "radius");
        if (!(radius > 0.0)) bad_field(path + ".radius", "radius > 0 required");
        return CurveSpec::circle(radius);
    }
    if (kind == "ellipse") {
        require_keys(j, path, {"kind", "a", "b"});
        const double a = get_number(j, path, "a");
        const double b = get_number(j, path, "b");
        if (!(b > 0.0)) bad_field(path + ".b", "b > 0 required");
        if (!(a >= b)) bad_field(path + ".a", "a >= b required");
        return CurveSpec::ellipse(a, b);
    }
    if (kind == "fourier_circle") {
        require_keys(j, path, {"kind", "r0", "harmonics"});
        const double r0 = get_number(j, path, "r0");
        if (!(r0 > 0.0)) bad_field(path + ".r0", "r0 > 0 required");
        std::vector<Harmonic> harmonics;
        if (!j.contains("harmonics") || !j.at("harmonics").is_array())
            bad_field(path + ".harmonics", "expected an array");
        int hi = 0;
        for (const json& h : j.at("harmonics")) {
            const std::string hp = path + ".harmonics[" + std::to_string(hi++) + "]";
            require_keys(h, hp, {"m", "cos", "sin"});
            const std::int64_t m = get_integer(h, hp, "m");
            if (m < 2) bad_field(hp + ".m", "harmonic index >= 2 required");
            Harmonic harm;
            harm.index = static_cast<int>(m);
            harm.cos_amp = h.contains("cos") ? get_number(h, hp, "cos") : 0.0;
            harm.sin_amp = h.contains("sin") ? get_number(h, hp, "sin") : 0.0;
            harmonics.push_back(harm);
        }
        return CurveSpec::fourier_circle(r0, std::move(harmonics));
    }
    bad_field(path + ".kind", "unknown kind \"" + kind + "\"");
}

BlockerSet parse_blockers(const json& j, const std::string& path) {
    require_keys(j, path, {"boundary", "interior"});
    BlockerSet out;
    if (j.contains("boundary")) {
        if (!j.at("boundary").is_array()) bad_field(path + ".boundary", "expected an array");
        int bi = 0;
        for (const json& entry : j.at("boundary")) {
            const std::string bp = path + ".boundary[" + std::to_string(bi++) + "]";
            require_keys(entry, bp, {"rational", "irrational"});
            const bool has_rat = entry.contains("rational");
            const bool has_irr = entry.contains("irrational");
            if (has_rat == has_irr)
                bad_field(bp, "exactly one of \"rational\" or \"irrational\" required");
            try {
                if (has_rat) {
                    const json& r = entry.at("rational");
                    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() ||
                        !r[1].is_number_integer())
                        bad_field(bp + ".rational", "expected [p, q] integers");
                    out.boundary.push_back(BoundaryBlocker::make_rational(
                        r[0].get<std::int64_t>(), r[1].get<std::int64_t>()));
                } else {
                    if (!entry.at("irrational").is_number())
                        bad_field(bp + ".irrational", "expected a number");
                    out.boundary.push_back(
                        BoundaryBlocker::make_irrational(entry.at("irrational").get<double>()));
                }
            } catch (const Error& e) {
                if (e.code() == Errc::validation_error)
                    bad_field(bp, e.what());
                throw;
            }
        }
    }
    if (j.contains("interior")) {
        if (!j.at("interior").is_array()) bad_field(path + ".interior", "expected an array");
        int pi = 0;
        for (const json& entry : j.at("interior")) {
            const std::string pp = path + ".interior[" + std::to_string(pi++) + "]";
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
                !entry[1].is_number())
                bad_field(pp, "expected [x, y]");
            out.interior.push_back({entry[0].get<double>(), entry[1].get<double>()});
        }
    }
    return out;
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(Errc::parse_error, e.what());
    }
    require_keys(j, "config",
                 {"curve", "arc", "equidist", "escape", "orbit", "trajectory"});

    ExperimentConfig cfg;
    cfg.raw = j;
    if (!j.contains("curve")) bad_field("config.curve", "missing");
    cfg.curve = parse_curve_spec(j.at("curve"));

    if (j.contains("arc")) {
        const json& a = j.at("arc");
        cfg.has_arc = true;
        if (a.is_object() && a.contains("quarter")) {
            require_keys(a, "arc", {"quarter"});
            if (!a.at("quarter").is_boolean() || !a.at("quarter").get<bool>())
                bad_field("arc.quarter", "only true is meaningful");
            cfg.arc_quarter = true;
        } else {
            require_keys(a, "arc", {"s_A", "s_B"});
            cfg.arc_s_a = get_number(a, "arc", "s_A");
            cfg.arc_s_b = get_number(a, "arc", "s_B");
            if (!(cfg.arc_s_b > cfg.arc_s_a)) bad_field("arc", "s_B > s_A required");
        }
    }

    int commands = 0;
    if (j.contains("equidist")) {
        ++commands;
        cfg.command = ExperimentConfig::Command::equidist;
        const json& e = j.at("equidist");
        require_keys(e, "equidist", {"n_list"});
        if (!e.contains("n_list") || !e.at("n_list").is_array() || e.at("n_list").empty())
            bad_field("equidist.n_list", "expected a non-empty array of integers");
        for (const json& v : e.at("n_list")) {
            if (!v.is_number_integer()) bad_field("equidist.n_list", "expected integers");
            cfg.n_list.push_back(v.get<int>());
        }
    }
    if (j.contains("escape")) {
        ++commands;
        cfg.command = ExperimentConfig::Command::escape;
        const json& e = j.at("escape");
        require_keys(e, "escape",
                     {"blockers", "N_start", "N_max", "eps_boundary", "eps_interior"});
        if (!e.contains("blockers")) bad_field("escape.blockers", "missing");
        cfg.blockers = parse_blockers(e.at("blockers"), "escape.blockers");
        if (e.contains("N_start")) cfg.n_start = get_integer(e, "escape", "N_start");
        if (e.contains("N_max")) cfg.n_max = get_integer(e, "escape", "N_max");
        if (cfg.n_start < 0) bad_field("escape.N_start", "N_start >= 0 required");
        if (cfg.n_max < cfg.n_start) bad_field("escape.N_max", "N_max >= N_start required");
        if (e.contains("eps_boundary")) {
            cfg.eps_boundary = get_number(e, "escape", "eps_boundary");
            if (!(cfg.eps_boundary > 0.0))
                bad_field("escape.eps_boundary", "positive tolerance required");
        }
        if (e.contains("eps_interior")) {
            cfg.eps_interior = get_number(e, "escape", "eps_interior");
            if (!(cfg.eps_interior > 0.0))
                bad_field("escape.eps_interior", "positive tolerance required");
        }
    }
    if (j.contains("orbit")) {
        ++commands;
        cfg.command = ExperimentConfig::Command::orbit;
        const json& o = j.at("orbit");
        require_keys(o, "orbit", {"s0", "phi0", "steps"});
        cfg.s0 = get_number(o, "orbit", "s0");
        cfg.phi0 = get_number(o, "orbit", "phi0");
        const std::int64_t steps = get_integer(o, "orbit", "steps");
        if (steps < 1) bad_field("orbit.steps", "steps >= 1 required");
        cfg.steps = static_cast<int>(steps);
    }
    if (j.contains("trajectory")) {
        ++commands;
        cfg.command = ExperimentConfig::Command::trajectory;
        const json& t = j.at("trajectory");
        require_keys(t, "trajectory", {"n"});
        const std::int64_t n = get_integer(t, "trajectory", "n");
        if (n < 2) bad_field("trajectory.n", "n >= 2 required");
        cfg.trajectory_n = static_cast<int>(n);
    }
    if (commands > 1) bad_field("config", "exactly one command block required");
    return cfg;
}

namespace {

void append_kv(std::string& out, const char* key, const std::string& value, bool quote) {
    out += '"';
    out += key;
    out += "\":";
    if (quote) out += '"';
    out += value;
    if (quote) out += '"';
}

void append_array(std::string& out, const char* key, const std::vector<double>& values) {
    out += '"';
    out += key;
    out += "\":[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_double(values[i]);
    }
    out += ']';
}

std::string trajectory_body(const Trajectory& traj) {
    std::string out = "{";
    append_kv(out, "n", std::to_string(traj.n), false);
    out += ',';
    append_array(out, "vertex_s", traj.vertex_s);
    out += ',';
    append_array(out, "vertex_sigma", traj.vertex_sigma);
    out += ',';
    append_kv(out, "total_length", format_double(traj.total_length), false);
    out += ',';
    append_kv(out, "reflection_residual", format_double(traj.reflection_residual), false);
    out += '}';
    return out;
}

} // namespace

std::string trajectory_json(const Trajectory& traj, const std::string& hash) {
    std::string out = "{";
    append_kv(out, "config_hash", hash, true);
    out += ",\"trajectory\":";
    out += trajectory_body(traj);
    out += "}\n";
    return out;
}

std::string trajectory_csv(const Curve& curve, const Trajectory& traj,
                           const std::string& hash) {
    std::string out = "# config_hash=" + hash + "\n";
    out += "index,s,sigma,x,y\n";
    for (std::size_t i = 0; i < traj.vertex_s.size(); ++i) {
        const Vec2 p = curve.geometry_at(traj.vertex_s[i]).point;
        out += std::to_string(i);
        out += ',';
        out += format_double(traj.vertex_s[i]);
        out += ',';
        out += format_double(traj.vertex_sigma[i]);
        out += ',';
        out += format_double(p.x);
        out += ',';
        out += format_double(p.y);
        out += '\n';
    }
    return out;
}

std::string orbit_csv(const Curve& curve, const std::vector<PhasePoint>& points,
                      const std::string& hash) {
    std::string out = "# config_hash=" + hash + "\n";
    out += "index,s,phi,x,y\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec2 p = curve.geometry_at(points[i].s).point;
        out += std::to_string(i);
        out += ',';
        out += format_double(points[i].s);
        out += ',';
        out += format_double(points[i].phi);
        out += ',';
        out += format_double(p.x);
        out += ',';
        out += format_double(p.y);
        out += '\n';
    }
    return out;
}

std::string deviation_csv(const DeviationTable& table, const std::string& hash) {
    std::string out = "# config_hash=" + hash + "\n";
    out += "n,D_n,n2Dn,phi_max,H_spread\n";
    for (const DeviationRow& row : table.rows) {
        if (row.failed) continue;
        out += std::to_string(row.n);
        out += ',';
        out += format_double(row.d_n);
        out += ',';
        out += format_double(row.n2dn);
        out += ',';
        out += format_double(row.phi_max);
        out += ',';
        out += format_double(row.h_spread);
        out += '\n';
    }
    return out;
}

std::string equidist_json(const DeviationTable& table, const std::string& hash) {
    std::string out = "{";
    append_kv(out, "config_hash", hash, true);
    out += ",\"slope\":";
    out += std::isnan(table.slope) ? "null" : format_double(table.slope);
    out += ',';
    append_kv(out, "c_hat", format_double(table.c_hat), false);
    out += ',';
    append_kv(out, "degenerate", table.degenerate ? "true" : "false", false);
    out += ",\"failed_rows\":[";
    bool first = true;
    for (const DeviationRow& row : table.rows) {
        if (!row.failed) continue;
        if (!first) out += ',';
        first = false;
        out += "{\"n\":" + std::to_string(row.n) + ",\"error\":" + nlohmann::json(row.error).dump() + "}";
    }
    out += "]}\n";
    return out;
}

std::string shift_report_json(const ShiftReport& rep, const std::string& hash) {
    std::string out = "{";
    append_kv(out, "config_hash", hash, true);
    out += ',';
    append_kv(out, "n", std::to_string(rep.n), false);
    out += ',';
    append_kv(out, "max_dsigma_dev", format_double(rep.max_dsigma_dev), false);
    out += ',';
    append_kv(out, "max_sqrtH_dev", format_double(rep.max_sqrth_dev), false);
    out += ',';
    append_kv(out, "H_spread_rel", format_double(rep.h_spread_rel), false);
    out += '}';
    return out;
}

std::string certificate_json(const EscapeCertificate& cert, const std::string& hash) {
    std::string out = "{";
    append_kv(out, "config_hash", hash, true);
    out += ',';
    append_kv(out, "N_used", std::to_string(cert.n_used), false);
    out += ',';
    append_kv(out, "i_used", std::to_string(cert.i_used), false);
    out += ',';
    append_kv(out, "n", std::to_string(cert.n), false);
    out += ',';
    append_kv(out, "boundary_clearance", finite_or_null(cert.boundary_clearance), false);
    out += ',';
    append_kv(out, "interior_clearance", finite_or_null(cert.interior_clearance), false);
    out += ',';
    append_kv(out, "eps_boundary", format_double(cert.eps_boundary), false);
    out += ',';
    append_kv(out, "eps_interior", format_double(cert.eps_interior), false);
    out += ",\"trajectory\":";
    out += trajectory_body(cert.trajectory);
    out += "}\n";
    return out;
}

std::string escape_report_json(const ModuliPlan& plan, const DeltaReport& delta,
                               const std::optional<BoundsReport>& bounds,
                               const std::string& hash) {
    std::string out = "{";
    append_kv(out, "config_hash", hash, true);
    out += ',';
    append_kv(out, "Q", std::to_string(plan.q_product), false);
    out += ',';
    append_kv(out, "k", std::to_string(plan.k), false);
    out += ",\"delta\":";
    out += delta.finite ? format_double(delta.delta) : "null";
    if (delta.finite) {
        out += ',';
        append_kv(out, "delta_witness_blocker", format_double(delta.blocker_value), false);
        out += ",\"delta_witness_fraction\":[" + std::to_string(delta.num) + "," +
               std::to_string(delta.den) + "]";
    }
    if (bounds) {
        out += ',';
        append_kv(out, "bound_lower", format_double(bounds->lower), false);
        out += ',';
        append_kv(out, "bound_upper", format_double(bounds->upper), false);
        out += ',';
        append_kv(out, "N_threshold", std::to_string(bounds->n_threshold), false);
    }
    out += "}\n";
    return out;
}

std::string verification_json(const VerifyResult& res, const std::string& hash) {
    std::string out = "{";
    append_kv(out, "config_hash", hash, true);
    out += ',';
    append_kv(out, "passed", res.passed ? "true" : "false", false);
    out += ',';
    append_array(out, "boundary_distance", res.boundary_distance);
    out += ',';
    append_array(out, "interior_distance", res.interior_distance);
    out += ',';
    append_kv(out, "reflection_residual", format_double(res.reflection_residual), false);
    out += ",\"offending_boundary\":[";
    for (std::size_t i = 0; i < res.offending_boundary.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(res.offending_boundary[i]);
    }
    out += "],\"offending_interior\":[";
    for (std::size_t i = 0; i < res.offending_interior.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(res.offending_interior[i]);
    }
    out += "]}\n";
    return out;
}

std::string error_json(const std::string& kind, const std::string& message,
                       const std::string& config_path) {
    nlohmann::json j;
    j["error"]["kind"] = kind;
    j["error"]["message"] = message;
    if (!config_path.empty()) j["error"]["config"] = config_path;
    return j.dump() + "\n";
}

EscapeCertificate parse_certificate(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(Errc::parse_error, e.what());
    }
    EscapeCertificate cert;
    try {
        cert.n_used = j.at("N_used").get<std::int64_t>();
        cert.i_used = j.at("i_used").get<int>();
        cert.n = j.at("n").get<std::int64_t>();
        const auto clearance = [&](const char* key) {
            return j.at(key).is_null() ? std::numeric_limits<double>::infinity()
                                       : j.at(key).get<double>();
        };
        cert.boundary_clearance = clearance("boundary_clearance");
        cert.interior_clearance = clearance("interior_clearance");
        cert.eps_boundary = j.at("eps_boundary").get<double>();
        cert.eps_interior = j.at("eps_interior").get<double>();
        const json& t = j.at("trajectory");
        cert.trajectory.n = t.at("n").get<int>();
        cert.trajectory.vertex_s = t.at("vertex_s").get<std::vector<double>>();
        cert.trajectory.vertex_sigma = t.at("vertex_sigma").get<std::vector<double>>();
        cert.trajectory.total_length = t.at("total_length").get<double>();
        cert.trajectory.reflection_residual = t.at("reflection_residual").get<double>();
    } catch (const json::exception& e) {
        fail(Errc::validation_error, std::string("certificate: ") + e.what());
    }
    return cert;
}

} // namespace billiard::io
