#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "billiard/batch.hpp"
#include "billiard/blocking.hpp"
#include "billiard/errors.hpp"
#include "billiard/io.hpp"

namespace fs = std::filesystem;
using namespace billiard;

namespace {

constexpr const char* kToolName = "billiard-lab";
constexpr const char* kToolVersion = "0.1.0";

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("BIL_LOG");
        if (!env) return 0;
        if (std::strcmp(env, "debug") == 0) return 2;
        if (std::strcmp(env, "info") == 0) return 1;
        return 0;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::fprintf(stderr, "[info] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::fprintf(stderr, "[debug] %s\n", msg.c_str());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::parse_error, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Run {
    io::ExperimentConfig cfg;
    std::string hash;
    fs::path out_dir;
    std::vector<std::string> files;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    void write(const std::string& name, const std::string& content) {
        const fs::path path = out_dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) fail(Errc::validation_error, "cannot write " + path.string());
        out << content;
        files.push_back(name);
        log_debug("wrote " + path.string());
    }

    void finish() {
        nlohmann::json manifest;
        manifest["tool"] = kToolName;
        manifest["version"] = kToolVersion;
        manifest["config_hash"] = hash;
        manifest["config"] = cfg.raw;
        manifest["files"] = files;
        manifest["runtime_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        char stamp[64];
        const std::time_t now = std::time(nullptr);
        std::tm tm_utc{};
        gmtime_r(&now, &tm_utc);
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
        manifest["generated_at"] = stamp;
        const fs::path path = out_dir / "manifest.json";
        std::ofstream out(path, std::ios::binary);
        out << manifest.dump(2) << "\n";

        nlohmann::json status;
        status["status"] = "ok";
        status["out_dir"] = out_dir.string();
        files.push_back("manifest.json");
        status["files"] = files;
        std::printf("%s\n", status.dump().c_str());
    }
};

Run open_run(const std::string& config_path, const std::string& out_dir) {
    Run run;
    run.cfg = io::parse_config(read_file(config_path));
    run.hash = io::config_hash(run.cfg.raw);
    run.out_dir = out_dir;
    fs::create_directories(run.out_dir);
    log_info("config " + config_path + " hash " + run.hash);
    return run;
}

ArcSpec resolve_arc(const io::ExperimentConfig& cfg, const Curve& curve) {
    if (!cfg.has_arc) fail(Errc::validation_error, "arc: required for this command");
    if (cfg.arc_quarter) return make_arc(curve, 0.0, curve.length() / 4.0);
    return make_arc(curve, cfg.arc_s_a, cfg.arc_s_b);
}

void require_command(const io::ExperimentConfig& cfg, io::ExperimentConfig::Command cmd,
                     const char* name) {
    if (cfg.command != cmd)
        fail(Errc::validation_error,
             std::string("config: a \"") + name + "\" block is required for this command");
}

int cmd_curve_info(const std::string& config_path, const std::string& out_dir) {
    Run run = open_run(config_path, out_dir);
    const Curve curve = make_curve(run.cfg.curve);
    std::string out = "{\"config_hash\":\"" + run.hash + "\"";
    out += ",\"L\":" + io::format_double(curve.length());
    out += ",\"diameter\":" + io::format_double(curve.diameter());
    out += ",\"curvature_min\":" + io::format_double(curve.curvature_min());
    out += ",\"curvature_max\":" + io::format_double(curve.curvature_max());
    if (run.cfg.has_arc) {
        const ArcSpec arc = resolve_arc(run.cfg, curve);
        const SigmaMap sm = build_sigma(curve, arc);
        out += ",\"arc_s_A\":" + io::format_double(arc.s_a);
        out += ",\"arc_s_B\":" + io::format_double(arc.s_b);
        out += ",\"S_tot\":" + io::format_double(sm.total_mass());
    }
    out += "}\n";
    run.write("curve_info.json", out);
    run.finish();
    return 0;
}

int cmd_orbit(const std::string& config_path, const std::string& out_dir) {
    Run run = open_run(config_path, out_dir);
    require_command(run.cfg, io::ExperimentConfig::Command::orbit, "orbit");
    const Curve curve = make_curve(run.cfg.curve);
    const auto points = orbit(curve, {run.cfg.s0, run.cfg.phi0}, run.cfg.steps);
    run.write("orbit.csv", io::orbit_csv(curve, points, run.hash));
    run.finish();
    return 0;
}

int cmd_trajectory(const std::string& config_path, const std::string& out_dir) {
    Run run = open_run(config_path, out_dir);
    require_command(run.cfg, io::ExperimentConfig::Command::trajectory, "trajectory");
    const Curve curve = make_curve(run.cfg.curve);
    const SigmaMap sm = build_sigma(curve, resolve_arc(run.cfg, curve));
    const Trajectory traj = solve_min_polyline(curve, sm, run.cfg.trajectory_n);
    run.write("trajectory.json", io::trajectory_json(traj, run.hash));
    run.write("trajectory.csv", io::trajectory_csv(curve, traj, run.hash));
    run.write("shift_report.json",
              io::shift_report_json(shift_consistency(sm, traj), run.hash) + "\n");
    run.finish();
    return 0;
}

int cmd_equidist(const std::string& config_path, const std::string& out_dir, int threads) {
    Run run = open_run(config_path, out_dir);
    require_command(run.cfg, io::ExperimentConfig::Command::equidist, "equidist");
    const Curve curve = make_curve(run.cfg.curve);
    const SigmaMap sm = build_sigma(curve, resolve_arc(run.cfg, curve));
    const DeviationTable table = equidistribution_scan(curve, sm, run.cfg.n_list, threads);
    run.write("deviation_table.csv", io::deviation_csv(table, run.hash));
    run.write("equidist.json", io::equidist_json(table, run.hash));
    std::string reports;
    for (const DeviationRow& row : table.rows)
        if (!row.failed) reports += io::shift_report_json(row.shift, run.hash) + "\n";
    run.write("shift_reports.jsonl", reports);
    run.finish();
    return 0;
}

int cmd_escape(const std::string& config_path, const std::string& out_dir, int threads) {
    Run run = open_run(config_path, out_dir);
    require_command(run.cfg, io::ExperimentConfig::Command::escape, "escape");
    const Curve curve = make_curve(run.cfg.curve);
    const SigmaMap sm = build_sigma(curve, resolve_arc(run.cfg, curve));

    EscapeOptions options;
    options.n_start = run.cfg.n_start;
    options.n_max = run.cfg.n_max;
    options.eps_boundary = run.cfg.eps_boundary;
    options.eps_interior = run.cfg.eps_interior;
    options.threads = threads;

    const ModuliPlan plan = build_moduli(run.cfg.blockers);
    const DeltaReport delta = compute_delta(run.cfg.blockers, plan);
    run.write("escape_report.json",
              io::escape_report_json(plan, delta, std::nullopt, run.hash));

    const EscapeCertificate cert = escape_search(curve, sm, run.cfg.blockers, options);
    log_info("certificate found at N = " + std::to_string(cert.n_used) +
             ", n = " + std::to_string(cert.n));
    run.write("certificate.json", io::certificate_json(cert, run.hash));
    run.finish();
    return 0;
}

int cmd_verify(const std::string& config_path, const std::string& out_dir,
               const std::string& cert_path) {
    Run run = open_run(config_path, out_dir);
    require_command(run.cfg, io::ExperimentConfig::Command::escape, "escape");
    const Curve curve = make_curve(run.cfg.curve);
    const SigmaMap sm = build_sigma(curve, resolve_arc(run.cfg, curve));
    const EscapeCertificate cert = io::parse_certificate(read_file(cert_path));
    const VerifyResult res = verify_certificate(curve, sm, run.cfg.blockers, cert);
    run.write("verification.json", io::verification_json(res, run.hash));
    run.finish();
    return res.passed ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kToolName) + ": convex billiard insecurity experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", cert_path;
    int threads = 1;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config JSON")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker pool size (1 = strictly sequential)");
    };

    CLI::App* info = app.add_subcommand("curve-info", "curve length, curvature and sigma mass");
    add_common(info);
    CLI::App* orb = app.add_subcommand("orbit", "iterate the billiard map, dump CSV");
    add_common(orb);
    CLI::App* traj = app.add_subcommand("trajectory", "solve one equal-angle polyline");
    add_common(traj);
    CLI::App* equi = app.add_subcommand("equidist", "equidistribution-rate scan");
    add_common(equi);
    CLI::App* esc = app.add_subcommand("escape", "search for an unblocked trajectory");
    add_common(esc);
    CLI::App* ver = app.add_subcommand("verify", "re-check an escape certificate");
    add_common(ver);
    ver->add_option("--cert", cert_path, "certificate JSON to verify")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (info->parsed()) return cmd_curve_info(config_path, out_dir);
        if (orb->parsed()) return cmd_orbit(config_path, out_dir);
        if (traj->parsed()) return cmd_trajectory(config_path, out_dir);
        if (equi->parsed()) return cmd_equidist(config_path, out_dir, threads);
        if (esc->parsed()) return cmd_escape(config_path, out_dir, threads);
        if (ver->parsed()) return cmd_verify(config_path, out_dir, cert_path);
    } catch (const Error& e) {
        std::printf("%s", io::error_json(errc_name(e.code()), e.what(), config_path).c_str());
        return 1;
    } catch (const std::exception& e) {
        std::printf("%s", io::error_json("Internal", e.what(), config_path).c_str());
        return 1;
    }
    return 0;
}
