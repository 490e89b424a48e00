// Acceptance suite: one line per criterion, exit code = number of failures.
// argv[1] is the billiard_cli binary (used by the determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "billiard/batch.hpp"
#include "billiard/blocking.hpp"
#include "billiard/errors.hpp"

namespace fs = std::filesystem;
using namespace billiard;

namespace {

constexpr double kPi = std::numbers::pi;
int g_failures = 0;

void criterion(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d: %s  [%s]\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

double mod_dist(double a, double b, double period) {
    double d = a - b;
    d -= period * std::round(d / period);
    return std::abs(d);
}

struct ScanData {
    DeviationTable table;
    bool ok = false;
    double runtime = 0.0;
};

ScanData run_scan() {
    ScanData data;
    const auto t0 = std::chrono::steady_clock::now();
    const Curve c = make_curve(CurveSpec::ellipse(2.0, 1.0));
    const SigmaMap sm = build_sigma(c, make_arc(c, 0.0, c.length() / 4.0));
    data.table = equidistribution_scan(c, sm, {8, 16, 32, 64, 128, 256});
    data.runtime = seconds_since(t0);
    data.ok = true;
    for (const DeviationRow& row : data.table.rows)
        if (row.failed) data.ok = false;
    return data;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";

    // 1. circle closed form on 1000 random phase points
    {
        const auto t0 = std::chrono::steady_clock::now();
        const Curve c = make_curve(CurveSpec::circle(1.0));
        std::mt19937 rng(2024);
        std::uniform_real_distribution<double> ss(0.0, 2.0 * kPi);
        std::uniform_real_distribution<double> ps(0.01, kPi - 0.01);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const PhasePoint x{ss(rng), ps(rng)};
            const PhasePoint next = next_collision(c, x);
            worst = std::max(worst, mod_dist(next.s, x.s + 2.0 * x.phi, 2.0 * kPi));
            worst = std::max(worst, std::abs(next.phi - x.phi));
        }
        const double dt = seconds_since(t0);
        criterion(1, "circle closed form, 1000 random points", worst <= 1e-10 && dt < 1.0,
                  fmt("max dev %.2e (tol 1e-10), %.2fs (budget 1s)", worst, dt));
    }

    // 2. symplecticity on 100 random admissible ellipse points
    {
        const auto t0 = std::chrono::steady_clock::now();
        const Curve c = make_curve(CurveSpec::ellipse(2.0, 1.0));
        std::mt19937 rng(2025);
        std::uniform_real_distribution<double> ss(0.0, c.length());
        std::uniform_real_distribution<double> ps(0.1, kPi - 0.1);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i)
            worst = std::max(worst,
                             std::abs(symplectic_check(c, {ss(rng), ps(rng)}, 1e-5) - 1.0));
        const double dt = seconds_since(t0);
        criterion(2, "area form invariance on ellipse(2,1)", worst <= 1e-4 && dt < 5.0,
                  fmt("max |det-1| %.2e (tol 1e-4), %.2fs (budget 5s)", worst, dt));
    }

    // 3-5 share one scan of the ellipse quarter arc
    const ScanData scan = run_scan();
    {
        double ratio_lo = 1e300, ratio_hi = 0.0;
        for (const DeviationRow& row : scan.table.rows)
            if (row.n >= 32) {
                ratio_lo = std::min(ratio_lo, row.n2dn);
                ratio_hi = std::max(ratio_hi, row.n2dn);
            }
        const double ratio = ratio_hi / ratio_lo;
        const bool pass = scan.ok && scan.table.slope >= -2.3 && scan.table.slope <= -1.7 &&
                          ratio < 10.0 && scan.runtime < 60.0;
        criterion(3, "equidistribution rate D_n ~ n^-2", pass,
                  fmt("slope %.4f (window [-2.3,-1.7]), n^2 D_n ratio %.3f (<10), %.1fs",
                      scan.table.slope, ratio, scan.runtime));
    }
    {
        std::vector<double> lx, ly;
        for (const DeviationRow& row : scan.table.rows) {
            lx.push_back(std::log(row.n));
            ly.push_back(std::log(row.phi_max));
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        const double nn = static_cast<double>(lx.size());
        const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
        criterion(4, "grazing angle phi_max ~ n^-1", scan.ok && slope >= -1.15 && slope <= -0.85,
                  fmt("slope %.4f (window [-1.15,-0.85])", slope));
    }
    {
        double lo = 1e300, hi = 0.0;
        for (const DeviationRow& row : scan.table.rows)
            if (row.n >= 32) {
                const double scaled = row.h_spread * row.n * row.n;
                lo = std::min(lo, scaled);
                hi = std::max(hi, scaled);
            }
        criterion(5, "Hamiltonian conservation: n^2 x relative spread bounded",
                  scan.ok && hi / lo < 10.0, fmt("n^2 spread ratio %.3f (<10)", hi / lo));
    }

    // 6. shift relation: exact circle case, then the stated doubling window
    {
        const auto t0 = std::chrono::steady_clock::now();
        const Curve c = make_curve(CurveSpec::circle(1.0));
        const SigmaMap sm = build_sigma(c, make_arc(c, 0.0, 1.0));
        double worst = 0.0;
        bool solved = true;
        for (int n = 2; n <= 256; ++n) {
            try {
                const ShiftReport rep = shift_consistency(sm, solve_min_polyline(c, sm, n));
                worst = std::max(worst, rep.max_sqrth_dev);
            } catch (const Error&) {
                solved = false;
                break;
            }
        }
        const Curve e = make_curve(CurveSpec::ellipse(2.0, 1.0));
        const SigmaMap sme = build_sigma(e, make_arc(e, 0.0, e.length() / 4.0));
        const double d16 = shift_consistency(sme, solve_min_polyline(e, sme, 16)).max_dsigma_dev;
        const double d32 = shift_consistency(sme, solve_min_polyline(e, sme, 32)).max_dsigma_dev;
        const double ratio = d16 / d32;
        const bool pass = solved && worst <= 1e-9 && ratio >= 3.0 && ratio <= 5.5;
        criterion(6, "shift relation: circle exact, quarter-arc doubling window", pass,
                  fmt("circle max |dsigma-sqrt(H)| %.2e (tol 1e-9); 16->32 decay %.3f "
                      "(stated window [3,5.5]; measured cubic rate), %.1fs",
                      worst, ratio, seconds_since(t0)));
    }

    // 7. solver vs exhaustive grid (direction under the extremal-object
    //    correction; the grid value sits below the continuum extremum)
    {
        const auto t0 = std::chrono::steady_clock::now();
        bool pass = true;
        std::string detail;
        const Curve circ = make_curve(CurveSpec::circle(1.0));
        const SigmaMap smc = build_sigma(circ, make_arc(circ, 0.0, 1.0));
        const Curve ell = make_curve(CurveSpec::ellipse(2.0, 1.0));
        const SigmaMap sme = build_sigma(ell, make_arc(ell, 0.0, ell.length() / 4.0));
        struct Case {
            const Curve* curve;
            const SigmaMap* sm;
            int n;
            const char* tag;
        };
        for (const Case& c :
             {Case{&circ, &smc, 2, "circle n=2"}, Case{&circ, &smc, 3, "circle n=3"},
              Case{&ell, &sme, 2, "ellipse n=2"}, Case{&ell, &sme, 3, "ellipse n=3"}}) {
            const Trajectory solved = solve_min_polyline(*c.curve, *c.sm, c.n);
            const Trajectory grid = brute_force_min(*c.curve, *c.sm, c.n, 2001);
            const double step = c.sm->arc().span() / 2000.0;
            if (!(grid.total_length <= solved.total_length + 1e-8)) pass = false;
            double vdev = 0.0;
            for (int i = 1; i < c.n; ++i)
                vdev = std::max(vdev, std::abs(solved.vertex_s[static_cast<std::size_t>(i)] -
                                               grid.vertex_s[static_cast<std::size_t>(i)]));
            if (vdev > step) pass = false;
            detail += fmt("%s gap %.1e vdev %.1e; ", c.tag,
                          solved.total_length - grid.total_length, vdev);
        }
        const double dt = seconds_since(t0);
        pass = pass && dt < 120.0;
        criterion(7, "solver matches exhaustive grid search (grid 2001)", pass,
                  detail + fmt("%.1fs (budget 120s)", dt));
    }

    // 8. exact escape on the circle arc
    {
        const Curve c = make_curve(CurveSpec::circle(1.0));
        const SigmaMap sm = build_sigma(c, make_arc(c, 0.0, 1.0));
        BlockerSet one;
        one.boundary.push_back(BoundaryBlocker::make_rational(1, 2));
        const EscapeCertificate c1 = escape_search(c, sm, one, {});
        const bool pass_a = c1.n == 3 && std::abs(c1.boundary_clearance - 1.0 / 6.0) <= 1e-9;

        BlockerSet two;
        two.boundary.push_back(BoundaryBlocker::make_rational(1, 2));
        two.boundary.push_back(BoundaryBlocker::make_rational(2, 3));
        const EscapeCertificate c2 = escape_search(c, sm, two, {});
        const bool pass_b =
            c2.n == 7 && c2.boundary_clearance >= 1.0 / 14.0 - 1e-9;  // as stated
        criterion(8, "exact escape: {1/2} then {1/2, 2/3}", pass_a && pass_b,
                  fmt("n=%lld clearance %.9f (1/6); n=%lld clearance %.9f (stated bound "
                      "1/14=0.0714; exact min over both blockers is 1/21=0.047619)",
                      static_cast<long long>(c1.n), c1.boundary_clearance,
                      static_cast<long long>(c2.n), c2.boundary_clearance));
    }

    // 9. geometric escape on the ellipse quarter arc
    {
        const auto t0 = std::chrono::steady_clock::now();
        const Curve c = make_curve(CurveSpec::ellipse(2.0, 1.0));
        const SigmaMap sm = build_sigma(c, make_arc(c, 0.0, c.length() / 4.0));
        BlockerSet bs;
        bs.boundary.push_back(BoundaryBlocker::make_rational(1, 2));
        bs.boundary.push_back(BoundaryBlocker::make_rational(2, 3));
        bs.boundary.push_back(BoundaryBlocker::make_irrational(0.7071067811865475));
        bs.interior.push_back({0.5, 0.25});
        EscapeOptions opt;
        opt.n_max = 50;
        bool pass = false;
        std::string detail = "escape failed";
        try {
            const EscapeCertificate cert = escape_search(c, sm, bs, opt);
            const VerifyResult ver = verify_certificate(c, sm, bs, cert);
            const DeltaReport delta = compute_delta(bs, build_moduli(bs));
            const bool delta_ok = delta.finite &&
                                  std::abs(delta.delta - 0.0151154) <= 1e-6 &&
                                  delta.num == 13 && delta.den == 18;
            const double dt = seconds_since(t0);
            pass = ver.passed && delta_ok && dt < 60.0;
            detail = fmt("n=%lld (N=%lld), verified=%s, delta=%.7f witness %lld/%lld, %.1fs",
                         static_cast<long long>(cert.n), static_cast<long long>(cert.n_used),
                         ver.passed ? "yes" : "no", delta.delta,
                         static_cast<long long>(delta.num), static_cast<long long>(delta.den),
                         dt);
        } catch (const Error& e) {
            detail = std::string("error: ") + e.what();
        }
        criterion(9, "geometric escape with interior blocker", pass, detail);
    }

    // 10. byte-identical certificate across two identical CLI runs
    {
        bool pass = false;
        std::string detail = "cli path missing";
        if (!cli.empty()) {
            const fs::path dir = fs::temp_directory_path() / "bil_acceptance";
            fs::remove_all(dir);
            fs::create_directories(dir);
            const fs::path cfg = dir / "escape.json";
            std::ofstream(cfg) << R"({"curve":{"kind":"ellipse","a":2.0,"b":1.0},)"
                               << R"("arc":{"quarter":true},"escape":{"blockers":)"
                               << R"({"boundary":[{"rational":[1,2]},{"rational":[2,3]},)"
                               << R"({"irrational":0.7071067811865475}],)"
                               << R"("interior":[[0.5,0.25]]},"N_start":1,"N_max":50}})";
            const auto run_once = [&](const std::string& sub) {
                const std::string cmd = cli + " escape --config " + cfg.string() + " --out " +
                                        (dir / sub).string() + " > /dev/null 2>&1";
                return std::system(cmd.c_str()) == 0;
            };
            if (run_once("a") && run_once("b")) {
                const std::string cert_a = slurp(dir / "a" / "certificate.json");
                const std::string cert_b = slurp(dir / "b" / "certificate.json");
                pass = !cert_a.empty() && cert_a == cert_b;
                detail = fmt("certificate.json %zu bytes, identical=%s", cert_a.size(),
                             pass ? "yes" : "no");
            } else {
                detail = "cli escape run failed";
            }
        }
        criterion(10, "determinism: byte-identical certificate.json", pass, detail);
    }

    std::printf("%d/10 criteria passed\n", 10 - g_failures);
    return g_failures;
}
