#include "billiard/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "billiard/errors.hpp"
#include "billiard/quadrature.hpp"

namespace billiard {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kPanels = 4096;        // arc-length table resolution
constexpr double kPanelTol = 1e-12;  // absolute quadrature budget per panel

} // namespace

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::invalid_spec: return "InvalidSpec";
        case Errc::non_convex: return "NonConvex";
        case Errc::out_of_range: return "OutOfRange";
        case Errc::no_convergence: return "NoConvergence";
        case Errc::degenerate_chord: return "DegenerateChord";
        case Errc::degenerate_segment: return "DegenerateSegment";
        case Errc::too_large: return "TooLarge";
        case Errc::ordering_violated: return "OrderingViolated";
        case Errc::infinite_delta: return "InfiniteDelta";
        case Errc::not_found: return "NotFound";
        case Errc::stale_certificate: return "StaleCertificate";
        case Errc::parse_error: return "ParseError";
        case Errc::validation_error: return "ValidationError";
        case Errc::overflow: return "Overflow";
    }
    return "Unknown";
}

CurveSpec CurveSpec::circle(double radius) {
    CurveSpec s;
    s.kind = Kind::circle;
    s.radius = radius;
    return s;
}

CurveSpec CurveSpec::ellipse(double a, double b) {
    CurveSpec s;
    s.kind = Kind::ellipse;
    s.a = a;
    s.b = b;
    return s;
}

CurveSpec CurveSpec::fourier_circle(double r0, std::vector<Harmonic> harmonics) {
    CurveSpec s;
    s.kind = Kind::fourier_circle;
    s.r0 = r0;
    s.harmonics = std::move(harmonics);
    return s;
}

struct Curve::Impl {
    CurveSpec spec;
    double length = 0.0;
    double diameter = 0.0;
    double k_min = 0.0, k_max = 0.0;
    double speed_max = 0.0;
    double dt = kTwoPi / kPanels;
    std::vector<double> cum_s;  // cum_s[i] = s(i * dt), size kPanels + 1

    // radial profile for fourier_circle
    double radial(double t, int deriv) const {
        double r = deriv == 0 ? spec.r0 : 0.0;
        for (const Harmonic& h : spec.harmonics) {
            const double m = h.index;
            const double c = std::cos(m * t);
            const double s = std::sin(m * t);
            switch (deriv) {
                case 0: r += h.cos_amp * c + h.sin_amp * s; break;
                case 1: r += m * (-h.cos_amp * s + h.sin_amp * c); break;
                default: r += m * m * (-h.cos_amp * c - h.sin_amp * s); break;
            }
        }
        return r;
    }

    Vec2 position(double t) const {
        switch (spec.kind) {
            case CurveSpec::Kind::circle:
                return {spec.radius * std::cos(t), spec.radius * std::sin(t)};
            case CurveSpec::Kind::ellipse:
                return {spec.a * std::cos(t), spec.b * std::sin(t)};
            case CurveSpec::Kind::fourier_circle: {
                const double r = radial(t, 0);
                return {r * std::cos(t), r * std::sin(t)};
            }
        }
        return {};
    }

    Vec2 derivative(double t) const {
        switch (spec.kind) {
            case CurveSpec::Kind::circle:
                return {-spec.radius * std::sin(t), spec.radius * std::cos(t)};
            case CurveSpec::Kind::ellipse:
                return {-spec.a * std::sin(t), spec.b * std::cos(t)};
            case CurveSpec::Kind::fourier_circle: {
                const double r = radial(t, 0);
                const double rp = radial(t, 1);
                const double c = std::cos(t), s = std::sin(t);
                return {rp * c - r * s, rp * s + r * c};
            }
        }
        return {};
    }

    Vec2 second_derivative(double t) const {
        switch (spec.kind) {
            case CurveSpec::Kind::circle:
                return {-spec.radius * std::cos(t), -spec.radius * std::sin(t)};
            case CurveSpec::Kind::ellipse:
                return {-spec.a * std::cos(t), -spec.b * std::sin(t)};
            case CurveSpec::Kind::fourier_circle: {
                const double r = radial(t, 0);
                const double rp = radial(t, 1);
                const double rpp = radial(t, 2);
                const double c = std::cos(t), s = std::sin(t);
                return {rpp * c - 2.0 * rp * s - r * c, rpp * s + 2.0 * rp * c - r * s};
            }
        }
        return {};
    }

    double speed(double t) const { return derivative(t).norm(); }

    double curvature(double t) const {
        const Vec2 d1 = derivative(t);
        const Vec2 d2 = second_derivative(t);
        const double v = d1.norm();
        return cross(d1, d2) / (v * v * v);
    }

    // s(t) extended monotonically to all of R: s(t + 2*pi) = s(t) + L.
    double arclength_ext(double t) const {
        double turns = std::floor(t / kTwoPi);
        double tr = t - turns * kTwoPi;
        if (tr >= kTwoPi) {  // guard rounding at the seam
            tr -= kTwoPi;
            turns += 1.0;
        }
        int i = static_cast<int>(tr / dt);
        i = std::clamp(i, 0, kPanels - 1);
        const double t_i = i * dt;
        return turns * length + cum_s[i] + gauss7([this](double u) { return speed(u); }, t_i, tr);
    }
};

namespace {

void validate_spec(const CurveSpec& spec) {
    switch (spec.kind) {
        case CurveSpec::Kind::circle:
            if (!(spec.radius > 0.0))
                fail(Errc::invalid_spec, "circle requires radius > 0");
            break;
        case CurveSpec::Kind::ellipse:
            if (!(spec.b > 0.0))
                fail(Errc::invalid_spec, "ellipse requires b > 0");
            if (!(spec.a >= spec.b))
                fail(Errc::invalid_spec, "ellipse requires a >= b");
            break;
        case CurveSpec::Kind::fourier_circle:
            if (!(spec.r0 > 0.0))
                fail(Errc::invalid_spec, "fourier_circle requires r0 > 0");
            for (const Harmonic& h : spec.harmonics)
                if (h.index < 2)
                    fail(Errc::invalid_spec, "fourier_circle harmonic index must be >= 2");
            break;
    }
}

} // namespace

Curve::Curve(const CurveSpec& spec) {
    validate_spec(spec);
    auto impl = std::make_shared<Impl>();
    impl->spec = spec;

    // strict convexity on a dense grid; also positivity of the radial profile
    impl->k_min = std::numeric_limits<double>::infinity();
    impl->k_max = 0.0;
    impl->speed_max = 0.0;
    for (int i = 0; i < kPanels; ++i) {
        const double t = i * impl->dt;
        const double k = impl->curvature(t);
        if (!(k > 0.0))
            fail(Errc::non_convex, "curvature not strictly positive at t = " + std::to_string(t));
        if (spec.kind == CurveSpec::Kind::fourier_circle && !(impl->radial(t, 0) > 0.0))
            fail(Errc::non_convex, "radial profile not positive at t = " + std::to_string(t));
        impl->k_min = std::min(impl->k_min, k);
        impl->k_max = std::max(impl->k_max, k);
        impl->speed_max = std::max(impl->speed_max, impl->speed(t));
    }

    impl->cum_s.resize(kPanels + 1);
    impl->cum_s[0] = 0.0;
    for (int i = 0; i < kPanels; ++i) {
        const double t0 = i * impl->dt;
        const double t1 = (i + 1) * impl->dt;
        impl->cum_s[i + 1] =
            impl->cum_s[i] +
            adaptive_simpson([&](double u) { return impl->speed(u); }, t0, t1, kPanelTol);
    }
    impl->length = impl->cum_s[kPanels];

    switch (spec.kind) {
        case CurveSpec::Kind::circle: impl->diameter = 2.0 * spec.radius; break;
        case CurveSpec::Kind::ellipse: impl->diameter = 2.0 * spec.a; break;
        case CurveSpec::Kind::fourier_circle: {
            // grid estimate; adequate for clearance scales
            const int g = 512;
            std::vector<Vec2> pts(g);
            for (int i = 0; i < g; ++i) pts[i] = impl->position(i * kTwoPi / g);
            double d2 = 0.0;
            for (int i = 0; i < g; ++i)
                for (int j = i + 1; j < g; ++j)
                    d2 = std::max(d2, (pts[i] - pts[j]).norm2());
            impl->diameter = std::sqrt(d2);
            break;
        }
    }
    impl_ = std::move(impl);
}

const CurveSpec& Curve::spec() const { return impl_->spec; }
double Curve::length() const { return impl_->length; }
double Curve::diameter() const { return impl_->diameter; }
double Curve::curvature_min() const { return impl_->k_min; }
double Curve::curvature_max() const { return impl_->k_max; }
double Curve::speed_max() const { return impl_->speed_max; }
Vec2 Curve::position_t(double t) const { return impl_->position(t); }
Vec2 Curve::derivative_t(double t) const { return impl_->derivative(t); }
double Curve::speed_t(double t) const { return impl_->speed(t); }
double Curve::curvature_t(double t) const { return impl_->curvature(t); }

double Curve::arclength(double t) const {
    // monotone on [0, 2*pi] with s(2*pi) = L; periodic reduction outside
    if (t >= 0.0 && t <= kTwoPi) return impl_->arclength_ext(t);
    return impl_->arclength_ext(t) - impl_->length * std::floor(t / kTwoPi);
}

double Curve::parameter(double s) const {
    const Impl& im = *impl_;
    double sr = s - im.length * std::floor(s / im.length);
    if (sr >= im.length) sr -= im.length;

    // bracket panel, then Newton with bisection guard
    const auto it = std::upper_bound(im.cum_s.begin(), im.cum_s.end(), sr);
    int i = std::clamp(static_cast<int>(it - im.cum_s.begin()) - 1, 0, kPanels - 1);
    double lo = i * im.dt, hi = (i + 1) * im.dt;
    const double panel_s = im.cum_s[i + 1] - im.cum_s[i];
    double t = lo + (hi - lo) * std::clamp((sr - im.cum_s[i]) / panel_s, 0.0, 1.0);
    for (int iter = 0; iter < 60; ++iter) {
        const double f = im.arclength_ext(t) - sr;
        if (std::abs(f) <= 1e-14 * std::max(1.0, im.length)) return t;
        if (f > 0.0) hi = t; else lo = t;
        double tn = t - f / im.speed(t);
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        t = tn;
    }
    fail(Errc::no_convergence, "arc-length inversion did not converge");
}

double Curve::parameter(double s, double hint) const {
    const Impl& im = *impl_;
    double sr = s - im.length * std::floor(s / im.length);
    if (sr >= im.length) sr -= im.length;
    // lift the target onto the hint's branch
    const double s_hint = im.arclength_ext(hint);
    const double target = sr + im.length * std::round((s_hint - sr) / im.length);
    if (std::abs(s_hint - target) > 0.25 * im.length) return parameter(s);
    double t = hint;
    for (int iter = 0; iter < 8; ++iter) {
        const double f = im.arclength_ext(t) - target;
        if (std::abs(f) <= 1e-14 * std::max(1.0, im.length)) {
            double tr = t - kTwoPi * std::floor(t / kTwoPi);
            if (tr >= kTwoPi) tr = 0.0;
            return tr;
        }
        t -= f / im.speed(t);
    }
    return parameter(s);
}

Curve::LocalGeometry Curve::geometry_at(double s) const {
    const double t = parameter(s);
    return {impl_->position(t), impl_->derivative(t).normalized(), impl_->curvature(t)};
}

Curve make_curve(const CurveSpec& spec) { return Curve(spec); }

ArcSpec make_arc(const Curve& curve, double s_a, double s_b) {
    if (!(s_b - s_a > 0.0) || !(s_b - s_a < curve.length()))
        fail(Errc::invalid_spec, "arc requires 0 < s_b - s_a < L");
    return ArcSpec{s_a, s_b};
}

double arc_coordinates(const ArcSpec& arc, double u) {
    if (!(u >= 0.0 && u <= 1.0))
        fail(Errc::out_of_range, "arc coordinate u must be in [0, 1]");
    return arc.s_a + u * (arc.s_b - arc.s_a);
}

double arc_coordinate_inverse(const ArcSpec& arc, double s) {
    if (!(s >= arc.s_a && s <= arc.s_b))
        fail(Errc::out_of_range, "arc length outside [s_a, s_b]");
    return (s - arc.s_a) / (arc.s_b - arc.s_a);
}

} // namespace billiard
