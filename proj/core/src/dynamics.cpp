#include "billiard/dynamics.hpp"

#include "billiard/errors.hpp"
#include "roots.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

namespace billiard {

namespace {

constexpr int kBracketSamples = 64;
constexpr double kBisectionWidth = 1e-8;
constexpr double kResidualTol = 1e-12;
constexpr double kMinTwist = 1e-14;

double residual_scale(const DeformedCurve& curve) {
    const double A = curve.scale();
    return A * A * A;
}

} // namespace

double reduce_parameter(double t, double period) {
    double r = std::fmod(t, period);
    if (r < 0.0) r += period;
    if (r >= period) r -= period;
    return r;
}

double generating_function(const DeformedCurve& curve, double t, double t_next) {
    return area_form(curve.local(t), curve.local(t_next));
}

double twist_density(const DeformedCurve& curve, double t, double t_next) {
    return area_form(curve.local(t, 1), curve.local(t_next, 1));
}

double parallel_partner(const DeformedCurve& curve, double t) {
    const double period = curve.period();
    const Vec2 tangent = curve.local(t, 1);
    auto h = [&](double s) { return area_form(tangent, curve.local(s, 1)); };
    auto dh = [&](double s) { return area_form(tangent, curve.local(s, 2)); };

    // h > 0 just after t and h < 0 just before t + period on a convex curve.
    const double lo = t + period / (4.0 * kBracketSamples);
    if (!(h(lo) > 0.0)) throw ConvexityError("parallel partner: tangent does not turn left");
    const auto bracket = detail::first_sign_drop(h, lo, t + period, kBracketSamples, 0.0);
    if (!bracket) throw ConvexityError("parallel partner: no sign change of the twist");
    const double partner = detail::bisect_newton(h, dh, *bracket, kBisectionWidth,
                                                 kResidualTol * residual_scale(curve));
    if (curve.local(partner, 1).dot(tangent) >= 0.0) {
        throw ConvexityError("parallel partner: tangent is not anti-parallel");
    }
    return partner;
}

PhasePoint billiard_step(const DeformedCurve& curve, const PhasePoint& p) {
    const double period = curve.period();
    const double t = p.t;
    const double t1 = p.t_next;
    if (!(t1 > t && t1 < t + period)) {
        throw DomainError("phase point must satisfy t < t_next < t + period");
    }
    const double twist = twist_density(curve, t, t1);
    if (!(twist > kMinTwist)) {
        throw DomainError("twist density " + std::to_string(twist) + " is not positive");
    }

    const Vec2 origin = curve.local(t);
    const Vec2 direction = curve.local(t1, 1);
    auto g = [&](double s) { return area_form(curve.local(s) - origin, direction); };
    auto dg = [&](double s) { return area_form(curve.local(s, 1), direction); };

    if (!(g(t1) > 0.0)) throw ConvexityError("billiard step: chord is not positively oriented");
    // g vanishes again at t + period; the wanted root is the first drop after t1.
    const auto bracket = detail::first_sign_drop(g, t1, t + period, kBracketSamples, 0.0);
    if (!bracket) throw ConvexityError("billiard step: no reflection point found");
    const double t2 = detail::bisect_newton(g, dg, *bracket, kBisectionWidth,
                                            kResidualTol * residual_scale(curve));
    if (t + period - t2 < 1e-10 * period) {
        throw ConvexityError("billiard step: reflection collapsed onto the start point");
    }
    if (!((curve.local(t2) - origin).dot(direction) > 0.0)) {
        throw ConvexityError("billiard step: chord is not positively parallel");
    }
    return {t1, t2};
}

Trajectory iterate_map(const DeformedCurve& curve, const PhasePoint& p0, int steps) {
    if (steps < 0) throw InvalidArgument("number of steps must be non-negative");
    Trajectory traj;
    traj.period = curve.period();
    traj.lift.reserve(static_cast<std::size_t>(steps) + 2);
    traj.lift.push_back(p0.t);
    traj.lift.push_back(p0.t_next);
    PhasePoint p = p0;
    for (int k = 0; k < steps; ++k) {
        try {
            p = billiard_step(curve, p);
        } catch (const Error& e) {
            throw StepError(e.what(), k);
        }
        traj.lift.push_back(p.t_next);
    }
    return traj;
}

double rotation_number(const Trajectory& trajectory) {
    if (trajectory.lift.size() < 2) {
        throw InvalidArgument("rotation number needs at least two points");
    }
    const double steps = static_cast<double>(trajectory.lift.size() - 1);
    return (trajectory.lift.back() - trajectory.lift.front()) / (steps * trajectory.period);
}

void write_trajectory_csv(std::ostream& out, const DeformedCurve& curve,
                          const Trajectory& trajectory) {
    const auto old_precision = out.precision(17);
    out << "step,t,t_next,lift,twist_density\n";
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        const PhasePoint p = trajectory.point(k);
        out << k << ',' << reduce_parameter(p.t, trajectory.period) << ','
            << reduce_parameter(p.t_next, trajectory.period) << ',' << p.t << ','
            << twist_density(curve, p.t, p.t_next) << '\n';
    }
    out.precision(old_precision);
}

} // namespace billiard
