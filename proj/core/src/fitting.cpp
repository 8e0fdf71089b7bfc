#include "billiard/fitting.hpp"

#include "billiard/errors.hpp"
#include "billiard/rigidity.hpp"
#include "roots.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace billiard {

EllipticSplit elliptic_projection(const DeformationFn& n) {
    return {n.band(0, 2), n.band(3, n.k_max())};
}

namespace {

constexpr int kFitSamples = 256;
constexpr int kFitMaxIterations = 50;
constexpr int kRayScan = 1024;

double wrap(double x) {
    x = std::fmod(x + std::numbers::pi, kTwoPi);
    if (x < 0.0) x += kTwoPi;
    return x - std::numbers::pi;
}

Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

} // namespace

DeformationFn reexpress(const DeformedCurve& omega, const EllipseSpec& target, int k_max) {
    const Vec2 c = target.center();
    const double period = omega.period();
    const double h = period / kRayScan;

    // Angle of gamma(s) - c must increase monotonically through one full turn.
    std::vector<double> angle(kRayScan + 1);
    double min_sweep = std::numeric_limits<double>::infinity();
    Vec2 prev = omega.eval(0.0) - c;
    angle[0] = std::atan2(prev.y(), prev.x());
    for (int i = 1; i <= kRayScan; ++i) {
        const Vec2 v = omega.eval(i * h) - c;
        angle[i] = angle[i - 1] + wrap(std::atan2(v.y(), v.x()) - std::atan2(prev.y(), prev.x()));
        min_sweep = std::min(min_sweep, area_form(v, omega.eval(i * h, 1)));
        prev = v;
    }
    const double winding = angle[kRayScan] - angle[0];
    if (std::abs(winding - kTwoPi) > 1e-6) {
        throw InvalidArgument("target ellipse center lies outside the domain");
    }
    if (!(min_sweep > 0.0)) {
        throw ConvexityError("domain is not star-shaped about the target center");
    }

    const int nodes = std::max(8 * k_max, 256);
    const double target_period = target.period();
    std::vector<double> samples(nodes);
    for (int k = 0; k < nodes; ++k) {
        const Vec2 d = target.local(target_period * k / nodes);
        double alpha = std::atan2(d.y(), d.x());
        alpha = angle[0] + std::fmod(alpha - angle[0] + 4.0 * kTwoPi, kTwoPi);
        auto it = std::upper_bound(angle.begin(), angle.end(), alpha);
        int i = static_cast<int>(std::distance(angle.begin(), it)) - 1;
        i = std::clamp(i, 0, kRayScan - 1);

        // f(s) = -omega(d, gamma(s) - c) goes from >= 0 to <= 0 across the cell.
        auto f = [&](double s) { return -area_form(d, omega.eval(s) - c); };
        auto df = [&](double s) { return -area_form(d, omega.eval(s, 1)); };
        detail::Bracket b{i * h, (i + 1) * h};
        double s = 0.0;
        if (f(b.lo) <= 0.0) {
            s = b.lo;
        } else if (f(b.hi) > 0.0) {
            s = b.hi;
        } else {
            s = detail::bisect_newton(f, df, b, 1e-9 * period, 0.0);
        }
        const Vec2 hit = omega.eval(s) - c;
        samples[k] = hit.dot(d) / d.squaredNorm() - 1.0;
    }
    return DeformationFn::from_samples(samples, target_period, k_max);
}

FitResult fit_ellipse(const EllipseSpec& base, const DeformationFn& n_ell, int k_max) {
    for (int k = 3; k <= n_ell.k_max(); ++k) {
        if (n_ell.cos_coeff(k) != 0.0 || n_ell.sin_coeff(k) != 0.0) {
            throw InvalidArgument("fit_ellipse expects harmonics |k| <= 2 only");
        }
    }
    const double A = base.normalized_area();
    const double period = base.period();

    // Work in the frame where the base is the unit circle.
    std::vector<Vec2> pts(kFitSamples);
    for (int i = 0; i < kFitSamples; ++i) {
        const double t = period * i / kFitSamples;
        pts[i] = (1.0 + n_ell(t)) * unit(t / A);
    }

    // First-order seed: harmonic 0 scales, harmonic 1 translates, harmonic 2 shears.
    const double c0 = n_ell.c0();
    Vec2 center(n_ell.cos_coeff(1), n_ell.sin_coeff(1));
    Mat2 shape;
    shape << 1.0 + c0 + n_ell.cos_coeff(2), n_ell.sin_coeff(2), n_ell.sin_coeff(2),
        1.0 + c0 - n_ell.cos_coeff(2);
    Mat2 W = shape.inverse();

    Eigen::Matrix<double, 5, 1> p;
    p << center.x(), center.y(), W(0, 0), W(0, 1), W(1, 1);
    Eigen::MatrixXd J(kFitSamples, 5);
    Eigen::VectorXd r(kFitSamples);
    int it = 0;
    bool converged = false;
    for (; it < kFitMaxIterations; ++it) {
        const Vec2 cc(p(0), p(1));
        Mat2 w;
        w << p(2), p(3), p(3), p(4);
        for (int i = 0; i < kFitSamples; ++i) {
            const Vec2 d = pts[i] - cc;
            const Vec2 y = w * d;
            const double len = y.norm();
            const Vec2 g = y / len;
            r(i) = len - 1.0;
            const Vec2 dc = -(w.transpose() * g);
            J(i, 0) = dc.x();
            J(i, 1) = dc.y();
            J(i, 2) = g.x() * d.x();
            J(i, 3) = g.x() * d.y() + g.y() * d.x();
            J(i, 4) = g.y() * d.y();
        }
        const Eigen::Matrix<double, 5, 1> step = J.colPivHouseholderQr().solve(-r);
        if (!step.allFinite()) throw SolverError("ellipse fit produced a non-finite step", it);
        p += step;
        if (step.lpNorm<Eigen::Infinity>() < 1e-14) {
            converged = true;
            ++it;
            break;
        }
    }
    if (!converged) throw SolverError("ellipse fit did not converge", it);

    Mat2 w;
    w << p(2), p(3), p(3), p(4);
    const Mat2 frame = base.frame();
    const Vec2 world_center = base.center() + frame * Vec2(p(0), p(1));
    FitResult result;
    result.fitted = ellipse_from_frame(world_center, frame * w.inverse(), base.tilt());
    result.iterations = it;
    result.residual_n = reexpress(DeformedCurve(result.fitted), base, k_max);
    result.c1_residual = c_norm(n_ell - result.residual_n, 1);
    const double n_c1 = c_norm(n_ell, 1);
    result.constant =
        n_c1 > 0.0 ? result.c1_residual / (std::max(A * A, 1.0 / A) * n_c1 * n_c1) : 0.0;
    return result;
}

BetterEllipseStep better_ellipse_step(const DeformedCurve& omega, int k_max) {
    const DeformationFn& n = omega.deformation();
    BetterEllipseStep step;
    step.n_c1 = c_norm(n, 1);
    if (n.is_zero()) {
        step.improved = omega.base();
        step.n_bar = DeformationFn::zero(omega.period());
        step.fit = {omega.base(), step.n_bar, 0.0, 0.0, 0};
        return step;
    }
    const EllipticSplit split = elliptic_projection(n);
    step.fit = fit_ellipse(omega.base(), split.elliptic, k_max);
    step.improved = step.fit.fitted;
    step.n_bar = reexpress(omega, step.improved, k_max);
    step.n_bar_c1 = c_norm(step.n_bar, 1);
    const double gap = c_norm(n - step.fit.residual_n, 1);
    step.comparability = gap > 0.0 ? step.n_bar_c1 / gap : 0.0;
    return step;
}

std::string to_string(Termination reason) {
    switch (reason) {
    case Termination::converged: return "converged";
    case Termination::no_improvement: return "no improvement";
    case Termination::max_iterations: return "max iterations";
    case Termination::diverged: return "diverged";
    }
    return "unknown";
}

namespace {

bool same_ellipse(const EllipseSpec& x, const EllipseSpec& y) {
    return x.a() == y.a() && x.b() == y.b() && x.tilt() == y.tilt() && x.center() == y.center();
}

} // namespace

IterationTrace closest_ellipse(const DeformedCurve& omega, const EllipseSpec& start,
                               const ClosestEllipseOptions& options) {
    DeformedCurve current = same_ellipse(omega.base(), start)
                                ? omega
                                : DeformedCurve(start, reexpress(omega, start, options.k_max));
    IterationTrace trace;
    double norm = c_norm(current.deformation(), 1);
    trace.steps.push_back(
        {start, norm, symmetric_difference(start, current.deformation())});
    if (norm <= options.tol) {
        trace.reason = Termination::converged;
        return trace;
    }

    int increases = 0;
    for (int i = 0; i < options.max_iter; ++i) {
        const BetterEllipseStep step = better_ellipse_step(current, options.k_max);
        trace.steps.push_back(
            {step.improved, step.n_bar_c1, symmetric_difference(step.improved, step.n_bar)});
        if (step.n_bar_c1 <= options.tol) {
            trace.reason = Termination::converged;
            return trace;
        }
        const double change = norm - step.n_bar_c1;
        if (std::abs(change) < options.min_improvement * norm) {
            trace.reason = Termination::no_improvement;
            return trace;
        }
        if (change < 0.0) {
            if (++increases >= 2) {
                trace.reason = Termination::diverged;
                return trace;
            }
        } else {
            increases = 0;
        }
        norm = step.n_bar_c1;
        current = DeformedCurve(step.improved, step.n_bar);
    }
    trace.reason = Termination::max_iterations;
    return trace;
}

void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
    const auto old_precision = out.precision(17);
    out << "step,a,b,tilt,center_x,center_y,c1_norm,d_delta\n";
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        const TraceRecord& r = trace.steps[k];
        out << k << ',' << r.ellipse.a() << ',' << r.ellipse.b() << ',' << r.ellipse.tilt() << ','
            << r.ellipse.center().x() << ',' << r.ellipse.center().y() << ',' << r.c1_norm << ','
            << r.d_delta << '\n';
    }
    out.precision(old_precision);
}

} // namespace billiard
