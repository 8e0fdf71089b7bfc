#pragma once

#include <cmath>
#include <functional>
#include <optional>

namespace billiard::detail {

struct Bracket {
    double lo;
    double hi;
};

/// First sub-interval of [lo, hi] (split into `samples` cells) where f goes
/// from positive to non-positive. f(lo) must be positive; `f_hi` overrides
/// the value used at hi.
inline std::optional<Bracket> first_sign_drop(const std::function<double(double)>& f, double lo,
                                              double hi, int samples, double f_hi) {
    double prev = lo;
    for (int i = 1; i <= samples; ++i) {
        const double x = lo + (hi - lo) * i / samples;
        const double v = (i == samples) ? f_hi : f(x);
        if (v <= 0.0) return Bracket{prev, x};
        prev = x;
    }
    return std::nullopt;
}

/// Bisection down to `width`, then safeguarded Newton polish.
/// Invariant: f(lo) > 0 >= f(hi).
inline double bisect_newton(const std::function<double(double)>& f,
                            const std::function<double(double)>& df, Bracket b, double width,
                            double residual_tol, int newton_steps = 10) {
    const Bracket outer = b;
    while (b.hi - b.lo > width) {
        const double mid = 0.5 * (b.lo + b.hi);
        if (f(mid) > 0.0) {
            b.lo = mid;
        } else {
            b.hi = mid;
        }
    }
    double x = 0.5 * (b.lo + b.hi);
    for (int it = 0; it < newton_steps; ++it) {
        const double v = f(x);
        if (std::abs(v) <= residual_tol * 1e-4) break;
        const double d = df(x);
        if (d == 0.0) break;
        const double next = x - v / d;
        // roots sitting on a bracket end need a little slack
        const double slack = outer.hi - outer.lo;
        if (next <= outer.lo - slack || next >= outer.hi + slack) break;
        if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x))) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

} // namespace billiard::detail
