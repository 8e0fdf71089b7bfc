#pragma once

#include "billiard/curve.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace billiard {

inline constexpr int kDefaultRefitOrder = 64;

/// Split of a deformation into elliptic harmonics (|k| <= 2) and the rest.
struct EllipticSplit {
    DeformationFn elliptic;
    DeformationFn remainder;
};

EllipticSplit elliptic_projection(const DeformationFn& n);

struct FitResult {
    EllipseSpec fitted;
    DeformationFn residual_n;   ///< n_fit with fitted = base + n_fit
    double c1_residual = 0.0;   ///< ||n_ell - n_fit||_C1
    double constant = 0.0;      ///< c1_residual / (max{A^2, A^-1} ||n_ell||_C1^2)
    int iterations = 0;
};

/// Five-parameter ellipse closest (in mean squared radial residual) to the
/// curve (1 + n_ell) e(t) over `base`. Gauss-Newton from the first-order seed.
FitResult fit_ellipse(const EllipseSpec& base, const DeformationFn& n_ell,
                      int k_max = kDefaultRefitOrder);

/// Radial deformation of `omega` relative to `target`: omega = target + n_bar.
///
/// Each ray from the target center through target.point(t) meets the
/// boundary of omega once; n_bar(t) is the ray scale minus one, projected
/// onto harmonics <= k_max.
DeformationFn reexpress(const DeformedCurve& omega, const EllipseSpec& target,
                        int k_max = kDefaultRefitOrder);

struct BetterEllipseStep {
    EllipseSpec improved;
    DeformationFn n_bar;        ///< omega = improved + n_bar
    double n_c1 = 0.0;          ///< ||n||_C1 over the old base
    double n_bar_c1 = 0.0;      ///< ||n_bar||_C1 over the improved ellipse
    double comparability = 0.0; ///< ||n_bar||_C1 / ||n - n_fit||_C1
    FitResult fit;
};

/// elliptic_projection -> fit_ellipse -> reexpress on omega = base + n.
BetterEllipseStep better_ellipse_step(const DeformedCurve& omega, int k_max = kDefaultRefitOrder);

enum class Termination { converged, no_improvement, max_iterations, diverged };

std::string to_string(Termination reason);

struct TraceRecord {
    EllipseSpec ellipse;
    double c1_norm = 0.0;
    double d_delta = 0.0;
};

struct IterationTrace {
    std::vector<TraceRecord> steps;
    Termination reason = Termination::max_iterations;

    const TraceRecord& last() const { return steps.back(); }
};

struct ClosestEllipseOptions {
    int max_iter = 25;
    double tol = 1e-10;
    double min_improvement = 0.01;
    int k_max = kDefaultRefitOrder;
};

/// Repeated better-ellipse steps starting from `start`.
IterationTrace closest_ellipse(const DeformedCurve& omega, const EllipseSpec& start,
                               const ClosestEllipseOptions& options = {});

/// CSV with columns step, a, b, tilt, center_x, center_y, c1_norm, d_delta.
void write_trace_csv(std::ostream& out, const IterationTrace& trace);

} // namespace billiard
