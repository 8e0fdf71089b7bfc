#pragma once

#include "billiard/deformation.hpp"
#include "billiard/geometry.hpp"

namespace billiard {

/// Result of the embeddedness and convexity scan of a deformed curve.
struct CurveCheck {
    double min_radial_factor = 0.0; ///< min over the grid of 1 + n(t)
    double min_convexity = 0.0;     ///< min over the grid of omega(gamma', gamma'')
    bool embedded = false;
    bool convex = false;
};

CurveCheck check_curve(const EllipseSpec& base, const DeformationFn& n, int grid = kDefaultGrid);

/// Boundary gamma(t) = center + (1 + n(t)) R (a cos(t/A), b sin(t/A)).
///
/// Construction validates that the deformation period equals the base
/// period, that 1 + n > 0 and that the curve is strictly convex on a dense
/// grid; violations throw ConvexityError (or InvalidArgument for the period).
class DeformedCurve {
public:
    explicit DeformedCurve(EllipseSpec base);
    DeformedCurve(EllipseSpec base, DeformationFn deformation, int grid = kDefaultGrid);

    const EllipseSpec& base() const { return base_; }
    const DeformationFn& deformation() const { return deformation_; }
    double period() const { return base_.period(); }
    double scale() const { return base_.normalized_area(); }
    const Vec2& center() const { return base_.center(); }

    /// gamma, gamma' or gamma'' relative to the base center.
    Vec2 local(double t, int order = 0) const;
    Vec2 eval(double t, int order = 0) const;

private:
    EllipseSpec base_;
    DeformationFn deformation_;
};

inline Vec2 curve_eval(const DeformedCurve& curve, double t, int order = 0) {
    return curve.eval(t, order);
}

/// Image of a curve under an orientation-preserving affine map.
///
/// The image base ellipse is T(base); the affine parameter rescales by
/// det(L)^(1/3) and the deformation keeps its values (up to the phase shift
/// that aligns the parametrizations). Rejects det(L) <= 0.
DeformedCurve apply_linear(const AffinePlaneMap& map, const DeformedCurve& curve);

/// Parameter on the image curve corresponding to parameter t on the source.
double image_parameter(const AffinePlaneMap& map, const DeformedCurve& curve, double t);

} // namespace billiard
