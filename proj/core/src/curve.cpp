#include "billiard/curve.hpp"

#include "billiard/errors.hpp"

#include <cmath>
#include <limits>

namespace billiard {

namespace {

Vec2 radial_local(const EllipseSpec& base, const DeformationFn& n, double t, int order) {
    const double n0 = n(t);
    switch (order) {
    case 0:
        return (1.0 + n0) * base.local(t, 0);
    case 1:
        return n.derivative(t, 1) * base.local(t, 0) + (1.0 + n0) * base.local(t, 1);
    case 2:
        return n.derivative(t, 2) * base.local(t, 0) + 2.0 * n.derivative(t, 1) * base.local(t, 1) +
               (1.0 + n0) * base.local(t, 2);
    default:
        throw InvalidArgument("curve derivative order must be 0, 1 or 2");
    }
}

} // namespace

CurveCheck check_curve(const EllipseSpec& base, const DeformationFn& n, int grid) {
    CurveCheck check;
    check.min_radial_factor = std::numeric_limits<double>::infinity();
    check.min_convexity = std::numeric_limits<double>::infinity();
    const double h = base.period() / grid;
    for (int i = 0; i < grid; ++i) {
        const double t = i * h;
        check.min_radial_factor = std::min(check.min_radial_factor, 1.0 + n(t));
        const double curvature =
            area_form(radial_local(base, n, t, 1), radial_local(base, n, t, 2));
        check.min_convexity = std::min(check.min_convexity, curvature);
    }
    check.embedded = check.min_radial_factor > 0.0;
    check.convex = check.embedded && check.min_convexity > 0.0;
    return check;
}

DeformedCurve::DeformedCurve(EllipseSpec base)
    : base_(std::move(base)), deformation_(DeformationFn::zero(base_.period())) {}

DeformedCurve::DeformedCurve(EllipseSpec base, DeformationFn deformation, int grid)
    : base_(std::move(base)), deformation_(std::move(deformation)) {
    if (std::abs(deformation_.period() - base_.period()) > 1e-12 * base_.period()) {
        throw InvalidArgument("deformation period must equal 2 pi A of the base ellipse");
    }
    if (deformation_.is_zero()) return;
    const CurveCheck check = check_curve(base_, deformation_, grid);
    if (!check.embedded) throw ConvexityError("1 + n(t) must stay positive");
    if (!check.convex) throw ConvexityError("deformed curve is not strictly convex");
}

Vec2 DeformedCurve::local(double t, int order) const {
    return radial_local(base_, deformation_, t, order);
}

Vec2 DeformedCurve::eval(double t, int order) const {
    Vec2 v = local(t, order);
    if (order == 0) v += base_.center();
    return v;
}

namespace {

struct LinearImage {
    EllipseSpec ellipse;
    double phase;
};

LinearImage image_ellipse(const AffinePlaneMap& map, const EllipseSpec& base) {
    if (!(map.determinant() > 0.0)) {
        throw InvalidArgument("affine map must have positive determinant");
    }
    double phase = 0.0;
    EllipseSpec image = ellipse_from_frame(map(base.center()), map.linear * base.frame(),
                                           base.tilt(), &phase);
    return {image, phase};
}

} // namespace

DeformedCurve apply_linear(const AffinePlaneMap& map, const DeformedCurve& curve) {
    const auto [image, phase] = image_ellipse(map, curve.base());
    const double A = curve.scale();
    DeformationFn n = curve.deformation().shifted(phase * A).with_period(image.period());
    return DeformedCurve(image, std::move(n));
}

double image_parameter(const AffinePlaneMap& map, const DeformedCurve& curve, double t) {
    const auto [image, phase] = image_ellipse(map, curve.base());
    return image.normalized_area() * (t / curve.scale() - phase);
}

} // namespace billiard
