#include <billiard/curve.hpp>
#include <billiard/dynamics.hpp>
#include <billiard/errors.hpp>
#include <billiard/periodic_orbits.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace billiard;

TEST(Curve, EvalExamples) {
    const DeformedCurve circle(EllipseSpec::unit_circle());
    EXPECT_NEAR((curve_eval(circle, 0.0) - Vec2(1.0, 0.0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((curve_eval(circle, std::numbers::pi / 2, 1) - Vec2(-1.0, 0.0)).norm(), 0.0, 1e-15);
    const DeformedCurve grown(EllipseSpec::unit_circle(), DeformationFn::constant(kTwoPi, 0.1));
    EXPECT_NEAR((curve_eval(grown, 0.0) - Vec2(1.1, 0.0)).norm(), 0.0, 1e-15);
}

TEST(Curve, DerivativesMatchFiniteDifferences) {
    std::mt19937_64 rng(2);
    const EllipseSpec base(Vec2(0.3, -0.2), 1.5, 0.8, 0.6);
    const DeformedCurve c(base, oracle::random_deformation(rng, base.period(), 5, 0.01));
    const double h = 1e-5;
    for (double t : {0.2, 2.0, 4.4}) {
        const Vec2 d1 = (c.eval(t + h) - c.eval(t - h)) / (2 * h);
        const Vec2 d2 = (c.eval(t + h, 1) - c.eval(t - h, 1)) / (2 * h);
        EXPECT_NEAR((d1 - c.eval(t, 1)).norm(), 0.0, 1e-9);
        EXPECT_NEAR((d2 - c.eval(t, 2)).norm(), 0.0, 1e-9);
    }
}

TEST(Curve, ConvexityCheck) {
    const EllipseSpec circle = EllipseSpec::unit_circle();
    for (double amp : {0.001, 0.005, 0.01}) {
        const CurveCheck ok = check_curve(circle, DeformationFn::harmonic(kTwoPi, 3, amp));
        EXPECT_TRUE(ok.convex && ok.embedded);
        EXPECT_NO_THROW(DeformedCurve(circle, DeformationFn::harmonic(kTwoPi, 3, amp)));
    }
    const CurveCheck bad = check_curve(circle, DeformationFn::harmonic(kTwoPi, 3, 0.5));
    EXPECT_FALSE(bad.convex);
    EXPECT_THROW(DeformedCurve(circle, DeformationFn::harmonic(kTwoPi, 3, 0.5)), ConvexityError);
    EXPECT_THROW(DeformedCurve(circle, DeformationFn::constant(kTwoPi, -1.5)), ConvexityError);
}

TEST(Curve, PeriodMismatchRejected) {
    EXPECT_THROW(DeformedCurve(EllipseSpec::axis_aligned(2.0, 1.0), DeformationFn::harmonic(kTwoPi, 3, 0.01)),
                 InvalidArgument);
}

TEST(ApplyLinear, IdentityAndStretch) {
    const DeformedCurve circle(EllipseSpec::unit_circle(), DeformationFn::harmonic(kTwoPi, 3, 0.01));
    const DeformedCurve same = apply_linear({}, circle);
    for (double t : {0.0, 1.0, 2.5}) EXPECT_NEAR((same.eval(t) - circle.eval(t)).norm(), 0.0, 1e-14);

    AffinePlaneMap stretch;
    stretch.linear = Mat2{{2.0, 0.0}, {0.0, 1.0}};
    const DeformedCurve image = apply_linear(stretch, DeformedCurve(EllipseSpec::unit_circle()));
    EXPECT_NEAR(image.base().a(), 2.0, 1e-12);
    EXPECT_NEAR(image.base().b(), 1.0, 1e-12);
    EXPECT_NEAR(image.scale(), std::cbrt(2.0), 1e-12);

    AffinePlaneMap flip;
    flip.linear = Mat2{{1.0, 0.0}, {0.0, -1.0}};
    EXPECT_THROW(apply_linear(flip, circle), InvalidArgument);
}

TEST(ApplyLinear, PointsAndOrbitsMapToImages) {
    const DeformedCurve c(EllipseSpec::unit_circle(), DeformationFn::harmonic(kTwoPi, 3, 0.004, 0.002));
    AffinePlaneMap m;
    m.linear = Mat2{{2.0, 0.3}, {-0.1, 0.9}};
    m.translation = Vec2(0.5, -0.2);
    const DeformedCurve image = apply_linear(m, c);
    for (double t : {0.0, 0.9, 3.0, 5.5}) {
        EXPECT_NEAR((image.eval(image_parameter(m, c, t)) - m(c.eval(t))).norm(), 0.0, 1e-12);
    }
    // symplectic billiard commutes with area-preserving-up-to-scale maps
    const PeriodicOrbit orbit = find_periodic_orbit(c, 5, 0.2);
    std::vector<double> mapped;
    for (double t : orbit.params) mapped.push_back(image_parameter(m, c, t));
    const Eigen::VectorXd r = orbit_residuals(image, mapped);
    EXPECT_LT(r.lpNorm<Eigen::Infinity>(), 1e-10);
    EXPECT_NEAR(orbit_action(image, mapped), m.determinant() * orbit.action, 1e-10);
}
