#include <billiard/dynamics.hpp>
#include <billiard/errors.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace billiard;

namespace {

constexpr double kPi = std::numbers::pi;
const DeformedCurve kCircle{EllipseSpec::unit_circle()};

} // namespace

TEST(GeneratingFunction, Examples) {
    EXPECT_NEAR(generating_function(kCircle, 0.0, kPi / 2), 1.0, 1e-15);
    EXPECT_NEAR(generating_function(kCircle, 0.7, 0.7), 0.0, 1e-15);
    const DeformedCurve e(EllipseSpec::axis_aligned(2.0, 1.0));
    const double A = e.scale();
    EXPECT_NEAR(generating_function(e, 0.0, kPi * A / 2), 2.0, 1e-12);
    EXPECT_NEAR(area_form(e.eval(0.0), e.eval(kPi * A / 2)), 2.0, 1e-12);
}

TEST(TwistDensity, ExamplesAndMixedPartial) {
    EXPECT_NEAR(twist_density(kCircle, 0.0, kPi / 2), 1.0, 1e-15);
    EXPECT_NEAR(twist_density(kCircle, 0.0, kPi), 0.0, 1e-15);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    const DeformedCurve c(EllipseSpec::unit_circle(), oracle::random_deformation(rng, kTwoPi, 5, 0.01));
    const double h = 1e-4;
    for (int i = 0; i < 20; ++i) {
        const double t = u(rng), s = u(rng);
        const double mixed = (generating_function(c, t + h, s + h) - generating_function(c, t + h, s - h) -
                              generating_function(c, t - h, s + h) + generating_function(c, t - h, s - h)) /
                             (4 * h * h);
        EXPECT_NEAR(mixed, twist_density(c, t, s), 1e-6);
    }
}

TEST(ParallelPartner, Examples) {
    EXPECT_NEAR(parallel_partner(kCircle, 0.0), kPi, 1e-10);
    const DeformedCurve e(EllipseSpec::axis_aligned(2.0, 1.0));
    for (double t : {0.0, 0.5, 3.0}) EXPECT_NEAR(parallel_partner(e, t), t + kPi * e.scale(), 1e-10);
    const DeformedCurve c(EllipseSpec::unit_circle(), DeformationFn::harmonic(kTwoPi, 3, 0.01));
    for (double t : {0.0, 0.3, 2.0}) {
        const double p = parallel_partner(c, t);
        EXPECT_LE(std::abs(twist_density(c, t, p)), 1e-12);
        EXPECT_LT(std::abs(p - (t + kPi)), 0.05);
        EXPECT_LT(c.eval(t, 1).dot(c.eval(p, 1)), 0.0);
        // two-periodicity
        EXPECT_NEAR(reduce_parameter(parallel_partner(c, p), kTwoPi), reduce_parameter(t, kTwoPi), 1e-10);
    }
}

TEST(BilliardStep, CircleLaw) {
    const PhasePoint a = billiard_step(kCircle, {0.0, kPi / 2});
    EXPECT_NEAR(a.t, kPi / 2, 1e-15);
    EXPECT_NEAR(a.t_next, kPi, 1e-10);
    const PhasePoint b = billiard_step(kCircle, {0.0, 2 * kPi / 3});
    EXPECT_NEAR(b.t_next, 4 * kPi / 3, 1e-10);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const DeformedCurve circle(EllipseSpec(Vec2(1.0, -2.0), 1.7, 1.7));
    for (int i = 0; i < 50; ++i) {
        const double t = u(rng) * circle.period();
        const double s = t + (0.01 + 0.48 * u(rng)) * circle.period();
        EXPECT_NEAR(billiard_step(circle, {t, s}).t_next, 2 * s - t, 1e-10);
    }
}

TEST(BilliardStep, EllipseIsAffineImageOfCircle) {
    const DeformedCurve e(EllipseSpec::axis_aligned(2.0, 1.0));
    const double A = e.scale();
    for (double t : {0.0, 0.4}) {
        for (double gap : {0.3, 1.0, 2.5}) {
            const double s = t + gap * A;
            EXPECT_NEAR(billiard_step(e, {t, s}).t_next, 2 * s - t, 1e-9);
        }
    }
}

TEST(BilliardStep, AffineEquivariance) {
    const DeformedCurve c(EllipseSpec::unit_circle(), DeformationFn::harmonic(kTwoPi, 4, 0.004, 0.003));
    AffinePlaneMap m;
    m.linear = Mat2{{1.5, 0.4}, {0.1, 0.8}};
    const DeformedCurve image = apply_linear(m, c);
    for (double t : {0.0, 1.1, 4.0}) {
        const double s = t + 1.3;
        const PhasePoint p = billiard_step(c, {t, s});
        const PhasePoint q = billiard_step(image, {image_parameter(m, c, t), image_parameter(m, c, s)});
        EXPECT_NEAR(q.t_next, image_parameter(m, c, p.t_next), 1e-9);
    }
}

TEST(BilliardStep, VariationalConsistencyAndPositiveParallelism) {
    std::mt19937_64 rng(9);
    const DeformedCurve c(EllipseSpec(Vec2(0.2, 0.1), 1.3, 0.9, 0.5),
                          oracle::random_deformation(rng, EllipseSpec(Vec2(0.2, 0.1), 1.3, 0.9, 0.5).period(), 6, 0.008));
    const double P = c.period();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        const double t = u(rng) * P;
        const double s = t + (0.05 + 0.4 * u(rng)) * P;
        const PhasePoint p = billiard_step(c, {t, s});
        const double dH = oracle::fd_derivative(
            [&](double x) { return generating_function(c, t, x) + generating_function(c, x, p.t_next); }, s, 1e-5);
        EXPECT_LE(std::abs(dH), 1e-9);
        EXPECT_GT((c.eval(p.t_next) - c.eval(t)).dot(c.eval(s, 1)), 0.0);
        EXPECT_GT(twist_density(c, p.t, p.t_next), 0.0);
    }
}

TEST(BilliardStep, RejectsOutsideDomain) {
    EXPECT_THROW(billiard_step(kCircle, {0.0, kPi}), DomainError);
    EXPECT_THROW(billiard_step(kCircle, {0.0, 4.0}), DomainError);
    EXPECT_THROW(billiard_step(kCircle, {0.0, -0.5}), DomainError);
}

TEST(IterateMap, SquareOrbitReturns) {
    const Trajectory tr = iterate_map(kCircle, {0.0, kPi / 2}, 4);
    ASSERT_EQ(tr.size(), 5u);
    EXPECT_NEAR(tr.lift[4], kTwoPi, 1e-10);
    EXPECT_NEAR(tr.lift[5], kTwoPi + kPi / 2, 1e-10);
    EXPECT_NEAR(rotation_number(tr), 0.25, 1e-12);
}

TEST(IterateMap, RigidRotationOnCircle) {
    // golden-mean step inside the twist domain
    const double step = kTwoPi * (3.0 - std::sqrt(5.0)) / 2.0;
    const Trajectory tr = iterate_map(kCircle, {0.0, step}, 100);
    for (std::size_t k = 1; k < tr.lift.size(); ++k) EXPECT_NEAR(tr.lift[k] - tr.lift[k - 1], step, 1e-10);
    const Trajectory seventh = iterate_map(kCircle, {0.0, kTwoPi / 7}, 70);
    EXPECT_NEAR(rotation_number(seventh), 1.0 / 7.0, 1e-12);
}

TEST(IterateMap, PerturbedCircleStaysInDomain) {
    const DeformedCurve c(EllipseSpec::unit_circle(), DeformationFn::harmonic(kTwoPi, 4, 0.005));
    const Trajectory tr = iterate_map(c, {0.0, 1.0}, 1000);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const PhasePoint p = tr.point(k);
        EXPECT_GT(twist_density(c, p.t, p.t_next), 0.0);
    }
    const double rho = rotation_number(tr);
    EXPECT_GT(rho, 0.0);
    EXPECT_LT(rho, 0.5);
}

TEST(IterateMap, ReportsFailingStep) {
    try {
        iterate_map(kCircle, {0.0, kPi}, 3);
        FAIL() << "expected a step error";
    } catch (const StepError& e) {
        EXPECT_EQ(e.step(), 0);
    }
}

TEST(Trajectory, CsvColumns) {
    std::ostringstream out;
    write_trajectory_csv(out, kCircle, iterate_map(kCircle, {0.0, 1.0}, 3));
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "step,t,t_next,lift,twist_density");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    EXPECT_EQ(rows, 4);
}
