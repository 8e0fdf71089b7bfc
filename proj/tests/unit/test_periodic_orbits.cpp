#include <billiard/dynamics.hpp>
#include <billiard/errors.hpp>
#include <billiard/periodic_orbits.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace billiard;

namespace {

Eigen::VectorXd geometric_residual(const ChainSystem& sys) {
    const int m = sys.q - 1;
    Eigen::VectorXd r(m);
    for (int j = 1; j <= m; ++j) {
        const Vec2 next = sys.curve->eval(sys.node(j + 1));
        const Vec2 prev = sys.curve->eval(sys.node(j - 1));
        r(j - 1) = -area_form(next - prev, sys.curve->eval(sys.node(j), 1));
    }
    return r;
}

} // namespace

TEST(ChainResidual, VanishesAtEquidistributedEllipse) {
    const DeformedCurve e(EllipseSpec(Vec2(0.4, 0.1), 2.0, 1.0, 0.3));
    for (int q = 3; q <= 9; ++q) {
        const ChainSystem sys = ChainSystem::equidistributed(e, q, 0.7);
        EXPECT_LT(chain_residual(sys).lpNorm<Eigen::Infinity>(), 1e-13);
    }
}

TEST(ChainResidual, LocalCoupling) {
    const DeformedCurve e(EllipseSpec::axis_aligned(2.0, 1.0));
    ChainSystem sys = ChainSystem::equidistributed(e, 6, 0.0);
    sys.t(0) += 1e-3;
    const Eigen::VectorXd r = chain_residual(sys);
    EXPECT_GT(std::abs(r(0)), 1e-6);
    EXPECT_GT(std::abs(r(1)), 1e-6);
    for (int k = 2; k < r.size(); ++k) EXPECT_LT(std::abs(r(k)), 1e-14);
}

TEST(ChainResidual, MatchesGeometricOracle) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        const EllipseSpec base(Vec2(u(rng), u(rng)), 1.0 + 0.5 * u(rng), 1.0 + 0.5 * u(rng), 2 * u(rng));
        const DeformedCurve c(base, oracle::random_deformation(rng, base.period(), 5, 0.01));
        const int q = 3 + i % 8;
        ChainSystem sys = ChainSystem::equidistributed(c, q, u(rng));
        for (int k = 0; k < q - 1; ++k) sys.t(k) += 0.05 * c.period() / q * u(rng);
        EXPECT_LT((chain_residual(sys) - geometric_residual(sys)).lpNorm<Eigen::Infinity>(), 1e-12);
    }
}

TEST(ChainJacobian, BaseMatrix) {
    const DeformedCurve e(EllipseSpec::axis_aligned(3.0, 0.5));
    const double A = e.scale();
    for (int q = 3; q <= 8; ++q) {
        const Eigen::MatrixXd J = chain_jacobian(ChainSystem::equidistributed(e, q, 0.2)).dense();
        const double s = A * std::sin(kTwoPi / q);
        for (int r = 0; r < q - 1; ++r) {
            for (int c = 0; c < q - 1; ++c) {
                const double expected = r == c ? -2 * s : (std::abs(r - c) == 1 ? s : 0.0);
                EXPECT_NEAR(J(r, c), expected, 1e-12);
            }
        }
    }
    const Eigen::MatrixXd J4 = chain_jacobian(ChainSystem::equidistributed(DeformedCurve(EllipseSpec()), 4, 0.0)).dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J4);
    EXPECT_NEAR(eig.eigenvalues()(0), -2 - std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(eig.eigenvalues()(1), -2, 1e-12);
    EXPECT_NEAR(eig.eigenvalues()(2), -2 + std::sqrt(2.0), 1e-12);
}

TEST(ChainJacobian, MatchesFiniteDifferencesAndIsSymmetric) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int q = 3; q <= 12; ++q) {
        const EllipseSpec base(Vec2::Zero(), 1.3, 0.8, 0.4);
        const DeformedCurve c(base, oracle::random_deformation(rng, base.period(), 6, 0.01));
        ChainSystem sys = ChainSystem::equidistributed(c, q, 0.5);
        for (int k = 0; k < q - 1; ++k) sys.t(k) += 0.1 * c.period() / q * u(rng);
        const Eigen::MatrixXd J = chain_jacobian(sys).dense();
        const Eigen::MatrixXd fd = oracle::fd_chain_jacobian(sys, 1e-5);
        EXPECT_LT((J - fd).cwiseAbs().maxCoeff() / J.cwiseAbs().maxCoeff(), 1e-6) << "q=" << q;
        EXPECT_LT((J - J.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(ChainJacobian, PartialsAssembleTotalDerivative) {
    const EllipseSpec base = EllipseSpec::unit_circle();
    const DeformationFn n = DeformationFn::harmonic(kTwoPi, 3, 0.01, 0.004);
    const DeformedCurve c(base, n);
    ChainSystem sys = ChainSystem::equidistributed(c, 5, 0.1);
    sys.t(1) += 0.02;
    const ChainPartials p = chain_partials(sys);
    Eigen::MatrixXd total = p.dt.dense();
    for (int k = 0; k < 4; ++k) {
        const double tk = sys.t(k);
        total.col(k) += p.da.dense().col(k) * n.derivative(tk, 1);
        total(k, k) += p.db(k) * n.derivative(tk, 2);
    }
    EXPECT_LT((total - chain_jacobian(sys).dense()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Tridiagonal, SolveMatchesDense) {
    Tridiagonal t(5);
    t.diag << 4, 5, 6, 5, 4;
    t.lower << 1, -1, 2, 0.5;
    t.upper << 0.3, 1, -2, 1;
    const Eigen::VectorXd rhs = Eigen::VectorXd::LinSpaced(5, 1.0, 2.0);
    EXPECT_LT((t.dense() * t.solve(rhs) - rhs).norm(), 1e-13);
}

TEST(SolveChain, ExactOnEllipse) {
    const DeformedCurve e(EllipseSpec::axis_aligned(2.0, 1.0));
    const double A = e.scale();
    for (double t0 : {0.0, 1.0, 5.0}) {
        const ChainSolution s = solve_chain(e, 5, t0);
        EXPECT_LE(std::abs(s.closing_residual), 1e-11);
        for (int j = 0; j < 5; ++j) EXPECT_NEAR(s.params[j], t0 + kTwoPi * A * j / 5, 1e-11);
    }
}

TEST(SolveChain, PerturbedCircle) {
    const DeformedCurve c(EllipseSpec::unit_circle(), DeformationFn::harmonic(kTwoPi, 3, 0.001));
    const ChainSolution s = solve_chain(c, 4, 0.0);
    EXPECT_LE(s.max_residual, 1e-11);
    for (int j = 0; j < 4; ++j) EXPECT_LE(std::abs(s.params[j] - kTwoPi * j / 4), 0.01);
}

TEST(SolveChain, RejectsSmallQ) { EXPECT_THROW(solve_chain(DeformedCurve(EllipseSpec()), 2, 0.0), InvalidArgument); }

TEST(PeriodicOrbit, EllipseExamples) {
    const DeformedCurve circle(EllipseSpec::unit_circle());
    const PeriodicOrbit square = find_periodic_orbit(circle, 4);
    EXPECT_NEAR(square.action, 4.0, 1e-12);
    const PeriodicOrbit tri = find_periodic_orbit(circle, 3);
    EXPECT_NEAR(orbit_action(circle, tri), 3 * std::sin(kTwoPi / 3), 1e-12);
    const DeformedCurve e(EllipseSpec::axis_aligned(2.0, 1.0));
    const PeriodicOrbit tri2 = find_periodic_orbit(e, 3);
    EXPECT_NEAR(tri2.action, 3 * std::sqrt(3.0), 1e-11);
    EXPECT_NEAR(tri2.action, oracle::twice_polygon_area(oracle::polygon(e, tri2.params)), 1e-11);
}

TEST(PeriodicOrbit, PerturbedCircleConvergesToLocalMaximum) {
    const DeformedCurve c(EllipseSpec::unit_circle(), DeformationFn::harmonic(kTwoPi, 5, 0.001));
    const PeriodicOrbit o = find_periodic_orbit(c, 5, 0.3);
    EXPECT_LE(o.max_residual, 1e-10);
    EXPECT_TRUE(o.local_maximum);
    EXPECT_GE(o.params[0], 0.0);
    EXPECT_LT(o.params[0], c.period());
    for (int j = 0; j < 5; ++j) {
        const double next = j + 1 < 5 ? o.params[j + 1] : o.params[0] + c.period();
        EXPECT_GT(twist_density(c, o.params[j], next), 0.0);
    }
}

TEST(PeriodicOrbit, WeaklySplitFamily) {
    // harmonics 3 and 5 do not resonate with q = 7, so the family splits only at second order
    const DeformationFn n = DeformationFn::harmonic(kTwoPi, 3, 0.001) + DeformationFn::harmonic(kTwoPi, 5, 0.0, 0.0005);
    const PeriodicOrbit o = find_periodic_orbit(DeformedCurve(EllipseSpec::unit_circle(), n), 7);
    EXPECT_LE(o.max_residual, 1e-10);
}

TEST(PeriodicOrbit, ActionIsOriginIndependentAndEqualsShoelace) {
    std::mt19937_64 rng(21);
    const EllipseSpec base(Vec2(1.0, -0.5), 1.4, 0.9, 0.2);
    const DeformedCurve c(base, oracle::random_deformation(rng, base.period(), 6, 0.004));
    for (int q : {3, 4, 6, 9}) {
        const PeriodicOrbit o = find_periodic_orbit(c, q);
        const double shoelace = oracle::twice_polygon_area(oracle::polygon(c, o.params));
        EXPECT_NEAR(o.action, shoelace, 1e-10 * shoelace);
        EXPECT_NEAR(orbit_action_about(c, o.params, Vec2(7.0, -3.0)), o.action, 1e-10 * o.action);
    }
}

TEST(BaseSpectrum, Examples) {
    const BaseSpectrum s4 = base_spectrum(4, 1.0);
    EXPECT_NEAR(s4.smallest_abs, 2 - std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(s4.toeplitz_smallest, -(2 - std::sqrt(2.0)), 1e-12);
    const BaseSpectrum s3 = base_spectrum(3, 1.0);
    ASSERT_EQ(s3.eigenvalues.size(), 2u);
    EXPECT_NEAR(s3.eigenvalues[0], -std::sin(kTwoPi / 3), 1e-12);
    EXPECT_NEAR(s3.eigenvalues[1], -3 * std::sin(kTwoPi / 3), 1e-12);
    double lo = 1e300, hi = 0.0;
    for (int q = 3; q <= 64; ++q) {
        const BaseSpectrum s = base_spectrum(q, 1.7);
        const double scaled = s.smallest_abs * q * q * q / 1.7;
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
        EXPECT_NEAR(std::abs(s.toeplitz_smallest), s.smallest_abs, 1e-10 * s.smallest_abs);
    }
    EXPECT_GT(lo, 1.0);
    EXPECT_LT(hi, 70.0);
}

TEST(OrbitCsv, Columns) {
    std::ostringstream out;
    write_orbit_csv(out, find_periodic_orbit(DeformedCurve(EllipseSpec()), 3));
    EXPECT_NE(out.str().find("3,0,"), std::string::npos);
}
