#pragma once

#include "billiard/curve.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <vector>

namespace billiard {

/// Interior unknowns t_1..t_{q-1} of a q-chain anchored at t_0 (fixed) and t_0 + period.
struct ChainSystem {
    const DeformedCurve* curve = nullptr;
    int q = 0;
    double t0 = 0.0;
    Eigen::VectorXd t;

    ChainSystem(const DeformedCurve& c, int q_, double t0_, Eigen::VectorXd t_);

    /// The equidistributed configuration t_j = t0 + 2 pi A j / q.
    static ChainSystem equidistributed(const DeformedCurve& c, int q, double t0);

    /// t_j for j = 0..q, including both anchors.
    double node(int j) const;
};

/// Tridiagonal matrix stored by its three diagonals.
struct Tridiagonal {
    Eigen::VectorXd lower; ///< (k, k-1), size n-1
    Eigen::VectorXd diag;  ///< size n
    Eigen::VectorXd upper; ///< (k, k+1), size n-1

    explicit Tridiagonal(int n = 0) : lower(Eigen::VectorXd::Zero(n > 0 ? n - 1 : 0)),
                                      diag(Eigen::VectorXd::Zero(n)),
                                      upper(Eigen::VectorXd::Zero(n > 0 ? n - 1 : 0)) {}

    int size() const { return static_cast<int>(diag.size()); }
    Eigen::MatrixXd dense() const;
    /// Solves M x = rhs by the Thomas algorithm; throws SolverError on a zero pivot.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
};

/// The residual F(a, b, t) with a_j = n(t_j), b_j = n'(t_j), written out in A, n, n'
/// and sines/cosines of the gaps. F vanishes exactly on billiard chains.
Eigen::VectorXd chain_residual(const ChainSystem& sys);

/// Partial derivatives of F in its three argument blocks at (n(t), n'(t), t).
struct ChainPartials {
    Tridiagonal dt; ///< dF/dt with a, b frozen
    Tridiagonal da; ///< dF/da
    Eigen::VectorXd db; ///< dF/db (diagonal)
};

ChainPartials chain_partials(const ChainSystem& sys);

/// Jacobian of t -> F(n(t), n'(t), t): dF/dt + dF/da diag(n') + dF/db diag(n'').
/// Symmetric (it is the Hessian of the chain action).
Tridiagonal chain_jacobian(const ChainSystem& sys);

struct ChainSolution {
    int q = 0;
    double t0 = 0.0;
    std::vector<double> params;   ///< t_0 .. t_{q-1} (lifted, increasing)
    double max_residual = 0.0;    ///< max |F_j| at the solution
    double closing_residual = 0.0; ///< omega(gamma(t_1) - gamma(t_{q-1}), gamma'(t_0))
    int iterations = 0;
};

/// Newton solve of F = 0 for the interior points with t_0 fixed.
ChainSolution solve_chain(const DeformedCurve& curve, int q, double t0);

struct PeriodicOrbit {
    int q = 0;
    std::vector<double> params;        ///< lifted, increasing, params[0] in [0, period)
    std::vector<double> residuals;     ///< -omega(gamma(t_{j+1}) - gamma(t_{j-1}), gamma'(t_j))
    double action = 0.0;
    double max_residual = 0.0;
    double closing_residual = 0.0;     ///< residual at j = 0
    int iterations = 0;
    bool local_maximum = false;        ///< action Hessian (anchor fixed) negative definite
};

/// The full cyclic orbit system, all q equations.
Eigen::VectorXd orbit_residuals(const DeformedCurve& curve, std::span<const double> params);
Eigen::MatrixXd orbit_jacobian(const DeformedCurve& curve, std::span<const double> params);

/// Levenberg-damped least-squares solve of the cyclic system from the
/// equidistributed seed at seed_t0. The result is rotated so that its first
/// point has the smallest reduced parameter.
PeriodicOrbit find_periodic_orbit(const DeformedCurve& curve, int q, double seed_t0 = 0.0);

/// Cyclic sum of H over the closed polygon; origin is the base center.
double orbit_action(const DeformedCurve& curve, std::span<const double> params);
double orbit_action(const DeformedCurve& curve, const PeriodicOrbit& orbit);
/// Same sum with omega taken about an arbitrary origin.
double orbit_action_about(const DeformedCurve& curve, std::span<const double> params,
                          const Vec2& origin);

struct BaseSpectrum {
    std::vector<double> eigenvalues;   ///< sorted by absolute value
    double smallest_abs = 0.0;
    double inverse_norm = 0.0;         ///< 1 / smallest_abs
    double inverse_bound_ratio = 0.0;  ///< inverse_norm / (q^3 / A)
    double toeplitz_smallest = 0.0;    ///< A sin(2 pi/q)(-2 + 2 cos(pi/q))
    double quoted_smallest = 0.0;      ///< A sin(2 pi/q)(-2 + 2 cos(2 pi/q))
};

/// Spectrum of A sin(2 pi / q) tridiag(1, -2, 1) of size q - 1.
BaseSpectrum base_spectrum(int q, double A);

/// CSV with columns q, j, t_j, residual_j.
void write_orbit_csv(std::ostream& out, const PeriodicOrbit& orbit, bool header = true);

} // namespace billiard
