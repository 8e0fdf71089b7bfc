#include "billiard/periodic_orbits.hpp"

#include "billiard/dynamics.hpp"
#include "billiard/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace billiard {

namespace {

constexpr int kChainMaxIterations = 50;
constexpr double kChainTolerance = 1e-11;
constexpr double kOrbitTolerance = 1e-10;
constexpr int kOrbitMaxIterations = 200;
constexpr int kOrbitFastIterations = 40;

void require_q(int q) {
    if (q < 3) throw InvalidArgument("q must be at least 3");
}

bool strictly_ordered(const Eigen::VectorXd& t, double lo, double hi) {
    double prev = lo;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        if (!(t(i) > prev)) return false;
        prev = t(i);
    }
    return prev < hi;
}

// a_j = n(t_j) and b_j = n'(t_j) with the anchor conventions a_0 = a_q = n(t_0).
struct ChainSamples {
    std::vector<double> node; // t_0 .. t_q
    std::vector<double> a;    // 0 .. q
    std::vector<double> b;    // 0 .. q
};

ChainSamples sample_chain(const ChainSystem& sys) {
    const DeformationFn& n = sys.curve->deformation();
    ChainSamples s;
    s.node.resize(sys.q + 1);
    s.a.resize(sys.q + 1);
    s.b.resize(sys.q + 1);
    for (int j = 0; j <= sys.q; ++j) {
        s.node[j] = sys.node(j);
        s.a[j] = n(s.node[j]);
        s.b[j] = n.derivative(s.node[j], 1);
    }
    s.a[sys.q] = s.a[0];
    s.b[sys.q] = s.b[0];
    return s;
}

} // namespace

ChainSystem::ChainSystem(const DeformedCurve& c, int q_, double t0_, Eigen::VectorXd t_)
    : curve(&c), q(q_), t0(t0_), t(std::move(t_)) {
    require_q(q);
    if (t.size() != q - 1) throw InvalidArgument("chain needs q - 1 interior parameters");
}

ChainSystem ChainSystem::equidistributed(const DeformedCurve& c, int q, double t0) {
    require_q(q);
    Eigen::VectorXd t(q - 1);
    for (int j = 1; j < q; ++j) t(j - 1) = t0 + c.period() * j / q;
    return ChainSystem(c, q, t0, std::move(t));
}

double ChainSystem::node(int j) const {
    if (j == 0) return t0;
    if (j == q) return t0 + curve->period();
    return t(j - 1);
}

Eigen::MatrixXd Tridiagonal::dense() const {
    const int n = size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        m(k, k) = diag(k);
        if (k > 0) m(k, k - 1) = lower(k - 1);
        if (k + 1 < n) m(k, k + 1) = upper(k);
    }
    return m;
}

Eigen::VectorXd Tridiagonal::solve(const Eigen::VectorXd& rhs) const {
    const int n = size();
    Eigen::VectorXd c(n), d(n);
    double pivot = diag(0);
    if (pivot == 0.0) throw SolverError("zero pivot in tridiagonal solve", 0);
    c(0) = n > 1 ? upper(0) / pivot : 0.0;
    d(0) = rhs(0) / pivot;
    for (int k = 1; k < n; ++k) {
        pivot = diag(k) - lower(k - 1) * c(k - 1);
        if (pivot == 0.0) throw SolverError("zero pivot in tridiagonal solve", 0);
        c(k) = k + 1 < n ? upper(k) / pivot : 0.0;
        d(k) = (rhs(k) - lower(k - 1) * d(k - 1)) / pivot;
    }
    Eigen::VectorXd x(n);
    x(n - 1) = d(n - 1);
    for (int k = n - 2; k >= 0; --k) x(k) = d(k) - c(k) * x(k + 1);
    return x;
}

Eigen::VectorXd chain_residual(const ChainSystem& sys) {
    const double A = sys.curve->scale();
    const double A2 = A * A;
    const double A3 = A2 * A;
    const ChainSamples s = sample_chain(sys);
    Eigen::VectorXd F(sys.q - 1);
    for (int j = 1; j < sys.q; ++j) {
        const double fwd = (s.node[j + 1] - s.node[j]) / A;
        const double bwd = (s.node[j] - s.node[j - 1]) / A;
        const double ap = 1.0 + s.a[j + 1];
        const double a0 = 1.0 + s.a[j];
        const double am = 1.0 + s.a[j - 1];
        const double bj = s.b[j];
        F(j - 1) = A3 * ap * bj * std::sin(fwd) + A3 * am * bj * std::sin(bwd) -
                   A2 * ap * a0 * std::cos(fwd) + A2 * a0 * am * std::cos(bwd);
    }
    return F;
}

ChainPartials chain_partials(const ChainSystem& sys) {
    const int m = sys.q - 1;
    const double A = sys.curve->scale();
    const double A2 = A * A;
    const double A3 = A2 * A;
    const ChainSamples s = sample_chain(sys);
    ChainPartials p{Tridiagonal(m), Tridiagonal(m), Eigen::VectorXd::Zero(m)};
    for (int j = 1; j < sys.q; ++j) {
        const int r = j - 1;
        const double fwd = (s.node[j + 1] - s.node[j]) / A;
        const double bwd = (s.node[j] - s.node[j - 1]) / A;
        const double sf = std::sin(fwd), cf = std::cos(fwd);
        const double sb = std::sin(bwd), cb = std::cos(bwd);
        const double ap = 1.0 + s.a[j + 1];
        const double a0 = 1.0 + s.a[j];
        const double am = 1.0 + s.a[j - 1];
        const double bj = s.b[j];

        p.dt.diag(r) = -bj * A2 * ap * cf - A * a0 * ap * sf + A2 * bj * am * cb - A * am * a0 * sb;
        p.da.diag(r) = -A2 * ap * cf + A2 * am * cb;
        if (j > 1) {
            p.dt.lower(r - 1) = -A2 * bj * am * cb + A * am * a0 * sb;
            p.da.lower(r - 1) = A3 * bj * sb + A2 * a0 * cb;
        }
        if (j < sys.q - 1) {
            p.dt.upper(r) = A2 * bj * ap * cf + A * a0 * ap * sf;
            p.da.upper(r) = A3 * bj * sf - A2 * a0 * cf;
        }
        p.db(r) = A3 * ap * sf + A3 * am * sb;
    }
    return p;
}

Tridiagonal chain_jacobian(const ChainSystem& sys) {
    const DeformationFn& n = sys.curve->deformation();
    const int m = sys.q - 1;
    const ChainPartials p = chain_partials(sys);
    Eigen::VectorXd dn(m), ddn(m);
    for (int k = 0; k < m; ++k) {
        dn(k) = n.derivative(sys.t(k), 1);
        ddn(k) = n.derivative(sys.t(k), 2);
    }
    Tridiagonal J(m);
    for (int k = 0; k < m; ++k) {
        J.diag(k) = p.dt.diag(k) + p.da.diag(k) * dn(k) + p.db(k) * ddn(k);
        if (k > 0) J.lower(k - 1) = p.dt.lower(k - 1) + p.da.lower(k - 1) * dn(k - 1);
        if (k + 1 < m) J.upper(k) = p.dt.upper(k) + p.da.upper(k) * dn(k + 1);
    }
    return J;
}

ChainSolution solve_chain(const DeformedCurve& curve, int q, double t0) {
    ChainSystem sys = ChainSystem::equidistributed(curve, q, t0);
    const double A = curve.scale();
    const double period = curve.period();
    const double max_step = 0.25 * period / q;
    const double target = 1e-3 * kChainTolerance * A * A;

    Eigen::VectorXd F = chain_residual(sys);
    int it = 0;
    for (; it < kChainMaxIterations && F.lpNorm<Eigen::Infinity>() > target; ++it) {
        Eigen::VectorXd step = chain_jacobian(sys).solve(-F);
        const double size = step.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(size)) throw SolverError("chain Newton produced a non-finite step", it);
        if (size > max_step) step *= max_step / size;

        Eigen::VectorXd trial = sys.t + step;
        int halvings = 0;
        while (!strictly_ordered(trial, t0, t0 + period)) {
            if (++halvings > 30) throw SolverError("chain Newton left the ordered region", it);
            step *= 0.5;
            trial = sys.t + step;
        }
        sys.t = trial;
        F = chain_residual(sys);
        if (step.lpNorm<Eigen::Infinity>() < 1e-15 * period) break;
    }
    const double residual = F.lpNorm<Eigen::Infinity>();
    if (!(residual <= kChainTolerance * A * A)) {
        throw SolverError("chain Newton did not converge, residual " + std::to_string(residual),
                          it);
    }

    ChainSolution sol;
    sol.q = q;
    sol.t0 = t0;
    sol.params.resize(q);
    sol.params[0] = t0;
    for (int j = 1; j < q; ++j) sol.params[j] = sys.t(j - 1);
    sol.max_residual = residual;
    sol.closing_residual = area_form(curve.local(sys.t(0)) - curve.local(sys.t(q - 2)),
                                     curve.local(t0, 1));
    sol.iterations = it;
    return sol;
}

Eigen::VectorXd orbit_residuals(const DeformedCurve& curve, std::span<const double> params) {
    const int q = static_cast<int>(params.size());
    require_q(q);
    std::vector<Vec2> pts(q), tangents(q);
    for (int j = 0; j < q; ++j) {
        pts[j] = curve.local(params[j]);
        tangents[j] = curve.local(params[j], 1);
    }
    Eigen::VectorXd r(q);
    for (int j = 0; j < q; ++j) {
        const Vec2& next = pts[(j + 1) % q];
        const Vec2& prev = pts[(j + q - 1) % q];
        r(j) = -area_form(next - prev, tangents[j]);
    }
    return r;
}

Eigen::MatrixXd orbit_jacobian(const DeformedCurve& curve, std::span<const double> params) {
    const int q = static_cast<int>(params.size());
    require_q(q);
    std::vector<Vec2> pts(q), d1(q), d2(q);
    for (int j = 0; j < q; ++j) {
        pts[j] = curve.local(params[j]);
        d1[j] = curve.local(params[j], 1);
        d2[j] = curve.local(params[j], 2);
    }
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(q, q);
    for (int j = 0; j < q; ++j) {
        const int next = (j + 1) % q;
        const int prev = (j + q - 1) % q;
        J(j, next) += area_form(d1[j], d1[next]);
        J(j, prev) += area_form(d1[prev], d1[j]);
        J(j, j) += -area_form(pts[next] - pts[prev], d2[j]);
    }
    return J;
}

namespace {

bool cyclic_ordered(const Eigen::VectorXd& x, double period) {
    for (Eigen::Index i = 1; i < x.size(); ++i) {
        if (!(x(i) > x(i - 1))) return false;
    }
    return x(x.size() - 1) < x(0) + period;
}

std::vector<double> canonical_rotation(const Eigen::VectorXd& x, double period) {
    const int q = static_cast<int>(x.size());
    int first = 0;
    double smallest = reduce_parameter(x(0), period);
    for (int j = 1; j < q; ++j) {
        const double r = reduce_parameter(x(j), period);
        if (r < smallest) {
            smallest = r;
            first = j;
        }
    }
    const double shift = smallest - x(first);
    std::vector<double> out(q);
    for (int j = 0; j < q; ++j) {
        const int src = (first + j) % q;
        out[j] = x(src) + (first + j >= q ? period : 0.0) + shift;
    }
    return out;
}

struct LmResult {
    Eigen::VectorXd x;
    Eigen::VectorXd r;
    int iterations = 0;
};

// Levenberg-Marquardt on the full cyclic system.
LmResult full_cycle_lm(const DeformedCurve& curve, Eigen::VectorXd x, double tolerance, int max_iterations) {
    const int q = static_cast<int>(x.size());
    const double period = curve.period();
    const double max_step = 0.25 * period / q;
    auto residuals = [&](const Eigen::VectorXd& v) {
        return orbit_residuals(curve, std::span<const double>(v.data(), v.size()));
    };

    Eigen::VectorXd r = residuals(x);
    double cost = r.squaredNorm();
    double lambda = 1e-10;
    int it = 0;
    for (; it < max_iterations; ++it) {
        if (r.lpNorm<Eigen::Infinity>() <= 1e-4 * tolerance) break;
        const Eigen::MatrixXd J = orbit_jacobian(curve, std::span<const double>(x.data(), q));
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        const double diag_scale = std::max(JtJ.diagonal().mean(), 1e-300);

        bool accepted = false;
        while (lambda <= 1e12) {
            Eigen::MatrixXd M = JtJ;
            M.diagonal().array() += lambda * diag_scale;
            Eigen::VectorXd step = M.ldlt().solve(-g);
            const double size = step.lpNorm<Eigen::Infinity>();
            if (std::isfinite(size) && size > max_step) step *= max_step / size;
            const Eigen::VectorXd trial = x + step;
            if (std::isfinite(size) && cyclic_ordered(trial, period)) {
                const Eigen::VectorXd r_trial = residuals(trial);
                const double trial_cost = r_trial.squaredNorm();
                if (trial_cost < cost) {
                    x = trial;
                    r = r_trial;
                    cost = trial_cost;
                    lambda = std::max(lambda / 10.0, 1e-20);
                    accepted = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if (!accepted) break;
    }
    return {std::move(x), std::move(r), it};
}

// When the orbit family is split only weakly the full system is nearly
// singular. Instead follow anchored chains in t0 and find a zero of the
// closing residual, preferring the bracket with the largest action.
Eigen::VectorXd anchored_orbit(const DeformedCurve& curve, int q, double seed_t0, int& evaluations) {
    const double period = curve.period();
    const int samples = 8 * q;
    auto closing = [&](double t0) {
        ++evaluations;
        return solve_chain(curve, q, t0);
    };
    std::vector<ChainSolution> grid;
    grid.reserve(samples + 1);
    for (int i = 0; i <= samples; ++i) grid.push_back(closing(seed_t0 + period * i / samples));

    int best = -1;
    double best_action = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double g0 = grid[i].closing_residual;
        const double g1 = grid[i + 1].closing_residual;
        if ((g0 > 0.0) == (g1 > 0.0) && g0 != 0.0) continue;
        const double action = 0.5 * (orbit_action(curve, grid[i].params) + orbit_action(curve, grid[i + 1].params));
        if (action > best_action) {
            best_action = action;
            best = i;
        }
    }
    if (best < 0) throw SolverError("closing residual has no sign change over the anchor sweep", evaluations);

    double lo = grid[best].t0;
    double hi = grid[best + 1].t0;
    const bool lo_positive = grid[best].closing_residual > 0.0;
    ChainSolution sol = grid[best];
    for (int k = 0; k < 80 && hi - lo > 1e-15 * period; ++k) {
        const double mid = 0.5 * (lo + hi);
        sol = closing(mid);
        if (sol.closing_residual == 0.0) break;
        if ((sol.closing_residual > 0.0) == lo_positive) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return Eigen::Map<const Eigen::VectorXd>(sol.params.data(), q);
}

} // namespace

PeriodicOrbit find_periodic_orbit(const DeformedCurve& curve, int q, double seed_t0) {
    require_q(q);
    const double A = curve.scale();
    const double period = curve.period();
    const double tolerance = kOrbitTolerance * A * A;

    Eigen::VectorXd x(q);
    for (int j = 0; j < q; ++j) x(j) = seed_t0 + period * j / q;
    LmResult lm = full_cycle_lm(curve, x, tolerance, kOrbitFastIterations);
    int it = lm.iterations;
    if (!(lm.r.lpNorm<Eigen::Infinity>() <= tolerance)) {
        int evaluations = 0;
        x = anchored_orbit(curve, q, seed_t0, evaluations);
        lm = full_cycle_lm(curve, x, tolerance, kOrbitMaxIterations);
        it += evaluations + lm.iterations;
    }
    x = lm.x;
    const Eigen::VectorXd& r = lm.r;

    const double max_residual = r.lpNorm<Eigen::Infinity>();
    if (!(max_residual <= tolerance)) {
        std::ostringstream msg;
        msg << "periodic orbit solve did not converge, residual " << max_residual;
        throw SolverError(msg.str(), it);
    }

    PeriodicOrbit orbit;
    orbit.q = q;
    orbit.params = canonical_rotation(x, period);
    const Eigen::VectorXd final_r = orbit_residuals(curve, orbit.params);
    orbit.residuals.assign(final_r.data(), final_r.data() + q);
    orbit.max_residual = final_r.lpNorm<Eigen::Infinity>();
    orbit.closing_residual = final_r(0);
    orbit.iterations = it;
    orbit.action = orbit_action(curve, orbit.params);

    const Eigen::MatrixXd J = orbit_jacobian(curve, orbit.params);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(0.5 * (J + J.transpose()),
                                                        Eigen::EigenvaluesOnly);
    const double jac_scale = full.eigenvalues().cwiseAbs().maxCoeff();
    int null_modes = 0;
    for (Eigen::Index i = 0; i < full.eigenvalues().size(); ++i) {
        if (std::abs(full.eigenvalues()(i)) < 1e-9 * jac_scale) ++null_modes;
    }
    if (null_modes > 1) {
        throw SolverError("orbit Jacobian has a degenerate kernel beyond the translation mode", it);
    }

    Eigen::VectorXd interior(q - 1);
    for (int j = 1; j < q; ++j) interior(j - 1) = orbit.params[j];
    const ChainSystem sys(curve, q, orbit.params[0], interior);
    const Eigen::MatrixXd H = chain_jacobian(sys).dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hess(0.5 * (H + H.transpose()),
                                                        Eigen::EigenvaluesOnly);
    orbit.local_maximum = hess.eigenvalues().maxCoeff() < 0.0;
    return orbit;
}

double orbit_action_about(const DeformedCurve& curve, std::span<const double> params,
                          const Vec2& origin) {
    const std::size_t q = params.size();
    double sum = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
        const Vec2 p = curve.eval(params[j]) - origin;
        const Vec2 next = curve.eval(params[(j + 1) % q]) - origin;
        sum += area_form(p, next);
    }
    return sum;
}

double orbit_action(const DeformedCurve& curve, std::span<const double> params) {
    const std::size_t q = params.size();
    double sum = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
        sum += generating_function(curve, params[j], params[(j + 1) % q]);
    }
    return sum;
}

double orbit_action(const DeformedCurve& curve, const PeriodicOrbit& orbit) {
    return orbit_action(curve, orbit.params);
}

BaseSpectrum base_spectrum(int q, double A) {
    require_q(q);
    if (!(A > 0.0)) throw InvalidArgument("normalized area must be positive");
    const int m = q - 1;
    const double s = A * std::sin(kTwoPi / q);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        M(k, k) = -2.0 * s;
        if (k + 1 < m) {
            M(k, k + 1) = s;
            M(k + 1, k) = s;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M, Eigen::EigenvaluesOnly);
    BaseSpectrum out;
    out.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + m);
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
              [](double x, double y) { return std::abs(x) < std::abs(y); });
    out.smallest_abs = std::abs(out.eigenvalues.front());
    out.inverse_norm = 1.0 / out.smallest_abs;
    out.inverse_bound_ratio = out.inverse_norm / (static_cast<double>(q) * q * q / A);
    out.toeplitz_smallest = s * (-2.0 + 2.0 * std::cos(std::numbers::pi / q));
    out.quoted_smallest = s * (-2.0 + 2.0 * std::cos(kTwoPi / q));
    return out;
}

void write_orbit_csv(std::ostream& out, const PeriodicOrbit& orbit, bool header) {
    const auto old_precision = out.precision(17);
    if (header) out << "q,j,t_j,residual_j\n";
    for (int j = 0; j < orbit.q; ++j) {
        out << orbit.q << ',' << j << ',' << orbit.params[j] << ',' << orbit.residuals[j] << '\n';
    }
    out.precision(old_precision);
}

} // namespace billiard
