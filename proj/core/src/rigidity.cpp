#include "billiard/rigidity.hpp"

#include "billiard/errors.hpp"
#include "billiard/fitting.hpp"
#include "billiard/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace billiard {

std::complex<double> FourierSpectrum::at(int k) const {
    if (k < -k_max || k > k_max) return {0.0, 0.0};
    return coefficients[static_cast<std::size_t>(k + k_max)];
}

double FourierSpectrum::parseval_sum() const {
    double sum = 0.0;
    for (const auto& c : coefficients) sum += std::norm(c);
    return sum;
}

double FourierSpectrum::max_abs(int lo, int hi) const {
    double m = 0.0;
    for (int k = lo; k <= std::min(hi, k_max); ++k) {
        m = std::max({m, std::abs(at(k)), std::abs(at(-k))});
    }
    return m;
}

FourierSpectrum fourier_coefficients(const DeformationFn& n, int k_max) {
    if (k_max < 2) throw InvalidArgument("k_max must be at least 2");
    FourierSpectrum s;
    s.period = n.period();
    s.k_max = k_max;
    s.coefficients.assign(2 * k_max + 1, {0.0, 0.0});
    s.coefficients[k_max] = n.c0();
    for (int k = 1; k <= k_max; ++k) {
        const double a = n.cos_coeff(k);
        const double b = n.sin_coeff(k);
        s.coefficients[k_max + k] = {0.5 * a, -0.5 * b};
        s.coefficients[k_max - k] = {0.5 * a, 0.5 * b};
    }
    return s;
}

FourierSpectrum fourier_coefficients(const std::function<double(double)>& f, double period,
                                     int k_max, int nodes) {
    if (k_max < 2) throw InvalidArgument("k_max must be at least 2");
    nodes = std::max(nodes, 8 * k_max);
    std::vector<double> samples(nodes);
    for (int i = 0; i < nodes; ++i) samples[i] = f(period * i / nodes);
    FourierSpectrum s;
    s.period = period;
    s.k_max = k_max;
    s.coefficients.resize(2 * k_max + 1);
    for (int k = -k_max; k <= k_max; ++k) {
        std::complex<double> sum{0.0, 0.0};
        for (int i = 0; i < nodes; ++i) {
            const double phase = -kTwoPi * static_cast<double>(k) * i / nodes;
            sum += samples[i] * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        s.coefficients[k + k_max] = sum / static_cast<double>(nodes);
    }
    return s;
}

double equidistribution_deviation(std::span<const double> params, double A) {
    const std::size_t q = params.size();
    double worst = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
        const double ideal = params[0] + kTwoPi * A * static_cast<double>(j) / q;
        worst = std::max(worst, std::abs(params[j] - ideal));
    }
    return worst;
}

double sine_sum_deviation(const DeformedCurve& curve, int q, std::span<const double> params) {
    if (static_cast<int>(params.size()) != q) throw InvalidArgument("expected q parameters");
    const double A = curve.scale();
    double sum = 0.0;
    for (int j = 0; j < q; ++j) {
        const double next = j + 1 < q ? params[j + 1] : params[0] + curve.period();
        sum += std::sin((next - params[j]) / A);
    }
    return std::abs(sum - q * std::sin(kTwoPi / q));
}

namespace {

DeformedCurve perturbed(const EllipseSpec& base, const DeformationFn& n0, double epsilon) {
    if (std::abs(n0.period() - base.period()) > 1e-12 * base.period()) {
        throw InvalidArgument("deformation shape period must match the base ellipse");
    }
    return DeformedCurve(base, n0 * epsilon);
}

} // namespace

ActionDeviation action_deviation(const EllipseSpec& base, const DeformationFn& n0, double epsilon,
                                 int q) {
    const DeformedCurve curve = perturbed(base, n0, epsilon);
    const double A = base.normalized_area();
    const double A3 = A * A * A;
    const double s = std::sin(kTwoPi / q);

    ActionDeviation out;
    out.epsilon = epsilon;
    out.q = q;
    out.orbit = find_periodic_orbit(curve, q, 0.0);
    out.action = out.orbit.action;
    out.anchor = out.orbit.params[0];
    double linear = 0.0;
    for (int j = 0; j < q; ++j) {
        linear += curve.deformation()(out.anchor + kTwoPi * A * j / q);
    }
    out.value = std::abs(out.action - A3 * q * s - 2.0 * A3 * s * linear);
    return out;
}

ChainDeviation chain_deviation(const EllipseSpec& base, const DeformationFn& n0, double epsilon,
                               int q, double t0) {
    const DeformedCurve curve = perturbed(base, n0, epsilon);
    const ChainSolution sol = solve_chain(curve, q, t0);
    return {epsilon, q, equidistribution_deviation(sol.params, curve.scale()),
            sine_sum_deviation(curve, q, sol.params)};
}

SmoothDecayReport smooth_decay_check(const DeformationFn& n, int q_lo, int q_hi) {
    if (q_lo < 1 || q_hi < q_lo) throw InvalidArgument("invalid q range");
    SmoothDecayReport report;
    report.c1_norm = c_norm(n, 1);
    if (!(report.c1_norm > 0.0)) throw InvalidArgument("smooth decay check needs a nonzero n");
    const double A = n.base_scale();
    const FourierSpectrum spectrum = fourier_coefficients(n, std::max(q_hi, 2));
    for (int q = q_lo; q <= q_hi; ++q) {
        // int_0^L n e^{i q t/A} dt = L a_{-q}
        const double integral = n.period() * std::abs(spectrum.at(-q));
        const double ratio = integral * q / (A * A * report.c1_norm);
        report.q.push_back(q);
        report.integral.push_back(integral);
        report.ratio.push_back(ratio);
        report.constant = std::max(report.constant, ratio);
    }
    return report;
}

SuppressionReport fourier_suppression_study(const EllipseSpec& base,
                                            const std::function<EllipseSpec(double)>& family,
                                            std::span<const double> deltas, int k_lo, int k_hi,
                                            int workers) {
    SuppressionReport report;
    report.delta.assign(deltas.begin(), deltas.end());
    struct Cell {
        double c1 = 0.0;
        double high = 0.0;
    };
    const auto cells = parallel_map(deltas.size(), workers, [&](std::size_t i) {
        const DeformationFn n = reexpress(DeformedCurve(family(deltas[i])), base);
        return Cell{c_norm(n, 1), fourier_coefficients(n, std::max(k_hi, 2)).max_abs(k_lo, k_hi)};
    });
    for (const Cell& c : cells) {
        report.c1_norm.push_back(c.c1);
        report.high_mass.push_back(c.high);
    }
    if (deltas.size() >= 3) {
        report.c1_slope = scaling_study("c1_norm", deltas, report.c1_norm).slope;
        report.high_slope = scaling_study("high_harmonics", deltas, report.high_mass).slope;
    }
    return report;
}

WitnessReport integrability_witness(const DeformedCurve& curve, int q, int grid_size,
                                    double tolerance, int workers) {
    if (q < 3) throw InvalidArgument("q must be at least 3");
    if (grid_size < 1) throw InvalidArgument("grid must be non-empty");
    if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
    struct Cell {
        bool ok = false;
        double closing = 0.0;
        double action = 0.0;
    };
    const double period = curve.period();
    const auto cells = parallel_map(static_cast<std::size_t>(grid_size), workers,
                                    [&](std::size_t i) {
        try {
            const ChainSolution sol = solve_chain(curve, q, period * i / grid_size);
            return Cell{true, std::abs(sol.closing_residual), orbit_action(curve, sol.params)};
        } catch (const SolverError&) {
            return Cell{};
        }
    });

    WitnessReport report;
    report.q = q;
    report.grid_size = grid_size;
    report.tolerance = tolerance;
    report.action_min = std::numeric_limits<double>::infinity();
    report.action_max = -std::numeric_limits<double>::infinity();
    for (const Cell& c : cells) {
        if (!c.ok) {
            ++report.failures;
            report.closing_residuals.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        report.closing_residuals.push_back(c.closing);
        report.max_closing_residual = std::max(report.max_closing_residual, c.closing);
        report.action_min = std::min(report.action_min, c.action);
        report.action_max = std::max(report.action_max, c.action);
    }
    report.pass = report.failures == 0 && report.max_closing_residual <= tolerance;
    return report;
}

double symmetric_difference(const EllipseSpec& base, const DeformationFn& n, int nodes) {
    if (nodes < 16) throw InvalidArgument("too few quadrature nodes");
    const double A = base.normalized_area();
    const double h = base.period() / nodes;
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double v = n(i * h);
        if (!(1.0 + v > 0.0)) throw ConvexityError("1 + n(t) must stay positive");
        sum += std::abs(v + 0.5 * v * v);
    }
    return A * A * sum * h;
}

ScalingReport scaling_study(std::string quantity, std::span<const double> epsilon,
                            std::span<const double> values) {
    if (epsilon.size() != values.size()) throw InvalidArgument("grid and values differ in size");
    if (epsilon.size() < 3) throw InvalidArgument("scaling study needs at least 3 grid points");
    for (std::size_t i = 0; i < epsilon.size(); ++i) {
        if (!(epsilon[i] > 0.0)) throw InvalidArgument("epsilon grid must be positive");
        if (i > 0 && !(epsilon[i] < epsilon[i - 1])) {
            throw InvalidArgument("epsilon grid must be strictly decreasing");
        }
    }
    ScalingReport report;
    report.quantity = std::move(quantity);
    report.epsilon.assign(epsilon.begin(), epsilon.end());
    report.value.assign(values.begin(), values.end());

    std::vector<double> x, y;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 1e-14) || !std::isfinite(values[i])) {
            report.warnings.push_back("excluded epsilon=" + std::to_string(epsilon[i]) +
                                      ": value at or below 1e-14");
            continue;
        }
        x.push_back(std::log(epsilon[i]));
        y.push_back(std::log(values[i]));
    }
    if (x.size() < 3) throw InvalidArgument("fewer than 3 usable points in scaling study");

    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    report.slope = sxy / sxx;
    report.intercept = my - report.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (report.intercept + report.slope * x[i]);
        ss += r * r;
    }
    report.fit_residual = std::sqrt(ss / n);
    return report;
}

ScalingReport scaling_study(std::string quantity, std::span<const double> epsilon,
                            const std::function<double(double)>& measure, int workers) {
    const auto values =
        parallel_map(epsilon.size(), workers, [&](std::size_t i) { return measure(epsilon[i]); });
    return scaling_study(std::move(quantity), epsilon, values);
}

void write_scaling_csv(std::ostream& out, std::span<const ScalingReport> reports) {
    const auto old_precision = out.precision(17);
    out << "epsilon,quantity,value\n";
    for (const ScalingReport& r : reports) {
        for (std::size_t i = 0; i < r.epsilon.size(); ++i) {
            out << r.epsilon[i] << ',' << r.quantity << ',' << r.value[i] << '\n';
        }
        out << "slope," << r.quantity << ',' << r.slope << '\n';
        out << "fit_residual," << r.quantity << ',' << r.fit_residual << '\n';
    }
    out.precision(old_precision);
}

} // namespace billiard
