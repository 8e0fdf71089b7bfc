#pragma once

#include "billiard/curve.hpp"
#include "billiard/periodic_orbits.hpp"

#include <complex>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace billiard {

/// Complex Fourier coefficients a_k = (1/L) int_0^L n(t) e^{-i k t/A} dt, |k| <= k_max.
struct FourierSpectrum {
    double period = 0.0;
    int k_max = 0;
    std::vector<std::complex<double>> coefficients; ///< index k + k_max

    std::complex<double> at(int k) const;
    /// sum |a_k|^2, equal to the squared normalized L^2 norm.
    double parseval_sum() const;
    /// max |a_k| over lo <= |k| <= hi.
    double max_abs(int lo, int hi) const;
};

/// Exact spectrum of a stored series (harmonics beyond the series are zero).
FourierSpectrum fourier_coefficients(const DeformationFn& n, int k_max);
/// Trapezoid-rule spectrum of a periodic function, with at least 8 k_max nodes.
FourierSpectrum fourier_coefficients(const std::function<double(double)>& f, double period,
                                     int k_max, int nodes = 0);

/// max_j |t_j - (t_0 + 2 pi A j / q)| for a configuration t_0 < ... < t_{q-1}.
double equidistribution_deviation(std::span<const double> params, double A);

/// |sum_j sin((t_{j+1} - t_j)/A) - q sin(2 pi / q)|, cyclic with t_q = t_0 + 2 pi A.
double sine_sum_deviation(const DeformedCurve& curve, int q, std::span<const double> params);

/// Second-order action defect of a q-periodic orbit in E + eps n0.
struct ActionDeviation {
    double epsilon = 0.0;
    int q = 0;
    double value = 0.0;   ///< |A_q - A^3 q sin - 2 A^3 sin sum eps n0(t_0 + 2 pi A j/q)|
    double action = 0.0;
    double anchor = 0.0;  ///< orbit point of smallest parameter
    PeriodicOrbit orbit;
};

ActionDeviation action_deviation(const EllipseSpec& base, const DeformationFn& n0, double epsilon,
                                 int q);

/// Chain (anchor-fixed) deviations in E + eps n0, used for the equidistribution
/// and sine-sum laws.
struct ChainDeviation {
    double epsilon = 0.0;
    int q = 0;
    double equidistribution = 0.0;
    double sine_sum = 0.0;
};

ChainDeviation chain_deviation(const EllipseSpec& base, const DeformationFn& n0, double epsilon,
                               int q, double t0);

/// |int n e^{i q t/A} dt| |q| / (A^2 ||n||_C1) over a range of q.
struct SmoothDecayReport {
    std::vector<int> q;
    std::vector<double> integral;  ///< |int_0^L n e^{i q t/A} dt|
    std::vector<double> ratio;
    double c1_norm = 0.0;
    double constant = 0.0;         ///< max ratio
};

SmoothDecayReport smooth_decay_check(const DeformationFn& n, int q_lo, int q_hi);

/// Quadratic suppression of non-elliptic harmonics for nearby ellipses.
struct SuppressionReport {
    std::vector<double> delta;
    std::vector<double> c1_norm;     ///< ||n_delta||_C1
    std::vector<double> high_mass;   ///< max_{k_lo <= |k| <= k_hi} |a_k(n_delta)|
    double c1_slope = 0.0;
    double high_slope = 0.0;
};

SuppressionReport fourier_suppression_study(const EllipseSpec& base,
                                            const std::function<EllipseSpec(double)>& family,
                                            std::span<const double> deltas, int k_lo = 3,
                                            int k_hi = 8, int workers = 1);

/// Rational-integrability witness: closing residuals of anchored chains over a t_0 grid.
struct WitnessReport {
    int q = 0;
    int grid_size = 0;
    double tolerance = 0.0;
    double max_closing_residual = 0.0;
    double action_min = 0.0;
    double action_max = 0.0;
    int failures = 0;
    bool pass = false;
    std::vector<double> closing_residuals; ///< per grid point (NaN on failure)
};

WitnessReport integrability_witness(const DeformedCurve& curve, int q, int grid_size,
                                    double tolerance, int workers = 1);

/// Area of the symmetric difference of E and E + n: A^2 int |n + n^2/2| dt.
double symmetric_difference(const EllipseSpec& base, const DeformationFn& n, int nodes = 4096);

/// Log-log least-squares fit of a measured quantity against a decreasing epsilon grid.
struct ScalingReport {
    std::string quantity;
    std::vector<double> epsilon;
    std::vector<double> value;
    double slope = 0.0;
    double intercept = 0.0;
    double fit_residual = 0.0;   ///< RMS of the log-log residuals
    std::vector<std::string> warnings;
};

ScalingReport scaling_study(std::string quantity, std::span<const double> epsilon,
                            std::span<const double> values);
ScalingReport scaling_study(std::string quantity, std::span<const double> epsilon,
                            const std::function<double(double)>& measure, int workers = 1);

/// CSV with columns epsilon, quantity, value, plus a summary row carrying the slope.
void write_scaling_csv(std::ostream& out, std::span<const ScalingReport> reports);

} // namespace billiard
