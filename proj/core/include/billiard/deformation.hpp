#pragma once

#include <functional>
#include <span>
#include <vector>

namespace billiard {

inline constexpr int kDefaultGrid = 4096;

/// A smooth periodic function stored as a truncated real Fourier series
///
///     n(t) = c0 + sum_k alpha_k cos(k t / A) + beta_k sin(k t / A),
///
/// with period L = 2 pi A. Derivatives of every order are exact.
class DeformationFn {
public:
    DeformationFn() : DeformationFn(6.283185307179586) {}
    explicit DeformationFn(double period, double c0 = 0.0, std::vector<double> cos_coeffs = {},
                           std::vector<double> sin_coeffs = {});

    static DeformationFn zero(double period) { return DeformationFn(period); }
    static DeformationFn constant(double period, double c) { return DeformationFn(period, c); }
    /// amp_cos cos(k t/A) + amp_sin sin(k t/A).
    static DeformationFn harmonic(double period, int k, double amp_cos, double amp_sin = 0.0);

    /// Trapezoid projection of uniform samples over one period onto harmonics <= k_max.
    /// Samples are taken at t_i = i L / N, i = 0..N-1.
    static DeformationFn from_samples(std::span<const double> samples, double period, int k_max);
    static DeformationFn from_function(const std::function<double(double)>& f, double period,
                                       int k_max, int nodes = 0);

    double period() const { return period_; }
    /// Normalized area of the base: period / 2 pi.
    double base_scale() const;
    int k_max() const { return static_cast<int>(cos_.size()); }
    double c0() const { return c0_; }
    const std::vector<double>& cos_coeffs() const { return cos_; }
    const std::vector<double>& sin_coeffs() const { return sin_; }
    double cos_coeff(int k) const { return k >= 1 && k <= k_max() ? cos_[k - 1] : 0.0; }
    double sin_coeff(int k) const { return k >= 1 && k <= k_max() ? sin_[k - 1] : 0.0; }

    double operator()(double t) const { return derivative(t, 0); }
    double derivative(double t, int order) const;

    bool is_zero() const;

    /// m(t) = n(t + shift), same period.
    DeformationFn shifted(double shift) const;
    /// Same coefficients over a new period (values as a function of phase are kept).
    DeformationFn with_period(double period) const;
    /// Keep only harmonics with lo <= k <= hi.
    DeformationFn band(int lo, int hi) const;

    DeformationFn& operator+=(const DeformationFn& other);
    DeformationFn& operator-=(const DeformationFn& other);
    DeformationFn& operator*=(double s);

    friend DeformationFn operator+(DeformationFn lhs, const DeformationFn& rhs) { return lhs += rhs; }
    friend DeformationFn operator-(DeformationFn lhs, const DeformationFn& rhs) { return lhs -= rhs; }
    friend DeformationFn operator*(DeformationFn lhs, double s) { return lhs *= s; }
    friend DeformationFn operator*(double s, DeformationFn rhs) { return rhs *= s; }

private:
    void check_compatible(const DeformationFn& other) const;
    void trim();

    double period_;
    double c0_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

struct FunctionNorms {
    double ck = 0.0;
    double l2 = 0.0;
};

/// max |f^(order)| over one period; dense grid followed by Newton refinement.
double max_abs_derivative(const DeformationFn& f, int order, int grid = kDefaultGrid);

/// C^k norm: sum_{j<=k} max |f^(j)|.
double c_norm(const DeformationFn& f, int k, int grid = kDefaultGrid);

/// Normalized L^2 norm sqrt((1/L) int |f|^2), from the Parseval sum.
double l2_norm(const DeformationFn& f);

FunctionNorms function_norms(const DeformationFn& f, int k, int grid = kDefaultGrid);

} // namespace billiard
