#include "billiard/deformation.hpp"

#include "billiard/errors.hpp"
#include "billiard/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace billiard {

DeformationFn::DeformationFn(double period, double c0, std::vector<double> cos_coeffs,
                             std::vector<double> sin_coeffs)
    : period_(period), c0_(c0), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw InvalidArgument("deformation period must be positive");
    }
    const std::size_t n = std::max(cos_.size(), sin_.size());
    cos_.resize(n, 0.0);
    sin_.resize(n, 0.0);
    const auto finite = [](double x) { return std::isfinite(x); };
    if (!std::isfinite(c0) || !std::all_of(cos_.begin(), cos_.end(), finite) ||
        !std::all_of(sin_.begin(), sin_.end(), finite)) {
        throw InvalidArgument("deformation coefficients must be finite");
    }
}

DeformationFn DeformationFn::harmonic(double period, int k, double amp_cos, double amp_sin) {
    if (k < 0) throw InvalidArgument("harmonic index must be non-negative");
    if (k == 0) return DeformationFn(period, amp_cos);
    std::vector<double> c(k, 0.0), s(k, 0.0);
    c[k - 1] = amp_cos;
    s[k - 1] = amp_sin;
    return DeformationFn(period, 0.0, std::move(c), std::move(s));
}

DeformationFn DeformationFn::from_samples(std::span<const double> samples, double period,
                                          int k_max) {
    const int n = static_cast<int>(samples.size());
    if (n < 2 * k_max + 1) {
        throw InvalidArgument("need at least 2 k_max + 1 samples for projection");
    }
    double c0 = 0.0;
    for (double v : samples) c0 += v;
    c0 /= n;
    std::vector<double> c(k_max, 0.0), s(k_max, 0.0);
    for (int k = 1; k <= k_max; ++k) {
        double ak = 0.0, bk = 0.0;
        for (int i = 0; i < n; ++i) {
            const double phase = kTwoPi * static_cast<double>(k) * i / n;
            ak += samples[i] * std::cos(phase);
            bk += samples[i] * std::sin(phase);
        }
        // The Nyquist harmonic gets a single weight on an even grid.
        const double w = (2 * k == n) ? 1.0 : 2.0;
        c[k - 1] = w * ak / n;
        s[k - 1] = w * bk / n;
    }
    return DeformationFn(period, c0, std::move(c), std::move(s));
}

DeformationFn DeformationFn::from_function(const std::function<double(double)>& f, double period,
                                           int k_max, int nodes) {
    if (nodes <= 0) nodes = std::max(8 * k_max, 64);
    std::vector<double> samples(nodes);
    for (int i = 0; i < nodes; ++i) samples[i] = f(period * i / nodes);
    return from_samples(samples, period, k_max);
}

double DeformationFn::base_scale() const { return period_ / kTwoPi; }

double DeformationFn::derivative(double t, int order) const {
    if (order < 0) throw InvalidArgument("derivative order must be non-negative");
    const double w = kTwoPi / period_;
    double sum = order == 0 ? c0_ : 0.0;
    for (int k = 1; k <= k_max(); ++k) {
        const double ak = cos_[k - 1];
        const double bk = sin_[k - 1];
        if (ak == 0.0 && bk == 0.0) continue;
        const double freq = k * w;
        const double phase = freq * t;
        const double c = std::cos(phase);
        const double s = std::sin(phase);
        // d^m/dt^m [a cos + b sin] cycles with period 4 in m.
        double value = 0.0;
        switch (order % 4) {
        case 0: value = ak * c + bk * s; break;
        case 1: value = -ak * s + bk * c; break;
        case 2: value = -ak * c - bk * s; break;
        case 3: value = ak * s - bk * c; break;
        }
        sum += std::pow(freq, order) * value;
    }
    return sum;
}

bool DeformationFn::is_zero() const {
    const auto zero = [](double x) { return x == 0.0; };
    return c0_ == 0.0 && std::all_of(cos_.begin(), cos_.end(), zero) &&
           std::all_of(sin_.begin(), sin_.end(), zero);
}

DeformationFn DeformationFn::shifted(double shift) const {
    const double w = kTwoPi / period_;
    std::vector<double> c(cos_.size()), s(sin_.size());
    for (int k = 1; k <= k_max(); ++k) {
        const double cs = std::cos(k * w * shift);
        const double sn = std::sin(k * w * shift);
        // a cos(k w (t + h)) + b sin(k w (t + h))
        c[k - 1] = cos_[k - 1] * cs + sin_[k - 1] * sn;
        s[k - 1] = -cos_[k - 1] * sn + sin_[k - 1] * cs;
    }
    return DeformationFn(period_, c0_, std::move(c), std::move(s));
}

DeformationFn DeformationFn::with_period(double period) const {
    return DeformationFn(period, c0_, cos_, sin_);
}

DeformationFn DeformationFn::band(int lo, int hi) const {
    std::vector<double> c(cos_.size(), 0.0), s(sin_.size(), 0.0);
    for (int k = std::max(lo, 1); k <= std::min(hi, k_max()); ++k) {
        c[k - 1] = cos_[k - 1];
        s[k - 1] = sin_[k - 1];
    }
    DeformationFn out(period_, lo <= 0 && hi >= 0 ? c0_ : 0.0, std::move(c), std::move(s));
    out.trim();
    return out;
}

void DeformationFn::check_compatible(const DeformationFn& other) const {
    if (std::abs(period_ - other.period_) > 1e-12 * period_) {
        throw InvalidArgument("deformation periods differ");
    }
}

void DeformationFn::trim() {
    while (!cos_.empty() && cos_.back() == 0.0 && sin_.back() == 0.0) {
        cos_.pop_back();
        sin_.pop_back();
    }
}

DeformationFn& DeformationFn::operator+=(const DeformationFn& other) {
    check_compatible(other);
    c0_ += other.c0_;
    const std::size_t n = std::max(cos_.size(), other.cos_.size());
    cos_.resize(n, 0.0);
    sin_.resize(n, 0.0);
    for (std::size_t i = 0; i < other.cos_.size(); ++i) {
        cos_[i] += other.cos_[i];
        sin_[i] += other.sin_[i];
    }
    return *this;
}

DeformationFn& DeformationFn::operator-=(const DeformationFn& other) {
    return *this += other * -1.0;
}

DeformationFn& DeformationFn::operator*=(double s) {
    c0_ *= s;
    for (auto& v : cos_) v *= s;
    for (auto& v : sin_) v *= s;
    return *this;
}

double max_abs_derivative(const DeformationFn& f, int order, int grid) {
    if (grid < 8) throw InvalidArgument("grid too coarse");
    const double h = f.period() / grid;
    int best = 0;
    double best_val = -1.0;
    for (int i = 0; i < grid; ++i) {
        const double v = std::abs(f.derivative(i * h, order));
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    if (f.k_max() == 0) return best_val;

    // Polish the grid maximizer: Newton on the next derivative, kept inside one cell.
    const double t_grid = best * h;
    double t = t_grid;
    for (int it = 0; it < 8; ++it) {
        const double g = f.derivative(t, order + 1);
        const double gp = f.derivative(t, order + 2);
        if (gp == 0.0) break;
        const double step = std::clamp(-g / gp, -h, h);
        t += step;
        if (std::abs(t - t_grid) > h) {
            t = t_grid;
            break;
        }
        if (std::abs(step) < 1e-15 * f.period()) break;
    }
    return std::max(best_val, std::abs(f.derivative(t, order)));
}

double c_norm(const DeformationFn& f, int k, int grid) {
    if (k < 0) throw InvalidArgument("smoothness order must be non-negative");
    double total = 0.0;
    for (int j = 0; j <= k; ++j) total += max_abs_derivative(f, j, grid);
    return total;
}

double l2_norm(const DeformationFn& f) {
    double sum = f.c0() * f.c0();
    for (int k = 1; k <= f.k_max(); ++k) {
        sum += 0.5 * (f.cos_coeff(k) * f.cos_coeff(k) + f.sin_coeff(k) * f.sin_coeff(k));
    }
    return std::sqrt(sum);
}

FunctionNorms function_norms(const DeformationFn& f, int k, int grid) {
    return {c_norm(f, k, grid), l2_norm(f)};
}

} // namespace billiard
