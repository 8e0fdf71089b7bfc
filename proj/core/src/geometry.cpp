#include "billiard/geometry.hpp"

#include "billiard/errors.hpp"

#include <array>
#include <cmath>

namespace billiard {

EllipseSpec::EllipseSpec(Vec2 center, double a, double b, double tilt)
    : center_(std::move(center)), a_(a), b_(b), tilt_(tilt) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw InvalidArgument("ellipse semi-axes must be positive and finite");
    }
    if (!std::isfinite(tilt) || !center_.allFinite()) {
        throw InvalidArgument("ellipse center and tilt must be finite");
    }
    normalized_area_ = std::cbrt(a * b);
}

Mat2 EllipseSpec::frame() const {
    return rotation(tilt_) * Eigen::Vector2d(a_, b_).asDiagonal();
}

Vec2 EllipseSpec::local(double t, int order) const {
    const double A = normalized_area_;
    const double theta = t / A;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Vec2 v;
    switch (order) {
    case 0:
        v << a_ * c, b_ * s;
        break;
    case 1:
        v << -a_ * s / A, b_ * c / A;
        break;
    case 2:
        v << -a_ * c / (A * A), -b_ * s / (A * A);
        break;
    default:
        throw InvalidArgument("ellipse derivative order must be 0, 1 or 2");
    }
    return rotation(tilt_) * v;
}

double normalized_area(const EllipseSpec& e) { return e.normalized_area(); }

namespace {

double wrap_angle(double x) {
    x = std::fmod(x + std::numbers::pi, kTwoPi);
    if (x < 0.0) x += kTwoPi;
    return x - std::numbers::pi;
}

} // namespace

EllipseSpec ellipse_from_frame(const Vec2& center, const Mat2& m, double reference_tilt,
                               double* phase) {
    if (!(m.determinant() > 0.0)) {
        throw InvalidArgument("ellipse frame must have positive determinant");
    }
    Eigen::JacobiSVD<Mat2> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat2 u = svd.matrixU();
    Mat2 v = svd.matrixV();
    if (u.determinant() < 0.0) {
        u.col(1) *= -1.0;
        v.col(1) *= -1.0;
    }
    const Vec2 sigma = svd.singularValues();
    const double psi = std::atan2(u(1, 0), u(0, 0));
    const double phi = std::atan2(v(1, 0), v(0, 0));

    // (a, b, psi, phi) ~ (b, a, psi + pi/2, phi + pi/2) ~ (a, b, psi + pi, phi + pi) ~ ...
    struct Candidate {
        double a, b, tilt, phase;
    };
    std::array<Candidate, 4> candidates{};
    for (int k = 0; k < 4; ++k) {
        const double turn = k * std::numbers::pi / 2.0;
        const bool swap = (k % 2) == 1;
        candidates[k] = {swap ? sigma(1) : sigma(0), swap ? sigma(0) : sigma(1), psi + turn,
                         phi + turn};
    }
    const Candidate* best = &candidates[0];
    double best_gap = std::abs(wrap_angle(candidates[0].tilt - reference_tilt));
    for (const auto& c : candidates) {
        const double gap = std::abs(wrap_angle(c.tilt - reference_tilt));
        if (gap < best_gap - 1e-12) {
            best = &c;
            best_gap = gap;
        }
    }
    const double tilt = reference_tilt + wrap_angle(best->tilt - reference_tilt);
    if (phase != nullptr) *phase = wrap_angle(best->phase);
    return {center, best->a, best->b, tilt};
}

double affine_map_norm(const AffinePlaneMap& map) {
    Eigen::JacobiSVD<Mat2> svd(map.linear);
    return svd.singularValues()(0) + map.translation.norm();
}

} // namespace billiard
