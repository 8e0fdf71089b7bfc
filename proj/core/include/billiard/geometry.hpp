#pragma once

#include <Eigen/Dense>

#include <numbers>

namespace billiard {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Standard area form: u_x v_y - u_y v_x.
inline double area_form(const Vec2& u, const Vec2& v) {
    return u.x() * v.y() - u.y() * v.x();
}

inline Mat2 rotation(double angle) {
    Mat2 r;
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

/// A planar ellipse with center, semi-axes and tilt.
///
/// The ellipse is traversed counter-clockwise in affine arc-length
///
///     e(t) = center + R(tilt) (a cos(t/A), b sin(t/A)),   t in [0, 2 pi A),
///
/// where A = (a b)^(1/3) is the normalized area.
class EllipseSpec {
public:
    EllipseSpec() : EllipseSpec(Vec2::Zero(), 1.0, 1.0, 0.0) {}
    EllipseSpec(Vec2 center, double a, double b, double tilt = 0.0);

    static EllipseSpec unit_circle() { return {}; }
    static EllipseSpec axis_aligned(double a, double b) { return {Vec2::Zero(), a, b, 0.0}; }

    const Vec2& center() const { return center_; }
    double a() const { return a_; }
    double b() const { return b_; }
    double tilt() const { return tilt_; }

    double normalized_area() const { return normalized_area_; }
    double period() const { return kTwoPi * normalized_area_; }
    double area() const { return std::numbers::pi * a_ * b_; }

    /// Linear part of the map taking the unit circle onto the ellipse.
    Mat2 frame() const;

    /// Point relative to the center, and its first two parameter derivatives.
    Vec2 local(double t, int order = 0) const;
    Vec2 point(double t) const { return center_ + local(t, 0); }

private:
    Vec2 center_;
    double a_;
    double b_;
    double tilt_;
    double normalized_area_;
};

/// (a b)^(1/3).
double normalized_area(const EllipseSpec& e);

/// Ellipse image of the unit circle under x -> center + M x (det M > 0).
///
/// Among the equivalent (a, b, tilt) descriptions, the one whose tilt is
/// closest to `reference_tilt` is chosen. `phase` receives the angle phi with
/// center + M u(theta) == ellipse.point(A (theta - phi)).
EllipseSpec ellipse_from_frame(const Vec2& center, const Mat2& m, double reference_tilt = 0.0,
                               double* phase = nullptr);

/// Affine map x -> linear x + translation.
struct AffinePlaneMap {
    Mat2 linear = Mat2::Identity();
    Vec2 translation = Vec2::Zero();

    Vec2 operator()(const Vec2& x) const { return linear * x + translation; }
    double determinant() const { return linear.determinant(); }
};

/// Operator norm of the linear part plus the Euclidean norm of the translation.
double affine_map_norm(const AffinePlaneMap& map);

} // namespace billiard
