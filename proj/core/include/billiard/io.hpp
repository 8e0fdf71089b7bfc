#pragma once

#include "billiard/curve.hpp"

#include <iosfwd>
#include <string>

namespace billiard {

/// Curve document:
/// {"ellipse": {"center": [x, y], "a": .., "b": .., "tilt": ..},
///  "deformation": {"c0": .., "cos": [...], "sin": [...]}}
/// The deformation is optional; its period is taken from the ellipse.
std::string curve_to_json(const DeformedCurve& curve);
DeformedCurve curve_from_json(const std::string& text);

void write_curve(std::ostream& out, const DeformedCurve& curve);
DeformedCurve read_curve(std::istream& in);

} // namespace billiard
