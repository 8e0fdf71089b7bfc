#pragma once

#include "billiard/curve.hpp"

#include <iosfwd>
#include <vector>

namespace billiard {

/// A point of the phase cylinder: two consecutive boundary parameters.
///
/// Parameters are lifted (not reduced): t < t_next < t + period. Reduce with
/// reduce_parameter() for display.
struct PhasePoint {
    double t = 0.0;
    double t_next = 0.0;
};

/// Parameter reduced into [0, period).
double reduce_parameter(double t, double period);

/// H(t, t') = omega(gamma(t), gamma(t')) about the base center.
double generating_function(const DeformedCurve& curve, double t, double t_next);

/// omega(gamma'(t), gamma'(t')): the mixed partial of H; positive on the phase domain.
double twist_density(const DeformedCurve& curve, double t, double t_next);

/// Lifted t* in (t, t + period) with gamma'(t*) anti-parallel to gamma'(t).
double parallel_partner(const DeformedCurve& curve, double t);

/// One application of the symplectic billiard map: (t, t') -> (t', t'').
PhasePoint billiard_step(const DeformedCurve& curve, const PhasePoint& p);

struct Trajectory {
    double period = 0.0;
    /// Lifted parameters t_0, t_1, ..., t_{N+1}; phase point k is (lift[k], lift[k+1]).
    std::vector<double> lift;

    std::size_t size() const { return lift.size() < 2 ? 0 : lift.size() - 1; }
    PhasePoint point(std::size_t k) const { return {lift[k], lift[k + 1]}; }
};

/// N applications of billiard_step starting at p0 (N + 1 phase points).
Trajectory iterate_map(const DeformedCurve& curve, const PhasePoint& p0, int steps);

/// (lift_end - lift_start) / (steps * period).
double rotation_number(const Trajectory& trajectory);

/// CSV with columns step, t, t_next, lift, twist_density.
void write_trajectory_csv(std::ostream& out, const DeformedCurve& curve,
                          const Trajectory& trajectory);

} // namespace billiard
