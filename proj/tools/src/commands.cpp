#include "cli.hpp"

#include <billiard/dynamics.hpp>
#include <billiard/errors.hpp>
#include <billiard/parallel.hpp>
#include <billiard/periodic_orbits.hpp>
#include <billiard/rigidity.hpp>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace billiard::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::ofstream open_output(const StudyConfig& config, const std::string& name) {
    fs::create_directories(config.out_dir);
    const fs::path path = fs::path(config.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

void write_json(const StudyConfig& config, const std::string& name, const json& doc) {
    auto out = open_output(config, name);
    out << doc.dump(2) << '\n';
}

json config_doc(const StudyConfig& config) { return json::parse(config_to_json(config)); }

json scaling_doc(const ScalingReport& r) {
    return {{"quantity", r.quantity},
            {"epsilon", r.epsilon},
            {"value", r.value},
            {"slope", r.slope},
            {"intercept", r.intercept},
            {"fit_residual", r.fit_residual},
            {"warnings", r.warnings}};
}

std::string study_name(const std::string& quantity, std::size_t shape, int q) {
    std::ostringstream s;
    s << quantity << "[shape=" << shape;
    if (q > 0) s << ",q=" << q;
    s << ']';
    return s.str();
}

struct SlopeCheck {
    ScalingReport report;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

SlopeCheck check_slope(ScalingReport report, double expected, double tolerance) {
    const bool ok = std::abs(report.slope - expected) <= tolerance;
    return {std::move(report), expected, tolerance, ok};
}

int finish_verify(const StudyConfig& config, const std::vector<SlopeCheck>& checks, json extra,
                  std::ostream& log) {
    bool pass = true;
    json studies = json::array();
    std::vector<ScalingReport> reports;
    for (const SlopeCheck& c : checks) {
        json doc = scaling_doc(c.report);
        doc["expected_slope"] = c.expected;
        doc["slope_tolerance"] = c.tolerance;
        doc["pass"] = c.pass;
        studies.push_back(doc);
        reports.push_back(c.report);
        pass = pass && c.pass;
        log << (c.pass ? "ok   " : "FAIL ") << c.report.quantity << " slope " << c.report.slope
            << " (expected " << c.expected << " +- " << c.tolerance << ")\n";
    }
    for (const auto& item : extra.value("checks", json::array())) {
        pass = pass && item.value("pass", false);
    }
    json doc{{"harness", config.harness}, {"pass", pass}, {"studies", studies}, {"config", config_doc(config)}};
    for (auto it = extra.begin(); it != extra.end(); ++it) doc[it.key()] = it.value();
    write_json(config, "verify_" + config.harness + ".json", doc);
    auto csv = open_output(config, "verify_" + config.harness + ".csv");
    write_scaling_csv(csv, reports);
    log << (pass ? "PASS" : "FAIL") << ' ' << config.harness << '\n';
    return pass ? kPass : kAssertionFailed;
}

int verify_action_quadratic(const StudyConfig& config, std::ostream& log) {
    const EllipseSpec& base = config.curve.base();
    std::vector<SlopeCheck> checks;
    for (std::size_t s = 0; s < config.shapes.size(); ++s) {
        for (int q : config.q) {
            const DeformationFn& n0 = config.shapes[s];
            auto measure = [&](double eps) { return action_deviation(base, n0, eps, q).value; };
            checks.push_back(check_slope(
                scaling_study(study_name("action_deviation", s, q), config.epsilon, measure, config.workers),
                2.0, config.tolerances.quadratic_slope));
        }
    }
    return finish_verify(config, checks, json::object(), log);
}

int verify_equidistribution(const StudyConfig& config, std::ostream& log) {
    const EllipseSpec& base = config.curve.base();
    const double t0 = config.chain_t0 * base.normalized_area();
    std::vector<SlopeCheck> checks;
    for (std::size_t s = 0; s < config.shapes.size(); ++s) {
        for (int q : config.q) {
            const DeformationFn& n0 = config.shapes[s];
            const auto cells = parallel_map(config.epsilon.size(), config.workers, [&](std::size_t i) {
                return chain_deviation(base, n0, config.epsilon[i], q, t0);
            });
            std::vector<double> equi, sine;
            for (const ChainDeviation& c : cells) {
                equi.push_back(c.equidistribution);
                sine.push_back(c.sine_sum);
            }
            checks.push_back(check_slope(
                scaling_study(study_name("equidistribution", s, q), config.epsilon, equi), 1.0,
                config.tolerances.linear_slope));
            checks.push_back(check_slope(
                scaling_study(study_name("sine_sum", s, q), config.epsilon, sine), 2.0,
                config.tolerances.sine_sum_slope));
        }
    }
    return finish_verify(config, checks, json::object(), log);
}

int verify_suppression(const StudyConfig& config, std::ostream& log) {
    const EllipseSpec base = config.curve.base();
    const double A = base.normalized_area();
    // Nearby ellipses: stretch, squeeze, turn and shift at rate delta.
    auto family = [&](double d) {
        const Vec2 shift(0.5 * A * d, -0.3 * A * d);
        return EllipseSpec(base.center() + shift, base.a() * (1.0 + d), base.b() * (1.0 - 0.5 * d),
                           base.tilt() + 0.7 * d);
    };
    const SuppressionReport r =
        fourier_suppression_study(base, family, config.epsilon, 3, 8, config.workers);
    std::vector<SlopeCheck> checks;
    checks.push_back(check_slope(scaling_study("c1_norm", r.delta, r.c1_norm), 1.0,
                                 config.tolerances.linear_slope));
    checks.push_back(check_slope(scaling_study("high_harmonics_3_8", r.delta, r.high_mass), 2.0,
                                 config.tolerances.quadratic_slope));
    return finish_verify(config, checks, json::object(), log);
}

int verify_symmdiff(const StudyConfig& config, std::ostream& log) {
    const EllipseSpec& base = config.curve.base();
    const double A = base.normalized_area();
    std::vector<SlopeCheck> checks;
    json bounds = json::array();
    for (std::size_t s = 0; s < config.shapes.size(); ++s) {
        std::vector<double> values;
        for (double eps : config.epsilon) {
            const DeformationFn n = config.shapes[s] * eps;
            const double value = symmetric_difference(base, n);
            const double c1 = c_norm(n, 1);
            const double bound = 2.0 * std::numbers::pi * A * A * A * c1 * (1.0 + c1);
            values.push_back(value);
            bounds.push_back({{"shape", s}, {"epsilon", eps}, {"value", value}, {"bound", bound},
                              {"pass", value <= bound}});
        }
        checks.push_back(check_slope(scaling_study(study_name("symmetric_difference", s, 0),
                                                   config.epsilon, values),
                                     1.0, config.tolerances.linear_slope));
    }
    json extra{{"checks", bounds}};
    if (!config.curve.deformation().is_zero()) {
        const DeformationFn& n = config.curve.deformation();
        const double c1 = c_norm(n, 1);
        const double value = symmetric_difference(base, n);
        const double bound = 2.0 * std::numbers::pi * A * A * A * c1 * (1.0 + c1);
        extra["checks"].push_back({{"shape", "curve"}, {"value", value}, {"bound", bound},
                                   {"pass", value <= bound}});
    }
    for (const auto& b : extra["checks"]) {
        if (!b["pass"].get<bool>()) log << "FAIL bound " << b.dump() << '\n';
    }
    return finish_verify(config, checks, extra, log);
}

int verify_witness(const StudyConfig& config, std::ostream& log) {
    const double A = config.curve.scale();
    const double period = config.curve.period();
    bool pass = true;
    json studies = json::array();
    auto csv = open_output(config, "verify_witness.csv");
    csv.precision(17);
    csv << "q,index,t0,closing_residual\n";
    for (int q : config.q) {
        const WitnessReport r =
            integrability_witness(config.curve, q, config.grid_size, config.tolerances.witness * A * A,
                                  config.workers);
        pass = pass && r.pass;
        studies.push_back({{"q", q},
                           {"grid_size", r.grid_size},
                           {"tolerance", r.tolerance},
                           {"max_closing_residual", r.max_closing_residual},
                           {"failures", r.failures},
                           {"action_min", r.failures < r.grid_size ? json(r.action_min) : json(nullptr)},
                           {"action_max", r.failures < r.grid_size ? json(r.action_max) : json(nullptr)},
                           {"pass", r.pass}});
        for (std::size_t i = 0; i < r.closing_residuals.size(); ++i) {
            csv << q << ',' << i << ',' << period * static_cast<double>(i) / r.grid_size << ','
                << r.closing_residuals[i] << '\n';
        }
        log << (r.pass ? "ok   " : "FAIL ") << "q=" << q << " max closing residual "
            << r.max_closing_residual << " (tolerance " << r.tolerance << ", failures " << r.failures
            << ")\n";
    }
    write_json(config, "verify_witness.json",
               {{"harness", "witness"}, {"pass", pass}, {"studies", studies}, {"config", config_doc(config)}});
    log << (pass ? "PASS" : "FAIL") << " witness\n";
    return pass ? kPass : kAssertionFailed;
}

} // namespace

int cmd_verify(const StudyConfig& config, std::ostream& log) {
    if (config.harness == "action-quadratic") return verify_action_quadratic(config, log);
    if (config.harness == "equidistribution") return verify_equidistribution(config, log);
    if (config.harness == "suppression") return verify_suppression(config, log);
    if (config.harness == "witness") return verify_witness(config, log);
    if (config.harness == "symmdiff") return verify_symmdiff(config, log);
    throw ConfigError("unknown verify harness '" + config.harness + "'");
}

int cmd_phase_portrait(const StudyConfig& config, std::ostream& log) {
    const DeformedCurve& curve = config.curve;
    const double period = curve.period();
    const int count = config.initial_points;
    // Initial chords span 2% to 48% of the period so every start lies inside the twist domain.
    const auto trajectories = parallel_map(static_cast<std::size_t>(count), config.workers, [&](std::size_t i) {
        const double t = period * static_cast<double>(i) / count;
        const double frac = count > 1 ? 0.02 + 0.46 * static_cast<double>(i) / (count - 1) : 0.25;
        return iterate_map(curve, {t, t + frac * period}, config.steps - 1);
    });
    auto csv = open_output(config, "phase_portrait.csv");
    csv.precision(17);
    csv << "trajectory,step,t,t_next,lift,twist_density,rotation_number\n";
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const Trajectory& tr = trajectories[i];
        for (std::size_t k = 0; k < tr.size(); ++k) {
            const PhasePoint p = tr.point(k);
            const double rho = (tr.lift[k + 1] - tr.lift[0]) / (static_cast<double>(k + 1) * period);
            csv << i << ',' << k << ',' << reduce_parameter(p.t, period) << ','
                << reduce_parameter(p.t_next, period) << ',' << p.t << ','
                << twist_density(curve, p.t, p.t_next) << ',' << rho << '\n';
        }
    }
    log << "wrote " << count << " trajectories of " << config.steps << " steps\n";
    return kPass;
}

int cmd_orbit(const StudyConfig& config, std::ostream& log) {
    const DeformedCurve& curve = config.curve;
    const double A = curve.scale();
    const auto orbits = parallel_map(config.q.size(), config.workers, [&](std::size_t i) {
        return find_periodic_orbit(curve, config.q[i], config.chain_t0 * A);
    });
    auto csv = open_output(config, "orbit.csv");
    json list = json::array();
    for (const PeriodicOrbit& orbit : orbits) {
        write_orbit_csv(csv, orbit, list.empty());
        const double ellipse_action = A * A * A * orbit.q * std::sin(kTwoPi / orbit.q);
        list.push_back({{"q", orbit.q},
                        {"params", orbit.params},
                        {"action", orbit.action},
                        {"ellipse_action", ellipse_action},
                        {"max_residual", orbit.max_residual},
                        {"closing_residual", orbit.closing_residual},
                        {"iterations", orbit.iterations},
                        {"local_maximum", orbit.local_maximum}});
        log << "q=" << orbit.q << " action " << orbit.action << " max residual " << orbit.max_residual
            << '\n';
    }
    write_json(config, "orbit_summary.json", {{"orbits", list}, {"config", config_doc(config)}});
    return kPass;
}

int cmd_fit(const StudyConfig& config, std::ostream& log) {
    ClosestEllipseOptions options;
    options.max_iter = config.fit_max_iter;
    options.tol = config.tolerances.fit;
    options.min_improvement = config.fit_min_improvement;
    options.k_max = config.k_max;
    const IterationTrace trace = closest_ellipse(config.curve, config.fit_start, options);
    auto csv = open_output(config, "fit_trace.csv");
    write_trace_csv(csv, trace);
    const TraceRecord& last = trace.last();
    const bool elliptic = last.c1_norm <= options.tol;
    const std::string verdict = elliptic ? "ellipse" : "non-elliptic remainder";
    const EllipseSpec& e = last.ellipse;
    write_json(config, "fit_verdict.json",
               {{"verdict", verdict},
                {"termination", to_string(trace.reason)},
                {"steps", trace.steps.size() - 1},
                {"terminal_c1_norm", last.c1_norm},
                {"terminal_d_delta", last.d_delta},
                {"ellipse",
                 {{"center", {e.center().x(), e.center().y()}}, {"a", e.a()}, {"b", e.b()}, {"tilt", e.tilt()}}},
                {"config", config_doc(config)}});
    log << "verdict: " << verdict << " (" << to_string(trace.reason) << ", " << trace.steps.size() - 1
        << " steps, terminal norm " << last.c1_norm << ")\n";
    return kPass;
}

int cmd_selftest(std::ostream& log) {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        log << (ok ? "PASS " : "FAIL ") << name << '\n';
        if (!ok) ++failures;
    };
    const DeformedCurve circle(EllipseSpec::unit_circle());
    check("area form orientation", area_form({1.0, 0.0}, {0.0, 1.0}) == 1.0);
    check("area form of (2,1),(3,4)", area_form({2.0, 1.0}, {3.0, 4.0}) == 5.0);
    check("normalized area of (2,4)", std::abs(EllipseSpec::axis_aligned(2.0, 4.0).normalized_area() - 2.0) < 1e-15);
    {
        const PhasePoint p = billiard_step(circle, {0.0, 1.0});
        check("circle step is a rotation", std::abs(p.t_next - 2.0) < 1e-10);
    }
    {
        const DeformedCurve e(EllipseSpec::axis_aligned(2.0, 1.0));
        const PeriodicOrbit orbit = find_periodic_orbit(e, 5);
        const double expected = 2.0 * 5.0 * std::sin(kTwoPi / 5.0);
        check("ellipse 5-orbit action", std::abs(orbit.action - expected) <= 1e-9 * expected);
    }
    {
        const WitnessReport w = integrability_witness(circle, 4, 8, 1e-9);
        check("circle witness q=4", w.pass);
    }
    {
        const double d = symmetric_difference(EllipseSpec::unit_circle(), DeformationFn::constant(kTwoPi, 0.1));
        check("annulus symmetric difference", std::abs(d - 0.21 * std::numbers::pi) < 1e-10);
    }
    {
        const DeformedCurve omega(EllipseSpec::unit_circle(), DeformationFn::harmonic(kTwoPi, 3, 0.005));
        const DeformationFn back = reexpress(omega, EllipseSpec::unit_circle());
        check("identity re-expression", c_norm(back - omega.deformation(), 0) < 1e-10);
    }
    log << (failures == 0 ? "selftest passed" : "selftest failed") << '\n';
    return failures == 0 ? kPass : kAssertionFailed;
}

} // namespace billiard::cli
