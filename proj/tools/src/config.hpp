#pragma once

#include <billiard/curve.hpp>
#include <billiard/fitting.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace billiard::cli {

/// Bad configuration or usage; mapped to its own exit code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double witness = 1e-9;          // closing residual, in units of A^2
    double quadratic_slope = 0.2;   // action, suppression high harmonics
    double linear_slope = 0.15;     // equidistribution, suppression C1 norm, symmdiff
    double sine_sum_slope = 0.25;
    double fit = 1e-10;
};

struct StudyConfig {
    std::string command;
    std::string harness;
    DeformedCurve curve{EllipseSpec::unit_circle()};
    std::vector<int> q{3, 4, 5, 7};
    int grid_size = 64;
    std::vector<double> epsilon{1e-2, 3e-3, 1e-3, 3e-4};
    int k_max = kDefaultRefitOrder;
    Tolerances tolerances;
    /// deformation shapes n0 over the curve's base ellipse
    std::vector<DeformationFn> shapes;
    double chain_t0 = 0.3;          // anchor of fixed-t0 chains, in units of A
    int initial_points = 20;
    int steps = 200;
    EllipseSpec fit_start = EllipseSpec::unit_circle();
    int fit_max_iter = 25;
    double fit_min_improvement = 0.01;
    std::string out_dir = ".";
    int workers = 1;
};

/// Builds a config from an optional JSON document plus dotted key=value overrides.
/// Override values are parsed as JSON when possible, otherwise taken as strings.
StudyConfig load_config(const std::string& json_text, const std::vector<std::string>& overrides);

/// The effective config as a JSON document (written next to every report).
std::string config_to_json(const StudyConfig& config);

} // namespace billiard::cli
