#include "config.hpp"

#include <billiard/errors.hpp>
#include <billiard/io.hpp>

#include <json.hpp>

namespace billiard::cli {

namespace {

using nlohmann::json;

json default_doc() {
    return json{
        {"curve", {{"ellipse", {{"center", {0.0, 0.0}}, {"a", 1.0}, {"b", 1.0}, {"tilt", 0.0}}}}},
        {"q", {3, 4, 5, 7}},
        {"grid_size", 64},
        {"epsilon", {1e-2, 3e-3, 1e-3, 3e-4}},
        {"k_max", kDefaultRefitOrder},
        {"tolerances",
         {{"witness", 1e-9},
          {"quadratic_slope", 0.2},
          {"linear_slope", 0.15},
          {"sine_sum_slope", 0.25},
          {"fit", 1e-10}}},
        {"shapes",
         {{{"c0", 0.0}, {"cos", {0.0, 0.0, 1.0}}, {"sin", json::array()}},
          {{"c0", 0.0}, {"cos", {0.0, 0.0, 1.0}}, {"sin", {0.0, 0.0, 0.0, 0.0, 0.5}}}}},
        {"chain_t0", 0.3},
        {"phase_portrait", {{"initial_points", 20}, {"steps", 200}}},
        {"fit", {{"start", nullptr}, {"max_iter", 25}, {"min_improvement", 0.01}}},
        {"workers", 1},
    };
}

json parse_value(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return text;
    }
}

void apply_override(json& doc, const std::string& item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + item + "'");
    std::string pointer;
    const std::string key = item.substr(0, eq);
    std::size_t start = 0;
    while (start <= key.size()) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("empty path component in '" + key + "'");
        pointer += "/" + part;
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    try {
        doc[json::json_pointer(pointer)] = parse_value(item.substr(eq + 1));
    } catch (const json::exception& e) {
        throw ConfigError("cannot set '" + key + "': " + e.what());
    }
}

template <class T>
T get(const json& doc, const char* key) {
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
}

EllipseSpec ellipse_from(const json& e) {
    json wrapped{{"ellipse", e}};
    return curve_from_json(wrapped.dump()).base();
}

DeformationFn shape_from(const json& s, double period) {
    if (!s.is_object()) throw ConfigError("each shape must be an object with c0/cos/sin");
    return DeformationFn(period, s.value("c0", 0.0), s.value("cos", std::vector<double>{}),
                         s.value("sin", std::vector<double>{}));
}

json ellipse_doc(const EllipseSpec& e) {
    return {{"center", {e.center().x(), e.center().y()}}, {"a", e.a()}, {"b", e.b()}, {"tilt", e.tilt()}};
}

json shape_doc(const DeformationFn& n) {
    return {{"c0", n.c0()}, {"cos", n.cos_coeffs()}, {"sin", n.sin_coeffs()}};
}

void validate(const StudyConfig& c) {
    if (c.q.empty()) throw ConfigError("q list must be non-empty");
    for (int q : c.q) {
        if (q < 3) throw ConfigError("every q must be at least 3");
    }
    if (c.grid_size < 1) throw ConfigError("grid_size must be positive");
    if (c.epsilon.empty()) throw ConfigError("epsilon grid must be non-empty");
    for (double e : c.epsilon) {
        if (!(e > 0.0)) throw ConfigError("epsilon values must be positive");
    }
    if (c.k_max < 2) throw ConfigError("k_max must be at least 2");
    const Tolerances& t = c.tolerances;
    if (!(t.witness > 0.0 && t.quadratic_slope > 0.0 && t.linear_slope > 0.0 &&
          t.sine_sum_slope > 0.0 && t.fit > 0.0)) {
        throw ConfigError("tolerances must be positive");
    }
    if (c.shapes.empty()) throw ConfigError("shapes must be non-empty");
    if (c.initial_points < 1 || c.steps < 1) throw ConfigError("phase portrait grid must be non-empty");
    if (c.fit_max_iter < 1 || !(c.fit_min_improvement > 0.0)) throw ConfigError("invalid fit options");
    if (c.workers < 1) throw ConfigError("workers must be at least 1");
}

} // namespace

StudyConfig load_config(const std::string& json_text, const std::vector<std::string>& overrides) {
    json doc = default_doc();
    if (!json_text.empty()) {
        json user;
        try {
            user = json::parse(json_text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("malformed config JSON: ") + e.what());
        }
        if (!user.is_object()) throw ConfigError("config must be a JSON object");
        // Replace, not merge, whole sub-documents so a user curve drops the default deformation.
        for (auto it = user.begin(); it != user.end(); ++it) {
            if (it.key() == "tolerances" || it.key() == "phase_portrait" || it.key() == "fit") {
                doc[it.key()].update(it.value());
            } else {
                doc[it.key()] = it.value();
            }
        }
    }
    for (const std::string& item : overrides) apply_override(doc, item);

    StudyConfig c;
    try {
        c.curve = curve_from_json(doc.at("curve").dump());
        c.q = get<std::vector<int>>(doc, "q");
        c.grid_size = get<int>(doc, "grid_size");
        c.epsilon = get<std::vector<double>>(doc, "epsilon");
        c.k_max = get<int>(doc, "k_max");
        const json& tol = doc.at("tolerances");
        c.tolerances.witness = get<double>(tol, "witness");
        c.tolerances.quadratic_slope = get<double>(tol, "quadratic_slope");
        c.tolerances.linear_slope = get<double>(tol, "linear_slope");
        c.tolerances.sine_sum_slope = get<double>(tol, "sine_sum_slope");
        c.tolerances.fit = get<double>(tol, "fit");
        const double period = c.curve.period();
        if (!doc.at("shapes").is_array()) throw ConfigError("shapes must be an array");
        for (const json& s : doc.at("shapes")) c.shapes.push_back(shape_from(s, period));
        c.chain_t0 = get<double>(doc, "chain_t0");
        c.initial_points = get<int>(doc.at("phase_portrait"), "initial_points");
        c.steps = get<int>(doc.at("phase_portrait"), "steps");
        const json& fit = doc.at("fit");
        c.fit_start = fit.at("start").is_null() ? c.curve.base() : ellipse_from(fit.at("start"));
        c.fit_max_iter = get<int>(fit, "max_iter");
        c.fit_min_improvement = get<double>(fit, "min_improvement");
        c.workers = get<int>(doc, "workers");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    validate(c);
    return c;
}

std::string config_to_json(const StudyConfig& c) {
    json doc = json::parse(curve_to_json(c.curve));
    json shapes = json::array();
    for (const DeformationFn& n : c.shapes) shapes.push_back(shape_doc(n));
    json out{
        {"command", c.command},
        {"harness", c.harness},
        {"curve", doc},
        {"q", c.q},
        {"grid_size", c.grid_size},
        {"epsilon", c.epsilon},
        {"k_max", c.k_max},
        {"tolerances",
         {{"witness", c.tolerances.witness},
          {"quadratic_slope", c.tolerances.quadratic_slope},
          {"linear_slope", c.tolerances.linear_slope},
          {"sine_sum_slope", c.tolerances.sine_sum_slope},
          {"fit", c.tolerances.fit}}},
        {"shapes", shapes},
        {"chain_t0", c.chain_t0},
        {"phase_portrait", {{"initial_points", c.initial_points}, {"steps", c.steps}}},
        {"fit",
         {{"start", ellipse_doc(c.fit_start)},
          {"max_iter", c.fit_max_iter},
          {"min_improvement", c.fit_min_improvement}}},
    };
    return out.dump(2);
}

} // namespace billiard::cli
