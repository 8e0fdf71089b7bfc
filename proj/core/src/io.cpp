#include "billiard/io.hpp"

#include "billiard/errors.hpp"

#include <json.hpp>

#include <istream>
#include <iterator>
#include <ostream>

namespace billiard {

namespace {

using nlohmann::json;

json to_doc(const DeformedCurve& curve) {
    const EllipseSpec& e = curve.base();
    const DeformationFn& n = curve.deformation();
    json doc;
    doc["ellipse"] = {{"center", {e.center().x(), e.center().y()}},
                      {"a", e.a()},
                      {"b", e.b()},
                      {"tilt", e.tilt()}};
    doc["deformation"] = {{"c0", n.c0()}, {"cos", n.cos_coeffs()}, {"sin", n.sin_coeffs()}};
    return doc;
}

double number(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw InvalidArgument(std::string("curve field '") + key + "' must be a number");
    return v.get<double>();
}

std::vector<double> numbers(const json& obj, const char* key) {
    if (!obj.contains(key)) return {};
    const json& v = obj.at(key);
    if (!v.is_array()) throw InvalidArgument(std::string("curve field '") + key + "' must be an array");
    std::vector<double> out;
    for (const json& x : v) {
        if (!x.is_number()) throw InvalidArgument(std::string("curve field '") + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

DeformedCurve from_doc(const json& doc) {
    if (!doc.is_object() || !doc.contains("ellipse")) {
        throw InvalidArgument("curve document needs an 'ellipse' object");
    }
    const json& e = doc.at("ellipse");
    if (!e.is_object()) throw InvalidArgument("'ellipse' must be an object");
    Vec2 center(0.0, 0.0);
    if (e.contains("center")) {
        const auto c = numbers(e, "center");
        if (c.size() != 2) throw InvalidArgument("'center' must have two entries");
        center = {c[0], c[1]};
    }
    const EllipseSpec base(center, number(e, "a", 1.0), number(e, "b", 1.0), number(e, "tilt", 0.0));
    if (!doc.contains("deformation")) return DeformedCurve(base);
    const json& d = doc.at("deformation");
    if (!d.is_object()) throw InvalidArgument("'deformation' must be an object");
    DeformationFn n(base.period(), number(d, "c0", 0.0), numbers(d, "cos"), numbers(d, "sin"));
    return DeformedCurve(base, std::move(n));
}

} // namespace

std::string curve_to_json(const DeformedCurve& curve) { return to_doc(curve).dump(2); }

DeformedCurve curve_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("malformed curve JSON: ") + e.what());
    }
    return from_doc(doc);
}

void write_curve(std::ostream& out, const DeformedCurve& curve) { out << curve_to_json(curve) << '\n'; }

DeformedCurve read_curve(std::istream& in) {
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return curve_from_json(text);
}

} // namespace billiard
