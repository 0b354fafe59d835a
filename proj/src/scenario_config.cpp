// SPDX-License-Identifier: Apache-2.0

#include "xlswipt/scenario_config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "xlswipt/errors.hpp"

namespace xlswipt {

using nlohmann::json;

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Rounded to 1e-9 degrees so that configs written back read the same.
double degrees(double radians) {
    return std::round(radians / kDeg * 1e9) / 1e9;
}

// Walks one JSON object, remembering which keys were consumed so that
// leftovers can be rejected.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            throw SchemaError(path_.empty() ? "<root>" : path_, "expected an object");
        }
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return node_.contains(key) && !node_.at(key).is_null(); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        if (!has(key)) {
            throw SchemaError(field(key), "required field is missing");
        }
        return node_.at(key);
    }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) {
            throw SchemaError(field(key), "expected a number");
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            throw SchemaError(field(key), "must be finite");
        }
        return x;
    }

    double number(const std::string& key, double fallback) {
        seen_.insert(key);
        return has(key) ? number(key) : fallback;
    }

    std::optional<double> optional_number(const std::string& key) {
        seen_.insert(key);
        if (!has(key)) {
            return std::nullopt;
        }
        return number(key);
    }

    double positive(const std::string& key) {
        const double x = number(key);
        if (!(x > 0.0)) {
            throw SchemaError(field(key), "must be positive");
        }
        return x;
    }

    double positive(const std::string& key, double fallback) {
        seen_.insert(key);
        return has(key) ? positive(key) : fallback;
    }

    double non_negative(const std::string& key, double fallback) {
        seen_.insert(key);
        if (!has(key)) {
            return fallback;
        }
        const double x = number(key);
        if (x < 0.0) {
            throw SchemaError(field(key), "must be non-negative");
        }
        return x;
    }

    std::uint64_t count(const std::string& key, bool allow_zero = false) {
        const json& v = raw(key);
        if (!v.is_number_integer() || v.get<long long>() < (allow_zero ? 0 : 1)) {
            throw SchemaError(field(key), allow_zero ? "expected a non-negative integer" : "expected a positive integer");
        }
        return v.get<std::uint64_t>();
    }

    std::uint64_t count(const std::string& key, std::uint64_t fallback, bool allow_zero = false) {
        seen_.insert(key);
        return has(key) ? count(key, allow_zero) : fallback;
    }

    bool flag(const std::string& key, bool fallback) {
        seen_.insert(key);
        if (!has(key)) {
            return fallback;
        }
        const json& v = node_.at(key);
        if (!v.is_boolean()) {
            throw SchemaError(field(key), "expected true or false");
        }
        return v.get<bool>();
    }

    std::string text(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) {
            throw SchemaError(field(key), "expected a string");
        }
        return v.get<std::string>();
    }

    // Absent optional sections still count as consumed.
    void mark(const std::string& key) { seen_.insert(key); }

    void finish() const {
        for (const auto& item : node_.items()) {
            if (!seen_.count(item.key())) {
                throw SchemaError(field(item.key()), "unknown field");
            }
        }
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

RegionPlan parse_region(const json& node, const std::string& path) {
    Section r(node, path);
    RegionPlan p;
    const std::string kind = r.text("kind");
    if (kind == "id") {
        p.kind = Role::ID;
    } else if (kind == "eh") {
        p.kind = Role::EH;
    } else {
        throw SchemaError(r.field("kind"), "expected \"id\" or \"eh\"");
    }
    p.center_x_fraction = r.number("center_x_fraction");
    p.r_min_fraction = r.positive("r_min_fraction");
    p.r_max_fraction = r.positive("r_max_fraction");
    p.angles.polar_min = r.number("polar_min_deg", 0.0) * kDeg;
    p.angles.polar_max = r.number("polar_max_deg", 60.0) * kDeg;
    p.angles.azimuth_min = r.number("azimuth_min_deg", 0.0) * kDeg;
    p.angles.azimuth_max = r.number("azimuth_max_deg", 360.0) * kDeg;
    if (r.has("subarray_mask")) {
        const json& m = r.raw("subarray_mask");
        if (!m.is_array()) {
            throw SchemaError(r.field("subarray_mask"), "expected an array of booleans");
        }
        std::vector<bool> mask;
        for (const auto& b : m) {
            if (!b.is_boolean()) {
                throw SchemaError(r.field("subarray_mask"), "expected an array of booleans");
            }
            mask.push_back(b.get<bool>());
        }
        p.subarray_mask = std::move(mask);
    } else {
        r.mark("subarray_mask");
    }
    r.finish();
    return p;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
    Section root(doc, "");
    Scenario sc;

    Section g(root.raw("geometry"), "geometry");
    sc.subarrays = g.count("subarrays");
    sc.elements_x = g.count("elements_x");
    sc.elements_y = g.count("elements_y");
    sc.wavelength = g.positive("wavelength_m");
    sc.element_dimension = g.non_negative("element_dimension_m", sc.wavelength / 4.0);
    sc.element_pitch = g.positive("element_pitch_m", sc.wavelength / 2.0);
    sc.subarray_gap = g.non_negative("subarray_gap_m", 0.0);
    sc.boresight_exponent = g.non_negative("boresight_exponent", 2.0);
    g.finish();

    Section u(root.raw("users"), "users");
    sc.id_users = u.count("id_users", true);
    sc.eh_users = u.count("eh_users", true);
    if (sc.id_users + sc.eh_users == 0) {
        throw SchemaError("users", "at least one user is required");
    }
    sc.seed = u.count("seed", 1, true);
    if (u.has("regions")) {
        const json& regions = u.raw("regions");
        if (!regions.is_array()) {
            throw SchemaError(u.field("regions"), "expected an array");
        }
        for (std::size_t i = 0; i < regions.size(); ++i) {
            sc.regions.push_back(parse_region(regions[i], u.field("regions") + "[" + std::to_string(i) + "]"));
        }
    } else {
        u.mark("regions");
    }
    u.finish();

    Section p(root.raw("power"), "power");
    sc.power.amplifier_efficiency = p.positive("amplifier_efficiency");
    sc.power.synthesizer_power = p.positive("p_syn_mw") / 1e3;
    sc.power.circuit_power = p.positive("p_ct_mw") / 1e3;
    sc.power.element_power = p.positive("p_et_mw") / 1e3;
    if (sc.power.amplifier_efficiency > 1.0) {
        throw SchemaError(p.field("amplifier_efficiency"), "must not exceed 1");
    }
    p.finish();

    Section e(root.raw("eh"), "eh");
    sc.eh.zeta_max = e.positive("zeta_max_mw") / 1e3;
    sc.eh.a = e.positive("a_per_w");
    sc.eh.b = e.number("b_w");
    e.finish();

    Section n(root.raw("noise"), "noise");
    sc.noise_power = dbm_to_watts(n.number("sigma2_dbm"));
    n.finish();

    if (root.has("solver")) {
        Section s(root.raw("solver"), "solver");
        sc.admm.penalty = s.positive("penalty", sc.admm.penalty);
        sc.admm.relaxation = s.positive("relaxation", sc.admm.relaxation);
        if (sc.admm.relaxation >= 1.0) {
            throw SchemaError(s.field("relaxation"), "must lie in (0, 1)");
        }
        sc.admm.tolerance = s.positive("epsilon_w", sc.admm.tolerance);
        sc.outer_tolerance = s.has("delta_w") && s.raw("delta_w").is_string() &&
                                     s.raw("delta_w").get<std::string>() == "inf"
                                 ? std::numeric_limits<double>::infinity()
                                 : s.positive("delta_w", sc.outer_tolerance);
        sc.admm.max_iterations = s.count("max_iterations", sc.admm.max_iterations);
        sc.admm.inner_steps = s.count("inner_steps", sc.admm.inner_steps);
        sc.admm.feasibility_tolerance = s.positive("feasibility_tolerance", sc.admm.feasibility_tolerance);
        sc.admm.infeasibility_threshold = s.positive("infeasibility_threshold", sc.admm.infeasibility_threshold);
        sc.admm.stall_iterations = s.count("stall_iterations", sc.admm.stall_iterations, true);
        sc.admm.adaptive_penalty = s.flag("adaptive_penalty", sc.admm.adaptive_penalty);
        s.finish();
    } else {
        root.mark("solver");
    }

    if (root.has("thresholds")) {
        Section t(root.raw("thresholds"), "thresholds");
        sc.rate_threshold = t.optional_number("rate_bps_hz");
        if (const auto mw = t.optional_number("energy_mw")) {
            sc.energy_threshold = *mw / 1e3;
        }
        if ((sc.rate_threshold && *sc.rate_threshold < 0.0) || (sc.energy_threshold && *sc.energy_threshold < 0.0)) {
            throw SchemaError("thresholds", "thresholds must be non-negative");
        }
        t.finish();
    } else {
        root.mark("thresholds");
    }

    sc.trials = root.count("trials", std::uint64_t{1});
    root.finish();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("", "cannot read " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw SchemaError("", std::string("malformed JSON: ") + err.what());
    }
    return parse_scenario(doc);
}

json scenario_to_json(const Scenario& sc) {
    json doc;
    doc["geometry"] = {{"subarrays", sc.subarrays},
                       {"elements_x", sc.elements_x},
                       {"elements_y", sc.elements_y},
                       {"wavelength_m", sc.wavelength},
                       {"element_dimension_m", sc.element_dimension},
                       {"element_pitch_m", sc.element_pitch},
                       {"subarray_gap_m", sc.subarray_gap},
                       {"boresight_exponent", sc.boresight_exponent}};
    json regions = json::array();
    for (const auto& r : sc.regions.empty() ? default_regions() : sc.regions) {
        json j = {{"kind", r.kind == Role::ID ? "id" : "eh"},
                  {"center_x_fraction", r.center_x_fraction},
                  {"r_min_fraction", r.r_min_fraction},
                  {"r_max_fraction", r.r_max_fraction},
                  {"polar_min_deg", degrees(r.angles.polar_min)},
                  {"polar_max_deg", degrees(r.angles.polar_max)},
                  {"azimuth_min_deg", degrees(r.angles.azimuth_min)},
                  {"azimuth_max_deg", degrees(r.angles.azimuth_max)}};
        if (r.subarray_mask) {
            j["subarray_mask"] = *r.subarray_mask;
        }
        regions.push_back(std::move(j));
    }
    doc["users"] = {{"id_users", sc.id_users}, {"eh_users", sc.eh_users}, {"seed", sc.seed}, {"regions", regions}};
    doc["power"] = {{"amplifier_efficiency", sc.power.amplifier_efficiency},
                    {"p_syn_mw", sc.power.synthesizer_power * 1e3},
                    {"p_ct_mw", sc.power.circuit_power * 1e3},
                    {"p_et_mw", sc.power.element_power * 1e3}};
    doc["eh"] = {{"zeta_max_mw", sc.eh.zeta_max * 1e3}, {"a_per_w", sc.eh.a}, {"b_w", sc.eh.b}};
    doc["noise"] = {{"sigma2_dbm", watts_to_dbm(sc.noise_power)}};
    doc["solver"] = {{"penalty", sc.admm.penalty},
                     {"relaxation", sc.admm.relaxation},
                     {"epsilon_w", sc.admm.tolerance},
                     {"max_iterations", sc.admm.max_iterations},
                     {"inner_steps", sc.admm.inner_steps},
                     {"feasibility_tolerance", sc.admm.feasibility_tolerance},
                     {"infeasibility_threshold", sc.admm.infeasibility_threshold},
                     {"stall_iterations", sc.admm.stall_iterations},
                     {"adaptive_penalty", sc.admm.adaptive_penalty}};
    if (std::isinf(sc.outer_tolerance)) {
        doc["solver"]["delta_w"] = "inf";
    } else {
        doc["solver"]["delta_w"] = sc.outer_tolerance;
    }
    json thresholds = json::object();
    if (sc.rate_threshold) {
        thresholds["rate_bps_hz"] = *sc.rate_threshold;
    }
    if (sc.energy_threshold) {
        thresholds["energy_mw"] = *sc.energy_threshold * 1e3;
    }
    doc["thresholds"] = thresholds;
    doc["trials"] = sc.trials;
    return doc;
}

}  // namespace xlswipt
