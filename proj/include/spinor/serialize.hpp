#pragma once

// JSON storage for surface data.  Writing is hand-rolled so the byte stream
// is a pure function of the stored values: fixed key order, fixed "%.17g"
// number formatting, no locale dependence.  Reading goes through a full JSON
// parser and rejects anything that does not match the schema, so a loaded
// spec is exactly as trustworthy as a built one.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "spinor/catalog.hpp"
#include "spinor/numeric.hpp"

namespace spinor {

inline constexpr const char* kSpecFormat = "spinor-surface/1";
inline constexpr const char* kReportFormat = "spinor-verification/1";

namespace detail {

// Shortest representation that round-trips a double exactly.
inline std::string format_double(double x) {
    if (!std::isfinite(x))
        throw std::invalid_argument("format_double: non-finite value");
    if (x == 0.0) x = 0.0;  // collapse -0 so writing is idempotent
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void append_json_string(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

inline void append_complex(std::string& out, cplx z) {
    out += '[';
    out += format_double(z.real());
    out += ',';
    out += format_double(z.imag());
    out += ']';
}

// Ends admit the point at infinity, written as the string "inf".
inline void append_end_point(std::string& out, cplx z) {
    if (is_infinity(z))
        out += "\"inf\"";
    else
        append_complex(out, z);
}

template <typename T, typename F>
void append_array(std::string& out, const std::vector<T>& v, F&& item) {
    out += '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        item(out, v[i]);
    }
    out += ']';
}

inline const char* spin_kind_name(SpinStructure::Kind k) {
    switch (k) {
        case SpinStructure::Kind::sphere_dz: return "sphere-dz";
        case SpinStructure::Kind::torus_du: return "torus-twisted";
        case SpinStructure::Kind::torus_untwisted: return "torus-untwisted";
    }
    throw std::invalid_argument("spin_kind_name: unknown kind");
}

inline SpinStructure::Kind spin_kind_from_name(const std::string& s) {
    if (s == "sphere-dz") return SpinStructure::Kind::sphere_dz;
    if (s == "torus-twisted") return SpinStructure::Kind::torus_du;
    if (s == "torus-untwisted") return SpinStructure::Kind::torus_untwisted;
    throw std::invalid_argument("unknown spin structure: " + s);
}

inline cplx complex_from_json(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw std::invalid_argument(std::string(what) + ": expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline cplx end_point_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return infinity_point();
        throw std::invalid_argument("end point: unknown string " + j.get<std::string>());
    }
    return complex_from_json(j, "end point");
}

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end())
        throw std::invalid_argument(std::string("spec: missing field ") + key);
    return *it;
}

}  // namespace detail

inline std::string spec_to_json(const SurfaceSpec& spec) {
    using namespace detail;
    std::string o;
    o.reserve(2048);
    o += "{\n  \"format\": \"";
    o += kSpecFormat;
    o += "\",\n  \"family\": ";
    append_json_string(o, spec.family);
    o += ",\n  \"description\": ";
    append_json_string(o, spec.description);
    o += ",\n  \"symmetry\": ";
    append_json_string(o, spec.symmetry);
    o += ",\n  \"domain\": ";
    o += (spec.domain_kind == Domain::Kind::sphere) ? "\"sphere\"" : "\"torus\"";
    if (spec.domain_kind == Domain::Kind::torus) {
        o += ",\n  \"lattice\": {\"omega1\": ";
        append_complex(o, spec.omega1);
        o += ", \"omega3\": ";
        append_complex(o, spec.omega3);
        o += "}";
        o += ",\n  \"cycle_base\": ";
        append_complex(o, spec.cycle_base);
    }
    o += ",\n  \"spin\": \"";
    o += spin_kind_name(spec.spin_kind);
    o += "\"";
    if (spec.spin_kind == SpinStructure::Kind::torus_untwisted) {
        o += ",\n  \"spin_r\": ";
        o += std::to_string(spec.spin_r);
    }
    o += ",\n  \"nonorientable\": ";
    o += spec.nonorientable ? "true" : "false";
    o += ",\n  \"lift_sign\": ";
    o += std::to_string(spec.lift_sign);
    o += ",\n  \"ends\": ";
    append_array(o, spec.ends, [](std::string& s, cplx z) { append_end_point(s, z); });
    o += ",\n  \"end_orders\": ";
    append_array(o, spec.end_orders,
                 [](std::string& s, int k) { s += std::to_string(k); });
    o += ",\n  \"coeff1\": ";
    append_array(o, spec.coeff1, [](std::string& s, cplx z) { append_complex(s, z); });
    o += ",\n  \"coeff2\": ";
    append_array(o, spec.coeff2, [](std::string& s, cplx z) { append_complex(s, z); });
    o += ",\n  \"moduli\": ";
    append_array(o, spec.moduli,
                 [](std::string& s, const std::pair<std::string, cplx>& kv) {
                     s += '[';
                     append_json_string(s, kv.first);
                     s += ',';
                     append_complex(s, kv.second);
                     s += ']';
                 });
    o += "\n}\n";
    return o;
}

inline SurfaceSpec spec_from_json(const std::string& text) {
    using namespace detail;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("spec: not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("spec: top level must be an object");
    if (require_field(j, "format").get<std::string>() != kSpecFormat)
        throw std::invalid_argument("spec: unsupported format " +
                                    require_field(j, "format").get<std::string>());

    SurfaceSpec spec;
    spec.family = require_field(j, "family").get<std::string>();
    spec.description = j.value("description", std::string());
    spec.symmetry = j.value("symmetry", std::string());

    const std::string dom = require_field(j, "domain").get<std::string>();
    if (dom == "sphere") {
        spec.domain_kind = Domain::Kind::sphere;
    } else if (dom == "torus") {
        spec.domain_kind = Domain::Kind::torus;
        const auto& lat = require_field(j, "lattice");
        spec.omega1 = complex_from_json(require_field(lat, "omega1"), "omega1");
        spec.omega3 = complex_from_json(require_field(lat, "omega3"), "omega3");
        spec.cycle_base = complex_from_json(require_field(j, "cycle_base"), "cycle_base");
    } else {
        throw std::invalid_argument("spec: unknown domain " + dom);
    }

    spec.spin_kind = spin_kind_from_name(require_field(j, "spin").get<std::string>());
    if (spec.spin_kind == SpinStructure::Kind::torus_untwisted)
        spec.spin_r = require_field(j, "spin_r").get<int>();
    spec.nonorientable = require_field(j, "nonorientable").get<bool>();
    spec.lift_sign = require_field(j, "lift_sign").get<int>();
    if (spec.lift_sign != 1 && spec.lift_sign != -1)
        throw std::invalid_argument("spec: lift_sign must be +1 or -1");

    for (const auto& e : require_field(j, "ends"))
        spec.ends.push_back(end_point_from_json(e));
    for (const auto& e : require_field(j, "end_orders")) {
        if (!e.is_number_integer())
            throw std::invalid_argument("spec: end_orders must be integers");
        spec.end_orders.push_back(e.get<int>());
    }
    for (const auto& e : require_field(j, "coeff1"))
        spec.coeff1.push_back(complex_from_json(e, "coeff1"));
    for (const auto& e : require_field(j, "coeff2"))
        spec.coeff2.push_back(complex_from_json(e, "coeff2"));
    if (spec.ends.size() != spec.end_orders.size())
        throw std::invalid_argument("spec: ends and end_orders disagree in length");
    if (spec.coeff1.size() != spec.coeff2.size())
        throw std::invalid_argument("spec: coefficient vectors disagree in length");

    for (const auto& kv : require_field(j, "moduli")) {
        if (!kv.is_array() || kv.size() != 2 || !kv[0].is_string())
            throw std::invalid_argument("spec: moduli entries must be [name, [re, im]]");
        spec.moduli.emplace_back(kv[0].get<std::string>(),
                                 complex_from_json(kv[1], "modulus"));
    }
    return spec;
}

inline void save_spec(const SurfaceSpec& spec, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("save_spec: cannot open " + path);
    f << spec_to_json(spec);
    if (!f) throw std::runtime_error("save_spec: write failed for " + path);
}

inline SurfaceSpec load_spec(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("load_spec: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return spec_from_json(ss.str());
}

}  // namespace spinor
