#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "spinor/serialize.hpp"
#include "spinor/verify.hpp"

using namespace spinor;

namespace {

bool same_point(cplx a, cplx b) {
    if (is_infinity(a) || is_infinity(b)) return is_infinity(a) && is_infinity(b);
    return a == b;
}

void require_equal_specs(const SurfaceSpec& a, const SurfaceSpec& b) {
    REQUIRE(a.family == b.family);
    REQUIRE(a.description == b.description);
    REQUIRE(a.symmetry == b.symmetry);
    REQUIRE(a.domain_kind == b.domain_kind);
    REQUIRE(a.omega1 == b.omega1);
    REQUIRE(a.omega3 == b.omega3);
    REQUIRE(a.spin_kind == b.spin_kind);
    REQUIRE(a.spin_r == b.spin_r);
    REQUIRE(a.nonorientable == b.nonorientable);
    REQUIRE(a.lift_sign == b.lift_sign);
    REQUIRE(a.cycle_base == b.cycle_base);
    REQUIRE(a.ends.size() == b.ends.size());
    for (std::size_t i = 0; i < a.ends.size(); ++i)
        REQUIRE(same_point(a.ends[i], b.ends[i]));
    REQUIRE(a.end_orders == b.end_orders);
    REQUIRE(a.coeff1 == b.coeff1);
    REQUIRE(a.coeff2 == b.coeff2);
    REQUIRE(a.moduli.size() == b.moduli.size());
    for (std::size_t i = 0; i < a.moduli.size(); ++i) {
        REQUIRE(a.moduli[i].first == b.moduli[i].first);
        REQUIRE(a.moduli[i].second == b.moduli[i].second);
    }
}

}  // namespace

TEST_CASE("surface data survives a json round trip") {
    for (const char* name : {"sphere_4_ends", "klein_bottle_4_ends"}) {
        const SurfaceSpec spec = build_catalog(name);
        const SurfaceSpec back = spec_from_json(spec_to_json(spec));
        require_equal_specs(spec, back);
    }
}

TEST_CASE("writing is a pure function of the stored values") {
    for (const auto& entry : catalog_entries()) {
        const SurfaceSpec spec = build_catalog(entry.name);
        const std::string once = spec_to_json(spec);
        REQUIRE(once == spec_to_json(spec));
        REQUIRE(once == spec_to_json(spec_from_json(once)));
    }
}

TEST_CASE("the point at infinity is written as a tag") {
    const SurfaceSpec spec = build_catalog("sphere_4_ends");
    const std::string text = spec_to_json(spec);
    REQUIRE(text.find("\"inf\"") != std::string::npos);
    const SurfaceSpec back = spec_from_json(text);
    REQUIRE(is_infinity(back.ends.back()));
    REQUIRE_FALSE(is_infinity(back.ends.front()));
}

TEST_CASE("malformed input is rejected") {
    const std::string good = spec_to_json(build_catalog("sphere_4_ends"));

    REQUIRE_THROWS_AS(spec_from_json("{"), std::invalid_argument);
    REQUIRE_THROWS_AS(spec_from_json("[1, 2]"), std::invalid_argument);

    nlohmann::json j = nlohmann::json::parse(good);
    j["format"] = "something-else/9";
    REQUIRE_THROWS_AS(spec_from_json(j.dump()), std::invalid_argument);

    j = nlohmann::json::parse(good);
    j.erase("ends");
    REQUIRE_THROWS_AS(spec_from_json(j.dump()), std::invalid_argument);

    j = nlohmann::json::parse(good);
    j["lift_sign"] = 0;
    REQUIRE_THROWS_AS(spec_from_json(j.dump()), std::invalid_argument);

    j = nlohmann::json::parse(good);
    j["end_orders"].erase(0);
    REQUIRE_THROWS_AS(spec_from_json(j.dump()), std::invalid_argument);

    j = nlohmann::json::parse(good);
    j["ends"][0] = "somewhere";
    REQUIRE_THROWS_AS(spec_from_json(j.dump()), std::invalid_argument);

    j = nlohmann::json::parse(good);
    j["moduli"][0] = 3.5;
    REQUIRE_THROWS_AS(spec_from_json(j.dump()), std::invalid_argument);
}

TEST_CASE("specs travel through files") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "spinor_spec_roundtrip.json";
    const SurfaceSpec spec = build_catalog("torus_4_ends");
    save_spec(spec, path.string());
    const SurfaceSpec back = load_spec(path.string());
    require_equal_specs(spec, back);
    fs::remove(path);
    REQUIRE_THROWS_AS(load_spec(path.string()), std::invalid_argument);
}

TEST_CASE("verification reports serialize with named residuals") {
    const VerificationReport rep = verify_spec(build_catalog("sphere_4_ends"));
    REQUIRE(rep.pass);
    const std::string text = report_to_json(rep);
    const nlohmann::json j = nlohmann::json::parse(text);
    REQUIRE(j.at("format").get<std::string>() == std::string(kReportFormat));
    REQUIRE(j.at("spec").get<std::string>() == "sphere_4_ends");
    REQUIRE(j.at("pass").get<bool>());
    REQUIRE(j.at("residuals").size() == rep.entries.size());
    for (const auto& e : j.at("residuals")) {
        REQUIRE(e.contains("name"));
        REQUIRE(e.contains("value"));
        REQUIRE(e.contains("tol"));
        REQUIRE(e.at("pass").is_boolean());
    }
    // The same report renders to the same bytes.
    REQUIRE(text == report_to_json(rep));
}
