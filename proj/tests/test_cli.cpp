#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spinor/mesh.hpp"
#include "spinor/serialize.hpp"

// Drives the installed command line binary as a subprocess and checks the
// documented contract: exit codes, output files, determinism.

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int code = -1;
    std::string out;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out = fs::temp_directory_path() /
                         ("spinor_cli_out_" + std::to_string(counter++) + ".txt");
    const std::string cmd = std::string(SPINOR_CLI_PATH) + " " + args + " > " +
                            out.string() + " 2> /dev/null";
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    fs::remove(out);
    return r;
}

fs::path temp_file(const char* name) { return fs::temp_directory_path() / name; }

}  // namespace

TEST_CASE("the catalog lists its entries") {
    const RunResult r = run_cli("catalog list");
    REQUIRE(r.code == 0);
    for (const auto& entry : spinor::catalog_entries())
        REQUIRE(r.out.find(entry.name) != std::string::npos);
}

TEST_CASE("specs build, verify, and mesh end to end") {
    const fs::path spec1 = temp_file("spinor_cli_s6a.json");
    const fs::path spec2 = temp_file("spinor_cli_s6b.json");
    REQUIRE(run_cli("catalog build sphere_6_ends --out " + spec1.string()).code == 0);
    REQUIRE(run_cli("catalog build sphere_6_ends --out " + spec2.string()).code == 0);
    REQUIRE(slurp(spec1) == slurp(spec2));

    const fs::path report = temp_file("spinor_cli_report.json");
    const RunResult v = run_cli("verify " + spec1.string() + " --json " + report.string());
    REQUIRE(v.code == 0);
    REQUIRE(v.out.find("overall: pass") != std::string::npos);
    const nlohmann::json rep = nlohmann::json::parse(slurp(report));
    REQUIRE(rep.at("pass").get<bool>());
    REQUIRE(rep.at("residuals").size() > 5);

    const fs::path obj1 = temp_file("spinor_cli_s6a.obj");
    const fs::path obj2 = temp_file("spinor_cli_s6b.obj");
    REQUIRE(run_cli("mesh " + spec1.string() + " --res 12 --out " + obj1.string()).code == 0);
    REQUIRE(run_cli("mesh " + spec1.string() + " --res 12 --out " + obj2.string()).code == 0);
    const std::string obj_text = slurp(obj1);
    REQUIRE(obj_text == slurp(obj2));
    const spinor::Mesh mesh = spinor::obj_from_string(obj_text);
    REQUIRE(mesh.vertices.size() > 20);
    REQUIRE(mesh.faces.size() > 20);

    for (const auto& p : {spec1, spec2, report, obj1, obj2}) fs::remove(p);
}

TEST_CASE("a spec that fails verification exits with one") {
    const fs::path good = temp_file("spinor_cli_good.json");
    const fs::path bad = temp_file("spinor_cli_bad.json");
    REQUIRE(run_cli("catalog build sphere_6_ends --out " + good.string()).code == 0);
    spinor::SurfaceSpec spec = spinor::load_spec(good.string());
    spec.ends[0] += 0.01;
    spinor::save_spec(spec, bad.string());

    const RunResult v = run_cli("verify " + bad.string());
    REQUIRE(v.code == 1);
    REQUIRE(v.out.find("FAIL") != std::string::npos);
    REQUIRE(run_cli("mesh " + bad.string() + " --res 8 --out /dev/null").code == 1);

    fs::remove(good);
    fs::remove(bad);
}

TEST_CASE("bad arguments exit with two") {
    REQUIRE(run_cli("").code == 2);
    REQUIRE(run_cli("frobnicate").code == 2);
    REQUIRE(run_cli("verify").code == 2);
    REQUIRE(run_cli("verify /nonexistent/path.json").code == 2);
    REQUIRE(run_cli("catalog build no_such_family").code == 2);
    REQUIRE(run_cli("arf --genus 0 --B 1").code == 2);
    REQUIRE(run_cli("pfaffian --ends 1,2,notanumber").code == 2);

    REQUIRE(run_cli("--help").code == 0);
    REQUIRE(run_cli("catalog --help").code == 0);
}

TEST_CASE("arf tables match the closed counts") {
    const RunResult g1 = run_cli("arf --genus 1 --table");
    REQUIRE(g1.code == 0);
    REQUIRE(g1.out.find("arf +1: 3, arf -1: 1") != std::string::npos);

    const RunResult g2 = run_cli("arf --genus 2 --table");
    REQUIRE(g2.code == 0);
    REQUIRE(g2.out.find("arf +1: 10, arf -1: 6") != std::string::npos);

    const RunResult one = run_cli("arf --genus 2 --B 1,3");
    REQUIRE(one.code == 0);
    REQUIRE(one.out.find("B={1,3} #B=2 arf=") != std::string::npos);
}

TEST_CASE("the pairing command reports kernel dimensions") {
    const RunResult hex = run_cli(
        "pfaffian --ends \"0.8660254037844386+0.5i,0.8660254037844386-0.5i,0,inf\"");
    REQUIRE(hex.code == 0);
    REQUIRE(hex.out.find("kernel dimension: 2") != std::string::npos);

    const RunResult generic = run_cli("pfaffian --ends \"0.9+0.6i,-0.3+0.1i,0,inf\"");
    REQUIRE(generic.code == 0);
    REQUIRE(generic.out.find("kernel dimension: 0") != std::string::npos);

    const RunResult odd = run_cli("pfaffian --ends \"1.1+0.3i,-0.7+0.2i,0.4-0.9i\"");
    REQUIRE(odd.code == 0);
    REQUIRE(odd.out.find("pfaffian:") == std::string::npos);
    REQUIRE(odd.out.find("kernel dimension: 1") != std::string::npos);
}
