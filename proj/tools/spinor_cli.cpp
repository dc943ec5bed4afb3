// Command line front end: browse and build the catalog, verify stored specs,
// mesh them to OBJ, and poke at the pairing and spin-structure machinery
// directly.  Data goes to stdout or --out, diagnostics go to stderr.
// Exit codes: 0 success, 1 a check failed, 2 bad arguments or bad input.

#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinor/arf.hpp"
#include "spinor/catalog.hpp"
#include "spinor/complex_linalg.hpp"
#include "spinor/mesh.hpp"
#include "spinor/omega.hpp"
#include "spinor/serialize.hpp"
#include "spinor/verify.hpp"

namespace {

using namespace spinor;

bool g_verbose = false;

void note(const std::string& msg) {
    if (g_verbose) std::fprintf(stderr, "spinor: %s\n", msg.c_str());
}

double parse_real(const std::string& s) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw std::invalid_argument("not a number: " + s);
    return v;
}

// Accepts "1.5", "-2i", "i", "0.21+1.37i", "-1e-2-3i".
cplx parse_complex(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("empty complex literal");
    if (s.back() != 'i' && s.back() != 'I') return {parse_real(s), 0.0};

    s.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t k = 1; k < s.size(); ++k) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E')
            split = k;  // last sign wins: the imaginary part follows it
    }
    if (split == std::string::npos) {
        if (s.empty() || s == "+") return {0.0, 1.0};
        if (s == "-") return {0.0, -1.0};
        return {0.0, parse_real(s)};
    }
    const std::string re = s.substr(0, split);
    std::string im = s.substr(split);
    if (im == "+") im = "1";
    if (im == "-") im = "-1";
    return {parse_real(re), parse_real(im)};
}

cplx parse_end_point(const std::string& s) {
    if (s == "inf") return infinity_point();
    return parse_complex(s);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string format_complex(cplx z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.12g%+.12gi", z.real(), z.imag());
    return buf;
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed for " + path);
}

int run_catalog_list() {
    std::string out;
    char buf[200];
    for (const auto& e : catalog_entries()) {
        std::snprintf(buf, sizeof buf, "%-26s %-44s %s\n", e.name.c_str(),
                      e.parameters.c_str(), e.origin.c_str());
        out += buf;
    }
    std::fputs(out.c_str(), stdout);
    return 0;
}

int run_catalog_build(const std::string& name, const std::string& tau,
                      const std::string& sigma, const std::string& c,
                      const std::string& out_path) {
    CatalogBuildOptions opt;
    if (!tau.empty()) opt.tau = parse_complex(tau);
    if (!sigma.empty()) {
        const auto parts = split_list(sigma);
        if (parts.size() != 3)
            throw std::invalid_argument("--sigma needs three comma-separated values");
        opt.sigma = std::array<cplx, 3>{parse_complex(parts[0]), parse_complex(parts[1]),
                                        parse_complex(parts[2])};
    }
    if (!c.empty()) {
        const auto parts = split_list(c);
        if (parts.size() != 3)
            throw std::invalid_argument("--c needs three comma-separated values");
        opt.c = std::array<double, 3>{parse_real(parts[0]), parse_real(parts[1]),
                                      parse_real(parts[2])};
    }
    const SurfaceSpec spec = build_catalog(name, opt);
    note("built " + name + " with " + std::to_string(spec.ends.size()) + " ends");
    write_output(spec_to_json(spec), out_path);
    return 0;
}

int run_verify(const std::string& file, const std::string& json_out) {
    const SurfaceSpec spec = load_spec(file);
    note("verifying " + spec.family);
    const VerificationReport rep = verify_spec(spec);
    std::string out;
    char buf[160];
    for (const auto& e : rep.entries) {
        std::snprintf(buf, sizeof buf, "%-22s %12.4e   tol %8.1e   %s\n",
                      e.name.c_str(), e.value, e.tol, e.pass ? "pass" : "FAIL");
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "overall: %s\n", rep.pass ? "pass" : "FAIL");
    out += buf;
    std::fputs(out.c_str(), stdout);
    if (!json_out.empty()) {
        std::ofstream f(json_out, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot open output file " + json_out);
        f << report_to_json(rep);
    }
    return rep.pass ? 0 : 1;
}

int run_mesh(const std::string& file, int res, double cutoff,
             const std::string& out_path) {
    const SurfaceSpec spec = load_spec(file);
    note("verifying " + spec.family + " before meshing");
    const VerificationReport rep = verify_spec(spec);
    if (!rep.pass) {
        std::fprintf(stderr, "spinor: %s does not verify; not meshing\n",
                     spec.family.c_str());
        for (const auto& e : rep.entries)
            if (!e.pass)
                std::fprintf(stderr, "spinor:   %s = %.4e (tol %.1e)\n",
                             e.name.c_str(), e.value, e.tol);
        return 1;
    }
    const Mesh mesh = build_mesh(spec, res, cutoff);
    note("mesh has " + std::to_string(mesh.vertices.size()) + " vertices, " +
         std::to_string(mesh.faces.size()) + " faces, closure defect " +
         std::to_string(mesh.closure_residual));
    if (mesh.closure_residual > 1e-6) {
        std::fprintf(stderr,
                     "spinor: closure defect %.4e exceeds 1e-6; the stored data "
                     "does not close up at this resolution\n",
                     mesh.closure_residual);
        return 1;
    }
    write_output(obj_to_string(mesh), out_path);
    return 0;
}

int run_arf(int genus, const std::string& b_list, bool table) {
    std::vector<cplx> branch;
    for (int k = 1; k <= 2 * genus + 1; ++k) branch.emplace_back(double(k), 0.0);
    const HyperellipticCurve curve(genus, branch);

    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "genus %d hyperelliptic curve, branch values 1..%d and infinity\n",
                  genus, 2 * genus + 1);
    out += buf;

    auto describe = [&](const SpinStructureB& s) {
        std::string idx;
        for (int i = 0; i < curve.points(); ++i)
            if (s.B & (1u << i)) {
                if (!idx.empty()) idx += ",";
                idx += std::to_string(i + 1);
            }
        if (idx.empty()) idx = "-";
        std::snprintf(buf, sizeof buf, "B={%s} #B=%d arf=%+d\n", idx.c_str(),
                      s.b_count(), arf(s));
        return std::string(buf);
    };

    if (table) {
        if (genus > 5)
            throw std::invalid_argument("--table is limited to genus <= 5");
        int plus = 0, minus = 0;
        for (const auto& s : all_spin_structures(curve)) {
            out += describe(s);
            (arf(s) > 0 ? plus : minus)++;
        }
        std::snprintf(buf, sizeof buf, "arf +1: %d, arf -1: %d\n", plus, minus);
        out += buf;
    } else {
        std::vector<int> idx;
        if (!b_list.empty())
            for (const auto& part : split_list(b_list)) {
                const double v = parse_real(part);
                if (v != int(v)) throw std::invalid_argument("--B wants integers");
                idx.push_back(int(v) - 1);
            }
        out += describe(SpinStructureB::from_indices(curve, idx));
    }
    std::fputs(out.c_str(), stdout);
    return 0;
}

int run_pfaffian(const std::string& ends_list, const std::string& domain,
                 const std::string& tau_str) {
    std::vector<cplx> pts;
    for (const auto& part : split_list(ends_list)) pts.push_back(parse_end_point(part));

    OmegaSystem sys;
    if (domain == "sphere") {
        sys = omega_sphere(EndDivisor::sphere(pts));
    } else {
        const cplx tau = tau_str.empty() ? cplx(0.21, 1.37) : parse_complex(tau_str);
        auto ctx = std::make_shared<EllipticContext>(Lattice(1.0, tau));
        if (domain == "torus-twisted") {
            sys = omega_twisted_torus(EndDivisor::torus(ctx, pts));
        } else if (domain.rfind("torus-untwisted:", 0) == 0) {
            const int r = int(parse_real(domain.substr(16)));
            sys = omega_untwisted_torus(r, EndDivisor::torus(ctx, pts), false);
        } else {
            throw std::invalid_argument(
                "--domain must be sphere, torus-twisted, or torus-untwisted:r");
        }
    }

    const int n = sys.matrix.rows();
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "ends: %zu, pairing dimension: %d\n", pts.size(), n);
    out += buf;
    if (n % 2 == 0) {
        out += "pfaffian: " + format_complex(pfaffian(sys.matrix)) + "\n";
    }
    out += "determinant: " + format_complex(determinant(sys.matrix)) + "\n";

    int kdim;
    if (sys.matrix.max_abs() < 1e-9 * sys.entry_scale) {
        kdim = n;  // the pairing vanishes identically at this scale
    } else {
        kdim = rank_kernel(sys.matrix).kernel.dim;
    }
    std::snprintf(buf, sizeof buf, "kernel dimension: %d\n", kdim);
    out += buf;
    std::fputs(out.c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"explicitly solvable spinor surface data: catalog, verification, meshes"};
    app.require_subcommand(1);
    app.add_flag("--verbose", g_verbose, "progress notes on stderr");

    std::function<int()> action;

    auto* cat = app.add_subcommand("catalog", "browse and build the surface catalog");
    cat->require_subcommand(1);
    auto* cat_list = cat->add_subcommand("list", "list the catalog entries");
    cat_list->callback([&] { action = [] { return run_catalog_list(); }; });

    auto* cat_build = cat->add_subcommand("build", "build an entry and write its spec");
    auto build_name = std::make_shared<std::string>();
    auto build_tau = std::make_shared<std::string>();
    auto build_sigma = std::make_shared<std::string>();
    auto build_c = std::make_shared<std::string>();
    auto build_out = std::make_shared<std::string>();
    cat_build->add_option("name", *build_name, "catalog entry name")->required();
    cat_build->add_option("--tau", *build_tau, "lattice ratio for torus families, a+bi");
    cat_build->add_option("--sigma", *build_sigma,
                          "three symmetric-function values for sphere_6_ends");
    cat_build->add_option("--c", *build_c,
                          "three real parameters for projective_plane_3_ends");
    cat_build->add_option("--out", *build_out, "output file (default stdout)");
    cat_build->callback([&, build_name, build_tau, build_sigma, build_c, build_out] {
        action = [=] {
            return run_catalog_build(*build_name, *build_tau, *build_sigma, *build_c,
                                     *build_out);
        };
    });

    auto* verify = app.add_subcommand("verify", "verify a stored spec file");
    auto verify_file = std::make_shared<std::string>();
    auto verify_json = std::make_shared<std::string>();
    verify->add_option("spec", *verify_file, "spec JSON file")->required();
    verify->add_option("--json", *verify_json, "write the full report as JSON");
    verify->callback([&, verify_file, verify_json] {
        action = [=] { return run_verify(*verify_file, *verify_json); };
    });

    auto* mesh = app.add_subcommand("mesh", "mesh a verified spec to OBJ");
    auto mesh_file = std::make_shared<std::string>();
    auto mesh_res = std::make_shared<int>(0);
    auto mesh_cutoff = std::make_shared<double>(0.0);
    auto mesh_out = std::make_shared<std::string>();
    mesh->add_option("spec", *mesh_file, "spec JSON file")->required();
    mesh->add_option("--res", *mesh_res, "grid cells per period or window side")
        ->required()
        ->check(CLI::Range(2, 4096));
    mesh->add_option("--cutoff", *mesh_cutoff,
                     "end exclusion radius (default 5% of the domain diameter)");
    mesh->add_option("--out", *mesh_out, "output OBJ file (default stdout)");
    mesh->callback([&, mesh_file, mesh_res, mesh_cutoff, mesh_out] {
        action = [=] { return run_mesh(*mesh_file, *mesh_res, *mesh_cutoff, *mesh_out); };
    });

    auto* arf_cmd = app.add_subcommand("arf", "Arf invariants of hyperelliptic spin structures");
    auto arf_genus = std::make_shared<int>(0);
    auto arf_b = std::make_shared<std::string>();
    auto arf_table = std::make_shared<bool>(false);
    arf_cmd->add_option("--genus", *arf_genus, "curve genus")->required()
        ->check(CLI::Range(1, 14));
    arf_cmd->add_option("--B", *arf_b,
                        "comma-separated 1-based branch indices of the subset B");
    arf_cmd->add_flag("--table", *arf_table, "list every spin structure");
    arf_cmd->callback([&, arf_genus, arf_b, arf_table] {
        action = [=] { return run_arf(*arf_genus, *arf_b, *arf_table); };
    });

    auto* pf = app.add_subcommand("pfaffian", "pairing matrix of an end divisor");
    auto pf_ends = std::make_shared<std::string>();
    auto pf_domain = std::make_shared<std::string>("sphere");
    auto pf_tau = std::make_shared<std::string>();
    pf->add_option("--ends", *pf_ends, "comma-separated end points, a+bi or inf")
        ->required();
    pf->add_option("--domain", *pf_domain,
                   "sphere, torus-twisted, or torus-untwisted:r (default sphere)");
    pf->add_option("--tau", *pf_tau, "lattice ratio for torus domains (default 0.21+1.37i)");
    pf->callback([&, pf_ends, pf_domain, pf_tau] {
        action = [=] { return run_pfaffian(*pf_ends, *pf_domain, *pf_tau); };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        return action ? action() : 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "spinor: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "spinor: %s\n", e.what());
        return 1;
    }
}
