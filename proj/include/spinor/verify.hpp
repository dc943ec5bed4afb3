#pragma once

// Verification of stored surface data.  Every family gets the same treatment:
// realize the spec, then measure a fixed list of named residuals against
// tolerances pinned here.  The report passes iff every residual passes, so a
// spec that was edited by hand, truncated, or built from an off-variety
// parameter point fails loudly with the offending residual named.
//
// The residuals are recomputed from the stored data alone (ends, coefficient
// vectors, lattice), never from the construction parameters, so the check is
// meaningful for files from other tools as well.

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "spinor/catalog.hpp"
#include "spinor/omega.hpp"
#include "spinor/serialize.hpp"
#include "spinor/spin_core.hpp"

namespace spinor {

struct ResidualEntry {
    std::string name;
    double value = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct VerificationReport {
    std::string spec_name;
    bool pass = true;
    std::vector<ResidualEntry> entries;

    void add(const std::string& name, double value, double tol) {
        if (!std::isfinite(value)) value = 1e308;
        const bool ok = value <= tol;
        entries.push_back({name, value, tol, ok});
        pass = pass && ok;
    }
    const ResidualEntry* find(const std::string& name) const {
        for (const auto& e : entries)
            if (e.name == name) return &e;
        return nullptr;
    }
};

namespace detail {

// Safe Laurent radius around end idx: a fixed fraction of the distance to the
// nearest other special point, measured in the chart the extraction uses.
inline double verify_end_radius(const SurfaceSpec& spec, const RealizedSurface& rs,
                                std::size_t idx) {
    const cplx p = spec.ends[idx];
    double dmin = 1e300;
    if (rs.ctx) {
        for (std::size_t j = 0; j < spec.ends.size(); ++j)
            if (j != idx) dmin = std::min(dmin, rs.ctx->distance(p, spec.ends[j]));
        const cplx w1 = rs.ctx->lattice.omega1, w3 = rs.ctx->lattice.omega3;
        dmin = std::min(dmin, std::min({std::abs(w1), std::abs(w3),
                                        std::abs(w1 + w3), std::abs(w1 - w3)}));
        return 0.25 * dmin;
    }
    if (is_infinity(p)) {
        for (cplx e : spec.ends)
            if (!is_infinity(e) && std::abs(e) > 1e-12)
                dmin = std::min(dmin, 1.0 / std::abs(e));
        return 0.25 * std::min(dmin, 1.0);
    }
    for (std::size_t j = 0; j < spec.ends.size(); ++j) {
        if (j == idx || is_infinity(spec.ends[j])) continue;
        dmin = std::min(dmin, std::abs(p - spec.ends[j]));
    }
    dmin = std::min(dmin, 1.0 + std::abs(p));
    return 0.25 * dmin;
}

struct EndResidual {
    int ord = 0;
    double residue_rel = 0.0;
};

// Pole order of omega at p and the residue vector measured against the
// leading coefficient, both weighted to the extraction circle so the ratio is
// scale free.
inline EndResidual end_residual(const SpinorPair& pair, cplx p, double radius) {
    std::array<LaurentData, 3> comp;
    for (int k = 0; k < 3; ++k) {
        auto g = [&pair, k](cplx z) { return pair.omega(z)[k]; };
        if (is_infinity(p)) {
            auto gw = [&g](cplx w) { return -g(1.0 / w) / (w * w); };
            comp[k] = laurent_extract(gw, 0.0, radius);
        } else {
            comp[k] = laurent_extract(g, p, radius);
        }
    }
    EndResidual out;
    out.ord = LaurentData::kmax + 1;
    for (const auto& c : comp) out.ord = std::min(out.ord, c.order());
    double res = 0.0, lead = 0.0;
    for (const auto& c : comp) {
        res = std::max(res, std::abs(c.a_minus1()));
        if (out.ord <= LaurentData::kmax)
            lead = std::max(lead, std::abs(c.coeff(out.ord)) *
                                      std::pow(radius, out.ord));
    }
    out.residue_rel = (res / radius) / std::max(lead, 1e-300);
    return out;
}

// The 4x4 pairing block of the negation-paired eight-end system, rebuilt from
// the stored ends; rows/columns follow the first four stored ends.
inline ComplexMatrix paired_block_from_ends(const SurfaceSpec& spec,
                                            const RealizedSurface& rs) {
    const auto& ctx = rs.ctx;
    const cplx er = ctx->e(spec.spin_r);
    const int ip = spec.spin_r % 3 + 1, iq = ip % 3 + 1;
    const cplx cp = ctx->e(ip) - er, cq = ctx->e(iq) - er;
    ComplexMatrix W(4, 4);
    std::array<cplx, 4> p{};
    for (int i = 0; i < 4; ++i) p[i] = ctx->wp(spec.ends[static_cast<std::size_t>(i)]) - er;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            W(i, j) = (i == j)
                          ? (p[i] * p[i] - cp * cq) / (p[i] * (p[i] - cp) * (p[i] - cq))
                          : 4.0 / (p[i] - p[j]);
    return W;
}

inline double matvec_residual(const ComplexMatrix& m, const std::vector<cplx>& v,
                              bool transpose) {
    const int n = m.rows();
    double worst = 0.0, mscale = 0.0, vscale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) mscale = std::max(mscale, std::abs(m(i, j)));
    for (cplx x : v) vscale = std::max(vscale, std::abs(x));
    for (int i = 0; i < n; ++i) {
        cplx s = 0.0;
        for (int j = 0; j < n; ++j)
            s += (transpose ? m(j, i) : m(i, j)) * v[static_cast<std::size_t>(j)];
        worst = std::max(worst, std::abs(s));
    }
    return worst / std::max(mscale * vscale, 1e-300);
}

// Deterministic sample points clear of the ends, for pointwise checks.
inline std::vector<cplx> sample_points(const SurfaceSpec& spec,
                                       const RealizedSurface& rs, std::size_t count) {
    std::vector<cplx> raw;
    if (rs.ctx) {
        const cplx w1 = 2.0 * spec.omega1, w3 = 2.0 * spec.omega3;
        const double fr[][2] = {{0.137, 0.211}, {0.231, 0.167}, {0.389, 0.361},
                                {0.143, 0.329}, {0.271, 0.447}, {0.433, 0.207}};
        for (auto& f : fr) raw.push_back(f[0] * w1 + f[1] * w3);
    } else {
        double s = 1.0;
        for (cplx e : spec.ends)
            if (!is_infinity(e)) s = std::max(s, std::abs(e));
        const cplx base[] = {{0.31, 0.41}, {-0.77, 0.23}, {1.21, -0.53},
                             {-0.29, -1.11}, {0.57, 0.87}, {-1.31, -0.37}};
        for (cplx b : base) raw.push_back(0.6 * s * b);
    }
    std::vector<cplx> out;
    for (cplx z : raw) {
        if (out.size() >= count) break;
        bool clear = true;
        for (cplx e : spec.ends) {
            const double d = rs.ctx ? rs.ctx->distance(z, e)
                                    : (is_infinity(e) ? 1.0 : std::abs(z - e));
            clear = clear && d > 0.05;
        }
        if (rs.ctx && rs.ctx->distance(z) < 0.05) clear = false;
        if (clear) out.push_back(z);
    }
    return out;
}

}  // namespace detail

inline VerificationReport verify_spec(const SurfaceSpec& spec) {
    VerificationReport report;
    report.spec_name = spec.family;
    const RealizedSurface rs = realize(spec);
    const SpinorPair& pair = rs.pair;
    const std::size_t ne = spec.ends.size();
    if (spec.end_orders.size() != ne)
        throw std::invalid_argument("verify_spec: ends and end_orders disagree");

    // Pairing system over the stored end divisor.
    if (spec.domain_kind == Domain::Kind::sphere && spec.family != "moebius_strip") {
        OmegaSystem sys = omega_sphere(EndDivisor::sphere(spec.ends));
        const int n = sys.matrix.rows();
        const double scale = std::pow(sys.entry_scale, n / 2);
        report.add("pairing_pfaffian", std::abs(pfaffian(sys.matrix)) / scale, 1e-8);
        report.add("pairing_skewness", skew_defect(sys.matrix) / sys.entry_scale, 1e-10);
        try {
            KSpace k = extract_K(sys);
            report.add("kernel_dim", std::abs(k.dim - 2.0), 0.5);
            report.add("kernel_coeff1", detail::span_residual(k.coords, spec.coeff1), 1e-7);
            report.add("kernel_coeff2", detail::span_residual(k.coords, spec.coeff2), 1e-7);
        } catch (const std::exception&) {
            report.add("kernel_dim", 1e308, 0.5);
        }
    } else if (spec.family == "torus_4_ends") {
        OmegaSystem sys = omega_twisted_torus(EndDivisor::torus(rs.ctx, spec.ends));
        report.add("pairing_magnitude", sys.matrix.max_abs() / sys.entry_scale, 1e-8);
    } else if (spec.family == "klein_bottle_4_ends") {
        OmegaSystem sys =
            omega_untwisted_torus(spec.spin_r, EndDivisor::torus(rs.ctx, spec.ends), true);
        const int half = sys.matrix.rows() / 2;
        const double scale = std::pow(sys.entry_scale, half);
        report.add("pairing_pfaffian", std::abs(pfaffian(sys.matrix)) / scale, 1e-8);
        report.add("pairing_skewness", skew_defect(sys.matrix) / sys.entry_scale, 1e-10);
        const ComplexMatrix W = detail::paired_block_from_ends(spec, rs);
        const std::vector<cplx> va(spec.coeff1.begin(), spec.coeff1.begin() + 4);
        const std::vector<cplx> vb(spec.coeff2.begin() + 4, spec.coeff2.end());
        report.add("kernel_coeff1", detail::matvec_residual(W, va, true), 1e-7);
        report.add("kernel_coeff2", detail::matvec_residual(W, vb, false), 1e-7);
    }

    // Pole order and residue at every stored end.
    for (std::size_t i = 0; i < ne; ++i) {
        const double radius = detail::verify_end_radius(spec, rs, i);
        const auto er = detail::end_residual(pair, spec.ends[i], radius);
        const std::string tag = "end_" + std::to_string(i);
        report.add(tag + "_order", std::abs(er.ord - spec.end_orders[i]), 0.5);
        report.add(tag + "_residue", er.residue_rel, 1e-7);
    }

    // Period closure along the two stored cycles.
    if (spec.domain_kind == Domain::Kind::torus) {
        const char* names[2] = {"period_cycle1", "period_cycle3"};
        for (int k = 0; k < 2; ++k) {
            const Periods per = periods(pair, rs.cycles[static_cast<std::size_t>(k)]);
            const double scale = std::max(
                {1.0, std::abs(per.p11), std::abs(per.p22), std::abs(per.p12)});
            report.add(names[k], per.residual / scale, 1e-8);
        }
    }

    // Descent through the involution for nonorientable data.
    if (spec.nonorientable) {
        const CompatibilityReport comp =
            nonorientable_compatibility(pair, rs.involution, spec.lift_sign);
        const double value = comp.compatible ? comp.max_residual
                                             : std::max(comp.max_residual, 1.0);
        report.add("compatibility", value, 1e-7);
    }

    // Zero scan: shared zeros of the two sections (branch points) and cells
    // the scan could not resolve both count against the data.
    const ScanResult scan = unbranched_scan(pair);
    report.add("branch_scan",
               double(scan.branch_count()) + double(scan.unresolved.size()), 0.5);

    // Pointwise sanity of the realized form at a few interior points.
    double null_worst = 0.0;
    for (cplx z : detail::sample_points(spec, rs, 4))
        null_worst = std::max(null_worst, null_defect(pair, z));
    report.add("null_quadric", null_worst, 1e-10);

    return report;
}

inline std::string report_to_json(const VerificationReport& report) {
    using namespace detail;
    std::string o;
    o += "{\n  \"format\": \"";
    o += kReportFormat;
    o += "\",\n  \"spec\": ";
    append_json_string(o, report.spec_name);
    o += ",\n  \"pass\": ";
    o += report.pass ? "true" : "false";
    o += ",\n  \"residuals\": [";
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const auto& e = report.entries[i];
        o += (i ? ",\n    {" : "\n    {");
        o += "\"name\": ";
        append_json_string(o, e.name);
        o += ", \"value\": ";
        o += format_double(e.value);
        o += ", \"tol\": ";
        o += format_double(e.tol);
        o += ", \"pass\": ";
        o += e.pass ? "true" : "false";
        o += "}";
    }
    o += "\n  ]\n}\n";
    return o;
}

}  // namespace spinor
