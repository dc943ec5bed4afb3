// Acceptance suite for the spinor library.  Each criterion prints exactly one
// PASS/FAIL line with the measured values and the tolerances pinned here; the
// exit code is the number of failed criteria.  Unlike the unit suites this
// binary exercises whole pipelines end to end, so it is deliberately chatty
// about what it measured.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "spinor/arf.hpp"
#include "spinor/catalog.hpp"
#include "spinor/mesh.hpp"
#include "spinor/quadrature.hpp"
#include "spinor/verify.hpp"

using namespace spinor;

namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

// Largest principal angle between two 2-dimensional subspaces of C^n, via the
// Gram matrix of the projection defect.  Inputs need not be orthonormal.
double subspace_angle(std::vector<std::vector<cplx>> u,
                      std::vector<std::vector<cplx>> v) {
    auto dot = [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        cplx s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
        return s;
    };
    auto orthonormalize = [&](std::vector<std::vector<cplx>>& basis) {
        for (std::size_t i = 0; i < basis.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                const cplx d = dot(basis[j], basis[i]);
                for (std::size_t k = 0; k < basis[i].size(); ++k)
                    basis[i][k] -= d * basis[j][k];
            }
            const double norm = std::sqrt(std::abs(dot(basis[i], basis[i])));
            if (norm < 1e-14)
                throw std::invalid_argument("subspace_angle: dependent basis");
            for (auto& x : basis[i]) x /= norm;
        }
    };
    orthonormalize(u);
    orthonormalize(v);
    // Defect columns b_j = (1 - P_u) v_j; the largest singular value of the
    // defect is sin of the largest principal angle.
    std::vector<std::vector<cplx>> b = v;
    for (auto& col : b)
        for (const auto& q : u) {
            const cplx d = dot(q, col);
            for (std::size_t k = 0; k < col.size(); ++k) col[k] -= d * q[k];
        }
    const cplx g11 = dot(b[0], b[0]), g22 = dot(b[1], b[1]), g12 = dot(b[0], b[1]);
    const double tr = g11.real() + g22.real();
    const double det = (g11 * g22 - g12 * std::conj(g12)).real();
    const double disc = std::max(0.0, tr * tr - 4.0 * det);
    const double lam = 0.5 * (tr + std::sqrt(disc));
    return std::asin(std::min(1.0, std::sqrt(std::max(0.0, lam))));
}

// ---------------------------------------------------------------------------
// 1. Four-end sphere: the pfaffian of the 4x4 pairing matrix for ends
//    {a, 1/a, 0, inf} factors through the degree-four polynomial
//    (a^2 - sqrt(3) a + 1)(a^2 + sqrt(3) a + 1) with one global constant,
//    and at the hexagonal root the kernel is the documented two-dimensional
//    span.
bool criterion_four_end_pfaffian(std::string& detail) {
    Stopwatch sw;
    const double s3 = std::sqrt(3.0);
    const cplx iu(0.0, 1.0);

    double max_dev = 0.0;
    cplx fitted = 0.0;
    bool first = true;
    int points = 0;
    for (int j = 0; j < 20; ++j)
        for (int k = 0; k < 10; ++k) {
            // Off-axis grid: Im a >= 0.17 keeps a away from 0 and +-1 where
            // the end set degenerates.
            const cplx a(-1.45 + 0.31 * j, 0.17 + 0.29 * k);
            auto sys =
                omega_sphere(EndDivisor::sphere({a, 1.0 / a, 0.0, infinity_point()}));
            const cplx pf = pfaffian(sys.matrix);
            const cplx lhs = pf * a * (1.0 - a * a);
            const cplx poly = (a * a - s3 * a + 1.0) * (a * a + s3 * a + 1.0);
            if (first) {
                fitted = lhs / poly;
                first = false;
            }
            const cplx rhs = fitted * poly;
            max_dev = std::max(max_dev,
                               std::abs(lhs - rhs) /
                                   std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
            ++points;
        }

    // Hexagonal root: kernel dimension and its two documented spanning
    // sections, written in the pairing basis {1/(z - a), 1/(z - 1/a), 1/z, 1}
    // by partial fractions.
    const cplx ah(s3 / 2.0, 0.5);
    auto sys =
        omega_sphere(EndDivisor::sphere({ah, 1.0 / ah, 0.0, infinity_point()}));
    const RankKernel rk = rank_kernel(sys.matrix);
    const std::vector<cplx> t1ref = {-iu * ah, iu * std::conj(ah), -1.0, 0.0};
    const std::vector<cplx> t2ref = {iu, -iu, 0.0, 1.0};
    double angle = 1.0;
    if (rk.kernel.dim == 2)
        angle = subspace_angle(rk.kernel.vectors, {t1ref, t2ref});

    const double secs = sw.seconds();
    const bool pass =
        max_dev <= 1e-9 && rk.kernel.dim == 2 && angle <= 1e-7 && secs < 1.0;
    detail = fmt(
        "const %.3g%+.3gi, max dev %.2e (tol 1e-9, %d pts), kernel dim %d (want 2), "
        "angle %.2e (tol 1e-7), %.2fs (< 1s)",
        fitted.real(), fitted.imag(), max_dev, points, rk.kernel.dim, angle, secs);
    return pass;
}

// ---------------------------------------------------------------------------
// 2. Six-end sphere: with ends the four roots of z^4 - s1 z^3 - s2 z^2 - s3 z
//    + 1 together with 0 and inf, the pfaffian of the 6x6 pairing matrix times
//    the Vandermonde factor of the roots equals a single global constant times
//    t1 t3 + s1 s3 - 20 across random symmetric data.
bool criterion_six_end_pfaffian(std::string& detail) {
    Stopwatch sw;
    std::mt19937 gen(20240517u);
    std::uniform_real_distribution<double> rad(0.0, 5.0);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * pi);

    cplx fitted = 0.0;
    bool first = true;
    double max_dev = 0.0;
    int accepted = 0, attempts = 0;
    while (accepted < 100 && attempts < 2000) {
        ++attempts;
        EndSymmetrics sym;
        sym.s1 = std::polar(rad(gen), ang(gen));
        sym.s2 = std::polar(rad(gen), ang(gen));
        sym.s3 = std::polar(rad(gen), ang(gen));
        try {
            const std::vector<cplx> r = poly_roots(six_end_polynomial(sym));
            auto sys = omega_sphere(
                EndDivisor::sphere({r[0], r[1], r[2], r[3], 0.0, infinity_point()}));
            cplx vand = 1.0;
            for (int i = 0; i < 4; ++i)
                for (int j = i + 1; j < 4; ++j) vand *= r[j] - r[i];
            const cplx lhs = pfaffian(sys.matrix) * vand;
            const cplx rhs_raw = sym.degeneracy();
            if (first) {
                fitted = lhs / rhs_raw;
                first = false;
            }
            const cplx rhs = fitted * rhs_raw;
            max_dev = std::max(max_dev,
                               std::abs(lhs - rhs) /
                                   std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
            ++accepted;
        } catch (const std::invalid_argument&) {
            // Clustered roots make the end divisor degenerate; redraw.
        }
    }

    const double secs = sw.seconds();
    const bool pass = accepted == 100 && max_dev <= 1e-8 && secs < 1.0;
    detail = fmt(
        "const %.3g%+.3gi, max dev %.2e (tol 1e-8) over %d draws (%d attempts), "
        "%.2fs (< 1s)",
        fitted.real(), fitted.imag(), max_dev, accepted, attempts, secs);
    return pass;
}

// ---------------------------------------------------------------------------
// 3. Projective-plane boundary variety: the two distinguished direction-cosine
//    points lie on the variety to machine precision with the documented
//    symmetry stabilizers, and the solved default boundary point realizes a
//    datum whose end, period, and compatibility residuals stay under 1e-7.
bool criterion_projective_plane_variety(std::string& detail) {
    Stopwatch sw;
    const std::array<double, 3> p1 = {std::sqrt(5.0) / 3.0, 0.0, 0.0};
    const std::array<double, 3> p2 = {1.0, 1.0, 1.0};
    const double g1 = std::abs(projective_plane_variety(p1));
    const double g2 = std::abs(projective_plane_variety(p2));
    const int stab1 = cube_symmetry_stabilizer(p1);
    const double d = projective_plane_d3_point();
    const int stab2 = cube_symmetry_stabilizer({d, d, -d});

    const SurfaceSpec spec = build_catalog("projective_plane_3_ends", {});
    const VerificationReport rep = verify_spec(spec);
    double max_res = 0.0;
    bool entries_ok = true;
    for (const ResidualEntry& e : rep.entries) {
        const bool relevant = e.name.rfind("end_", 0) == 0 ||
                              e.name.rfind("period_", 0) == 0 ||
                              e.name == "compatibility";
        if (!relevant) continue;
        max_res = std::max(max_res, e.value);
        entries_ok = entries_ok && e.pass && e.value <= 1e-7;
    }

    const double secs = sw.seconds();
    const bool pass = g1 <= 1e-12 && g2 <= 1e-12 && stab1 == 4 && stab2 == 6 &&
                      rep.pass && entries_ok;
    detail = fmt(
        "variety %.1e / %.1e (tol 1e-12), stabilizers %d/%d (want 4/6), datum max "
        "residual %.2e (tol 1e-7, report %s), %.2fs",
        g1, g2, stab1, stab2, max_res, rep.pass ? "pass" : "fail", secs);
    return pass;
}

// ---------------------------------------------------------------------------
// 4. Four-end torus: across a sweep of lattices in the fundamental region,
//    the cycle periods of the squared kernel combinations match the closed
//    form -8(eta_l + omega_l e_m) by quadrature, the realized pairs close
//    both period cycles, and the branch-value margin stays away from zero.
bool criterion_torus_periods(std::string& detail) {
    Stopwatch sw;
    double max_quad = 0.0, max_period = 0.0, min_margin = 1e300;
    bool period_ok = true;
    for (int k = 0; k < 20; ++k) {
        const cplx tau(-0.45 + 0.047 * k, 1.02 + 0.045 * k);
        const SurfaceSpec spec = torus_4_ends(Lattice(1.0, tau));
        const RealizedSurface rs = realize(spec);
        const auto& ctx = *rs.ctx;
        const cplx base = spec.cycle_base;

        for (int l : {1, 3}) {
            const Curve cyc = segment(base, base + 2.0 * ctx.omega(l));
            for (int m = 0; m < 3; ++m) {
                auto f = [&](cplx u) {
                    const cplx t = rs.basis[static_cast<std::size_t>(m)].f(u);
                    return t * t;
                };
                const cplx q = integrate(f, cyc).value;
                const cplx pred = -8.0 * (ctx.eta(l) + ctx.omega(l) * ctx.e(m + 1));
                max_quad = std::max(max_quad, std::abs(q - pred) /
                                                  std::max(1.0, std::abs(pred)));
            }
        }
        for (const Curve& cyc : rs.cycles) {
            const Periods p = periods(rs.pair, cyc);
            period_ok = period_ok && p.ok;
            max_period = std::max(
                max_period, p.residual / std::max(1.0, std::abs(p.p11)));
        }
        min_margin = std::min(min_margin, spec.modulus("branch_margin").real());
    }

    const double secs = sw.seconds();
    const bool pass = max_quad <= 1e-7 && period_ok && max_period <= 1e-8 &&
                      min_margin > 1e-3 && secs < 30.0;
    detail = fmt(
        "20 lattices: quad dev %.2e (tol 1e-7), period residual %.2e (tol 1e-8), "
        "min branch margin %.3g (> 1e-3), %.1fs (< 30s)",
        max_quad, max_period, min_margin, secs);
    return pass;
}

// ---------------------------------------------------------------------------
// 5. Klein bottle: at the solved quartic parameter the pairing block is
//    singular, the quadrature-fitted period coefficients reproduce the closed
//    forms A = -32r^2(r^4+4r^2+1)/3, B = 4r(r^2+1)^3, C = -2(r^4-1)^2 with a
//    vanishing fourth coefficient, and the realized datum passes the
//    compatibility and unbranched scans.
bool criterion_klein_periods(std::string& detail) {
    Stopwatch sw;
    auto ctx = std::make_shared<const EllipticContext>(square_normalized());
    const KleinTables T = klein_tables(ctx);

    const double detW = std::abs(determinant(T.W));

    const cplx r = T.r, r2 = r * r, r4 = r2 * r2;
    const cplx Aexp = -32.0 * r2 * (r4 + 4.0 * r2 + 1.0) / 3.0;
    const cplx Bexp = 4.0 * r * (r2 + 1.0) * (r2 + 1.0) * (r2 + 1.0);
    const cplx Cexp = -2.0 * (r4 - 1.0) * (r4 - 1.0);
    const double scale = std::max({std::abs(Aexp), std::abs(Bexp), std::abs(Cexp)});

    // Fit the coefficients of the period forms against (eta, omega) from
    // quadrature over both torus cycles of the kernel pair.
    Domain dom = Domain::torus(ctx);
    SpinStructure spin = SpinStructure::untwisted(2);
    const std::vector<cplx> ends(T.ends.begin(), T.ends.end());
    auto basis = detail::wp_ratio_basis(dom, spin, ctx, ends);
    std::vector<cplx> a1(8, 0.0), a2(8, 0.0);
    for (int g = 0; g < 4; ++g) {
        a1[static_cast<std::size_t>(g)] = T.c1[static_cast<std::size_t>(g)];
        a2[static_cast<std::size_t>(g)] = T.c2[static_cast<std::size_t>(g)];
    }
    SpinorPair hat(detail::combine_basis(basis, a1), detail::combine_basis(basis, a2));
    const cplx base(0.17, 0.43);
    cplx q11[2], q12[2];
    const cplx w[2] = {ctx->omega(1), ctx->omega(3)};
    const cplx n[2] = {ctx->eta(1), ctx->eta(3)};
    for (int l = 0; l < 2; ++l) {
        const Periods p = periods(hat, segment(base, base + 2.0 * w[l]));
        q11[l] = p.p11 / 2.0;
        q12[l] = p.p12 / 2.0;
    }
    const cplx den = n[0] * w[1] - w[0] * n[1];
    const cplx Afit = (q11[0] * w[1] - q11[1] * w[0]) / den;
    const cplx Bfit = (n[0] * q11[1] - n[1] * q11[0]) / den;
    const cplx Cfit = (q12[0] * w[1] - q12[1] * w[0]) / den;
    const cplx Dfit = (n[0] * q12[1] - n[1] * q12[0]) / den;
    const double coeff_dev =
        std::max({std::abs(Afit - Aexp), std::abs(Bfit - Bexp),
                  std::abs(Cfit - Cexp), std::abs(Dfit)}) /
        scale;

    const SurfaceSpec spec = build_catalog("klein_bottle_4_ends", {});
    const RealizedSurface rs = realize(spec);
    const CompatibilityReport comp =
        nonorientable_compatibility(rs.pair, rs.involution, spec.lift_sign);
    const ScanResult scan = unbranched_scan(rs.pair);

    const double secs = sw.seconds();
    const bool pass = detW <= 1e-8 && coeff_dev <= 1e-6 && comp.compatible &&
                      scan.clean() && secs < 30.0;
    detail = fmt(
        "|det W| %.1e (tol 1e-8), coefficient fit dev %.2e (tol 1e-6 rel), "
        "compatibility %s (res %.1e), scan %s, %.1fs (< 30s)",
        detW, coeff_dev, comp.compatible ? "ok" : "FAIL", comp.max_residual,
        scan.clean() ? "clean" : "dirty", secs);
    return pass;
}

// ---------------------------------------------------------------------------
// 6. Arf suite: the concrete genus-1 value table is reproduced exactly, the
//    exponential-sum evaluation of the invariant agrees with the closed form
//    for every structure through genus 4, and the count of structures with
//    invariant +1 is 2^(2g-1) + 2^(g-1).
bool criterion_arf(std::string& detail) {
    Stopwatch sw;

    EllipticContext ctx(Lattice(cplx(2.0, 0.0), cplx(0.0, 1.4)));
    auto torus_curve = HyperellipticCurve::torus(ctx.e(1), ctx.e(2), ctx.e(3));
    const HomologyClass alpha[3] = {
        HomologyClass::from_indices({1, 2}, 3),
        HomologyClass::from_indices({0, 2}, 3),
        HomologyClass::from_indices({0, 1}, 3),
    };
    struct Row {
        std::vector<int> B;
        int q0, q1, q2, q3, arf_value;
    };
    const Row table[] = {
        {{}, 0, 1, 1, 1, -1},
        {{0}, 0, 1, 0, 0, +1},
        {{1}, 0, 0, 1, 0, +1},
        {{2}, 0, 0, 0, 1, +1},
    };
    bool table_ok = true;
    for (const Row& row : table) {
        auto spin = SpinStructureB::from_indices(torus_curve, row.B);
        table_ok = table_ok && q_value(spin, HomologyClass{}) == row.q0 &&
                   q_value(spin, alpha[0]) == row.q1 &&
                   q_value(spin, alpha[1]) == row.q2 &&
                   q_value(spin, alpha[2]) == row.q3 && arf(spin) == row.arf_value;
    }

    bool brute_ok = true, count_ok = true;
    long long structures = 0;
    for (int g = 1; g <= 4; ++g) {
        std::vector<cplx> branches;
        for (int k = 0; k < 2 * g + 1; ++k)
            branches.push_back(std::polar(1.0 + 0.37 * k, 0.9 * k));
        HyperellipticCurve curve(g, branches);
        long long plus = 0;
        for (const SpinStructureB& spin : all_spin_structures(curve)) {
            long long s = 0;
            detail::for_each_even_class(curve.points(), [&](HomologyClass c) {
                s += q_value(spin, c) == 0 ? 1 : -1;
            });
            const int closed = arf(spin);
            brute_ok = brute_ok && std::llabs(s) == (1ll << g) &&
                       (s > 0 ? +1 : -1) == closed;
            if (closed == +1) ++plus;
            ++structures;
        }
        count_ok = count_ok && plus == (1ll << (2 * g - 1)) + (1ll << (g - 1));
    }

    const double secs = sw.seconds();
    const bool pass = table_ok && brute_ok && count_ok && secs < 10.0;
    detail = fmt(
        "value table %s, exponential sum vs closed form %s over %lld structures "
        "(genus <= 4), +1 counts %s, %.1fs (< 10s)",
        table_ok ? "exact" : "FAIL", brute_ok ? "agree" : "FAIL", structures,
        count_ok ? "match" : "FAIL", secs);
    return pass;
}

// ---------------------------------------------------------------------------
// 7. Elliptic layer: the Legendre relation, the wp differential equation, the
//    half-period shift formula wp(u + omega_i) = e_i +
//    (e_i - e_j)(e_i - e_k)/(wp(u) - e_i), and the zeta difference identity
//    zeta(u - v) - zeta(u) + zeta(v) = (wp'(u) + wp'(v))/(2(wp(u) - wp(v))).
bool criterion_elliptic_identities(std::string& detail) {
    Stopwatch sw;
    std::mt19937 gen(9021u);
    std::uniform_real_distribution<double> re(-0.5, 0.5);
    std::uniform_real_distribution<double> im(0.15, 2.5);
    std::uniform_real_distribution<double> rad(0.5, 2.0);
    std::uniform_real_distribution<double> angd(-1.2, 1.2);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);

    auto probe = [&](const EllipticContext& c) {
        for (;;) {
            const cplx u = 2.0 * unit(gen) * c.lattice.omega1 +
                           2.0 * unit(gen) * c.lattice.omega3;
            if (c.distance(u) > 0.05 * std::min(std::abs(c.lattice.omega1),
                                                std::abs(c.lattice.omega3)))
                return u;
        }
    };

    double max_leg = 0.0, max_ode = 0.0, max_shift = 0.0, max_zdiff = 0.0;
    double max_q = 0.0;
    for (int t = 0; t < 50; ++t) {
        const cplx w1 = rad(gen) * std::exp(cplx(0.0, angd(gen)));
        const cplx tau(re(gen), im(gen));
        EllipticContext c{Lattice(w1, w1 * tau)};
        max_q = std::max(max_q, std::abs(std::exp(cplx(0.0, pi) * tau)));

        const cplx leg = c.eta1 * c.lattice.omega3 - c.eta3 * c.lattice.omega1;
        max_leg = std::max(max_leg,
                           std::abs(leg - cplx(0.0, pi / 2.0)) / (pi / 2.0));

        for (int s = 0; s < 1000; ++s) {
            const cplx u = probe(c);
            const cplx p = c.wp(u), pp = c.wp_prime(u);
            const cplx lhs = pp * pp;
            const cplx rhs = 4.0 * p * p * p - c.g2 * p - c.g3;
            const double scale =
                std::max(1.0, std::max(std::abs(lhs), std::abs(4.0 * p * p * p)));
            max_ode = std::max(max_ode, std::abs(lhs - rhs) / scale);
        }

        if (t % 5 == 0) {
            for (int s = 0; s < 8; ++s) {
                const cplx u = probe(c);
                for (int i = 1; i <= 3; ++i) {
                    // The formula divides by wp(u) - e_i; skip points where
                    // that denominator amplifies roundoff past the identity.
                    if (std::abs(c.wp(u) - c.e(i)) <
                        1e-3 * std::max(1.0, std::abs(c.e(i))))
                        continue;
                    const cplx direct = c.wp(u + c.omega(i));
                    const cplx shifted = half_period_shift(c, u, i);
                    max_shift = std::max(
                        max_shift, std::abs(shifted - direct) /
                                       std::max(1.0, std::abs(direct)));
                }
            }
            for (int s = 0; s < 15; ++s) {
                const cplx u = probe(c), v = probe(c);
                if (std::abs(c.wp(u) - c.wp(v)) < 1e-3) continue;
                const cplx lhs = c.zeta(u - v) - c.zeta(u) + c.zeta(v);
                const cplx rhs =
                    0.5 * (c.wp_prime(u) + c.wp_prime(v)) / (c.wp(u) - c.wp(v));
                max_zdiff = std::max(max_zdiff, std::abs(lhs - rhs) /
                                                    std::max(1.0, std::abs(rhs)));
            }
        }
    }

    const double secs = sw.seconds();
    const bool pass = max_q <= 0.9 && max_leg <= 1e-12 && max_ode <= 1e-10 &&
                      max_shift <= 1e-10 && max_zdiff <= 1e-10;
    detail = fmt(
        "50 lattices (|q| <= %.2f): Legendre %.1e (tol 1e-12), ode %.1e (tol "
        "1e-10), half-period shift %.1e, zeta difference %.1e (tol 1e-10), %.1fs",
        max_q, max_leg, max_ode, max_shift, max_zdiff, secs);
    return pass;
}

// ---------------------------------------------------------------------------
// 8. Odd end counts on the sphere: for random end sets of size 3, 5, 7 the
//    pairing kernel dimension always has the parity of the end count, and no
//    draw produces a two-dimensional candidate space whose constant terms
//    vanish at every end.
bool criterion_odd_end_parity(std::string& detail) {
    Stopwatch sw;
    std::mt19937 gen(461932u);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);

    int parity_bad = 0, candidates = 0, unresolved = 0;
    int max_kdim = 0;
    const int sizes[3] = {3, 5, 7};
    for (int d = 0; d < 200; ++d) {
        const int n = sizes[d % 3];
        std::vector<cplx> pts;
        while (static_cast<int>(pts.size()) < n) {
            const cplx z(coord(gen), coord(gen));
            bool clear = true;
            for (cplx p : pts) clear = clear && std::abs(z - p) >= 0.15;
            if (clear) pts.push_back(z);
        }
        try {
            auto sys = omega_sphere(EndDivisor::sphere(pts));
            const RankKernel rk = rank_kernel(sys.matrix);
            if ((n - rk.kernel.dim) % 2 != 0) ++parity_bad;
            try {
                const KSpace ks = extract_K(sys);
                max_kdim = std::max(max_kdim, ks.dim);
                if (ks.dim >= 2) ++candidates;
            } catch (const ConvergenceError&) {
                // The vanishing-constant-term test failed: not a candidate.
            }
        } catch (const std::exception&) {
            ++unresolved;
        }
    }

    const double secs = sw.seconds();
    const bool pass = parity_bad == 0 && candidates == 0 && unresolved == 0;
    detail = fmt(
        "200 draws (n in {3,5,7}): parity violations %d, surviving candidate "
        "spaces %d (max dim %d), unresolved %d, %.1fs",
        parity_bad, candidates, max_kdim, unresolved, secs);
    return pass;
}

// ---------------------------------------------------------------------------
// 9. Pfaffian identity: pf(A)^2 = det(A) on random skew matrices.
bool criterion_pfaffian_determinant(std::string& detail) {
    Stopwatch sw;
    std::mt19937 gen(77191u);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);

    double max_dev = 0.0;
    const int dims[5] = {2, 4, 6, 8, 10};
    for (int t = 0; t < 200; ++t) {
        const int n = dims[t % 5];
        ComplexMatrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const cplx z(coord(gen), coord(gen));
                a(i, j) = z;
                a(j, i) = -z;
            }
        const cplx pf = pfaffian(a);
        const cplx det = determinant(a);
        max_dev = std::max(max_dev,
                           std::abs(pf * pf - det) /
                               std::max({std::abs(det), std::abs(pf * pf), 1e-300}));
    }

    const double secs = sw.seconds();
    const bool pass = max_dev <= 1e-9;
    detail = fmt("200 matrices (dims 2-10): max |pf^2 - det| dev %.2e (tol 1e-9), %.2fs",
                 max_dev, secs);
    return pass;
}

// ---------------------------------------------------------------------------
// 10. Mesh pipeline: every catalog surface meshes at resolution 64 with
//     path-independence residual at most 1e-6, and a from-scratch rerun of
//     build + mesh + export produces byte-identical OBJ output.
bool criterion_mesh_export(std::string& detail) {
    Stopwatch sw;
    double max_closure = 0.0;
    bool deterministic = true;
    std::size_t total_vertices = 0;
    for (const CatalogEntry& entry : catalog_entries()) {
        std::string first_obj;
        for (int run = 0; run < 2; ++run) {
            const SurfaceSpec spec = build_catalog(entry.name, {});
            const Mesh mesh = build_mesh(spec, 64);
            if (run == 0) {
                max_closure = std::max(max_closure, mesh.closure_residual);
                total_vertices += mesh.vertices.size();
                first_obj = obj_to_string(mesh);
            } else {
                deterministic = deterministic && obj_to_string(mesh) == first_obj;
            }
        }
    }

    const double secs = sw.seconds();
    const bool pass = max_closure <= 1e-6 && deterministic;
    detail = fmt(
        "6 surfaces at res 64 (%zu vertices): max closure %.2e (tol 1e-6), reruns "
        "%s, %.1fs",
        total_vertices, max_closure,
        deterministic ? "byte-identical" : "DIVERGED", secs);
    return pass;
}

int run(int index, const char* name, bool (*fn)(std::string&)) {
    std::string detail;
    bool pass = false;
    try {
        pass = fn(detail);
    } catch (const std::exception& e) {
        detail = fmt("exception: %s", e.what());
    }
    std::printf("[%s] %2d %-28s %s\n", pass ? "PASS" : "FAIL", index, name,
                detail.c_str());
    std::fflush(stdout);
    return pass ? 0 : 1;
}

}  // namespace

int main() {
    int fails = 0;
    fails += run(1, "four-end sphere pfaffian", criterion_four_end_pfaffian);
    fails += run(2, "six-end sphere pfaffian", criterion_six_end_pfaffian);
    fails += run(3, "projective-plane variety", criterion_projective_plane_variety);
    fails += run(4, "torus period closed forms", criterion_torus_periods);
    fails += run(5, "klein bottle period tables", criterion_klein_periods);
    fails += run(6, "arf invariant suite", criterion_arf);
    fails += run(7, "elliptic identities", criterion_elliptic_identities);
    fails += run(8, "odd end-count parity", criterion_odd_end_parity);
    fails += run(9, "pfaffian squares to det", criterion_pfaffian_determinant);
    fails += run(10, "catalog mesh export", criterion_mesh_export);
    std::printf("%d/10 criteria passed\n", 10 - fails);
    return fails;
}
