#pragma once

// Spinor sections and pairs: the sigma map and its group action, Laurent data
// at punctures, end-condition checks, period integrals, and the compatibility
// test for fixed-point-free anticonformal involutions.
//
// A section is stored as a scalar function f against a declared reference
// differential phi with phi^2 = W(z) dz (W = 1 on the sphere and on the
// twisted torus; W = 1/(wp - e_r) on the untwisted torus).  All squared-level
// objects (s^2, omega) are plain meromorphic differentials f^2 W dz and never
// need a square-root branch; section-level frames are continued explicitly
// where required.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spinor/complex_linalg.hpp"
#include "spinor/elliptic.hpp"
#include "spinor/numeric.hpp"
#include "spinor/quadrature.hpp"

namespace spinor {

inline bool is_infinity(cplx p) {
    return std::isinf(p.real()) || std::isinf(p.imag());
}
inline cplx infinity_point() {
    return cplx(std::numeric_limits<double>::infinity(), 0.0);
}

// sigma(z1, z2): the null-quadric embedding of spinor coordinates.
inline cvec3 sigma(cplx z1, cplx z2) {
    cvec3 v;
    v[0] = z1 * z1 - z2 * z2;
    v[1] = cplx(0.0, 1.0) * (z1 * z1 + z2 * z2);
    v[2] = 2.0 * z1 * z2;
    return v;
}

// The 3x3 matrix T(A) with T(A) sigma(v) = sigma(A v).  Quadratic in the
// entries of A, so T(-A) = T(A); T is the standard two-fold covering of the
// complex rotation group.
inline ComplexMatrix group_action_T(const ComplexMatrix& A) {
    if (A.rows() != 2 || A.cols() != 2)
        throw std::invalid_argument("group_action_T: A must be 2x2");
    const cplx a = A(0, 0), b = A(0, 1), c = A(1, 0), d = A(1, 1);
    const cplx det = a * d - b * c;
    if (std::abs(det) < 1e-14 * std::max(1.0, A.max_abs() * A.max_abs()))
        throw std::invalid_argument("group_action_T: A is singular");
    const cplx i(0.0, 1.0);
    ComplexMatrix T(3, 3);
    T(0, 0) = (a * a - b * b - c * c + d * d) / 2.0;
    T(0, 1) = -i * (a * a + b * b - c * c - d * d) / 2.0;
    T(0, 2) = a * b - c * d;
    T(1, 0) = i * (a * a - b * b + c * c - d * d) / 2.0;
    T(1, 1) = (a * a + b * b + c * c + d * d) / 2.0;
    T(1, 2) = i * (a * b + c * d);
    T(2, 0) = a * c - b * d;
    T(2, 1) = -i * (a * c + b * d);
    T(2, 2) = a * d + b * c;
    return T;
}

struct Domain {
    enum class Kind { sphere, torus };
    Kind kind = Kind::sphere;
    std::shared_ptr<const EllipticContext> ctx;  // set iff kind == torus

    static Domain sphere() { return Domain{Kind::sphere, nullptr}; }
    static Domain torus(std::shared_ptr<const EllipticContext> c) {
        if (!c) throw std::invalid_argument("Domain::torus: null context");
        return Domain{Kind::torus, std::move(c)};
    }
    bool same_as(const Domain& o) const { return kind == o.kind && ctx == o.ctx; }
};

struct SpinStructure {
    enum class Kind { sphere_dz, torus_du, torus_untwisted };
    Kind kind = Kind::sphere_dz;
    int r = 0;  // untwisted only: phi_r^2 = du / (wp - e_r)

    static SpinStructure sphere_dz() { return {Kind::sphere_dz, 0}; }
    static SpinStructure twisted() { return {Kind::torus_du, 0}; }
    static SpinStructure untwisted(int r) {
        if (r < 1 || r > 3) throw std::invalid_argument("SpinStructure: r must be 1..3");
        return {Kind::torus_untwisted, r};
    }
    bool same_as(const SpinStructure& o) const { return kind == o.kind && r == o.r; }
};

struct DeclaredPole {
    cplx location;
    int order;  // order of the section there: -1 simple pole, 1 simple zero, ...
};

struct SpinorSection {
    Domain domain;
    SpinStructure spin;
    std::function<cplx(cplx)> f;  // section = f * phi
    std::vector<DeclaredPole> poles;

    cplx value(cplx z) const { return f(z); }

    // W in phi^2 = W dz.
    cplx weight(cplx z) const {
        if (spin.kind != SpinStructure::Kind::torus_untwisted) return 1.0;
        return 1.0 / (domain.ctx->wp(z) - domain.ctx->e(spin.r));
    }
};

struct SpinorPair {
    SpinorSection s1, s2;
    std::vector<Curve> cycles;

    SpinorPair(SpinorSection a, SpinorSection b, std::vector<Curve> cyc = {})
        : s1(std::move(a)), s2(std::move(b)), cycles(std::move(cyc)) {
        if (!s1.domain.same_as(s2.domain) || !s1.spin.same_as(s2.spin))
            throw std::invalid_argument("SpinorPair: sections on different references");
    }

    cplx weight(cplx z) const { return s1.weight(z); }

    // The three component functions of omega against dz.
    cvec3 omega(cplx z) const {
        const cplx f1 = s1.f(z), f2 = s2.f(z), w = weight(z);
        cvec3 v = sigma(f1, f2);
        return v * w;
    }
};

// |<omega,omega>| / |omega|^2 at a point; identically zero up to roundoff.
inline double null_defect(const SpinorPair& p, cplx z) {
    const cvec3 w = p.omega(z);
    cplx q = 0.0;
    double n2 = 0.0;
    for (int k = 0; k < 3; ++k) {
        q += w[k] * w[k];
        n2 += std::norm(w[k]);
    }
    return std::abs(q) / std::max(n2, 1e-300);
}

struct LaurentData {
    static constexpr int kmin = -4;
    static constexpr int kmax = 2;

    cplx point;
    double radius = 0.0;
    std::array<cplx, kmax - kmin + 1> c{};

    cplx coeff(int k) const {
        if (k < kmin || k > kmax) throw std::invalid_argument("LaurentData: k out of window");
        return c[k - kmin];
    }
    cplx a_minus1() const { return coeff(-1); }
    cplx a0() const { return coeff(0); }
    cplx a1() const { return coeff(1); }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& z : c) m = std::max(m, std::abs(z));
        return m;
    }

    // Smallest k carrying weight; kmax+1 when the window is empty.
    int order(double rel_tol = 1e-9) const {
        const double cut = rel_tol * max_abs();
        for (int k = kmin; k <= kmax; ++k)
            if (std::abs(coeff(k)) > cut) return k;
        return kmax + 1;
    }
};

namespace detail {

template <class F>
std::array<cplx, LaurentData::kmax - LaurentData::kmin + 1> laurent_pass(
    const F& f, cplx p, double rho, int N) {
    std::array<cplx, LaurentData::kmax - LaurentData::kmin + 1> out{};
    for (int j = 0; j < N; ++j) {
        const double th = 2.0 * pi * j / N;
        const cplx e = std::exp(cplx(0.0, th));
        const cplx fv = f(p + rho * e);
        for (int k = LaurentData::kmin; k <= LaurentData::kmax; ++k)
            out[k - LaurentData::kmin] += fv * std::exp(cplx(0.0, -k * th));
    }
    for (int k = LaurentData::kmin; k <= LaurentData::kmax; ++k)
        out[k - LaurentData::kmin] /= double(N) * std::pow(rho, k);
    return out;
}

}  // namespace detail

// Laurent coefficients of f about p on the circle of the given radius, by
// trapezoid quadrature with the point count doubled until agreement.
template <class F>
LaurentData laurent_extract(const F& f, cplx p, double radius, double tol = 1e-10) {
    if (!(radius > 0.0)) throw std::invalid_argument("laurent_extract: radius must be > 0");
    auto prev = detail::laurent_pass(f, p, radius, 32);
    for (int N = 64; N <= (1 << 14); N *= 2) {
        auto cur = detail::laurent_pass(f, p, radius, N);
        double diff = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            diff = std::max(diff, std::abs(cur[i] - prev[i]));
            scale = std::max(scale, std::abs(cur[i]));
        }
        if (diff <= tol * scale) {
            LaurentData out;
            out.point = p;
            out.radius = radius;
            out.c = cur;
            return out;
        }
        prev = cur;
    }
    throw ConvergenceError("laurent_extract: no agreement by N = 2^14");
}

inline LaurentData laurent_extract(const SpinorSection& s, cplx p, double radius,
                                   double tol = 1e-10) {
    return laurent_extract(s.f, p, radius, tol);
}

// Laurent data of the section against the LOCAL frame phi_loc with
// phi_loc^2 = d(z - p): the evaluated function is f * sqrt(W) with the root
// continued around the extraction circle (start sign: principal branch at
// angle 0).  The continuation must close up; an odd-order zero or pole of W
// inside the circle makes the frame ill-defined and is reported as an error.
inline LaurentData laurent_extract_local_frame(const SpinorSection& s, cplx p,
                                               double radius, double tol = 1e-10) {
    if (!(radius > 0.0)) throw std::invalid_argument("laurent_extract: radius must be > 0");
    auto pass = [&](int N, std::array<cplx, 7>& out) {
        out = {};
        cplx root = std::sqrt(s.weight(p + radius));
        const cplx root0 = root;
        for (int j = 0; j < N; ++j) {
            const double th = 2.0 * pi * j / N;
            const cplx z = p + radius * std::exp(cplx(0.0, th));
            cplx r = std::sqrt(s.weight(z));
            if (std::abs(r - root) > std::abs(r + root)) r = -r;
            root = r;
            const cplx fv = s.f(z) * r;
            for (int k = LaurentData::kmin; k <= LaurentData::kmax; ++k)
                out[k - LaurentData::kmin] += fv * std::exp(cplx(0.0, -k * th));
        }
        // Closure: continuing one further step back to angle 0 must return
        // to the starting branch.
        cplx r = std::sqrt(s.weight(p + radius));
        if (std::abs(r - root) > std::abs(r + root)) r = -r;
        if (std::abs(r - root0) > 0.5 * std::abs(root0))
            throw ConvergenceError(
                "laurent_extract_local_frame: frame does not close around the circle");
        for (int k = LaurentData::kmin; k <= LaurentData::kmax; ++k)
            out[k - LaurentData::kmin] /= double(N) * std::pow(radius, k);
    };
    std::array<cplx, 7> prev{}, cur{};
    pass(64, prev);
    for (int N = 128; N <= (1 << 14); N *= 2) {
        pass(N, cur);
        double diff = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            diff = std::max(diff, std::abs(cur[i] - prev[i]));
            scale = std::max(scale, std::abs(cur[i]));
        }
        if (diff <= tol * scale) {
            LaurentData out;
            out.point = p;
            out.radius = radius;
            out.c = cur;
            return out;
        }
        prev = cur;
    }
    throw ConvergenceError("laurent_extract_local_frame: no agreement by N = 2^14");
}

struct EndCheck {
    bool embedded_planar = false;
    int ord = 0;
    cvec3 residue;
};

// Order and residues of the three components of omega at p.  An embedded
// planar end is a double pole with vanishing vector residue.  On the sphere,
// p may be the point at infinity (chart w = 1/z, dz = -dw/w^2).
inline EndCheck end_check(const SpinorPair& pair, cplx p, double radius,
                          double res_rel_tol = 1e-9) {
    std::array<LaurentData, 3> comp;
    for (int k = 0; k < 3; ++k) {
        auto g = [&](cplx z) { return pair.omega(z)[k]; };
        if (is_infinity(p)) {
            if (pair.s1.domain.kind != Domain::Kind::sphere)
                throw std::invalid_argument("end_check: infinity only on the sphere");
            auto gw = [&](cplx w) { return -g(1.0 / w) / (w * w); };
            comp[k] = laurent_extract(gw, 0.0, radius);
        } else {
            comp[k] = laurent_extract(g, p, radius);
        }
    }
    EndCheck out;
    out.ord = LaurentData::kmax + 1;
    double c2scale = 0.0, resmax = 0.0;
    for (int k = 0; k < 3; ++k) {
        out.ord = std::min(out.ord, comp[k].order());
        out.residue[k] = comp[k].coeff(-1);
        c2scale = std::max(c2scale, std::abs(comp[k].coeff(-2)));
        resmax = std::max(resmax, std::abs(comp[k].coeff(-1)));
    }
    out.embedded_planar = (out.ord == -2) && (resmax <= res_rel_tol * c2scale);
    return out;
}

struct ResidueCrossCheck {
    cplx lhs = 0.0;  // 2 res_p(s1 s2)
    cplx rhs = 0.0;  // ratio-weighted sum of res_p(s1^2), res_p(s2^2)
    bool ok = false;
    double residual = 0.0;
};

// Cross-term residue identity: with equal section orders at p,
//   2 res(s1 s2) = [s2/s1]_p res(s1^2) + [s1/s2]_p res(s2^2);
// with orders differing by two or more, res(s1 s2) = 0.
inline ResidueCrossCheck residue_cross_identity(const SpinorSection& s1,
                                                const SpinorSection& s2, cplx p,
                                                double radius) {
    const LaurentData l1 = laurent_extract(s1, p, radius);
    const LaurentData l2 = laurent_extract(s2, p, radius);
    const int o1 = l1.order(), o2 = l2.order();
    if (o1 < -1 || o2 < -1)
        throw std::invalid_argument("residue_cross_identity: section order below -1");

    auto w = [&](cplx z) { return s1.weight(z); };
    auto cross = laurent_extract([&](cplx z) { return s1.f(z) * s2.f(z) * w(z); }, p, radius);

    ResidueCrossCheck out;
    out.lhs = 2.0 * cross.coeff(-1);
    if (o1 == o2) {
        auto sq1 = laurent_extract([&](cplx z) { const cplx v = s1.f(z); return v * v * w(z); },
                                   p, radius);
        auto sq2 = laurent_extract([&](cplx z) { const cplx v = s2.f(z); return v * v * w(z); },
                                   p, radius);
        const cplx ratio21 = l2.coeff(o2) / l1.coeff(o1);
        out.rhs = ratio21 * sq1.coeff(-1) + sq2.coeff(-1) / ratio21;
    } else if (std::abs(o1 - o2) >= 2) {
        out.rhs = 0.0;
    } else {
        throw std::invalid_argument("residue_cross_identity: section orders differ by one");
    }
    const double scale = std::max({1e-300, std::abs(out.lhs), std::abs(out.rhs),
                                   1e-6 * cross.max_abs()});
    out.residual = std::abs(out.lhs - out.rhs) / scale;
    out.ok = out.residual <= 1e-9;
    return out;
}

struct Periods {
    cplx p11, p22, p12;
    bool ok = false;
    double residual = 0.0;
};

// Period integrals of (s1^2, s2^2, s1 s2) along a closed cycle.  The surface
// closes up along the cycle iff int s1^2 = conj(int s2^2) and int s1 s2 is
// purely imaginary.
inline Periods periods(const SpinorPair& pair, const Curve& cycle) {
    auto f11 = [&](cplx z) { const cplx v = pair.s1.f(z); return v * v * pair.weight(z); };
    auto f22 = [&](cplx z) { const cplx v = pair.s2.f(z); return v * v * pair.weight(z); };
    auto f12 = [&](cplx z) { return pair.s1.f(z) * pair.s2.f(z) * pair.weight(z); };
    Periods out;
    out.p11 = integrate(f11, cycle).value;
    out.p22 = integrate(f22, cycle).value;
    out.p12 = integrate(f12, cycle).value;
    const double scale =
        std::max({1.0, std::abs(out.p11), std::abs(out.p22), std::abs(out.p12)});
    out.residual = std::max(std::abs(out.p11 - std::conj(out.p22)),
                            std::abs(out.p12.real()));
    out.ok = out.residual <= 1e-8 * scale;
    return out;
}

// X(target) - X(base) = Re int omega along the polyline through waypoints.
inline std::array<double, 3> integrate_X(const SpinorPair& pair, cplx base, cplx target,
                                         const std::vector<cplx>& waypoints = {}) {
    std::vector<cplx> pts;
    pts.push_back(base);
    pts.insert(pts.end(), waypoints.begin(), waypoints.end());
    pts.push_back(target);
    cvec3 total;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        auto f = [&](cplx z) { return pair.omega(z); };
        total += integrate3(f, segment(pts[i], pts[i + 1]));
    }
    return real_part(total);
}

// Fixed-point-free anticonformal involution: map and its antiholomorphic
// derivative d(map)/d(conj z).
struct Involution {
    std::function<cplx(cplx)> map;
    std::function<cplx(cplx)> dbar;
};

inline Involution sphere_antipodal() {
    return {[](cplx z) { return -1.0 / std::conj(z); },
            [](cplx z) { const cplx zb = std::conj(z); return 1.0 / (zb * zb); }};
}

// u -> conj(u) + omega1 on a rectangular torus.
inline Involution torus_conj_shift(cplx omega1) {
    return {[omega1](cplx u) { return std::conj(u) + omega1; },
            [](cplx) { return cplx(1.0, 0.0); }};
}

struct CompatibilityReport {
    bool compatible = false;
    int sign = 0;  // the epsilon in (s1, s2) = eps (i conj I* s2, -i conj I* s1)
    double max_residual = 0.0;
    int samples_used = 0;
};

namespace detail {

// Continue sqrt(H) along the segment from z0 (value root0) to z1.
// Returns false if H passes too close to 0/infinity or steps cannot be made
// continuous.
inline bool continue_sqrt(const std::function<cplx(cplx)>& H, cplx z0, cplx z1,
                          cplx& root, int max_depth = 18) {
    cplx cur = root;
    cplx at = z0;
    const cplx full = z1 - z0;
    double t = 0.0, dt = 0.125;
    int depth = 0;
    while (t < 1.0) {
        const double step = std::min(dt, 1.0 - t);
        const cplx next = z0 + (t + step) * full;
        const cplx h = H(next);
        const double scale = std::norm(cur);
        if (!(std::abs(h) > 1e-14 * scale) || !(std::abs(h) < 1e14 * scale)) return false;
        cplx r = std::sqrt(h);
        if (std::abs(r - cur) > std::abs(r + cur)) r = -r;
        if (std::abs(r - cur) > 0.3 * std::abs(cur)) {
            dt /= 2.0;
            if (++depth > max_depth) return false;
            continue;
        }
        cur = r;
        at = next;
        t += step;
        (void)at;
    }
    root = cur;
    return true;
}

}  // namespace detail

// Tests s1(u) = eps i conj(s2(I(u))) and s2(u) = -eps i conj(s1(I(u))) as
// section identities, with the frame factor h = sqrt(conj(W(I(u)) dbarI)/W(u))
// continued from a base point.  lift_sign flips the global branch of h, which
// exchanges the roles of eps = +1 and eps = -1 but not compatibility itself.
inline CompatibilityReport nonorientable_compatibility(const SpinorPair& pair,
                                                       const Involution& inv,
                                                       int lift_sign = 1,
                                                       int samples = 100,
                                                       double rel_tol = 1e-9) {
    const auto& dom = pair.s1.domain;
    auto W = [&](cplx z) { return pair.weight(z); };
    auto H = [&](cplx z) { return std::conj(W(inv.map(z)) * inv.dbar(z)) / W(z); };

    // Keep-away set: declared poles of both sections and their I-images,
    // plus frame degeneracies (zeros/poles of W).
    std::vector<cplx> avoid;
    for (const auto& s : {pair.s1, pair.s2})
        for (const auto& dp : s.poles) {
            avoid.push_back(dp.location);
        }
    if (pair.s1.spin.kind == SpinStructure::Kind::torus_untwisted) {
        avoid.push_back(0.0);
        avoid.push_back(dom.ctx->omega(pair.s1.spin.r));
    }

    double domain_scale = 1.0;
    std::function<cplx(int)> sample_point;
    std::function<double(cplx, cplx)> dist;
    if (dom.kind == Domain::Kind::torus) {
        const cplx w1 = dom.ctx->lattice.omega1, w3 = dom.ctx->lattice.omega3;
        domain_scale = std::min(std::abs(w1), std::abs(w3));
        sample_point = [w1, w3](int j) {
            const double a = std::fmod(0.07 + 0.75487766624669276 * j, 1.0) - 0.5;
            const double b = std::fmod(0.19 + 0.56984029099805327 * j, 1.0) - 0.5;
            return 2.0 * a * w1 + 2.0 * b * w3;
        };
        dist = [c = dom.ctx](cplx x, cplx y) { return c->distance(x, y); };
    } else {
        sample_point = [](int j) {
            const double r = 0.35 + std::fmod(0.61803398874989485 * j, 1.0) * 1.5;
            const double th = 2.0 * pi * std::fmod(0.41421356237309515 * j, 1.0);
            return r * std::exp(cplx(0.0, th));
        };
        dist = [](cplx x, cplx y) { return std::abs(x - y); };
    }

    // Base point for the branch of h.
    cplx base = 0.0;
    bool have_base = false;
    for (int j = 1; j < 50 && !have_base; ++j) {
        const cplx cand = sample_point(j);
        bool okp = true;
        for (cplx a : avoid)
            if (dist(cand, a) < 0.15 * domain_scale || dist(inv.map(cand), a) < 0.15 * domain_scale)
                okp = false;
        if (okp) {
            base = cand;
            have_base = true;
        }
    }
    if (!have_base)
        throw ConvergenceError("nonorientable_compatibility: no valid base point");
    const cplx h_base = double(lift_sign) * std::sqrt(H(base));

    double res_plus = 0.0, res_minus = 0.0;
    int used = 0;
    const cplx iu(0.0, 1.0);
    for (int j = 50; used < samples && j < 50 + 40 * samples; ++j) {
        const cplx u = sample_point(j);
        bool okp = true;
        for (cplx a : avoid)
            if (dist(u, a) < 0.12 * domain_scale || dist(inv.map(u), a) < 0.12 * domain_scale)
                okp = false;
        if (!okp) continue;
        cplx h = h_base;
        if (!detail::continue_sqrt(H, base, u, h)) continue;
        const cplx f1 = pair.s1.f(u), f2 = pair.s2.f(u);
        const cplx g1 = iu * std::conj(pair.s2.f(inv.map(u))) * h;
        const cplx g2 = -iu * std::conj(pair.s1.f(inv.map(u))) * h;
        const double scale = std::max({std::abs(f1), std::abs(f2), 1e-300});
        res_plus = std::max(res_plus,
                            std::max(std::abs(f1 - g1), std::abs(f2 - g2)) / scale);
        res_minus = std::max(res_minus,
                             std::max(std::abs(f1 + g1), std::abs(f2 + g2)) / scale);
        ++used;
    }
    if (used < samples / 2)
        throw ConvergenceError("nonorientable_compatibility: too few valid samples");

    CompatibilityReport rep;
    rep.samples_used = used;
    if (res_plus <= res_minus) {
        rep.sign = 1;
        rep.max_residual = res_plus;
    } else {
        rep.sign = -1;
        rep.max_residual = res_minus;
    }
    rep.compatible = rep.max_residual <= rel_tol;
    return rep;
}

}  // namespace spinor
