#pragma once

// Catalog of explicitly solvable spinor immersion data.  Each entry stores a
// surface as plain data: the domain, the end divisor, and the coordinates of
// the two sections in a family-specific canonical basis.  realize() turns the
// stored data back into evaluable sections, so every check downstream runs
// against what is stored, not against the construction parameters.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinor/complex_linalg.hpp"
#include "spinor/elliptic.hpp"
#include "spinor/numeric.hpp"
#include "spinor/omega.hpp"
#include "spinor/quadrature.hpp"
#include "spinor/spin_core.hpp"

namespace spinor {

// ---------------------------------------------------------------------------
// Stored surface data

struct SurfaceSpec {
    std::string family;       // selects the canonical basis for the coefficients
    std::string description;
    std::string symmetry;     // human-readable symmetry note, may be empty

    Domain::Kind domain_kind = Domain::Kind::sphere;
    cplx omega1{0.0}, omega3{0.0};  // lattice half periods when the domain is a torus
    SpinStructure::Kind spin_kind = SpinStructure::Kind::sphere_dz;
    int spin_r = 0;

    bool nonorientable = false;  // data descends through an anticonformal involution
    int lift_sign = 1;           // frozen branch of the frame factor for the quotient

    std::vector<cplx> ends;
    std::vector<int> end_orders;  // expected pole order of omega at each end
    std::vector<cplx> coeff1, coeff2;
    std::vector<std::pair<std::string, cplx>> moduli;
    cplx cycle_base{0.0};  // torus families: base point of the two period cycles

    bool has_modulus(const std::string& name) const {
        for (const auto& kv : moduli)
            if (kv.first == name) return true;
        return false;
    }
    cplx modulus(const std::string& name) const {
        for (const auto& kv : moduli)
            if (kv.first == name) return kv.second;
        throw std::invalid_argument("SurfaceSpec: no modulus named " + name);
    }
};

struct RealizedSurface {
    std::shared_ptr<const EllipticContext> ctx;  // null for sphere domains
    std::vector<SpinorSection> basis;
    SpinorPair pair;
    std::vector<Curve> cycles;
    bool has_involution = false;
    Involution involution;
};

namespace detail {

inline const cplx kSqrtI = cplx(std::sqrt(0.5), std::sqrt(0.5));  // exp(i pi/4)

// Linear combination of basis sections; declared poles are the union over the
// contributing entries so keep-away logic stays conservative.
inline SpinorSection combine_basis(const std::vector<SpinorSection>& basis,
                                   const std::vector<cplx>& c) {
    if (basis.empty() || basis.size() != c.size())
        throw std::invalid_argument("combine_basis: coefficient count mismatch");
    double cscale = 0.0;
    for (cplx v : c) cscale = std::max(cscale, std::abs(v));
    SpinorSection out;
    out.domain = basis.front().domain;
    out.spin = basis.front().spin;
    std::vector<std::function<cplx(cplx)>> fs;
    fs.reserve(basis.size());
    for (const auto& b : basis) fs.push_back(b.f);
    auto coeffs = c;
    out.f = [fs, coeffs](cplx z) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < fs.size(); ++i)
            if (coeffs[i] != cplx(0.0)) s += coeffs[i] * fs[i](z);
        return s;
    };
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (std::abs(c[i]) <= 1e-14 * cscale) continue;
        for (const auto& dp : basis[i].poles) {
            bool merged = false;
            for (auto& q : out.poles) {
                const bool same =
                    (is_infinity(dp.location) && is_infinity(q.location)) ||
                    (!is_infinity(dp.location) && !is_infinity(q.location) &&
                     std::abs(dp.location - q.location) < 1e-9);
                if (same) {
                    q.order = std::min(q.order, dp.order);
                    merged = true;
                    break;
                }
            }
            if (!merged) out.poles.push_back(dp);
        }
    }
    return out;
}

// Simple-pole partial fraction basis on the sphere: 1/(z - a) per finite end,
// and the constant section when infinity is an end (it must be stored last).
inline std::vector<SpinorSection> sphere_end_basis(const Domain& dom,
                                                   const SpinStructure& spin,
                                                   const std::vector<cplx>& ends) {
    std::vector<SpinorSection> basis;
    bool seen_inf = false;
    for (cplx p : ends) {
        if (is_infinity(p)) {
            seen_inf = true;
            continue;
        }
        if (seen_inf)
            throw std::invalid_argument("sphere_end_basis: infinity must be the last end");
        SpinorSection s;
        s.domain = dom;
        s.spin = spin;
        s.f = [p](cplx z) { return 1.0 / (z - p); };
        s.poles = {{p, -1}};
        basis.push_back(std::move(s));
    }
    if (seen_inf) {
        SpinorSection s;
        s.domain = dom;
        s.spin = spin;
        s.f = [](cplx) { return cplx(1.0); };
        s.poles = {{infinity_point(), -1}};
        basis.push_back(std::move(s));
    }
    return basis;
}

// Symmetrized combinations of the half-period difference functions
//   t_m(u) = zeta(u - omega_m) - zeta(u) + eta_m,
// combined by the matrix with rows (1,-1,-1), (-1,1,-1), (-1,-1,1).  Each
// combination has a simple pole at all four half-lattice points.
inline std::vector<SpinorSection> half_period_combination_basis(
    const Domain& dom, const SpinStructure& spin,
    const std::shared_ptr<const EllipticContext>& ctx) {
    static const int M[3][3] = {{1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    std::vector<SpinorSection> basis;
    const std::vector<cplx> all_ends = {0.0, ctx->omega(1), ctx->omega(2), ctx->omega(3)};
    for (int i = 0; i < 3; ++i) {
        SpinorSection s;
        s.domain = dom;
        s.spin = spin;
        auto c = ctx;
        const int m0 = M[i][0], m1 = M[i][1], m2 = M[i][2];
        s.f = [c, m0, m1, m2](cplx u) {
            cplx v = 0.0;
            const int mm[3] = {m0, m1, m2};
            for (int k = 1; k <= 3; ++k)
                v += double(mm[k - 1]) *
                     (c->zeta(u - c->omega(k)) - c->zeta(u) + c->eta(k));
            return v;
        };
        for (cplx p : all_ends) s.poles.push_back({p, -1});
        basis.push_back(std::move(s));
    }
    return basis;
}

// Klein family basis: for each of the four base ends with wp-value p_a, the
// even combination wp/(wp - p_a) and the odd combination wp'/(wp - p_a),
// both against the untwisted frame with r = 2.  Section-level poles sit at
// +-a only; the frame cancels the apparent singularities at 0 and omega_2.
inline std::vector<SpinorSection> wp_ratio_basis(
    const Domain& dom, const SpinStructure& spin,
    const std::shared_ptr<const EllipticContext>& ctx, const std::vector<cplx>& ends) {
    if (ends.size() != 8)
        throw std::invalid_argument("wp_ratio_basis: expected eight ends");
    std::vector<SpinorSection> basis;
    for (int type = 0; type < 2; ++type) {
        for (int a = 0; a < 4; ++a) {
            const cplx pa = ctx->wp(ends[static_cast<std::size_t>(a)]);
            SpinorSection s;
            s.domain = dom;
            s.spin = spin;
            auto c = ctx;
            if (type == 0)
                s.f = [c, pa](cplx u) { return c->wp(u) / (c->wp(u) - pa); };
            else
                s.f = [c, pa](cplx u) { return c->wp_prime(u) / (c->wp(u) - pa); };
            s.poles = {{ends[static_cast<std::size_t>(a)], -1},
                       {ends[static_cast<std::size_t>(a + 4)], -1}};
            basis.push_back(std::move(s));
        }
    }
    return basis;
}

// Laurent tail basis for the two-end datum on C \ {0}: 1/w^2, 1/w, 1, w.
inline std::vector<SpinorSection> laurent_tail_basis(const Domain& dom,
                                                     const SpinStructure& spin) {
    std::vector<SpinorSection> basis(4);
    const int pow[4] = {-2, -1, 0, 1};
    for (int i = 0; i < 4; ++i) {
        basis[static_cast<std::size_t>(i)].domain = dom;
        basis[static_cast<std::size_t>(i)].spin = spin;
        const int k = pow[i];
        basis[static_cast<std::size_t>(i)].f = [k](cplx w) {
            return std::pow(w, k);
        };
    }
    basis[0].poles = {{0.0, -2}};
    basis[1].poles = {{0.0, -1}};
    basis[2].poles = {{infinity_point(), -1}};
    basis[3].poles = {{infinity_point(), -2}};
    return basis;
}

// Residual of v against the span of the given vectors, relative to |v|.
inline double span_residual(const std::vector<std::vector<cplx>>& span,
                            const std::vector<cplx>& v) {
    std::vector<std::vector<cplx>> ortho;
    auto dot = [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
        return s;
    };
    for (auto w : span) {
        for (const auto& q : ortho) {
            const cplx c = dot(q, w);
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * q[i];
        }
        double n = 0.0;
        for (cplx x : w) n += std::norm(x);
        n = std::sqrt(n);
        if (n < 1e-13) continue;
        for (auto& x : w) x /= n;
        ortho.push_back(std::move(w));
    }
    auto r = v;
    for (const auto& q : ortho) {
        const cplx c = dot(q, r);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * q[i];
    }
    double nv = 0.0, nr = 0.0;
    for (cplx x : v) nv += std::norm(x);
    for (cplx x : r) nr += std::norm(x);
    return std::sqrt(nr) / std::max(std::sqrt(nv), 1e-300);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Realization of stored data

inline RealizedSurface realize(const SurfaceSpec& spec) {
    std::shared_ptr<const EllipticContext> ctx;
    Domain dom = Domain::sphere();
    if (spec.domain_kind == Domain::Kind::torus) {
        ctx = std::make_shared<const EllipticContext>(Lattice(spec.omega1, spec.omega3));
        dom = Domain::torus(ctx);
    }
    SpinStructure spin;
    switch (spec.spin_kind) {
        case SpinStructure::Kind::sphere_dz: spin = SpinStructure::sphere_dz(); break;
        case SpinStructure::Kind::torus_du: spin = SpinStructure::twisted(); break;
        case SpinStructure::Kind::torus_untwisted:
            spin = SpinStructure::untwisted(spec.spin_r);
            break;
    }

    std::vector<SpinorSection> basis;
    if (spec.family == "sphere_4_ends" || spec.family == "sphere_6_ends" ||
        spec.family == "projective_plane_3_ends") {
        basis = detail::sphere_end_basis(dom, spin, spec.ends);
    } else if (spec.family == "moebius_strip") {
        basis = detail::laurent_tail_basis(dom, spin);
    } else if (spec.family == "torus_4_ends") {
        basis = detail::half_period_combination_basis(dom, spin, ctx);
    } else if (spec.family == "klein_bottle_4_ends") {
        basis = detail::wp_ratio_basis(dom, spin, ctx, spec.ends);
    } else {
        throw std::invalid_argument("realize: unknown family " + spec.family);
    }

    SpinorSection s1 = detail::combine_basis(basis, spec.coeff1);
    SpinorSection s2 = detail::combine_basis(basis, spec.coeff2);

    std::vector<Curve> cycles;
    if (spec.domain_kind == Domain::Kind::torus) {
        cycles.push_back(segment(spec.cycle_base, spec.cycle_base + 2.0 * spec.omega1));
        cycles.push_back(segment(spec.cycle_base, spec.cycle_base + 2.0 * spec.omega3));
    }

    RealizedSurface out{ctx, std::move(basis),
                        SpinorPair(std::move(s1), std::move(s2), cycles), cycles,
                        false, Involution{}};
    if (spec.nonorientable) {
        out.has_involution = true;
        out.involution = (spec.domain_kind == Domain::Kind::sphere)
                             ? sphere_antipodal()
                             : torus_conj_shift(spec.omega1);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Branch point scan
//
// Zeros of s1 are located by Newton iteration started from every cell of a
// grid over the domain; at each zero the size of s2 decides whether the pair
// branches there.  Both sections are measured through the frame-corrected
// proxy |f| sqrt|W|, which stays meaningful at the zeros and poles of the
// untwisted frame.  An empty branch list over a clean scan is the
// certificate; cells that look suspicious but fail to converge are returned
// as unresolved rather than silently dropped.

struct ScanPolicy {
    int grid = 48;
    double branch_tol = 1e-6;   // relative |s2| proxy below which a zero is flagged
    double accept_tol = 1e-6;   // relative |s1| proxy acceptance for a converged zero
    double clearance = 0.03;    // keep-away radius around declared poles, relative
    double box_scale = 4.0;     // sphere: half-width over max(1, largest |end|)
    int max_newton = 60;
};

struct ScanZero {
    cplx location;
    double s1_proxy = 0.0;
    double s2_proxy = 0.0;
    bool branch = false;
};

struct ScanResult {
    std::vector<ScanZero> zeros;
    std::vector<cplx> unresolved;
    double s1_scale = 0.0, s2_scale = 0.0;
    int branch_count() const {
        int n = 0;
        for (const auto& z : zeros) n += z.branch ? 1 : 0;
        return n;
    }
    bool clean() const { return unresolved.empty() && branch_count() == 0; }
};

namespace detail {

struct ZeroScan {
    std::vector<cplx> zeros;
    std::vector<cplx> unresolved;
    double f_scale = 0.0;  // median of the weight over the grid
};

// Newton zero search for one wrapped function over a grid.  `weight` is the
// frame proxy multiplier used for acceptance and suspicion thresholds; `dist`
// must be lattice aware on the torus.
inline ZeroScan scan_zeros(const std::function<cplx(cplx)>& f,
                           const std::function<cplx(double, double)>& cell_point,
                           const std::function<double(cplx, cplx)>& dist,
                           const std::function<double(cplx)>& weight,
                           const std::function<cplx(cplx)>& reduce,
                           const std::vector<cplx>& avoid, double domain_scale,
                           const ScanPolicy& policy) {
    auto eval = [&](cplx z, bool& ok) -> cplx {
        try {
            const cplx v = f(z);
            ok = std::isfinite(v.real()) && std::isfinite(v.imag());
            return v;
        } catch (const std::exception&) {
            ok = false;
            return 0.0;
        }
    };
    auto proxy = [&](cplx z, bool& ok) -> double {
        const cplx v = eval(z, ok);
        if (!ok) return 0.0;
        const double w = weight(z);
        if (!std::isfinite(w)) {
            ok = false;
            return 0.0;
        }
        return std::abs(v) * w;
    };

    const int n = policy.grid;
    const double cell = domain_scale / n;
    const double keep = std::max(1.25 * cell, policy.clearance * domain_scale);

    std::vector<cplx> centers;
    std::vector<double> pvals;
    centers.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx z = cell_point((i + 0.5) / n, (j + 0.5) / n);
            bool near = false;
            for (cplx a : avoid)
                if (dist(z, a) < keep) near = true;
            if (near) continue;
            bool ok = true;
            const double p = proxy(z, ok);
            if (!ok) continue;
            centers.push_back(z);
            pvals.push_back(p);
        }
    if (centers.empty()) return {};

    std::vector<double> sorted = pvals;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double scale = std::max(sorted[sorted.size() / 2], 1e-300);

    ZeroScan out;
    out.f_scale = scale;
    const double h = 1e-6 * domain_scale;
    const double dedupe = 1e-4 * domain_scale;

    for (std::size_t c = 0; c < centers.size(); ++c) {
        cplx z = centers[c];
        bool converged = false;
        for (int it = 0; it < policy.max_newton; ++it) {
            bool ok1 = true, ok2 = true, ok3 = true;
            const cplx fz = eval(z, ok1);
            const cplx fp = eval(z + h, ok2);
            const cplx fm = eval(z - h, ok3);
            if (!ok1 || !ok2 || !ok3) break;
            const cplx df = (fp - fm) / (2.0 * h);
            if (std::abs(df) < 1e-300) break;
            const cplx step = fz / df;
            z -= step;
            if (dist(z, centers[c]) > 0.5 * domain_scale) break;  // left the basin
            if (std::abs(step) <= 1e-12 * domain_scale) {
                converged = true;
                break;
            }
        }
        bool accepted = false;
        if (converged) {
            bool ok = true;
            const double pz = proxy(z, ok);
            if (ok && pz <= policy.accept_tol * scale) {
                const cplx rep = reduce(z);
                bool dup = false;
                for (cplx q : out.zeros)
                    if (dist(rep, q) < dedupe) dup = true;
                if (!dup) out.zeros.push_back(rep);
                accepted = true;
            }
        }
        (void)accepted;
    }

    // Suspicious cells: proxy well below scale with no zero found nearby.
    for (std::size_t c = 0; c < centers.size(); ++c) {
        if (pvals[c] > 0.05 * scale) continue;
        bool covered = false;
        for (cplx q : out.zeros)
            if (dist(centers[c], q) < 2.5 * cell) covered = true;
        if (!covered) out.unresolved.push_back(centers[c]);
    }
    return out;
}

}  // namespace detail

inline ScanResult unbranched_scan(const SpinorPair& pair, const ScanPolicy& policy = {}) {
    const Domain& dom = pair.s1.domain;
    const bool torus = dom.kind == Domain::Kind::torus;
    const bool untwisted =
        pair.s1.spin.kind == SpinStructure::Kind::torus_untwisted;

    std::function<cplx(double, double)> cell_point;
    std::function<double(cplx, cplx)> dist;
    std::function<cplx(cplx)> reduce;
    double domain_scale = 0.0;
    if (torus) {
        const cplx w1 = dom.ctx->lattice.omega1, w3 = dom.ctx->lattice.omega3;
        cell_point = [w1, w3](double a, double b) {
            return (a - 0.5) * 2.0 * w1 + (b - 0.5) * 2.0 * w3;
        };
        dist = [c = dom.ctx](cplx x, cplx y) { return c->distance(x, y); };
        reduce = [c = dom.ctx](cplx z) { return c->reduce(z).u; };
        domain_scale = std::min(std::abs(2.0 * w1), std::abs(2.0 * w3));
    } else {
        double r = 1.0;
        for (const auto& s : {pair.s1, pair.s2})
            for (const auto& dp : s.poles)
                if (!is_infinity(dp.location)) r = std::max(r, std::abs(dp.location));
        const double box = policy.box_scale * r;
        cell_point = [box](double a, double b) {
            return cplx((2.0 * a - 1.0) * box, (2.0 * b - 1.0) * box);
        };
        dist = [](cplx x, cplx y) {
            if (is_infinity(x) || is_infinity(y))
                return (is_infinity(x) && is_infinity(y)) ? 0.0 : 1e300;
            return std::abs(x - y);
        };
        reduce = [](cplx z) { return z; };
        domain_scale = 2.0 * box;
    }

    std::vector<cplx> avoid;
    for (const auto& s : {pair.s1, pair.s2})
        for (const auto& dp : s.poles)
            if (!is_infinity(dp.location)) avoid.push_back(dp.location);
    if (untwisted) avoid.push_back(0.0);  // frame zero, probed separately below

    auto weight = [&](cplx z) -> double {
        return std::sqrt(std::abs(pair.weight(z)));
    };
    auto w1f = [&](cplx z) { return pair.s1.f(z); };
    auto w2f = [&](cplx z) { return pair.s2.f(z); };

    detail::ZeroScan zs = detail::scan_zeros(w1f, cell_point, dist, weight, reduce,
                                             avoid, domain_scale, policy);

    // Scale for s2 from the same grid geometry.
    std::vector<double> p2;
    const int n = policy.grid;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx z = cell_point((i + 0.5) / n, (j + 0.5) / n);
            bool near = false;
            for (cplx a : avoid)
                if (dist(z, a) < std::max(1.25 * domain_scale / n,
                                          policy.clearance * domain_scale))
                    near = true;
            if (near) continue;
            try {
                const cplx v = w2f(z);
                const double w = weight(z);
                if (std::isfinite(v.real()) && std::isfinite(v.imag()) &&
                    std::isfinite(w))
                    p2.push_back(std::abs(v) * w);
            } catch (const std::exception&) {
            }
        }
    double s2_scale = 1e-300;
    if (!p2.empty()) {
        std::nth_element(p2.begin(), p2.begin() + p2.size() / 2, p2.end());
        s2_scale = std::max(p2[p2.size() / 2], 1e-300);
    }

    ScanResult out;
    out.s1_scale = zs.f_scale;
    out.s2_scale = s2_scale;
    out.unresolved = zs.unresolved;
    for (cplx z : zs.zeros) {
        ScanZero rec;
        rec.location = z;
        double w = weight(z);
        if (!std::isfinite(w)) w = 0.0;
        rec.s1_proxy = std::abs(w1f(z)) * w / zs.f_scale;
        rec.s2_proxy = std::abs(w2f(z)) * w / s2_scale;
        rec.branch = rec.s2_proxy <= policy.branch_tol;
        out.zeros.push_back(rec);
    }

    // The untwisted frame vanishes at the lattice points; if neither section
    // has a pole there the sections inherit that zero, invisible to Newton on
    // f1.  Probe the decay rate on two small circles around 0.
    if (untwisted) {
        bool pole_at_zero = false;
        for (const auto& s : {pair.s1, pair.s2})
            for (const auto& dp : s.poles)
                if (!is_infinity(dp.location) && dist(dp.location, 0.0) < 1e-6 * domain_scale)
                    pole_at_zero = true;
        if (!pole_at_zero) {
            const double rho = 1e-3 * domain_scale;
            auto ring_max = [&](const std::function<cplx(cplx)>& g, double r) {
                double m = 0.0;
                for (int k = 0; k < 8; ++k) {
                    const cplx z = r * std::exp(cplx(0.0, 2.0 * pi * k / 8.0));
                    try {
                        const double w = weight(z);
                        const cplx v = g(z);
                        if (std::isfinite(w) && std::isfinite(v.real()) &&
                            std::isfinite(v.imag()))
                            m = std::max(m, std::abs(v) * w);
                    } catch (const std::exception&) {
                    }
                }
                return m;
            };
            const double m1 = ring_max(w1f, rho), m1h = ring_max(w1f, 0.5 * rho);
            if (m1 > 0.0 && m1h <= 0.7 * m1) {
                ScanZero rec;
                rec.location = 0.0;
                rec.s1_proxy = m1h / zs.f_scale;
                const double v1 = ring_max(w2f, rho), v1h = ring_max(w2f, 0.5 * rho);
                rec.s2_proxy = v1h / s2_scale;
                rec.branch = (v1 > 0.0 && v1h <= 0.7 * v1) ||
                             rec.s2_proxy <= policy.branch_tol;
                out.zeros.push_back(rec);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Six-end sphere family
//
// Ends are the four roots of z^4 - s1 z^3 - s2 z^2 - s3 z + 1 together with 0
// and infinity.  On the locus t1 t3 + s1 s3 = 20 (t1 = s1^2 + 3 s2,
// t3 = s3^2 + 3 s2) the pairing matrix degenerates to rank four and its
// kernel is spanned by an explicit pair of polynomial sections.

struct EndSymmetrics {
    cplx s1, s2, s3;  // elementary symmetric data of the four finite nonzero ends
    cplx t1() const { return s1 * s1 + 3.0 * s2; }
    cplx t3() const { return s3 * s3 + 3.0 * s2; }
    cplx degeneracy() const { return t1() * t3() + s1 * s3 - 20.0; }
};

inline EndSymmetrics end_symmetrics_from_roots(const std::array<cplx, 4>& r) {
    EndSymmetrics sym;
    sym.s1 = r[0] + r[1] + r[2] + r[3];
    const cplx pairs = r[0] * r[1] + r[0] * r[2] + r[0] * r[3] + r[1] * r[2] +
                       r[1] * r[3] + r[2] * r[3];
    sym.s2 = -pairs;
    sym.s3 = r[0] * r[1] * r[2] + r[0] * r[1] * r[3] + r[0] * r[2] * r[3] +
             r[1] * r[2] * r[3];
    const cplx prod = r[0] * r[1] * r[2] * r[3];
    double scale = 1.0;
    for (cplx x : r) scale = std::max(scale, std::abs(x));
    if (std::abs(prod - 1.0) > 1e-8 * std::pow(scale, 4))
        throw std::invalid_argument(
            "end_symmetrics_from_roots: product of the ends must be 1");
    return sym;
}

// Ascending coefficients of z^4 - s1 z^3 - s2 z^2 - s3 z + 1.
inline std::vector<cplx> six_end_polynomial(const EndSymmetrics& sym) {
    return {1.0, -sym.s3, -sym.s2, -sym.s1, 1.0};
}

struct SixEndTables {
    std::array<cplx, 4> b;  // numerator of t1 against 1/(z Q)
    std::array<cplx, 4> c;  // numerator of t2 against z/Q
};

inline SixEndTables six_end_tables(const EndSymmetrics& sym) {
    const cplx s1 = sym.s1, s2 = sym.s2, s3 = sym.s3;
    const cplx t1 = sym.t1(), t3 = sym.t3();
    SixEndTables t;
    t.b = {s2, -s2 * s3, s2 * t3 - 2.0 * s1 * s3 - 10.0, s1 * t3 + 5.0 * s3};
    t.c = {s3 * t1 + 5.0 * s1, s2 * t1 - 2.0 * s1 * s3 - 10.0, -s1 * s2, s2};
    return t;
}

namespace detail {

inline cplx poly_eval(const std::array<cplx, 4>& a, cplx z) {
    return ((a[3] * z + a[2]) * z + a[1]) * z + a[0];
}

// Partial fraction coordinates of the kernel pair in the basis
// {1/(z - r_i), 1/z, 1}.  Returns (coeff1, coeff2) of length six:
// four root slots, the zero slot, the constant slot.
inline std::pair<std::vector<cplx>, std::vector<cplx>> six_end_pair_coefficients(
    const EndSymmetrics& sym, const std::array<cplx, 4>& roots) {
    const SixEndTables t = six_end_tables(sym);
    const std::vector<cplx> q = six_end_polynomial(sym);
    auto qprime = [&](cplx z) {
        return ((4.0 * q[4] * z + 3.0 * q[3]) * z + 2.0 * q[2]) * z + q[1];
    };
    std::vector<cplx> c1(6, 0.0), c2(6, 0.0);
    for (int i = 0; i < 4; ++i) {
        const cplx r = roots[static_cast<std::size_t>(i)];
        const cplx qp = qprime(r);
        if (std::abs(qp) < 1e-12)
            throw std::invalid_argument("six_end_pair_coefficients: repeated end");
        c1[static_cast<std::size_t>(i)] = poly_eval(t.b, r) / (r * qp);
        c2[static_cast<std::size_t>(i)] = r * poly_eval(t.c, r) / qp;
    }
    c1[4] = t.b[0];  // residue at 0: Q(0) = 1
    c2[5] = t.c[3];  // constant term
    return {c1, c2};
}

}  // namespace detail

inline SurfaceSpec sphere_4_ends() {
    const cplx a(0.5 * std::sqrt(3.0), 0.5);
    const cplx ab = std::conj(a);  // equals 1/a on the unit circle
    const cplx i(0.0, 1.0);
    SurfaceSpec spec;
    spec.family = "sphere_4_ends";
    spec.description =
        "genus zero, four embedded planar ends over the hexagonal point "
        "configuration; the unique end set of this size admitting a full "
        "kernel pair";
    spec.symmetry = "order-12 dihedral symmetry of the hexagonal end set";
    spec.ends = {a, ab, 0.0, infinity_point()};
    spec.end_orders = {-2, -2, -2, -2};
    spec.coeff1 = {-i * a, i * ab, -1.0, 0.0};
    spec.coeff2 = {i, -i, 0.0, 1.0};
    spec.moduli = {{"a", a}};
    return spec;
}

inline SurfaceSpec sphere_6_ends(cplx s1, cplx s2, cplx s3) {
    EndSymmetrics sym{s1, s2, s3};
    const double scale =
        std::max({1.0, std::abs(sym.t1() * sym.t3()), std::abs(s1 * s3)});
    if (std::abs(sym.degeneracy()) > 1e-10 * scale)
        throw std::invalid_argument(
            "sphere_6_ends: symmetric data does not satisfy the rank-four "
            "degeneracy condition");
    if (std::abs(s2) <= 1e-10 * std::max({1.0, std::abs(s1), std::abs(s3)}))
        throw std::invalid_argument(
            "sphere_6_ends: s2 = 0 collapses the ends at 0 and infinity");

    const std::vector<cplx> roots_v = poly_roots(six_end_polynomial(sym));
    std::array<cplx, 4> roots;
    std::copy_n(roots_v.begin(), 4, roots.begin());
    double rscale = 1.0;
    for (cplx r : roots) rscale = std::max(rscale, std::abs(r));
    for (int i = 0; i < 4; ++i) {
        if (std::abs(roots[static_cast<std::size_t>(i)]) < 1e-8 * rscale)
            throw std::invalid_argument("sphere_6_ends: an end collides with 0");
        for (int j = i + 1; j < 4; ++j)
            if (std::abs(roots[static_cast<std::size_t>(i)] -
                         roots[static_cast<std::size_t>(j)]) < 1e-8 * rscale)
                throw std::invalid_argument("sphere_6_ends: repeated ends");
    }

    auto [c1, c2] = detail::six_end_pair_coefficients(sym, roots);

    SurfaceSpec spec;
    spec.family = "sphere_6_ends";
    spec.description =
        "genus zero, six embedded planar ends: the four roots of the stored "
        "quartic together with 0 and infinity, on the degeneracy locus of "
        "the end pairing";
    spec.ends = {roots[0], roots[1], roots[2], roots[3], 0.0, infinity_point()};
    spec.end_orders = std::vector<int>(6, -2);
    spec.coeff1 = c1;
    spec.coeff2 = c2;
    spec.moduli = {{"sigma1", s1}, {"sigma2", s2}, {"sigma3", s3}};

    // The stored pair must lie in the kernel of the pairing matrix built
    // from the stored ends; this ties the coefficient tables to the
    // independently computed kernel.
    OmegaSystem sys = omega_sphere(EndDivisor::sphere(spec.ends));
    const cplx pf = pfaffian(sys.matrix);
    if (std::abs(pf) > 1e-8 * std::pow(sys.entry_scale, 3))
        throw ConvergenceError("sphere_6_ends: pairing matrix is not degenerate");
    KSpace k = extract_K(sys);
    if (k.dim != 2) throw ConvergenceError("sphere_6_ends: kernel dimension != 2");
    for (const auto& v : {spec.coeff1, spec.coeff2})
        if (detail::span_residual(k.coords, v) > 1e-7)
            throw ConvergenceError(
                "sphere_6_ends: stored pair does not span the pairing kernel");
    return spec;
}

// ---------------------------------------------------------------------------
// Three-end projective planes
//
// Parameters are the three pairwise angle cosines (c1, c2, c3) of the end
// directions, constrained to the boundary surface
//   (c1^2+3)(c2^2+3)(c3^2+3) - 32 (c1 c2 c3 + 1) = 0
// inside the open cube.  The six ends of the orientation double cover are
// recovered in closed form and fed to the six-end machinery; the quotient
// data descends through the antipodal involution.

inline double projective_plane_variety(const std::array<double, 3>& c) {
    return (c[0] * c[0] + 3.0) * (c[1] * c[1] + 3.0) * (c[2] * c[2] + 3.0) -
           32.0 * (c[0] * c[1] * c[2] + 1.0);
}

// Order of the stabilizer inside the order-24 group generated by coordinate
// permutations and even sign flips.
inline int cube_symmetry_stabilizer(const std::array<double, 3>& c,
                                    double tol = 1e-9) {
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    static const int signs[4][3] = {
        {1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    int count = 0;
    for (const auto& p : perms)
        for (const auto& s : signs) {
            double d = 0.0;
            for (int i = 0; i < 3; ++i)
                d = std::max(d, std::abs(s[i] * c[p[i]] - c[i]));
            if (d <= tol) ++count;
        }
    return count;
}

inline bool projective_plane_fundamental_cell(const std::array<double, 3>& c,
                                              double tol = 1e-12) {
    return c[0] < 1.0 + tol && c[0] >= c[1] - tol && c[1] >= std::abs(c[2]) - tol &&
           c[0] > -1.0 - tol && std::abs(c[1]) < 1.0 + tol && std::abs(c[2]) < 1.0 + tol;
}

// Real solutions c3 of the boundary constraint at fixed (c1, c2), inside the
// open cube, sorted ascending.  The constraint is quadratic in c3.
inline std::vector<double> projective_plane_solve_c3(double c1, double c2) {
    const double alpha = (c1 * c1 + 3.0) * (c2 * c2 + 3.0);
    const double beta = -32.0 * c1 * c2;
    const double delta = 3.0 * alpha - 32.0;
    const double disc = beta * beta - 4.0 * alpha * delta;
    std::vector<double> out;
    if (disc < 0.0) return out;
    const double sq = std::sqrt(disc);
    for (double r : {(-beta - sq) / (2.0 * alpha), (-beta + sq) / (2.0 * alpha)})
        if (std::abs(r) < 1.0) out.push_back(r);
    std::sort(out.begin(), out.end());
    return out;
}

// The symmetric point (c, c, -c) on the boundary surface with c in (0, 1),
// fixed by an order-six subgroup.
inline double projective_plane_d3_point() {
    double lo = 0.0, hi = 1.0;
    auto f = [](double c) {
        return projective_plane_variety({c, c, -c});
    };
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace detail {

// Antilinear image of a partial fraction coefficient vector under
// f |-> -i conj(f(I(z))) h(z) with I(z) = -1/conj(z) and h(z) = 1/z.
// The basis slots are the finite ends followed by the constant; the image of
// 1/(z - a) is -(1/conj(a)) / (z - I(a)), the slot at 0 maps to the constant
// and vice versa.
inline std::vector<cplx> antipodal_image_coefficients(
    const std::vector<cplx>& ends, const std::vector<cplx>& coeff) {
    const std::size_t nfin = ends.size() - 1;  // infinity is stored last
    std::vector<cplx> out(coeff.size(), 0.0);
    const cplx iu(0.0, 1.0);
    for (std::size_t j = 0; j < nfin; ++j) {
        const cplx a = ends[j];
        const cplx d = coeff[j];
        if (std::abs(a) < 1e-14) {
            out[nfin] += iu * std::conj(d);  // pole at 0 -> constant
            continue;
        }
        const cplx target = -1.0 / std::conj(a);
        std::size_t slot = nfin;
        double best = 1e300;
        for (std::size_t k = 0; k < nfin; ++k) {
            const double dd = std::abs(ends[k] - target);
            if (dd < best) {
                best = dd;
                slot = k;
            }
        }
        if (best > 1e-8 * std::max(1.0, std::abs(target)))
            throw std::invalid_argument(
                "antipodal_image_coefficients: end set is not involution "
                "symmetric");
        out[slot] += (iu / std::conj(a)) * std::conj(d);
    }
    // Constant slot maps to the simple pole at 0.
    const cplx d0 = coeff[nfin];
    if (std::abs(d0) > 0.0) {
        std::size_t zslot = nfin;
        for (std::size_t k = 0; k < nfin; ++k)
            if (std::abs(ends[k]) < 1e-14) zslot = k;
        if (zslot == nfin)
            throw std::invalid_argument(
                "antipodal_image_coefficients: no end at 0 to receive the "
                "constant");
        out[zslot] += -iu * std::conj(d0);
    }
    return out;
}

}  // namespace detail

inline SurfaceSpec projective_plane_3_ends(const std::array<double, 3>& c) {
    const double vres = projective_plane_variety(c);
    const double vscale = std::max(
        32.0, (c[0] * c[0] + 3.0) * (c[1] * c[1] + 3.0) * (c[2] * c[2] + 3.0));
    if (std::abs(vres) > 1e-10 * vscale)
        throw std::invalid_argument(
            "projective_plane_3_ends: parameters are off the boundary surface");
    if (!projective_plane_fundamental_cell(c))
        throw std::invalid_argument(
            "projective_plane_3_ends: parameters outside the fundamental cell");
    for (int i = 0; i < 2; ++i)
        if (1.0 - c[i] * c[i] <= 1e-10)
            throw std::invalid_argument(
                "projective_plane_3_ends: degenerate parameters, ends collide "
                "with 0 or infinity");

    const double r1 = std::sqrt((1.0 - c[0]) / (1.0 + c[0]));
    const double r2 = std::sqrt((1.0 - c[1]) / (1.0 + c[1]));
    double x2 = 1.0 - c[0] * c[0] - c[1] * c[1] - c[2] * c[2] +
                2.0 * c[0] * c[1] * c[2];
    if (x2 < -1e-12)
        throw std::invalid_argument(
            "projective_plane_3_ends: no real end configuration (negative "
            "discriminant)");
    x2 = std::max(x2, 0.0);
    const double x = std::sqrt(x2);
    if (x <= 1e-8)
        throw std::invalid_argument(
            "projective_plane_3_ends: degenerate parameters, coincident ends");

    const cplx gamma2 =
        (cplx(c[2] - c[0] * c[1], x)) /
        (std::sqrt(1.0 - c[0] * c[0]) * std::sqrt(1.0 - c[1] * c[1]));
    auto inv = [](cplx z) { return -1.0 / std::conj(z); };

    // Both square roots of gamma^2 give involution symmetric end sets; keep
    // the one with the smaller combined defect, tie broken toward Re >= 0.
    cplx best_gamma = 0.0;
    std::array<cplx, 4> best_roots{};
    double best_score = 1e300;
    for (int sgn : {1, -1}) {
        const cplx g = double(sgn) * std::sqrt(gamma2);
        const cplx a1 = g * r1, a2 = std::conj(g) * r2;
        const std::array<cplx, 4> roots = {a1, inv(a1), a2, inv(a2)};
        EndSymmetrics sym;
        try {
            sym = end_symmetrics_from_roots(roots);
        } catch (const std::exception&) {
            continue;
        }
        const double resid = std::abs(sym.degeneracy());
        double isym = 0.0;
        for (cplx e : roots) {
            double dmin = 1e300;
            for (cplx f : roots) dmin = std::min(dmin, std::abs(inv(e) - f));
            isym = std::max(isym, dmin);
        }
        const double score = resid + isym;
        if (score < best_score ||
            (std::abs(score - best_score) < 1e-14 && g.real() >= 0.0)) {
            best_score = score;
            best_gamma = g;
            best_roots = roots;
        }
    }
    if (best_score > 1e300 * 0.5)
        throw std::invalid_argument("projective_plane_3_ends: end recovery failed");

    EndSymmetrics sym = end_symmetrics_from_roots(best_roots);
    const double sscale = std::max({1.0, std::abs(sym.s1), std::abs(sym.s3)});
    if (std::abs(sym.degeneracy()) >
        1e-8 * std::max({1.0, std::abs(sym.t1() * sym.t3()), std::abs(sym.s1 * sym.s3)}))
        throw ConvergenceError(
            "projective_plane_3_ends: recovered ends miss the degeneracy locus");
    if (std::abs(sym.s2) <= 1e-10 * sscale)
        throw std::invalid_argument(
            "projective_plane_3_ends: degenerate datum (c3 = 3 c1 c2), the "
            "ends at 0 and infinity disappear");
    // Structural consequences of the involution symmetry of the end set.
    if (std::abs(sym.s2.imag()) > 1e-9 * std::max(1.0, std::abs(sym.s2)) ||
        std::abs(sym.s3 + std::conj(sym.s1)) > 1e-9 * sscale)
        throw ConvergenceError(
            "projective_plane_3_ends: symmetric data violates the involution "
            "constraints");
    // Closed form for s1 as an independent route to the same data.
    {
        const cplx s1_direct =
            -2.0 * c[0] * best_gamma / std::sqrt(1.0 - c[0] * c[0]) -
            2.0 * c[1] * std::conj(best_gamma) / std::sqrt(1.0 - c[1] * c[1]);
        if (std::abs(sym.s1 - s1_direct) > 1e-8 * sscale)
            throw ConvergenceError(
                "projective_plane_3_ends: closed form and recovered symmetric "
                "data disagree");
    }

    auto [c1v, c2v] = detail::six_end_pair_coefficients(sym, best_roots);
    for (auto& v : c1v) v *= detail::kSqrtI;
    for (auto& v : c2v) v *= detail::kSqrtI;

    SurfaceSpec spec;
    spec.family = "projective_plane_3_ends";
    spec.description =
        "projective plane with three embedded planar ends, stored through its "
        "orientation double cover: six symmetric ends on the sphere with a "
        "kernel pair that descends through the antipodal involution";
    spec.symmetry = "stabilizer order " +
                    std::to_string(cube_symmetry_stabilizer(c)) +
                    " in the order-24 parameter symmetry group";
    spec.nonorientable = true;
    spec.lift_sign = 1;
    spec.ends = {best_roots[0], best_roots[1], best_roots[2], best_roots[3], 0.0,
                 infinity_point()};
    spec.end_orders = std::vector<int>(6, -2);
    spec.coeff1 = c1v;
    spec.coeff2 = c2v;
    spec.moduli = {{"c1", c[0]},          {"c2", c[1]}, {"c3", c[2]},
                   {"gamma", best_gamma}, {"x", x}};

    // The quotient structure fixes the second section as the antilinear image
    // of the first; the stored tables must reproduce it up to overall sign.
    {
        const std::vector<cplx> img =
            detail::antipodal_image_coefficients(spec.ends, spec.coeff1);
        double dplus = 0.0, dminus = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < img.size(); ++i) {
            dplus = std::max(dplus, std::abs(spec.coeff2[i] - img[i]));
            dminus = std::max(dminus, std::abs(spec.coeff2[i] + img[i]));
            scale = std::max({scale, std::abs(img[i]), std::abs(spec.coeff2[i])});
        }
        if (std::min(dplus, dminus) > 1e-8 * std::max(scale, 1e-300))
            throw ConvergenceError(
                "projective_plane_3_ends: stored pair is not the antilinear "
                "image of itself");
    }

    // Kernel membership against the pairing matrix of the stored ends.
    {
        OmegaSystem sys = omega_sphere(EndDivisor::sphere(spec.ends));
        KSpace k = extract_K(sys);
        if (k.dim != 2)
            throw ConvergenceError("projective_plane_3_ends: kernel dimension != 2");
        for (const auto& v : {spec.coeff1, spec.coeff2})
            if (detail::span_residual(k.coords, v) > 1e-7)
                throw ConvergenceError(
                    "projective_plane_3_ends: stored pair is not in the "
                    "pairing kernel");
    }

    // The descended datum must be compatible with the antipodal involution.
    {
        RealizedSurface rs = realize(spec);
        CompatibilityReport rep =
            nonorientable_compatibility(rs.pair, rs.involution, spec.lift_sign,
                                        100, 1e-7);
        if (!rep.compatible)
            throw ConvergenceError(
                "projective_plane_3_ends: sections do not descend through the "
                "involution");
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Moebius strip datum
//
// The two-section datum sqrt(i) (-(w+1)/w^2, w-1) sqrt(dw) on C \ {0}.  The
// end at 0 has a double section pole; this is the stored limit datum of the
// three-end family, kept as data only.

inline SurfaceSpec moebius_strip_datum() {
    SurfaceSpec spec;
    spec.family = "moebius_strip";
    spec.description =
        "minimal Moebius strip datum on the punctured plane with total "
        "curvature -6 pi; one end with a double section pole, descending "
        "through the antipodal involution";
    spec.symmetry = "";
    spec.nonorientable = true;
    spec.lift_sign = 1;
    spec.ends = {0.0, infinity_point()};
    spec.end_orders = {-4, -4};
    // Basis 1/w^2, 1/w, 1, w.
    spec.coeff1 = {-detail::kSqrtI, -detail::kSqrtI, 0.0, 0.0};
    spec.coeff2 = {0.0, 0.0, -detail::kSqrtI, detail::kSqrtI};
    return spec;
}

// Area of the image of the map g : sphere -> sphere in the round metric of
// total area 4 pi, counted with multiplicity: integral of
// 4 |g'|^2 / (1 + |g|^2)^2 over both charts of the domain sphere.
inline double gauss_map_area(const std::function<cplx(cplx)>& g, int res = 360) {
    if (res < 8) throw std::invalid_argument("gauss_map_area: resolution too small");
    const double h = 1e-5;
    auto density = [&](const std::function<cplx(cplx)>& f, cplx z) {
        const cplx d = (f(z + h) - f(z - h)) / (2.0 * h);
        const double m2 = std::norm(f(z));
        const double q = 1.0 + m2;
        return 4.0 * std::norm(d) / (q * q);
    };
    auto gout = [&](cplx t) { return g(1.0 / t); };
    double total = 0.0;
    const double cellw = 2.0 / res;
    for (int chart = 0; chart < 2; ++chart) {
        for (int i = 0; i < res; ++i)
            for (int j = 0; j < res; ++j) {
                const cplx z(-1.0 + (i + 0.5) * cellw, -1.0 + (j + 0.5) * cellw);
                if (std::abs(z) > 1.0) continue;
                const double v = chart == 0 ? density(g, z) : density(gout, z);
                if (std::isfinite(v)) total += v * cellw * cellw;
            }
    }
    return total;
}

// Total curvature of the immersed Moebius strip: half the (negated) area of
// the Gauss map of its orientation double cover.
inline double moebius_total_curvature(int res = 360) {
    auto g = [](cplx w) { return -w * w * (w - 1.0) / (w + 1.0); };
    return -0.5 * gauss_map_area(g, res);
}

// ---------------------------------------------------------------------------
// Four-end tori
//
// The pairing matrix vanishes identically only when the ends sit at the four
// half-lattice points.  The kernel is spanned by the symmetrized half-period
// combinations; closing the periods fixes the squares of the two free
// coefficients through the conjugated period matrix.

inline SurfaceSpec torus_4_ends(const Lattice& lat, int i = 1, int j = 2, int k = 3) {
    {
        std::array<int, 3> idx = {i, j, k};
        std::array<int, 3> s = idx;
        std::sort(s.begin(), s.end());
        if (s != std::array<int, 3>{1, 2, 3})
            throw std::invalid_argument("torus_4_ends: indices must permute {1,2,3}");
    }
    auto ctx = std::make_shared<const EllipticContext>(lat);
    const cplx w1 = ctx->omega(1), w3 = ctx->omega(3);
    const cplx n1 = ctx->eta(1), n3 = ctx->eta(3);
    const cplx ei = ctx->e(i), ej = ctx->e(j), ek = ctx->e(k);

    // B = A^{-1} conj(A) with A the (eta, omega) period matrix.
    const cplx detA = n1 * w3 - w1 * n3;
    if (std::abs(detA) < 1e-14)
        throw ConvergenceError("torus_4_ends: singular period matrix");
    auto applyB = [&](cplx v0, cplx v1) {
        // A^{-1} = [[w3, -w1], [-n3, n1]] / detA applied to conj(A) (v0, v1).
        const cplx u0 = std::conj(n1) * v0 + std::conj(w1) * v1;
        const cplx u1 = std::conj(n3) * v0 + std::conj(w3) * v1;
        return std::array<cplx, 2>{(w3 * u0 - w1 * u1) / detA,
                                   (-n3 * u0 + n1 * u1) / detA};
    };
    const std::array<cplx, 2> beta = applyB(1.0, std::conj(ek));

    const cplx dete = ej - ei;
    if (std::abs(dete) < 1e-12)
        throw std::invalid_argument("torus_4_ends: coincident branch values");
    const cplx xi2 = (ej * beta[0] - beta[1]) / dete;
    const cplx xj2 = (-ei * beta[0] + beta[1]) / dete;
    const cplx xi = std::sqrt(xi2), xj = std::sqrt(xj2);

    // A zero of the third combination meets a zero of the section pair iff
    // (ek - ei) xi^2 = (ek - ej) xj^2; keep a quantified margin.
    const cplx branch_num = (ek - ei) * xi2 - (ek - ej) * xj2;
    const double branch_margin =
        std::abs(branch_num) /
        std::max(std::abs(ek - ei) * std::abs(xi2) + std::abs(ek - ej) * std::abs(xj2),
                 1e-300);
    if (branch_margin < 1e-6)
        throw ConvergenceError("torus_4_ends: the pair branches at a section zero");
    // Same quantity through the conjugated period data alone.
    {
        const cplx g2 = ctx->g2;
        const cplx alt =
            ((g2 / 2.0 - 3.0 * ek * ek) * beta[0] - 3.0 * ek * beta[1]) / dete;
        if (std::abs(alt - branch_num) > 1e-9 * std::max(1.0, std::abs(branch_num)))
            throw ConvergenceError("torus_4_ends: branch margin routes disagree");
    }

    SurfaceSpec spec;
    spec.family = "torus_4_ends";
    spec.description =
        "genus one, four embedded planar ends at the half-lattice points; "
        "the only end configuration of this size with an identically "
        "vanishing pairing matrix";
    spec.symmetry = "ends fixed by the elliptic involution";
    spec.domain_kind = Domain::Kind::torus;
    spec.omega1 = lat.omega1;
    spec.omega3 = lat.omega3;
    spec.spin_kind = SpinStructure::Kind::torus_du;
    spec.ends = {0.0, ctx->omega(1), ctx->omega(2), ctx->omega(3)};
    spec.end_orders = {-2, -2, -2, -2};
    spec.coeff1 = {0.0, 0.0, 0.0};
    spec.coeff2 = {0.0, 0.0, 0.0};
    spec.coeff1[static_cast<std::size_t>(i - 1)] = xi;
    spec.coeff1[static_cast<std::size_t>(j - 1)] = xj;
    spec.coeff2[static_cast<std::size_t>(k - 1)] = 1.0;
    spec.moduli = {{"tau", lat.omega3 / lat.omega1},
                   {"x_i", xi},
                   {"x_j", xj},
                   {"i_index", double(i)},
                   {"j_index", double(j)},
                   {"k_index", double(k)},
                   {"branch_margin", branch_margin}};

    // Deterministic cycle base with clearance from the four ends.
    {
        const double L = std::min(std::abs(w1), std::abs(w3));
        const std::array<std::pair<double, double>, 4> cand = {
            std::make_pair(0.137, 0.211), std::make_pair(0.231, 0.167),
            std::make_pair(0.189, 0.261), std::make_pair(0.143, 0.329)};
        double best = -1.0;
        for (const auto& fr : cand) {
            const cplx base = fr.first * 2.0 * w1 + fr.second * 2.0 * w3;
            double clear = 1e300;
            for (int leg = 0; leg < 2; ++leg) {
                const cplx dir = leg == 0 ? 2.0 * w1 : 2.0 * w3;
                for (int s = 0; s <= 64; ++s) {
                    const cplx z = base + (s / 64.0) * dir;
                    for (cplx p : spec.ends)
                        clear = std::min(clear, ctx->distance(z, p));
                }
            }
            if (clear > best) {
                best = clear;
                spec.cycle_base = base;
            }
            if (best > 0.2 * L) break;
        }
        if (best < 0.05 * L)
            throw ConvergenceError("torus_4_ends: no clear cycle base");
    }

    // Hard checks on the realized pair: both cycles close, the cross period
    // vanishes, and every end is embedded planar.
    RealizedSurface rs = realize(spec);
    for (const Curve& cyc : rs.cycles) {
        const Periods p = periods(rs.pair, cyc);
        if (!p.ok)
            throw ConvergenceError("torus_4_ends: period closure failed");
        const double pscale =
            std::max({1.0, std::abs(p.p11), std::abs(p.p22)});
        if (std::abs(p.p12) > 1e-8 * pscale)
            throw ConvergenceError("torus_4_ends: cross period does not vanish");
    }
    const double rad = 0.15 * std::min(std::abs(w1), std::abs(w3));
    for (cplx p : spec.ends) {
        const EndCheck ec = end_check(rs.pair, p, rad);
        if (!ec.embedded_planar)
            throw ConvergenceError("torus_4_ends: end is not embedded planar");
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Klein bottle
//
// Square torus quotient by u -> conj(u) + omega_1 with the untwisted frame
// phi^2 = du / wp.  The eight ends come from a single wp-value r solving
// r^4 + m r^2 + 1 = 0 with m = -2(1 - 4 sqrt(2) i)/3; the reduced pairing
// block over the even/odd basis drops rank there, and the kernel pair closes
// its periods after solving one quadratic equation.

struct KleinTables {
    cplx m;                     // quartic parameter
    cplx r;                     // selected root, fourth quadrant
    cplx rp;                    // wp'(a)
    cplx a;                     // base end with wp(a) = r
    std::array<cplx, 4> p;      // wp values of the four base ends
    std::array<cplx, 8> ends;   // base ends and their negatives
    ComplexMatrix W;            // reduced 4x4 pairing block
    std::array<cplx, 4> c1, c2; // kernel coordinates: W^T c = 0
    cplx A, B, C;               // closed-form period coefficients
};

inline KleinTables klein_tables(const std::shared_ptr<const EllipticContext>& ctx) {
    KleinTables t;
    t.m = -2.0 * (cplx(1.0, 0.0) - cplx(0.0, 4.0 * std::sqrt(2.0))) / 3.0;
    const QuarticRoots qr = quartic_biquadratic_roots(t.m);
    if (qr.degenerate)
        throw ConvergenceError("klein_tables: degenerate quartic");
    t.r = 0.0;
    for (cplx root : qr.roots)
        if (root.real() > 0.0 && root.imag() < 0.0) t.r = root;
    if (t.r == cplx(0.0))
        throw ConvergenceError("klein_tables: no fourth-quadrant root");
    const cplx r = t.r;
    if (std::abs(((r * r + t.m) * r * r) + 1.0) > 1e-10)
        throw ConvergenceError("klein_tables: root residual too large");

    const cplx w1 = ctx->omega(1);
    const double L = std::abs(w1);
    auto I = [w1](cplx u) { return std::conj(u) + w1; };

    cplx a = ctx->reduce(invert_wp(*ctx, r)).u;
    // Both representatives +-a are involution symmetric; normalize the sign.
    {
        const cplx am = ctx->reduce(-a).u;
        cplx pick = a;
        if (ctx->distance(I(a), -a) > 1e-9 * L) {
            if (ctx->distance(I(am), -am) > 1e-9 * L)
                throw ConvergenceError(
                    "klein_tables: end is not involution symmetric");
            pick = am;
        } else if (ctx->distance(I(am), -am) <= 1e-9 * L) {
            pick = (a.imag() > 0.0) ? a : am;
        }
        a = pick;
    }
    t.a = a;
    if (std::abs(ctx->wp(a) - r) > 1e-9 * std::abs(r))
        throw ConvergenceError("klein_tables: wp inversion drifted");
    t.rp = ctx->wp_prime(a);

    t.p = {r, -1.0 / r, -r, 1.0 / r};
    const cplx w2 = ctx->omega(2);
    const cplx iu(0.0, 1.0);
    const std::array<cplx, 4> base = {a, ctx->reduce(a + w2).u, ctx->reduce(-iu * a).u,
                                      ctx->reduce(-iu * a + w2).u};
    for (int g = 0; g < 4; ++g) {
        t.ends[static_cast<std::size_t>(g)] = base[static_cast<std::size_t>(g)];
        t.ends[static_cast<std::size_t>(g + 4)] =
            ctx->reduce(-base[static_cast<std::size_t>(g)]).u;
    }
    // wp and wp' at every end must match the closed-form pattern.
    const std::array<cplx, 4> rp_pattern = {t.rp, t.rp / (r * r), -iu * t.rp,
                                            -iu * t.rp / (r * r)};
    for (int g = 0; g < 8; ++g) {
        const cplx pv = t.p[static_cast<std::size_t>(g % 4)];
        const cplx dv = (g < 4 ? 1.0 : -1.0) * rp_pattern[static_cast<std::size_t>(g % 4)];
        if (std::abs(ctx->wp(t.ends[static_cast<std::size_t>(g)]) - pv) >
            1e-9 * std::max(1.0, std::abs(pv)))
            throw ConvergenceError("klein_tables: wp value pattern failed");
        if (std::abs(ctx->wp_prime(t.ends[static_cast<std::size_t>(g)]) - dv) >
            1e-8 * std::max(1.0, std::abs(dv)))
            throw ConvergenceError("klein_tables: wp' value pattern failed");
    }
    // Involution pairing of the ends: (0,4), (1,5), (2,3), (6,7).
    {
        const int pairs[4][2] = {{0, 4}, {1, 5}, {2, 3}, {6, 7}};
        for (const auto& pr : pairs)
            if (ctx->distance(I(t.ends[static_cast<std::size_t>(pr[0])]),
                              t.ends[static_cast<std::size_t>(pr[1])]) > 1e-9 * L)
                throw ConvergenceError("klein_tables: involution pairing failed");
    }

    t.W = ComplexMatrix(4, 4);
    for (int ii = 0; ii < 4; ++ii)
        for (int jj = 0; jj < 4; ++jj) {
            const cplx pi_ = t.p[static_cast<std::size_t>(ii)];
            const cplx pj = t.p[static_cast<std::size_t>(jj)];
            t.W(ii, jj) = (ii == jj)
                              ? (pi_ * pi_ + 1.0) / (pi_ * (pi_ * pi_ - 1.0))
                              : 4.0 / (pi_ - pj);
        }
    const cplx r2 = r * r;
    const cplx q2 = (r2 + 1.0), d2 = (r2 - 1.0);
    t.c1 = {2.0 * d2 * d2, q2 * (r2 - 3.0), q2 * (3.0 * r2 - 1.0), -2.0 * d2 * d2};
    t.c2 = {q2 * (3.0 * r2 - 1.0), -2.0 * d2 * d2, 2.0 * d2 * d2, q2 * (r2 - 3.0)};
    // Kernel side: W^T c = 0.
    double wscale = t.W.max_abs(), cscale = 0.0;
    for (cplx v : t.c1) cscale = std::max(cscale, std::abs(v));
    for (int side = 0; side < 2; ++side) {
        const auto& c = side == 0 ? t.c1 : t.c2;
        for (int col = 0; col < 4; ++col) {
            cplx s = 0.0;
            for (int row = 0; row < 4; ++row)
                s += t.W(row, col) * c[static_cast<std::size_t>(row)];
            if (std::abs(s) > 1e-10 * wscale * cscale)
                throw ConvergenceError("klein_tables: kernel coordinates failed");
        }
    }

    t.A = -32.0 * r2 * (r2 * r2 + 4.0 * r2 + 1.0) / 3.0;
    t.B = 4.0 * r * q2 * q2 * q2;
    t.C = -2.0 * (r2 * r2 - 1.0) * (r2 * r2 - 1.0);
    return t;
}

inline SurfaceSpec klein_bottle_4_ends() {
    auto ctx = std::make_shared<const EllipticContext>(square_normalized());
    const KleinTables T = klein_tables(ctx);
    const cplx w1 = ctx->omega(1), w3 = ctx->omega(3), w2 = ctx->omega(2);
    const cplx n1 = ctx->eta(1);
    const cplx iu(0.0, 1.0);
    const double L = std::abs(w1);

    SurfaceSpec spec;
    spec.family = "klein_bottle_4_ends";
    spec.description =
        "Klein bottle with four embedded planar ends, stored through its "
        "orientation double cover: eight ends on the square torus with the "
        "untwisted frame, descending through conjugation composed with a "
        "half-period shift";
    spec.symmetry = "quarter-turn symmetry exchanging the two kernel sections";
    spec.domain_kind = Domain::Kind::torus;
    spec.omega1 = ctx->lattice.omega1;
    spec.omega3 = ctx->lattice.omega3;
    spec.spin_kind = SpinStructure::Kind::torus_untwisted;
    spec.spin_r = 2;
    spec.nonorientable = true;
    spec.lift_sign = 1;
    spec.ends.assign(T.ends.begin(), T.ends.end());
    spec.end_orders = std::vector<int>(8, -2);

    // Cycle base with clearance from the ends and from the frame points.
    {
        std::vector<cplx> keep(spec.ends);
        keep.push_back(0.0);
        keep.push_back(w2);
        const std::array<std::pair<double, double>, 5> cand = {
            std::make_pair(0.081, 0.173), std::make_pair(0.137, 0.211),
            std::make_pair(0.064, 0.289), std::make_pair(0.173, 0.081),
            std::make_pair(0.229, 0.357)};
        double best = -1.0;
        for (const auto& fr : cand) {
            const cplx base = fr.first * 2.0 * w1 + fr.second * 2.0 * w3;
            double clear = 1e300;
            for (int leg = 0; leg < 2; ++leg) {
                const cplx dir = leg == 0 ? 2.0 * w1 : 2.0 * w3;
                for (int s = 0; s <= 96; ++s) {
                    const cplx z = base + (s / 96.0) * dir;
                    for (cplx p : keep) clear = std::min(clear, ctx->distance(z, p));
                }
            }
            if (clear > best) {
                best = clear;
                spec.cycle_base = base;
            }
        }
        if (best < 0.03 * L)
            throw ConvergenceError("klein_bottle_4_ends: no clear cycle base");
    }

    // Period coefficients: closed forms against direct quadrature over the
    // full torus cycle (which doubles the quotient-cycle values).
    const cplx P11 = T.A * n1 + T.B * w1;
    const cplx P22 = T.A * n1 - T.B * w1;
    const cplx P12 = T.C * n1;
    {
        Domain dom = Domain::torus(ctx);
        SpinStructure spin = SpinStructure::untwisted(2);
        auto basis = detail::wp_ratio_basis(dom, spin, ctx, spec.ends);
        std::vector<cplx> a1(8, 0.0), a2(8, 0.0);
        for (int g = 0; g < 4; ++g) {
            a1[static_cast<std::size_t>(g)] = T.c1[static_cast<std::size_t>(g)];
            a2[static_cast<std::size_t>(g)] = T.c2[static_cast<std::size_t>(g)];
        }
        SpinorPair hat(detail::combine_basis(basis, a1),
                       detail::combine_basis(basis, a2));
        const Periods q = periods(hat, segment(spec.cycle_base, spec.cycle_base + 2.0 * w1));
        const double qs = std::max({1.0, std::abs(q.p11), std::abs(q.p22), std::abs(q.p12)});
        if (std::abs(q.p11 - 2.0 * P11) > 1e-6 * qs ||
            std::abs(q.p22 - 2.0 * P22) > 1e-6 * qs ||
            std::abs(q.p12 - 2.0 * P12) > 1e-6 * qs)
            throw ConvergenceError(
                "klein_bottle_4_ends: closed-form periods disagree with "
                "quadrature");
    }

    // The single closure equation for x = coefficient of the first kernel
    // section; the quarter-turn symmetry closes the other cycle for free.
    const cplx disc = P12 * P12 - P11 * P22;
    if (std::abs(P11) < 1e-10 * std::max({std::abs(P12), std::abs(P22), 1.0}))
        throw ConvergenceError("klein_bottle_4_ends: ill-conditioned closure");
    const cplx x1 = (-P12 + std::sqrt(disc)) / P11;
    if (std::abs(x1 * x1 * P11 + 2.0 * x1 * P12 + P22) >
        1e-9 * std::max({std::abs(P11), std::abs(P22)}))
        throw ConvergenceError("klein_bottle_4_ends: closure equation residual");

    std::array<cplx, 4> d;
    for (int g = 0; g < 4; ++g)
        d[static_cast<std::size_t>(g)] = x1 * T.c1[static_cast<std::size_t>(g)] +
                                         T.c2[static_cast<std::size_t>(g)];
    spec.coeff1.assign(8, 0.0);
    spec.coeff2.assign(8, 0.0);
    for (int g = 0; g < 4; ++g)
        spec.coeff1[static_cast<std::size_t>(g)] = d[static_cast<std::size_t>(g)];
    // Antilinear image: conj composed with the involution sends the even
    // combination at p to the odd combination at the conjugate-partner slot
    // (indices 3 and 4 swap), scaled by -i / (2 (1 - conj(p))).
    {
        const int partner[4] = {0, 1, 3, 2};
        for (int g = 0; g < 4; ++g) {
            const cplx pg = T.p[static_cast<std::size_t>(g)];
            spec.coeff2[static_cast<std::size_t>(4 + partner[g])] =
                -iu * std::conj(d[static_cast<std::size_t>(g)]) /
                (2.0 * (1.0 - std::conj(pg)));
        }
        // The odd-side coordinates must land in the kernel of W.
        double wscale = T.W.max_abs(), bscale = 0.0;
        for (int g = 0; g < 4; ++g)
            bscale = std::max(bscale,
                              std::abs(spec.coeff2[static_cast<std::size_t>(4 + g)]));
        for (int row = 0; row < 4; ++row) {
            cplx s = 0.0;
            for (int col = 0; col < 4; ++col)
                s += T.W(row, col) * spec.coeff2[static_cast<std::size_t>(4 + col)];
            if (std::abs(s) > 1e-8 * wscale * std::max(bscale, 1e-300))
                throw ConvergenceError(
                    "klein_bottle_4_ends: descended section leaves the kernel");
        }
    }

    spec.moduli = {{"m", T.m}, {"r", T.r}, {"a", T.a}, {"x1", x1}};

    RealizedSurface rs = realize(spec);

    // Direct numerical check of the antilinear descent relation with the
    // frozen frame factor h = wp' / (2 (wp + 1)).
    {
        auto I = [w1](cplx u) { return std::conj(u) + w1; };
        auto h = [&](cplx u) {
            return ctx->wp_prime(u) / (2.0 * (ctx->wp(u) + 1.0));
        };
        double worst = 0.0;
        for (int s = 0; s < 12; ++s) {
            const cplx u = spec.cycle_base + (0.031 + 0.059 * s) * w1 +
                           (0.047 + 0.071 * s) * w3;
            const cplx lhs = rs.pair.s2.f(u);
            const cplx rhs = -iu * std::conj(rs.pair.s1.f(I(u))) * h(u);
            worst = std::max(worst, std::abs(lhs - rhs) /
                                        std::max({1.0, std::abs(lhs), std::abs(rhs)}));
        }
        if (worst > 1e-8)
            throw ConvergenceError(
                "klein_bottle_4_ends: antilinear descent relation failed");
    }

    for (const Curve& cyc : rs.cycles) {
        const Periods p = periods(rs.pair, cyc);
        if (!p.ok)
            throw ConvergenceError("klein_bottle_4_ends: period closure failed");
    }
    const double rad = 0.12;
    for (cplx p : spec.ends) {
        const EndCheck ec = end_check(rs.pair, p, rad);
        if (!ec.embedded_planar)
            throw ConvergenceError("klein_bottle_4_ends: end is not embedded planar");
    }
    {
        CompatibilityReport rep = nonorientable_compatibility(
            rs.pair, rs.involution, spec.lift_sign, 100, 1e-7);
        if (!rep.compatible)
            throw ConvergenceError(
                "klein_bottle_4_ends: sections do not descend through the "
                "involution");
    }

    // Closed-form zero set of the first section: the frame zero at 0, the
    // point omega_2, and the three wp-preimages of the cubic factor of the
    // combined numerator.  None of them may meet its involution image.
    {
        std::array<cplx, 4> cubic{};  // coefficients of sum_g d_g prod_{h != g} (P - p_h)
        for (int g = 0; g < 4; ++g) {
            std::array<cplx, 4> poly{};
            poly[0] = 1.0;
            int deg = 0;
            for (int hh = 0; hh < 4; ++hh) {
                if (hh == g) continue;
                std::array<cplx, 4> next{};
                for (int kk = 0; kk <= deg; ++kk) {
                    next[static_cast<std::size_t>(kk + 1)] +=
                        poly[static_cast<std::size_t>(kk)];
                    next[static_cast<std::size_t>(kk)] -=
                        T.p[static_cast<std::size_t>(hh)] *
                        poly[static_cast<std::size_t>(kk)];
                }
                poly = next;
                ++deg;
            }
            for (int kk = 0; kk < 4; ++kk)
                cubic[static_cast<std::size_t>(kk)] +=
                    d[static_cast<std::size_t>(g)] * poly[static_cast<std::size_t>(kk)];
        }
        cplx csum = 0.0;
        for (cplx v : d) csum += v;
        if (std::abs(csum) < 1e-8 || std::abs(cubic[3] - csum) > 1e-8 * std::abs(csum))
            throw ConvergenceError("klein_bottle_4_ends: top coefficient vanished");
        const std::vector<cplx> cubic_roots =
            poly_roots({cubic[0], cubic[1], cubic[2], cubic[3]});
        std::vector<cplx> zero_set = {0.0, ctx->reduce(w2).u};
        for (cplx pr : cubic_roots) {
            const cplx uz = ctx->reduce(invert_wp(*ctx, pr)).u;
            zero_set.push_back(uz);
            zero_set.push_back(ctx->reduce(-uz).u);
        }
        auto I = [w1](cplx u) { return std::conj(u) + w1; };
        double margin = 1e300;
        for (cplx z : zero_set)
            for (cplx zz : zero_set)
                margin = std::min(margin, ctx->distance(I(z), zz));
        if (margin < 1e-3 * L)
            throw ConvergenceError(
                "klein_bottle_4_ends: a section zero meets its involution image");
        spec.moduli.push_back({"zero_margin", margin});
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Three-end obstructions on the torus
//
// With the translation-invariant frame, a second kernel section over three
// ends would force the wp' values at two of them to cancel, which pins the
// lattice invariant g2 to the value below; with an untwisted frame the
// unique candidate section is forced to vanish at a half period, placing an
// end there.  Both routes rule the configuration out; the helpers expose the
// quantities the arguments turn on.

inline cplx twisted_three_end_g2(cplx p1, cplx p2) {
    return 4.0 * (p1 * p1 + p1 * p2 + p2 * p2);
}

// Points v with wp'(v) = -wp'(a1): the partners that satisfy the forced
// cancellation.  The trivial partner -a1 is included.
inline std::vector<cplx> opposite_slope_points(const EllipticContext& ctx, cplx a1) {
    const cplx w0 = ctx.wp_prime(a1);
    const std::vector<cplx> pv =
        poly_roots({-ctx.g3 - w0 * w0, -ctx.g2, 0.0, 4.0});
    std::vector<cplx> out;
    for (cplx p : pv) {
        cplx v = ctx.reduce(invert_wp(ctx, p)).u;
        const cplx d = ctx.wp_prime(v);
        if (std::abs(d + w0) > std::abs(d - w0)) v = ctx.reduce(-v).u;
        if (std::abs(ctx.wp_prime(v) + w0) <= 1e-8 * std::max(1.0, std::abs(w0)))
            out.push_back(v);
    }
    return out;
}

// The unique candidate kernel section over ends {a1, ...} for the untwisted
// frame with index r: pole at a1, zero pinned at omega_r.
inline SpinorSection untwisted_three_end_section(
    const std::shared_ptr<const EllipticContext>& ctx, int r, cplx a1) {
    const cplx wr = ctx->omega(r);
    const cplx C = ctx->zeta(wr) - ctx->zeta(wr - a1);
    SpinorSection s;
    s.domain = Domain::torus(ctx);
    s.spin = SpinStructure::untwisted(r);
    auto c = ctx;
    s.f = [c, a1, C](cplx u) { return c->zeta(u - a1) - c->zeta(u) + C; };
    s.poles = {{a1, -1}};
    return s;
}

// Zero set of the function part of that section: both zeros in closed form.
inline std::array<cplx, 2> untwisted_three_end_zeros(const EllipticContext& ctx,
                                                     int r, cplx a1) {
    return {ctx.omega(r), ctx.reduce(a1 - ctx.omega(r)).u};
}

// ---------------------------------------------------------------------------
// Catalog directory

struct CatalogEntry {
    std::string name;
    std::string parameters;  // human-readable parameter summary
    std::string origin;      // construction the entry comes from
};

inline std::vector<CatalogEntry> catalog_entries() {
    return {
        {"sphere_4_ends", "none",
         "closed-form kernel pair over the hexagonal four-end configuration"},
        {"sphere_6_ends", "--sigma s1,s2,s3 (complex, on the degeneracy locus)",
         "polynomial kernel pair over quartic-root ends plus 0 and infinity"},
        {"projective_plane_3_ends", "--c c1,c2,c3 (real, on the boundary surface)",
         "antipodal quotient of a symmetric six-end sphere datum"},
        {"moebius_strip", "none",
         "explicit limit datum on the punctured plane, total curvature -6 pi"},
        {"torus_4_ends", "--tau a+bi (lattice ratio)",
         "half-lattice ends with identically vanishing pairing matrix"},
        {"klein_bottle_4_ends", "none",
         "conjugation quotient of an eight-end square torus datum"},
    };
}

struct CatalogBuildOptions {
    std::optional<cplx> tau;
    std::optional<std::array<cplx, 3>> sigma;
    std::optional<std::array<double, 3>> c;
};

inline SurfaceSpec build_catalog(const std::string& name,
                                 const CatalogBuildOptions& opt = {}) {
    if (name == "sphere_4_ends") return sphere_4_ends();
    if (name == "sphere_6_ends") {
        const std::array<cplx, 3> s =
            opt.sigma.value_or(std::array<cplx, 3>{2.0, -8.0 / 3.0, 2.0});
        return sphere_6_ends(s[0], s[1], s[2]);
    }
    if (name == "projective_plane_3_ends") {
        std::array<double, 3> c{};
        if (opt.c) {
            c = *opt.c;
        } else {
            const std::vector<double> roots = projective_plane_solve_c3(0.6, 0.5);
            if (roots.empty())
                throw ConvergenceError("build_catalog: no default boundary point");
            c = {0.6, 0.5, roots.front()};
        }
        return projective_plane_3_ends(c);
    }
    if (name == "moebius_strip") return moebius_strip_datum();
    if (name == "torus_4_ends") {
        const cplx tau = opt.tau.value_or(cplx(0.21, 1.37));
        if (tau.imag() <= 0.0)
            throw std::invalid_argument("build_catalog: tau must have Im > 0");
        return torus_4_ends(Lattice(1.0, tau));
    }
    if (name == "klein_bottle_4_ends") return klein_bottle_4_ends();
    throw std::invalid_argument("build_catalog: unknown family " + name);
}

}  // namespace spinor
