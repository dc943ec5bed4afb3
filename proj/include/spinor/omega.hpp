#pragma once

// The pairing form on the space of sections with simple poles at a divisor of
// ends, built from closed-form bases on the sphere and on tori with either
// spin structure, plus extraction of the subspace of sections with vanishing
// constant terms.
//
// Matrix entries come from closed formulas; an independent oracle recomputes
// every entry from Laurent data of the basis sections at the ends.  The two
// routes share no code, which is what makes the oracle worth having.

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spinor/complex_linalg.hpp"
#include "spinor/elliptic.hpp"
#include "spinor/numeric.hpp"
#include "spinor/spin_core.hpp"

namespace spinor {

struct EndDivisor {
    Domain domain;
    std::vector<cplx> points;

    int n() const { return static_cast<int>(points.size()); }

    static EndDivisor sphere(std::vector<cplx> pts) {
        return {Domain::sphere(), std::move(pts)};
    }
    static EndDivisor torus(std::shared_ptr<const EllipticContext> ctx,
                            std::vector<cplx> pts) {
        return {Domain::torus(std::move(ctx)), std::move(pts)};
    }

    double distance(cplx a, cplx b) const {
        if (domain.kind == Domain::Kind::torus) return domain.ctx->distance(a, b);
        if (is_infinity(a) || is_infinity(b))
            return (is_infinity(a) && is_infinity(b)) ? 0.0 : 1e300;
        return std::abs(a - b);
    }

    void require_distinct() const {
        double scale = 1.0;
        for (cplx p : points)
            if (!is_infinity(p)) scale = std::max(scale, std::abs(p));
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = i + 1; j < points.size(); ++j)
                if (distance(points[i], points[j]) < 1e-8 * scale)
                    throw std::invalid_argument("EndDivisor: coincident ends");
    }
};

struct OmegaSystem {
    EndDivisor ends;
    SpinStructure spin;
    std::vector<SpinorSection> basis;  // basis of the pole-divisor section space
    ComplexMatrix matrix;              // skew pairing matrix in that basis
    int H_dim = 0;                     // holomorphic subspace dimension
    int h_index = -1;                  // twisted torus: basis index of the
                                       // holomorphic generator
    bool normalized = false;           // a coordinate move was applied internally
    cplx normalization_param = 0.0;    // sphere: 1/(z-c); torus: u - c
    double entry_scale = 1.0;          // magnitude of the closed-form terms
                                       // before cancellation; a matrix far
                                       // below this scale is numerically zero
};

namespace detail {

inline SpinorSection combine_sections(const std::vector<SpinorSection>& basis,
                                      const std::vector<cplx>& c) {
    if (basis.empty() || basis.size() != c.size())
        throw std::invalid_argument("combine_sections: size mismatch");
    std::vector<std::function<cplx(cplx)>> fs;
    fs.reserve(basis.size());
    for (const auto& b : basis) fs.push_back(b.f);
    auto coeffs = c;
    SpinorSection out;
    out.domain = basis.front().domain;
    out.spin = basis.front().spin;
    out.f = [fs, coeffs](cplx z) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < fs.size(); ++i)
            if (coeffs[i] != cplx(0.0)) s += coeffs[i] * fs[i](z);
        return s;
    };
    return out;
}

// Radius for Laurent work at end p: a fixed fraction of the distance to the
// nearest other special point (ends, frame degeneracies, lattice translates).
inline double extraction_radius(const OmegaSystem& sys, cplx p) {
    const auto& dom = sys.ends.domain;
    double dmin = 1e300;
    auto consider = [&](cplx q) {
        const double d = sys.ends.distance(p, q);
        if (d > 1e-12) dmin = std::min(dmin, d);
    };
    for (cplx q : sys.ends.points)
        if (sys.ends.distance(p, q) > 1e-12) consider(q);
    if (dom.kind == Domain::Kind::torus) {
        consider(0.0);
        if (sys.spin.kind == SpinStructure::Kind::torus_untwisted)
            consider(dom.ctx->omega(sys.spin.r));
        const cplx w1 = dom.ctx->lattice.omega1, w3 = dom.ctx->lattice.omega3;
        dmin = std::min(dmin, std::min({std::abs(w1), std::abs(w3),
                                        std::abs(w1 + w3), std::abs(w1 - w3)}));
    } else if (!is_infinity(p)) {
        // The sphere chart works near p; keep clear of the far chart.
        dmin = std::min(dmin, 1.0 + std::abs(p));
    }
    if (!(dmin < 1e300))
        throw std::invalid_argument("extraction_radius: isolated end not found");
    return 0.35 * dmin;
}

// Laurent data of a section against the local frame at end p, including the
// chart at infinity on the sphere (w = 1/z, phi_dz = (i/w) phi_dw).
inline LaurentData local_frame_data(const OmegaSystem& sys, const SpinorSection& s,
                                    cplx p) {
    if (is_infinity(p)) {
        auto floc = [&s](cplx w) { return s.f(1.0 / w) * (cplx(0.0, 1.0) / w); };
        double dmin = 1e300;
        for (cplx q : sys.ends.points) {
            if (is_infinity(q) || std::abs(q) < 1e-12) continue;
            dmin = std::min(dmin, 1.0 / std::abs(q));
        }
        if (!(dmin < 1e300)) dmin = 1.0;
        return laurent_extract(floc, 0.0, 0.35 * dmin);
    }
    const double rho = extraction_radius(sys, p);
    if (sys.spin.kind == SpinStructure::Kind::torus_untwisted)
        return laurent_extract_local_frame(s, p, rho);
    return laurent_extract(s.f, p, rho);
}

}  // namespace detail

// Pairing matrix recomputed end-by-end from Laurent data: entry (i, j) is the
// sum over ends of (residue coefficient of basis_j) * (constant coefficient
// of basis_i), both against the local frame at the end.
inline ComplexMatrix omega_matrix_by_xi(const OmegaSystem& sys) {
    const int n = static_cast<int>(sys.basis.size());
    const int ne = sys.ends.n();
    std::vector<std::vector<LaurentData>> L(n);
    for (int i = 0; i < n; ++i)
        for (int e = 0; e < ne; ++e)
            L[i].push_back(detail::local_frame_data(sys, sys.basis[i], sys.ends.points[e]));
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx sum = 0.0;
            for (int e = 0; e < ne; ++e) sum += L[j][e].a_minus1() * L[i][e].a0();
            m(i, j) = sum;
        }
    return m;
}

// Sphere: with ends {a_1, ..., a_{n-1}, inf}, the basis is
// {phi/(z - a_i), ..., phi} and the pairing matrix is 1/(a_j - a_i) in the
// finite block, -+1 against the last basis element.  A divisor without inf is
// normalized by z -> 1/(z - c) sending its last end to infinity; the basis is
// pulled back so the returned sections live in the caller's coordinate.
inline OmegaSystem omega_sphere(EndDivisor ends) {
    if (ends.domain.kind != Domain::Kind::sphere)
        throw std::invalid_argument("omega_sphere: sphere divisor required");
    if (ends.n() < 1) throw std::invalid_argument("omega_sphere: empty divisor");
    ends.require_distinct();

    OmegaSystem sys;
    sys.spin = SpinStructure::sphere_dz();
    sys.H_dim = 0;

    // Move inf to the back; normalize if absent.
    std::vector<cplx> pts = ends.points;
    auto it = std::find_if(pts.begin(), pts.end(), [](cplx p) { return is_infinity(p); });
    cplx c = 0.0;
    bool need_move = (it == pts.end());
    if (!need_move) {
        std::rotate(it, it + 1, pts.end());
    } else {
        c = pts.back();  // this end goes to infinity
    }
    sys.normalized = need_move;
    sys.normalization_param = c;
    sys.ends = EndDivisor::sphere(pts);

    const int n = static_cast<int>(pts.size());
    // Normalized finite ends b_i.
    std::vector<cplx> b(n - 1);
    for (int i = 0; i < n - 1; ++i)
        b[i] = need_move ? 1.0 / (pts[i] - c) : pts[i];

    ComplexMatrix m(n, n);
    for (int i = 0; i < n - 1; ++i)
        for (int j = 0; j < n - 1; ++j)
            if (i != j) m(i, j) = 1.0 / (b[j] - b[i]);
    for (int i = 0; i < n - 1; ++i) {
        m(i, n - 1) = -1.0;
        m(n - 1, i) = 1.0;
    }
    sys.matrix = m;
    sys.entry_scale = std::max(1.0, m.max_abs());

    const cplx iu(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        std::function<cplx(cplx)> f;
        if (!need_move) {
            if (i < n - 1) {
                const cplx a = b[i];
                f = [a](cplx z) { return 1.0 / (z - a); };
            } else {
                f = [](cplx) { return cplx(1.0); };
            }
        } else {
            // Pull back through z' = 1/(z - c): phi' = (i/(z - c)) phi.
            if (i < n - 1) {
                const cplx a = b[i];
                f = [a, c, iu](cplx z) {
                    return iu / ((1.0 / (z - c) - a) * (z - c));
                };
            } else {
                f = [c, iu](cplx z) { return iu / (z - c); };
            }
        }
        SpinorSection s;
        s.domain = Domain::sphere();
        s.spin = sys.spin;
        s.f = std::move(f);
        s.poles.push_back({pts[i], -1});
        sys.basis.push_back(std::move(s));
    }
    return sys;
}

// Twisted torus (phi0^2 = du): ends {0, a_1, ..., a_{n-1}}, basis
// {phi0, (zeta(u - a_i) - zeta(u) + zeta(a_i)) phi0}.  A divisor without a
// lattice-point end is translated so its first end sits at 0.
inline OmegaSystem omega_twisted_torus(EndDivisor ends) {
    if (ends.domain.kind != Domain::Kind::torus)
        throw std::invalid_argument("omega_twisted_torus: torus divisor required");
    ends.require_distinct();
    const auto ctx = ends.domain.ctx;

    std::vector<cplx> pts = ends.points;
    int zero_count = 0;
    std::size_t zero_at = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (ctx->distance(pts[i]) < 1e-9) {
            ++zero_count;
            zero_at = i;
        }
    if (zero_count > 1)
        throw std::invalid_argument("omega_twisted_torus: several ends on the lattice");

    OmegaSystem sys;
    sys.spin = SpinStructure::twisted();
    sys.H_dim = 1;
    cplx shift = 0.0;
    if (zero_count == 1) {
        std::swap(pts[0], pts[zero_at]);
        pts[0] = 0.0;
    } else {
        shift = pts[0];
        sys.normalized = true;
        sys.normalization_param = shift;
        for (auto& p : pts) p -= shift;
        pts[0] = 0.0;
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (ctx->distance(pts[i]) < 1e-9)
                throw std::invalid_argument(
                    "omega_twisted_torus: translated end lands on the lattice");
    }
    sys.ends = EndDivisor::torus(ctx, pts);
    for (auto& p : sys.ends.points) p += shift;  // report ends in caller frame
    sys.h_index = 0;

    const int n = static_cast<int>(pts.size());
    ComplexMatrix m(n, n);
    double scale = 1.0;
    for (int i = 1; i < n; ++i)
        for (int j = 1; j < n; ++j) {
            if (i == j) continue;
            const cplx pi_ = ctx->wp(pts[i]), pj = ctx->wp(pts[j]);
            const cplx ppi = ctx->wp_prime(pts[i]), ppj = ctx->wp_prime(pts[j]);
            m(i, j) = 0.5 * (ppj + ppi) / (pj - pi_);
            scale = std::max(scale,
                             0.5 * std::max(std::abs(ppi), std::abs(ppj)) / std::abs(pj - pi_));
        }
    sys.matrix = m;
    sys.entry_scale = scale;

    for (int i = 0; i < n; ++i) {
        SpinorSection s;
        s.domain = ends.domain;
        s.spin = sys.spin;
        if (i == 0) {
            s.f = [](cplx) { return cplx(1.0); };
        } else {
            const cplx a = pts[i];
            const cplx za = ctx->zeta(a);
            auto cptr = ctx;
            s.f = [cptr, a, za, shift](cplx u) {
                const cplx v = u - shift;
                return cptr->zeta(v - a) - cptr->zeta(v) + za;
            };
            s.poles.push_back({sys.ends.points[i], -1});
        }
        sys.basis.push_back(std::move(s));
    }
    return sys;
}

// Untwisted torus (phi_r^2 = du / wp_r).  Unpaired: basis t_i with a simple
// pole at a_i and entries (t_i/phi_r)(a_j) / wp_r(a_j); the frame factor
// 1/wp_r(a_j) is what makes the table skew.  Paired (ends {a_i} u {-a_i}):
// basis sqrt(2) wp_r/(wp_r - p_i) phi_r and -sqrt(2) wp'/(wp_r - p_i) phi_r,
// giving the block matrix [[0, W], [-W^t, 0]] with W_ij = 4/(p_i - p_j) and
// the wp'-free diagonal.
inline OmegaSystem omega_untwisted_torus(int r, EndDivisor ends, bool paired) {
    if (ends.domain.kind != Domain::Kind::torus)
        throw std::invalid_argument("omega_untwisted_torus: torus divisor required");
    if (r < 1 || r > 3) throw std::invalid_argument("omega_untwisted_torus: r must be 1..3");
    ends.require_distinct();
    const auto ctx = ends.domain.ctx;
    const cplx er = ctx->e(r);
    const cplx wr = ctx->omega(r);
    for (cplx p : ends.points)
        if (ctx->distance(p) < 1e-9 || ctx->distance(p, wr) < 1e-9)
            throw std::invalid_argument(
                "omega_untwisted_torus: ends must avoid the frame divisor");

    OmegaSystem sys;
    sys.spin = SpinStructure::untwisted(r);
    sys.H_dim = 0;
    sys.ends = ends;

    auto wp_r = [&](cplx u) { return ctx->wp(u) - er; };
    const int n = ends.n();

    if (!paired) {
        ComplexMatrix m(n, n);
        std::vector<cplx> p(n), pp(n);
        for (int i = 0; i < n; ++i) {
            p[i] = wp_r(ends.points[i]);
            pp[i] = ctx->wp_prime(ends.points[i]);
        }
        double scale = 1.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                // (t_i/phi_r)(a_j) / wp_r(a_j)
                const cplx den = p[i] * (p[j] - p[i]) * p[j];
                m(i, j) = 0.5 * (p[j] * pp[i] + pp[j] * p[i]) / den;
                scale = std::max(scale, 0.5 *
                                            std::max(std::abs(p[j] * pp[i]),
                                                     std::abs(pp[j] * p[i])) /
                                            std::abs(den));
            }
        sys.matrix = m;
        sys.entry_scale = scale;
        for (int i = 0; i < n; ++i) {
            const cplx a = ends.points[i];
            const cplx pi_ = p[i], ppi = pp[i];
            auto cptr = ctx;
            SpinorSection s;
            s.domain = ends.domain;
            s.spin = sys.spin;
            s.f = [cptr, er, a, pi_, ppi](cplx u) {
                const cplx pu = cptr->wp(u) - er;
                return 0.5 * (pu * ppi + cptr->wp_prime(u) * pi_) / (pi_ * (pu - pi_));
            };
            s.poles.push_back({a, -1});
            sys.basis.push_back(std::move(s));
        }
        return sys;
    }

    // Pair up the ends as {a_i} followed by {-a_i}.
    std::vector<cplx> pos;
    std::vector<bool> used(ends.points.size(), false);
    const double scale = std::abs(ctx->lattice.omega1) + std::abs(ctx->lattice.omega3);
    for (std::size_t i = 0; i < ends.points.size(); ++i) {
        if (used[i]) continue;
        if (ctx->distance(ends.points[i], -ends.points[i]) < 1e-8 * scale)
            throw std::invalid_argument(
                "omega_untwisted_torus: half-period end cannot be paired");
        bool found = false;
        for (std::size_t j = i + 1; j < ends.points.size(); ++j) {
            if (used[j]) continue;
            if (ctx->distance(ends.points[j], -ends.points[i]) < 1e-8 * scale) {
                used[i] = used[j] = true;
                pos.push_back(ends.points[i]);
                found = true;
                break;
            }
        }
        if (!found)
            throw std::invalid_argument(
                "omega_untwisted_torus: ends are not symmetric under negation");
    }
    const int mdim = static_cast<int>(pos.size());
    std::vector<cplx> reordered(pos);
    for (cplx a : pos) reordered.push_back(-a);
    sys.ends = EndDivisor::torus(ctx, reordered);

    int ip = r % 3 + 1, iq = ip % 3 + 1;  // the two indices other than r
    const cplx cp = ctx->e(ip) - er, cq = ctx->e(iq) - er;
    std::vector<cplx> p(mdim);
    for (int i = 0; i < mdim; ++i) p[i] = wp_r(pos[i]);

    ComplexMatrix W(mdim, mdim);
    double wscale = 1.0;
    for (int i = 0; i < mdim; ++i)
        for (int j = 0; j < mdim; ++j) {
            if (i == j) {
                const cplx den = p[i] * (p[i] - cp) * (p[i] - cq);
                W(i, i) = (p[i] * p[i] - cp * cq) / den;
                wscale = std::max(wscale, std::max(std::abs(p[i] * p[i]),
                                                   std::abs(cp * cq)) /
                                              std::abs(den));
            } else {
                W(i, j) = 4.0 / (p[i] - p[j]);
                wscale = std::max(wscale, std::abs(W(i, j)));
            }
        }
    ComplexMatrix m(2 * mdim, 2 * mdim);
    for (int i = 0; i < mdim; ++i)
        for (int j = 0; j < mdim; ++j) {
            m(i, mdim + j) = W(i, j);
            m(mdim + j, i) = -W(i, j);
        }
    sys.matrix = m;
    sys.entry_scale = wscale;

    const double rt2 = std::sqrt(2.0);
    for (int kind = 0; kind < 2; ++kind)
        for (int i = 0; i < mdim; ++i) {
            const cplx pi_ = p[i];
            auto cptr = ctx;
            SpinorSection s;
            s.domain = ends.domain;
            s.spin = sys.spin;
            if (kind == 0) {
                s.f = [cptr, er, pi_, rt2](cplx u) {
                    const cplx pu = cptr->wp(u) - er;
                    return rt2 * pu / (pu - pi_);
                };
            } else {
                s.f = [cptr, er, pi_, rt2](cplx u) {
                    const cplx pu = cptr->wp(u) - er;
                    return -rt2 * cptr->wp_prime(u) / (pu - pi_);
                };
            }
            s.poles.push_back({pos[i], -1});
            s.poles.push_back({-pos[i], -1});
            sys.basis.push_back(std::move(s));
        }
    return sys;
}

struct KSpace {
    std::vector<std::vector<cplx>> coords;  // in the system basis
    std::vector<SpinorSection> sections;
    int dim = 0;
    double max_a0 = 0.0;  // worst constant-term residual over ends
};

// Kernel of the pairing matrix with the holomorphic direction projected out.
// Every returned section is checked to have vanishing constant term against
// the local frame at every end.
inline KSpace extract_K(const OmegaSystem& sys, double threshold_scale = 1e-8,
                        double a0_tol = 1e-9) {
    const int n = static_cast<int>(sys.basis.size());
    RankKernel rk;
    if (sys.matrix.max_abs() < 1e-9 * sys.entry_scale) {
        rk.rank = 0;
        rk.kernel.dim = n;
        rk.kernel.rank_threshold = 0.0;
        for (int i = 0; i < n; ++i) {
            std::vector<cplx> e(n, 0.0);
            e[i] = 1.0;
            rk.kernel.vectors.push_back(std::move(e));
        }
    } else {
        rk = rank_kernel(sys.matrix, threshold_scale);
    }

    // Scale for the a0 residual: the pole coefficients of the section.
    auto a0_profile = [&](const std::vector<cplx>& v, double& worst, double& pole_scale) {
        SpinorSection s = detail::combine_sections(sys.basis, v);
        worst = 0.0;
        pole_scale = 0.0;
        for (cplx p : sys.ends.points) {
            const LaurentData ld = detail::local_frame_data(sys, s, p);
            worst = std::max(worst, std::abs(ld.a0()));
            pole_scale = std::max(pole_scale, std::abs(ld.a_minus1()));
        }
        pole_scale = std::max(pole_scale, 1.0);
    };

    std::vector<std::vector<cplx>> vecs = rk.kernel.vectors;
    if (sys.h_index >= 0) {
        // Remove the holomorphic component: its value function is 1, so the
        // common constant term of the combination is exactly the coefficient
        // to subtract on the h_index coordinate.
        for (auto& v : vecs) {
            SpinorSection s = detail::combine_sections(sys.basis, v);
            cplx common = 0.0;
            bool first = true;
            for (cplx p : sys.ends.points) {
                const cplx a0 = detail::local_frame_data(sys, s, p).a0();
                if (first) {
                    common = a0;
                    first = false;
                } else if (std::abs(a0 - common) > 1e-7 * std::max(1.0, std::abs(common))) {
                    throw ConvergenceError(
                        "extract_K: constant terms disagree across ends");
                }
            }
            v[sys.h_index] -= common;
        }
        // Re-orthonormalize and drop the collapsed direction.
        std::vector<std::vector<cplx>> keep;
        for (auto& v : vecs) {
            for (const auto& u : keep) {
                cplx d = 0.0;
                for (int k = 0; k < n; ++k) d += std::conj(u[k]) * v[k];
                for (int k = 0; k < n; ++k) v[k] -= d * u[k];
            }
            double norm = 0.0;
            for (int k = 0; k < n; ++k) norm += std::norm(v[k]);
            norm = std::sqrt(norm);
            if (norm < 1e-7) continue;
            for (int k = 0; k < n; ++k) v[k] /= norm;
            keep.push_back(v);
        }
        vecs = std::move(keep);
    }

    KSpace out;
    for (auto& v : vecs) {
        double worst = 0.0, pole_scale = 0.0;
        a0_profile(v, worst, pole_scale);
        if (worst > a0_tol * pole_scale)
            throw ConvergenceError(
                "extract_K: kernel vector fails the vanishing-constant-term test");
        out.max_a0 = std::max(out.max_a0, worst / pole_scale);
        out.sections.push_back(detail::combine_sections(sys.basis, v));
        out.coords.push_back(std::move(v));
    }
    out.dim = static_cast<int>(out.coords.size());
    return out;
}

// Adjust one sphere end by damped Newton so the pairing matrix acquires a
// kernel (pfaffian driven to zero; determinant route above the pfaffian's
// size cap).  Returns the updated divisor; the final rank must be n - 2.
inline EndDivisor sphere_tune_end(EndDivisor ends, std::size_t k, int max_iter = 60) {
    if (k >= ends.points.size() || is_infinity(ends.points[k]))
        throw std::invalid_argument("sphere_tune_end: bad end index");
    const int n = ends.n();
    const bool use_pf = n <= 12;
    auto target = [&](cplx a) {
        EndDivisor e = ends;
        e.points[k] = a;
        const ComplexMatrix m = omega_sphere(e).matrix;
        return use_pf ? pfaffian(m) : determinant(m);
    };
    cplx a = ends.points[k];
    double f0 = std::abs(target(a));
    const double goal = (use_pf ? 1e-12 : 1e-24) * std::max(1.0, f0);
    for (int it = 0; it < max_iter && f0 > goal; ++it) {
        const double h = 1e-7 * std::max(1.0, std::abs(a));
        const cplx f = target(a);
        const cplx df = (target(a + h) - target(a - h)) / (2.0 * h);
        if (std::abs(df) < 1e-300) throw ConvergenceError("sphere_tune_end: flat target");
        // Double the Newton step for the determinant's double root.
        cplx step = (use_pf ? 1.0 : 2.0) * f / df;
        for (int damp = 0; damp < 12; ++damp) {
            const double fn = std::abs(target(a - step));
            if (fn < f0) {
                a -= step;
                f0 = fn;
                break;
            }
            step /= 2.0;
            if (damp == 11) throw ConvergenceError("sphere_tune_end: no descent step");
        }
    }
    if (f0 > goal) throw ConvergenceError("sphere_tune_end: Newton did not converge");
    ends.points[k] = a;
    return ends;
}

}  // namespace spinor
